use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CombinationMode {
    Linear,
    NonLinear,
}

impl fmt::Display for CombinationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CombinationMode::Linear => "linear",
            CombinationMode::NonLinear => "nonlinear",
        })
    }
}

impl FromStr for CombinationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(CombinationMode::Linear),
            "nonlinear" | "non-linear" => Ok(CombinationMode::NonLinear),
            _ => Err(Error::invalid(format!("unknown combination mode {s:?}"))),
        }
    }
}

/// Balance `alpha` between edge relations (`alpha = 1`) and motif
/// relations (`alpha = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CombinationParams {
    pub alpha: f64,
    pub mode: CombinationMode,
}

impl CombinationParams {
    pub fn new(alpha: f64, mode: CombinationMode) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(CombinationParams { alpha, mode })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange(format!("alpha {alpha} (expected [0, 1])")));
    }
    Ok(())
}

/// `H = α·W + (1 − α)·W_M`.
pub fn combine_linear(w: &SparseMatrix, wm: &SparseMatrix, alpha: f64) -> Result<SparseMatrix> {
    check_alpha(alpha)?;
    w.union_with(wm, "combine_linear", |a, b| alpha * a + (1.0 - alpha) * b)
}

/// `H = W^α ⊙ W_M^(1−α)` with entrywise powers and `0⁰ = 1`, so `alpha = 1`
/// gives `W` and `alpha = 0` gives `W_M` exactly.
pub fn combine_nonlinear(w: &SparseMatrix, wm: &SparseMatrix, alpha: f64) -> Result<SparseMatrix> {
    check_alpha(alpha)?;
    w.union_with(wm, "combine_nonlinear", |a, b| a.powf(alpha) * b.powf(1.0 - alpha))
}

pub fn combine(w: &SparseMatrix, wm: &SparseMatrix, params: &CombinationParams) -> Result<SparseMatrix> {
    match params.mode {
        CombinationMode::Linear => combine_linear(w, wm, params.alpha),
        CombinationMode::NonLinear => combine_nonlinear(w, wm, params.alpha),
    }
}
