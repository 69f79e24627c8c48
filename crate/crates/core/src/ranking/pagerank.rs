use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PageRankParams {
    pub damping: f64,
    /// L1 distance between successive iterates at which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 200,
        }
    }
}

impl PageRankParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::OutOfRange(format!("damping {} (expected (0, 1))", self.damping)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::invalid(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// Row-normalized matrix; rows that sum to zero stay zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub matrix: SparseMatrix,
    pub dangling: usize,
}

/// `P_ij = H_ij / Σ_j H_ij`.
pub fn transition_matrix(h: &SparseMatrix) -> Result<Transition> {
    if !h.is_square() {
        return Err(Error::invalid(format!("transition matrix of a {:?} matrix", h.dims())));
    }
    if let Some(v) = h.values().iter().find(|&&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::invalid(format!("negative or non-finite entry {v}")));
    }
    let sums = h.row_sums();
    let dangling = sums.iter().filter(|&&s| s == 0.0).count();
    let triplets = h.iter().map(|(r, c, v)| (r, c, v / sums[r]));
    Ok(Transition {
        matrix: SparseMatrix::from_triplets(h.rows(), h.cols(), triplets)?,
        dangling,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankVector {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// L1 change in the last iteration.
    pub residual: f64,
}

/// Power iteration `x_t = d·Pᵀ x_{t−1} + (1 − d)/N · e` from `x_0 = e/N`.
///
/// Dangling rows of `P` redistribute nothing, so on graphs with dangling
/// nodes the result sums to less than one.
pub fn pagerank(p: &SparseMatrix, params: &PageRankParams) -> Result<RankVector> {
    params.validate()?;
    if !p.is_square() {
        return Err(Error::invalid(format!("pagerank on a {:?} matrix", p.dims())));
    }
    if let Some((r, s)) = p.row_sums().into_iter().enumerate().find(|&(_, s)| s > 1.0 + 1e-9) {
        return Err(Error::invalid(format!("row {r} of the transition matrix sums to {s}")));
    }
    let n = p.rows();
    if n == 0 {
        return Ok(RankVector {
            scores: Vec::new(),
            iterations: 0,
            converged: true,
            residual: 0.0,
        });
    }

    let pt = p.transpose();
    let d = params.damping;
    let teleport = (1.0 - d) / n as f64;
    let mut x = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;

    for iter in 1..=params.max_iterations {
        next.par_iter_mut().enumerate().for_each(|(j, out)| {
            let (cols, vals) = pt.row(j);
            let s: f64 = cols.iter().zip(vals).map(|(&i, &pij)| pij * x[i]).sum();
            *out = d * s + teleport;
        });
        residual = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        if !residual.is_finite() {
            return Err(Error::Numerical(format!("non-finite PageRank iterate at step {iter}")));
        }
        std::mem::swap(&mut x, &mut next);
        if residual < params.tolerance {
            return Ok(RankVector {
                scores: x,
                iterations: iter,
                converged: true,
                residual,
            });
        }
    }
    log::warn!(
        "PageRank stopped after {} iterations with residual {residual:e}",
        params.max_iterations
    );
    Ok(RankVector {
        scores: x,
        iterations: params.max_iterations,
        converged: false,
        residual,
    })
}
