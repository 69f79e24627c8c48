//! Ground truth, ranking metrics and experiment protocols.

mod features;
mod method;
mod metrics;
mod significance;
mod sweep;

pub use features::{extract_features, write_features_tsv, FeatureRow};
pub use method::{build_motif_matrix, InstanceOptions, Method};
pub use metrics::{ndcg_at_k, ndcg_at_k_with, rmse, IdcgMode, Ndcg, RelevanceTable};
pub use significance::{
    paired_t_test, significance_test, subsample_nodes, welch_t_test, write_significance_tsv, PairComparison,
    SignificanceConfig, TTest, TTestResult,
};
pub use sweep::{alpha_grid, alpha_sweep, parse_alpha_grid, write_sweep_tsv, SweepConfig, SweepRow};

use std::io::Write;

use crate::error::Result;
use crate::ranking::format_significant;

impl std::str::FromStr for IdcgMode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "local" => Ok(IdcgMode::Local),
            "global" => Ok(IdcgMode::Global),
            _ => Err(crate::error::Error::invalid(format!("unknown IDCG mode {s:?}"))),
        }
    }
}

/// One `method, K, NDCG` measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct NdcgRow {
    pub method: String,
    pub k: usize,
    pub ndcg: f64,
}

pub fn write_ndcg_tsv<W: Write>(out: &mut W, rows: &[NdcgRow], comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "method\tK\tndcg")?;
    for r in rows {
        writeln!(out, "{}\t{}\t{}", r.method, r.k, format_significant(r.ndcg, 12))?;
    }
    Ok(())
}
