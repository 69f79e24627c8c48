use std::io::Write;

use rayon::prelude::*;

use super::metrics::{ndcg_at_k_with, IdcgMode, RelevanceTable};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::motif::MotifAdjacency;
use crate::ranking::{
    format_significant, mpr_scores, rank_nodes, CombinationMode, CombinationParams, PageRankParams,
};

/// `start, start + step, …, end` with the float noise of repeated
/// addition rounded away.
pub fn alpha_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !end.is_finite() || end < start {
        return Err(Error::invalid(format!("alpha grid {start}:{end}:{step}")));
    }
    let steps = ((end - start) / step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| {
            let a = start + i as f64 * step;
            (a * 1e12).round() / 1e12
        })
        .collect();
    if let Some(bad) = grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::OutOfRange(format!("alpha {bad} (expected [0, 1])")));
    }
    Ok(grid)
}

/// Parses `start:end:step`.
pub fn parse_alpha_grid(grid: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = grid.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(Error::invalid(format!("alpha grid {grid:?}: expected start:end:step")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("alpha grid {grid:?}: {s:?} is not a number")))
    };
    alpha_grid(num(start)?, num(end)?, num(step)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub k: usize,
    pub ndcg: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub mode: CombinationMode,
    pub alphas: Vec<f64>,
    pub ks: Vec<usize>,
    pub idcg: IdcgMode,
    pub pagerank: PageRankParams,
}

/// NDCG@K of the motif PageRank ranking at each α, rows ordered by α then
/// K as given.
pub fn alpha_sweep(
    graph: &DirectedGraph,
    motif: &MotifAdjacency,
    relevance: &RelevanceTable,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    if cfg.ks.is_empty() || cfg.alphas.is_empty() {
        return Err(Error::invalid("sweep needs at least one alpha and one K"));
    }
    let kmax = *cfg.ks.iter().max().expect("non-empty");
    let per_alpha: Vec<Vec<SweepRow>> = cfg
        .alphas
        .par_iter()
        .map(|&alpha| {
            let comb = CombinationParams::new(alpha, cfg.mode)?;
            let x = mpr_scores(graph, motif, &comb, &cfg.pagerank)?;
            let ranking = rank_nodes(&x.scores, graph.nodes(), kmax)?;
            cfg.ks
                .iter()
                .map(|&k| {
                    Ok(SweepRow {
                        alpha,
                        k,
                        ndcg: ndcg_at_k_with(&ranking, relevance, k, cfg.idcg)?.value,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_alpha.into_iter().flatten().collect())
}

pub fn write_sweep_tsv<W: Write>(out: &mut W, rows: &[SweepRow], comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "alpha\tK\tndcg")?;
    for r in rows {
        writeln!(out, "{}\t{}\t{}", r.alpha, r.k, format_significant(r.ndcg, 12))?;
    }
    Ok(())
}
