use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::method::{InstanceOptions, Method};
use super::metrics::{ndcg_at_k_with, IdcgMode, RelevanceTable};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::ranking::{format_significant, rank_nodes, RankingParams};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TTest {
    /// On per-subsample differences.
    #[default]
    Paired,
    /// Unequal-variance two-sample test.
    Welch,
}

impl FromStr for TTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paired" => Ok(TTest::Paired),
            "welch" | "unpaired" => Ok(TTest::Welch),
            _ => Err(Error::invalid(format!("unknown t-test {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignificanceConfig {
    pub reps: usize,
    /// Share of nodes kept in each node-induced subsample.
    pub fraction: f64,
    pub ks: Vec<usize>,
    pub seed: u64,
    pub test: TTest,
    pub idcg: IdcgMode,
    pub ranking: RankingParams,
    pub instances: InstanceOptions,
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        SignificanceConfig {
            reps: 30,
            fraction: 0.8,
            ks: vec![10],
            seed: 0,
            test: TTest::Paired,
            idcg: IdcgMode::Local,
            ranking: RankingParams::default(),
            instances: InstanceOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
    /// Zero variance; `p` follows the exact-equality convention.
    pub degenerate: bool,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sample_var(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

fn two_sided(t: f64, df: f64) -> Result<f64> {
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Numerical(e.to_string()))?;
    Ok((2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0))
}

fn zero_variance(diff: f64, df: f64) -> TTestResult {
    let t = if diff == 0.0 { 0.0 } else { diff.signum() * f64::INFINITY };
    TTestResult {
        t,
        df,
        p_value: if diff == 0.0 { 1.0 } else { 0.0 },
        degenerate: true,
    }
}

/// Two-sided paired t-test of `a − b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::invalid(format!("paired t-test on {} and {} samples", a.len(), b.len())));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let df = n - 1.0;
    let sd = sample_var(&d).sqrt();
    if sd == 0.0 {
        return Ok(zero_variance(mean(&d), df));
    }
    let t = mean(&d) / (sd / n.sqrt());
    Ok(TTestResult {
        t,
        df,
        p_value: two_sided(t, df)?,
        degenerate: false,
    })
}

/// Two-sided Welch t-test with Welch–Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid("Welch t-test needs at least two samples per group"));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_var(a) / na, sample_var(b) / nb);
    let diff = mean(a) - mean(b);
    if va + vb == 0.0 {
        return Ok(zero_variance(diff, na + nb - 2.0));
    }
    let t = diff / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(TTestResult {
        t,
        df,
        p_value: two_sided(t, df)?,
        degenerate: false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairComparison {
    pub first: Method,
    pub second: Method,
    pub k: usize,
    pub first_ndcg: Vec<f64>,
    pub second_ndcg: Vec<f64>,
    pub test: TTestResult,
}

impl PairComparison {
    pub fn first_mean(&self) -> f64 {
        mean(&self.first_ndcg)
    }

    pub fn second_mean(&self) -> f64 {
        mean(&self.second_ndcg)
    }
}

/// Node sets of each subsample, sorted.
pub fn subsample_nodes(n: usize, cfg: &SignificanceConfig) -> Result<Vec<Vec<usize>>> {
    if cfg.reps < 2 {
        return Err(Error::invalid("significance test needs at least two repetitions"));
    }
    if !(cfg.fraction > 0.0 && cfg.fraction <= 1.0) {
        return Err(Error::OutOfRange(format!("subsample fraction {} (expected (0, 1])", cfg.fraction)));
    }
    let keep = ((n as f64 * cfg.fraction).round() as usize).clamp(1, n);
    Ok((0..cfg.reps)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut rng);
            all.truncate(keep);
            all.sort_unstable();
            all
        })
        .collect())
}

/// Compares method pairs on `reps` node-induced subsamples: every method
/// is ranked on each subsample and NDCG@K is tested pairwise.
pub fn significance_test(
    graph: &DirectedGraph,
    relevance: &RelevanceTable,
    pairs: &[(Method, Method)],
    cfg: &SignificanceConfig,
) -> Result<Vec<PairComparison>> {
    if pairs.is_empty() || cfg.ks.is_empty() {
        return Err(Error::invalid("significance test needs at least one method pair and one K"));
    }
    let mut methods: Vec<Method> = Vec::new();
    for (a, b) in pairs {
        for m in [a, b] {
            if !methods.contains(m) {
                methods.push(*m);
            }
        }
    }
    let kmax = *cfg.ks.iter().max().expect("non-empty");
    let subsamples = subsample_nodes(graph.node_count(), cfg)?;

    // ndcg[rep][method][k-index]
    let ndcg: Vec<Vec<Vec<f64>>> = subsamples
        .par_iter()
        .map(|keep| {
            let sub = graph.induced_subgraph(keep)?;
            methods
                .iter()
                .map(|m| {
                    let scores = m.scores(&sub, &cfg.ranking, &cfg.instances)?;
                    let ranking = rank_nodes(&scores, sub.nodes(), kmax)?;
                    cfg.ks
                        .iter()
                        .map(|&k| Ok(ndcg_at_k_with(&ranking, relevance, k, cfg.idcg)?.value))
                        .collect()
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let index: BTreeMap<String, usize> = methods.iter().enumerate().map(|(i, m)| (m.to_string(), i)).collect();
    let mut out = Vec::new();
    for (a, b) in pairs {
        let (ia, ib) = (index[&a.to_string()], index[&b.to_string()]);
        for (ki, &k) in cfg.ks.iter().enumerate() {
            let first: Vec<f64> = ndcg.iter().map(|rep| rep[ia][ki]).collect();
            let second: Vec<f64> = ndcg.iter().map(|rep| rep[ib][ki]).collect();
            let test = match cfg.test {
                TTest::Paired => paired_t_test(&first, &second)?,
                TTest::Welch => welch_t_test(&first, &second)?,
            };
            out.push(PairComparison {
                first: *a,
                second: *b,
                k,
                first_ndcg: first,
                second_ndcg: second,
                test,
            });
        }
    }
    Ok(out)
}

pub fn write_significance_tsv<W: Write>(out: &mut W, rows: &[PairComparison], comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "method_a\tmethod_b\tK\tmean_a\tmean_b\tt\tdf\tp_value\treps")?;
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.first,
            r.second,
            r.k,
            format_significant(r.first_mean(), 12),
            format_significant(r.second_mean(), 12),
            format_significant(r.test.t, 12),
            format_significant(r.test.df, 12),
            format_significant(r.test.p_value, 12),
            r.first_ndcg.len()
        )?;
    }
    Ok(())
}
