use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::ranking::RankingResult;

/// Ground-truth relevance per external node id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelevanceTable {
    scores: HashMap<String, f64>,
}

impl RelevanceTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, score: f64) -> Result<()> {
        if !score.is_finite() {
            return Err(Error::invalid(format!("relevance score {score} is not finite")));
        }
        self.scores.insert(id.into(), score);
        Ok(())
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut t = RelevanceTable::new();
        for (id, s) in pairs {
            t.insert(id, s)?;
        }
        Ok(t)
    }

    /// Reads `node_id<TAB>score` lines; `#` comments and blank lines are
    /// skipped.
    pub fn load<R: BufRead>(input: R) -> Result<Self> {
        let mut t = RelevanceTable::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim_end();
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (id, score) = if line.contains('\t') {
                line.split_once('\t').expect("tab present")
            } else {
                line.split_once(char::is_whitespace).ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    message: "expected node_id<TAB>score".into(),
                })?
            };
            let score: f64 = score.trim().parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("score {score:?} is not a number"),
            })?;
            t.insert(id.trim(), score)?;
        }
        Ok(t)
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.scores.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Which ideal ordering normalizes DCG.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IdcgMode {
    /// The retrieved top-K items re-sorted by relevance.
    #[default]
    Local,
    /// The K most relevant items of the whole relevance table.
    Global,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ndcg {
    pub value: f64,
    /// Ideal DCG was zero, so the value is 1 by convention.
    pub degenerate: bool,
    /// Retrieved nodes absent from the relevance table (scored 0).
    pub missing: usize,
}

fn dcg(rels: &[f64]) -> f64 {
    rels.iter()
        .enumerate()
        .map(|(i, r)| r / ((i + 2) as f64).log2())
        .sum()
}

pub fn ndcg_at_k(ranking: &RankingResult, rel: &RelevanceTable, k: usize) -> Result<Ndcg> {
    ndcg_at_k_with(ranking, rel, k, IdcgMode::Local)
}

/// `DCG@K / IDCG@K` with `DCG@K = Σ rel_i / log₂(i + 1)`.
pub fn ndcg_at_k_with(ranking: &RankingResult, rel: &RelevanceTable, k: usize, mode: IdcgMode) -> Result<Ndcg> {
    if k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    if ranking.is_empty() {
        return Err(Error::invalid("NDCG of an empty ranking"));
    }
    let mut missing = 0;
    let retrieved: Vec<f64> = ranking
        .entries
        .iter()
        .take(k)
        .map(|e| {
            rel.get(&e.node_id).unwrap_or_else(|| {
                missing += 1;
                0.0
            })
        })
        .collect();
    if missing > 0 {
        log::debug!("{missing} ranked nodes have no relevance score; using 0");
    }
    let mut ideal: Vec<f64> = match mode {
        IdcgMode::Local => retrieved.clone(),
        IdcgMode::Global => rel.scores.values().copied().collect(),
    };
    ideal.sort_by(|a, b| b.total_cmp(a));
    ideal.truncate(k);
    let idcg = dcg(&ideal);
    if idcg == 0.0 {
        return Ok(Ndcg {
            value: 1.0,
            degenerate: true,
            missing,
        });
    }
    Ok(Ndcg {
        value: dcg(&retrieved) / idcg,
        degenerate: false,
        missing,
    })
}

/// Root mean squared error.
pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    if y.len() != yhat.len() {
        return Err(Error::invalid(format!("rmse of vectors of length {} and {}", y.len(), yhat.len())));
    }
    if y.is_empty() {
        return Err(Error::invalid("rmse of empty vectors"));
    }
    let mse = y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64;
    Ok(mse.sqrt())
}
