//! Class concentrations, Z-scores against randomized networks, and motif
//! selection.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;

use super::canonical::{CanonicalId, Classifier, Pattern};
use super::enumerate::{enumerate_subgraphs, DEFAULT_MAX_SUBGRAPHS};
use super::esa::{esa_sample, SamplingParams};
use super::randomize::randomize_graph;
use super::{MotifInstance, MotifSpec};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::ranking::format_significant;

/// How class weights are obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CensusMethod {
    Exact { max_subgraphs: u64 },
    Sampled { num_samples: usize, seed: u64 },
}

impl Default for CensusMethod {
    fn default() -> Self {
        CensusMethod::Exact {
            max_subgraphs: DEFAULT_MAX_SUBGRAPHS,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubgraphClass {
    pub canonical_id: CanonicalId,
    pub representative: Pattern,
    /// Exact count, or the inverse-probability estimate of it.
    pub weight: f64,
    pub concentration: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Census {
    pub n: usize,
    /// Sorted by canonical id.
    pub classes: Vec<SubgraphClass>,
    /// Distinct node sets seen per class, sorted.
    pub instances: BTreeMap<CanonicalId, Vec<Vec<usize>>>,
    pub diagnostic: Option<String>,
}

impl Census {
    pub fn class(&self, id: CanonicalId) -> Option<&SubgraphClass> {
        self.classes
            .binary_search_by_key(&id, |c| c.canonical_id)
            .ok()
            .map(|i| &self.classes[i])
    }

    pub fn concentration_of(&self, id: CanonicalId) -> f64 {
        self.class(id).map_or(0.0, |c| c.concentration)
    }

    /// Writes the `canonical_id  weight  concentration  z_score` table after
    /// `# key=value` comment lines. `z_score` is `NA` for classes without
    /// one.
    pub fn write_report<W: Write>(
        &self,
        out: &mut W,
        z: Option<&BTreeMap<CanonicalId, ZScore>>,
        comments: &[String],
    ) -> Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "canonical_id\tweight\tconcentration\tz_score")?;
        for c in &self.classes {
            let zs = match z.and_then(|m| m.get(&c.canonical_id)) {
                Some(z) => format_significant(z.value, 12),
                None => "NA".to_string(),
            };
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                c.canonical_id,
                format_significant(c.weight, 12),
                format_significant(c.concentration, 12),
                zs
            )?;
        }
        Ok(())
    }

    /// One instance per line, nodes comma-separated, grouped under
    /// `# class <id> <pattern>` lines.
    pub fn write_instances<W: Write>(&self, out: &mut W, ids: &[String]) -> Result<()> {
        for (class, sets) in &self.instances {
            match self.classes.iter().find(|c| c.canonical_id == *class) {
                Some(c) => writeln!(out, "# class {class} {}", c.representative)?,
                None => writeln!(out, "# class {class}")?,
            }
            for nodes in sets {
                let names: Vec<&str> = nodes.iter().map(|&v| ids[v].as_str()).collect();
                writeln!(out, "{}", names.join(","))?;
            }
        }
        Ok(())
    }
}

/// Share of each class in the total weight.
pub fn concentration(weighted: &[(CanonicalId, f64)]) -> Result<BTreeMap<CanonicalId, f64>> {
    if weighted.is_empty() {
        return Err(Error::invalid("concentration of an empty sample"));
    }
    let mut sums: BTreeMap<CanonicalId, f64> = BTreeMap::new();
    for &(id, w) in weighted {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::invalid(format!("sample weight {w}")));
        }
        *sums.entry(id).or_insert(0.0) += w;
    }
    let total: f64 = sums.values().sum();
    if total <= 0.0 {
        return Err(Error::invalid("samples carry zero total weight"));
    }
    Ok(sums.into_iter().map(|(id, w)| (id, w / total)).collect())
}

/// Class weights and concentrations of all weakly connected `n`-node
/// subgraphs of `graph`.
pub fn census(graph: &DirectedGraph, n: usize, method: CensusMethod, keep_instances: bool) -> Result<Census> {
    graph.require_unweighted()?;
    let mut reps: BTreeMap<CanonicalId, Pattern> = BTreeMap::new();
    let mut weighted: Vec<(CanonicalId, f64)> = Vec::new();
    let mut instances: BTreeMap<CanonicalId, Vec<Vec<usize>>> = BTreeMap::new();
    let mut diagnostic = None;

    match method {
        CensusMethod::Exact { max_subgraphs } => {
            let e = enumerate_subgraphs(graph, n, max_subgraphs, keep_instances)?;
            for (id, class) in e.classes {
                reps.insert(id, class.representative);
                weighted.push((id, class.count as f64));
                if keep_instances {
                    let mut sets = class.instances;
                    sets.sort();
                    instances.insert(id, sets);
                }
            }
        }
        CensusMethod::Sampled { num_samples, seed } => {
            let params = SamplingParams::new(n, num_samples, seed)?;
            let set = esa_sample(graph, &params)?;
            diagnostic = set.diagnostic.clone();
            let mut classifier = Classifier::new();
            let mut seen: BTreeMap<CanonicalId, BTreeSet<Vec<usize>>> = BTreeMap::new();
            let mut sums: BTreeMap<CanonicalId, f64> = BTreeMap::new();
            for s in &set.samples {
                let (id, rep) = classifier.classify(&Pattern::induced(graph, &s.nodes)?)?;
                reps.entry(id).or_insert(rep);
                *sums.entry(id).or_insert(0.0) += 1.0 / s.probability;
                if keep_instances {
                    seen.entry(id).or_default().insert(s.nodes.clone());
                }
            }
            // Expected value of the per-attempt weight is the exact count.
            weighted = sums
                .into_iter()
                .map(|(id, w)| (id, w / set.attempts as f64))
                .collect();
            instances = seen.into_iter().map(|(id, s)| (id, s.into_iter().collect())).collect();
        }
    }

    let classes = if weighted.is_empty() {
        Vec::new()
    } else {
        let conc = concentration(&weighted)?;
        weighted
            .iter()
            .map(|&(id, w)| SubgraphClass {
                canonical_id: id,
                representative: reps[&id],
                weight: w,
                concentration: conc[&id],
            })
            .collect()
    };
    Ok(Census {
        n,
        classes,
        instances,
        diagnostic,
    })
}

/// Null-model settings for motif significance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotifSearch {
    pub method: CensusMethod,
    pub num_random: usize,
    pub swap_factor: f64,
    pub seed: u64,
}

impl Default for MotifSearch {
    fn default() -> Self {
        MotifSearch {
            method: CensusMethod::default(),
            num_random: 100,
            swap_factor: 10.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZScore {
    pub value: f64,
    pub real: f64,
    pub random_mean: f64,
    pub random_std: f64,
    /// The class occurs in neither the real nor any randomized network.
    pub absent: bool,
}

impl ZScore {
    fn from_samples(real: f64, random: &[f64]) -> ZScore {
        let n = random.len() as f64;
        let mean = random.iter().sum::<f64>() / n;
        let var = random.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let std = var.sqrt();
        let absent = real == 0.0 && random.iter().all(|&x| x == 0.0);
        let value = if std > 0.0 {
            (real - mean) / std
        } else if real > mean {
            f64::INFINITY
        } else if real < mean {
            f64::NEG_INFINITY
        } else {
            0.0
        };
        ZScore {
            value,
            real,
            random_mean: mean,
            random_std: std,
            absent,
        }
    }
}

fn random_censuses(graph: &DirectedGraph, n: usize, search: &MotifSearch) -> Result<Vec<Census>> {
    if search.num_random < 2 {
        return Err(Error::invalid("z-score needs at least two randomized networks"));
    }
    (0..search.num_random)
        .into_par_iter()
        .map(|r| {
            let seed = search.seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(r as u64 + 1));
            let random = randomize_graph(graph, seed, search.swap_factor)?;
            let method = match search.method {
                CensusMethod::Sampled { num_samples, .. } => CensusMethod::Sampled {
                    num_samples,
                    seed: seed ^ 0x5555,
                },
                exact => exact,
            };
            match census(&random, n, method, false) {
                Ok(c) => Ok(c),
                // A randomized network can lose every connected n-set only
                // if the original had none; treat it as an empty census.
                Err(Error::Invalid(_)) => Ok(Census {
                    n,
                    classes: Vec::new(),
                    instances: BTreeMap::new(),
                    diagnostic: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// `(c_real − mean(c_rand)) / std(c_rand)` on concentrations, with
/// `±∞` when the spread is zero and the means differ and `0` when they
/// agree. Uses the sample standard deviation.
pub fn z_score(graph: &DirectedGraph, n: usize, class: CanonicalId, search: &MotifSearch) -> Result<ZScore> {
    let real = census(graph, n, search.method, false)?;
    let random = random_censuses(graph, n, search)?;
    let values: Vec<f64> = random.iter().map(|c| c.concentration_of(class)).collect();
    let z = ZScore::from_samples(real.concentration_of(class), &values);
    if z.absent {
        log::warn!("class {class} occurs in neither the real nor the randomized networks");
    }
    Ok(z)
}

/// Z-scores of every class present in `real`, sharing one randomized
/// ensemble.
pub fn z_scores(graph: &DirectedGraph, real: &Census, search: &MotifSearch) -> Result<BTreeMap<CanonicalId, ZScore>> {
    let random = random_censuses(graph, real.n, search)?;
    Ok(real
        .classes
        .iter()
        .map(|c| {
            let values: Vec<f64> = random.iter().map(|r| r.concentration_of(c.canonical_id)).collect();
            (c.canonical_id, ZScore::from_samples(c.concentration, &values))
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankCriterion {
    Concentration,
    ZScore,
}

impl std::str::FromStr for RankCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "concentration" => Ok(RankCriterion::Concentration),
            "zscore" | "z-score" | "z" => Ok(RankCriterion::ZScore),
            _ => Err(Error::invalid(format!("unknown criterion {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopMotif {
    pub spec: MotifSpec,
    pub class: SubgraphClass,
    pub z_score: Option<ZScore>,
    pub instances: Vec<MotifInstance>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopMotifs {
    pub motifs: Vec<TopMotif>,
    pub warning: Option<String>,
}

/// The `m` highest-ranked classes, descending by criterion with ties broken
/// by ascending canonical id, each with its simple-motif instances.
pub fn top_motifs(
    graph: &DirectedGraph,
    n: usize,
    m: usize,
    criterion: RankCriterion,
    search: &MotifSearch,
) -> Result<TopMotifs> {
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    let real = census(graph, n, search.method, true)?;
    let z = match criterion {
        RankCriterion::ZScore => Some(z_scores(graph, &real, search)?),
        RankCriterion::Concentration => None,
    };
    let key = |c: &SubgraphClass| match &z {
        Some(z) => z[&c.canonical_id].value,
        None => c.concentration,
    };
    let mut order: Vec<&SubgraphClass> = real.classes.iter().collect();
    order.sort_by(|a, b| key(b).total_cmp(&key(a)).then(a.canonical_id.cmp(&b.canonical_id)));

    let warning = (order.len() < m).then(|| {
        let w = format!("requested {m} motifs but only {} classes were found", order.len());
        log::warn!("{w}");
        w
    });
    let motifs = order
        .into_iter()
        .take(m)
        .map(|c| {
            let instances = real
                .instances
                .get(&c.canonical_id)
                .map(|sets| {
                    sets.iter()
                        .map(|s| MotifInstance::simple(s.clone()))
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?
                .unwrap_or_default();
            Ok(TopMotif {
                spec: MotifSpec::simple(c.representative)?,
                class: c.clone(),
                z_score: z.as_ref().map(|z| z[&c.canonical_id]),
                instances,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TopMotifs { motifs, warning })
}
