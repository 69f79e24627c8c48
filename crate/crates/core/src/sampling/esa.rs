//! Edge-expansion subgraph sampling.
//!
//! One attempt picks an undirected edge uniformly, then repeatedly picks a
//! uniform edge from the boundary of the current node set (edges with one
//! end inside and one outside) until the set has `n` nodes. An attempt
//! fails when the boundary empties early. The probability that an attempt
//! emits a given node set is computed exactly by summing over every
//! expansion order that produces it, so weighting each sample by the
//! inverse probability gives unbiased class counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::canonical::MAX_PATTERN_NODES;
use super::undirected::UndirectedView;
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// Attempts per random substream.
const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingParams {
    pub n: usize,
    pub num_samples: usize,
    pub seed: u64,
}

impl SamplingParams {
    pub const DEFAULT_SAMPLES: usize = 1_000_000;

    pub fn new(n: usize, num_samples: usize, seed: u64) -> Result<Self> {
        let p = SamplingParams { n, num_samples, seed };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(3..=MAX_PATTERN_NODES).contains(&self.n) {
            return Err(Error::OutOfRange(format!("subgraph size {} (expected 3..=5)", self.n)));
        }
        if self.num_samples == 0 {
            return Err(Error::invalid("num_samples must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    /// Sorted node indices.
    pub nodes: Vec<usize>,
    /// Exact probability that one attempt emits this node set.
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    pub attempts: usize,
    pub failures: usize,
    pub diagnostic: Option<String>,
}

/// Runs `params.num_samples` expansion attempts. Successful attempts are
/// returned in attempt order; the sequence depends only on the seed.
pub fn esa_sample(graph: &DirectedGraph, params: &SamplingParams) -> Result<SampleSet> {
    params.validate()?;
    let view = UndirectedView::new(graph);
    if view.edges().is_empty() {
        return Err(Error::invalid("sampling needs a graph with at least one edge"));
    }
    let chunks = params.num_samples.div_ceil(CHUNK);
    let parts: Vec<Vec<Sample>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(c as u64);
            let attempts = CHUNK.min(params.num_samples - c * CHUNK);
            let mut out = Vec::with_capacity(attempts);
            let mut scratch = Vec::new();
            for _ in 0..attempts {
                if let Some(nodes) = expand_once(&view, params.n, &mut rng, &mut scratch) {
                    let probability = emit_probability_in(&view, &nodes);
                    out.push(Sample { nodes, probability });
                }
            }
            out
        })
        .collect();
    let samples: Vec<Sample> = parts.into_iter().flatten().collect();
    let failures = params.num_samples - samples.len();
    let diagnostic = if samples.is_empty() {
        Some(format!(
            "no connected {}-node subgraph found in {} attempts",
            params.n, params.num_samples
        ))
    } else if failures > 0 {
        Some(format!("{failures} attempts hit a component smaller than {} nodes", params.n))
    } else {
        None
    };
    Ok(SampleSet {
        samples,
        attempts: params.num_samples,
        failures,
        diagnostic,
    })
}

fn expand_once(view: &UndirectedView, n: usize, rng: &mut ChaCha8Rng, boundary: &mut Vec<usize>) -> Option<Vec<usize>> {
    let edges = view.edges();
    let (a, b) = edges[rng.random_range(0..edges.len())];
    let mut sub = Vec::with_capacity(n);
    sub.push(a);
    sub.push(b);
    while sub.len() < n {
        // One entry per boundary edge, named by its outside endpoint.
        boundary.clear();
        for &s in &sub {
            boundary.extend(view.neighbors(s).iter().copied().filter(|u| !sub.contains(u)));
        }
        if boundary.is_empty() {
            return None;
        }
        sub.push(boundary[rng.random_range(0..boundary.len())]);
    }
    sub.sort_unstable();
    Some(sub)
}

/// Probability that one expansion attempt on `graph` emits exactly the
/// node set `nodes`. Zero when the set is not weakly connected.
pub fn emit_probability(graph: &DirectedGraph, nodes: &[usize]) -> f64 {
    let view = UndirectedView::new(graph);
    emit_probability_in(&view, nodes)
}

pub(crate) fn emit_probability_in(view: &UndirectedView, nodes: &[usize]) -> f64 {
    let k = nodes.len();
    let m = view.edges().len();
    if k < 2 || m == 0 {
        return 0.0;
    }
    let mut local = [[false; MAX_PATTERN_NODES]; MAX_PATTERN_NODES];
    for i in 0..k {
        for j in 0..k {
            local[i][j] = i != j && view.adjacent(nodes[i], nodes[j]);
        }
    }
    let degree: Vec<f64> = nodes.iter().map(|&v| view.degree(v) as f64).collect();
    let full = (1usize << k) - 1;

    // reach[mask]: probability of growing from `mask` to the full set.
    let mut reach = vec![0.0f64; 1 << k];
    reach[full] = 1.0;
    for mask in (1..full).rev() {
        let size = mask.count_ones();
        if size < 2 {
            continue;
        }
        let inside: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
        let internal = inside
            .iter()
            .enumerate()
            .map(|(x, &i)| inside[x + 1..].iter().filter(|&&j| local[i][j]).count())
            .sum::<usize>() as f64;
        let boundary: f64 = inside.iter().map(|&i| degree[i]).sum::<f64>() - 2.0 * internal;
        if boundary <= 0.0 {
            continue;
        }
        let mut total = 0.0;
        for next in (0..k).filter(|&b| mask >> b & 1 == 0) {
            let links = inside.iter().filter(|&&i| local[i][next]).count();
            if links > 0 {
                total += links as f64 / boundary * reach[mask | 1 << next];
            }
        }
        reach[mask] = total;
    }

    let mut p = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            if local[i][j] {
                p += reach[1 << i | 1 << j];
            }
        }
    }
    p / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    #[test]
    fn triangle_only_candidate() {
        let g = DirectedGraph::from_index_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let set = esa_sample(&g, &SamplingParams::new(3, 200, 1).unwrap()).unwrap();
        assert_eq!(set.samples.len(), 200);
        for s in &set.samples {
            assert_eq!(s.nodes, vec![0, 1, 2]);
            assert!((s.probability - 1.0).abs() < 1e-15);
        }
        assert!(set.diagnostic.is_none());
    }

    #[test]
    fn probabilities_sum_to_success_rate() {
        // Pendant triangle plus an isolated edge that can never grow to 3.
        let g = DirectedGraph::from_index_edges(6, &[(1, 0), (2, 0), (3, 0), (1, 2), (2, 1), (4, 5)]).unwrap();
        let total: f64 = (0..6).combinations(3).map(|s| emit_probability(&g, &s)).sum();
        // Four of five undirected edges lie in the 4-node component.
        assert!((total - 0.8).abs() < 1e-12, "{total}");
        assert_eq!(emit_probability(&g, &[0, 4, 5]), 0.0);
    }

    #[test]
    fn emit_probability_matches_frequency() {
        let g = DirectedGraph::from_index_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (3, 4)]).unwrap();
        let params = SamplingParams::new(3, 200_000, 9).unwrap();
        let set = esa_sample(&g, &params).unwrap();
        let mut freq = std::collections::BTreeMap::new();
        for s in &set.samples {
            *freq.entry(s.nodes.clone()).or_insert(0usize) += 1;
        }
        for (nodes, count) in freq {
            let observed = count as f64 / params.num_samples as f64;
            let expected = emit_probability(&g, &nodes);
            assert!((observed - expected).abs() < 0.005, "{nodes:?}: {observed} vs {expected}");
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let g = DirectedGraph::from_index_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let p = SamplingParams::new(4, 10_000, 77).unwrap();
        assert_eq!(esa_sample(&g, &p).unwrap(), esa_sample(&g, &p).unwrap());
        let other = SamplingParams { seed: 78, ..p };
        assert_ne!(esa_sample(&g, &p).unwrap(), esa_sample(&g, &other).unwrap());
    }

    #[test]
    fn too_small_components_give_diagnostic() {
        let g = DirectedGraph::from_index_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let set = esa_sample(&g, &SamplingParams::new(3, 10, 0).unwrap()).unwrap();
        assert!(set.samples.is_empty());
        assert!(set.diagnostic.unwrap().contains("no connected"));
        let empty = DirectedGraph::from_index_edges(4, &[]).unwrap();
        assert!(esa_sample(&empty, &SamplingParams::new(3, 10, 0).unwrap()).is_err());
        assert!(SamplingParams::new(6, 10, 0).is_err());
        assert!(SamplingParams::new(3, 0, 0).is_err());
    }
}
