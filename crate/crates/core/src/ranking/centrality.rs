//! Shortest-path centralities on the unweighted support of a matrix.
//!
//! Betweenness is the unnormalized Brandes accumulation over ordered
//! reachable pairs, excluding endpoints. Closeness of `v` is
//! `(r − 1) / Σ d(u, v)` over the `r − 1` other nodes `u` that reach `v`
//! (zero when none do). Above `exact_node_cap` nodes, both are estimated
//! from a seeded sample of BFS sources.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Sources per parallel work unit; partial sums are combined in order.
const SOURCES_PER_CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CentralityOptions {
    pub exact_node_cap: usize,
    pub pivots: usize,
    pub seed: u64,
}

impl Default for CentralityOptions {
    fn default() -> Self {
        CentralityOptions {
            exact_node_cap: 20_000,
            pivots: 1_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathCentrality {
    pub betweenness: Vec<f64>,
    pub closeness: Vec<f64>,
    /// False when the values come from source sampling.
    pub exact: bool,
}

struct Partial {
    betweenness: Vec<f64>,
    dist_sum: Vec<f64>,
    reached_by: Vec<f64>,
}

impl Partial {
    fn new(n: usize) -> Self {
        Partial {
            betweenness: vec![0.0; n],
            dist_sum: vec![0.0; n],
            reached_by: vec![0.0; n],
        }
    }

    fn absorb(&mut self, other: &Partial) {
        for (a, b) in self.betweenness.iter_mut().zip(&other.betweenness) {
            *a += b;
        }
        for (a, b) in self.dist_sum.iter_mut().zip(&other.dist_sum) {
            *a += b;
        }
        for (a, b) in self.reached_by.iter_mut().zip(&other.reached_by) {
            *a += b;
        }
    }
}

struct Scratch {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    preds: Vec<Vec<usize>>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            queue: VecDeque::new(),
        }
    }
}

fn single_source(adj: &SparseMatrix, s: usize, sc: &mut Scratch, acc: &mut Partial) {
    for &v in &sc.order {
        sc.dist[v] = -1;
        sc.sigma[v] = 0.0;
        sc.delta[v] = 0.0;
        sc.preds[v].clear();
    }
    sc.order.clear();
    sc.dist[s] = 0;
    sc.sigma[s] = 1.0;
    sc.queue.push_back(s);
    while let Some(v) = sc.queue.pop_front() {
        sc.order.push(v);
        for &w in adj.row(v).0 {
            if sc.dist[w] < 0 {
                sc.dist[w] = sc.dist[v] + 1;
                sc.queue.push_back(w);
            }
            if sc.dist[w] == sc.dist[v] + 1 {
                sc.sigma[w] += sc.sigma[v];
                sc.preds[w].push(v);
            }
        }
    }
    for &w in sc.order.iter().rev() {
        let coeff = (1.0 + sc.delta[w]) / sc.sigma[w];
        for &v in &sc.preds[w] {
            sc.delta[v] += sc.sigma[v] * coeff;
        }
        if w != s {
            acc.betweenness[w] += sc.delta[w];
            acc.dist_sum[w] += sc.dist[w] as f64;
            acc.reached_by[w] += 1.0;
        }
    }
}

/// Betweenness and closeness of every node of the directed support of
/// `adj` (edge weights are ignored).
pub fn path_centrality(adj: &SparseMatrix, opts: &CentralityOptions) -> Result<PathCentrality> {
    if !adj.is_square() {
        return Err(Error::invalid(format!("centrality of a {:?} matrix", adj.dims())));
    }
    let n = adj.rows();
    let exact = n <= opts.exact_node_cap;
    let sources: Vec<usize> = if exact {
        (0..n).collect()
    } else {
        if opts.pivots == 0 {
            return Err(Error::invalid("sampled centrality needs at least one pivot"));
        }
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
        all.truncate(opts.pivots.min(n));
        all.sort_unstable();
        log::info!("estimating path centrality from {} of {n} sources", all.len());
        all
    };

    let partials: Vec<Partial> = sources
        .par_chunks(SOURCES_PER_CHUNK)
        .map(|chunk| {
            let mut sc = Scratch::new(n);
            let mut acc = Partial::new(n);
            for &s in chunk {
                single_source(adj, s, &mut sc, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = Partial::new(n);
    for p in &partials {
        total.absorb(p);
    }

    let scale = if exact || sources.is_empty() {
        1.0
    } else {
        n as f64 / sources.len() as f64
    };
    let betweenness = total.betweenness.iter().map(|b| b * scale).collect();
    let closeness = total
        .reached_by
        .iter()
        .zip(&total.dist_sum)
        .map(|(&r, &d)| if r > 0.0 { r / d } else { 0.0 })
        .collect();
    Ok(PathCentrality {
        betweenness,
        closeness,
        exact,
    })
}

pub fn betweenness(adj: &SparseMatrix, opts: &CentralityOptions) -> Result<Vec<f64>> {
    path_centrality(adj, opts).map(|c| c.betweenness)
}

pub fn closeness(adj: &SparseMatrix, opts: &CentralityOptions) -> Result<Vec<f64>> {
    path_centrality(adj, opts).map(|c| c.closeness)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj(n: usize, edges: &[(usize, usize)]) -> SparseMatrix {
        SparseMatrix::from_triplets(n, n, edges.iter().map(|&(a, b)| (a, b, 1.0))).unwrap()
    }

    #[test]
    fn path_bridge() {
        let c = path_centrality(&adj(3, &[(0, 1), (1, 2)]), &CentralityOptions::default()).unwrap();
        assert_eq!(c.betweenness, vec![0.0, 1.0, 0.0]);
        // Node 2 is reached from 1 at distance 1 and from 0 at distance 2.
        assert_eq!(c.closeness, vec![0.0, 1.0, 2.0 / 3.0]);
    }

    #[test]
    fn two_cycle_closeness() {
        let c = path_centrality(&adj(2, &[(0, 1), (1, 0)]), &CentralityOptions::default()).unwrap();
        assert_eq!(c.closeness, vec![1.0, 1.0]);
        assert_eq!(c.betweenness, vec![0.0, 0.0]);
    }

    #[test]
    fn counts_all_shortest_paths() {
        // Diamond 0→{1,2}→3: each middle node carries half the 0→3 path.
        let c = path_centrality(&adj(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]), &CentralityOptions::default()).unwrap();
        assert_eq!(c.betweenness, vec![0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn sampled_with_all_pivots_equals_exact() {
        let a = adj(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]);
        let exact = path_centrality(&a, &CentralityOptions::default()).unwrap();
        let sampled = path_centrality(
            &a,
            &CentralityOptions {
                exact_node_cap: 2,
                pivots: 6,
                seed: 1,
            },
        )
        .unwrap();
        assert!(!sampled.exact);
        assert_eq!(exact.betweenness, sampled.betweenness);
        assert_eq!(exact.closeness, sampled.closeness);
    }
}
