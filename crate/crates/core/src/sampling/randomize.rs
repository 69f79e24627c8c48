//! Degree-preserving randomization by double edge swaps.
//!
//! One-way edges are swapped only with one-way edges and reciprocal pairs
//! only with reciprocal pairs, so every node keeps its in-degree, its
//! out-degree and its number of reciprocated links.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::DirectedGraph;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SwapStats {
    pub attempts: usize,
    pub unidirectional_swaps: usize,
    pub bidirectional_swaps: usize,
}

/// Randomized copy of `graph` after `swap_factor · |E|` attempted swaps.
pub fn randomize_graph(graph: &DirectedGraph, seed: u64, swap_factor: f64) -> Result<DirectedGraph> {
    let attempts = (swap_factor.max(0.0) * graph.edge_count() as f64).round() as usize;
    randomize_graph_with_attempts(graph, seed, attempts).map(|(g, _)| g)
}

pub fn randomize_graph_with_attempts(
    graph: &DirectedGraph,
    seed: u64,
    attempts: usize,
) -> Result<(DirectedGraph, SwapStats)> {
    graph.require_unweighted()?;
    let mut one_way = Vec::new();
    let mut pairs = Vec::new();
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(graph.edge_count());
    for (r, c, _) in graph.adjacency().iter() {
        present.insert((r, c));
        if graph.has_edge(c, r) {
            if r < c {
                pairs.push((r, c));
            }
        } else {
            one_way.push((r, c));
        }
    }

    let linked = |present: &HashSet<(usize, usize)>, a: usize, b: usize| {
        present.contains(&(a, b)) || present.contains(&(b, a))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SwapStats {
        attempts,
        ..SwapStats::default()
    };
    // Pool choice is proportional to the number of directed edges in it.
    let pool_total = one_way.len() + 2 * pairs.len();
    for _ in 0..attempts {
        if pool_total == 0 {
            break;
        }
        if rng.random_range(0..pool_total) < one_way.len() {
            if one_way.len() < 2 {
                continue;
            }
            let i = rng.random_range(0..one_way.len());
            let j = rng.random_range(0..one_way.len());
            let (a, b) = one_way[i];
            let (c, d) = one_way[j];
            if i == j || a == c || b == d || a == d || c == b {
                continue;
            }
            if linked(&present, a, d) || linked(&present, c, b) {
                continue;
            }
            present.remove(&(a, b));
            present.remove(&(c, d));
            present.insert((a, d));
            present.insert((c, b));
            one_way[i] = (a, d);
            one_way[j] = (c, b);
            stats.unidirectional_swaps += 1;
        } else {
            if pairs.len() < 2 {
                continue;
            }
            let i = rng.random_range(0..pairs.len());
            let j = rng.random_range(0..pairs.len());
            let (a, b) = pairs[i];
            let (mut c, mut d) = pairs[j];
            if rng.random_bool(0.5) {
                std::mem::swap(&mut c, &mut d);
            }
            if i == j || a == c || a == d || b == c || b == d {
                continue;
            }
            if linked(&present, a, d) || linked(&present, c, b) {
                continue;
            }
            for (x, y) in [(a, b), (c, d)] {
                present.remove(&(x, y));
                present.remove(&(y, x));
            }
            for (x, y) in [(a, d), (c, b)] {
                present.insert((x, y));
                present.insert((y, x));
            }
            pairs[i] = (a.min(d), a.max(d));
            pairs[j] = (c.min(b), c.max(b));
            stats.bidirectional_swaps += 1;
        }
    }

    let edges = one_way
        .iter()
        .copied()
        .chain(pairs.iter().flat_map(|&(a, b)| [(a, b), (b, a)]))
        .map(|(a, b)| (a, b, 1.0));
    let out = DirectedGraph::from_edges(graph.nodes().clone(), edges, false)?;
    Ok((out, stats))
}
