//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mpr_core::{DirectedGraph, SparseMatrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Directed edges between 1-based motif positions.
type Edges = &'static [(usize, usize)];

const fn both(a: usize, b: usize) -> [(usize, usize); 2] {
    [(a, b), (b, a)]
}

// Edge patterns written out position by position. Position 1 is the
// non-anchor node of every anchored motif; positions 2 and 3 are anchors.
const R12: [(usize, usize); 2] = both(1, 2);
const R13: [(usize, usize); 2] = both(1, 3);
const R23: [(usize, usize); 2] = both(2, 3);

pub const SIMPLE_PATTERNS: [Edges; 7] = [
    &[(1, 2), (2, 3), (3, 1)],
    &[R12[0], R12[1], (2, 3), (3, 1)],
    &[R12[0], R12[1], R23[0], R23[1], (1, 3)],
    &[R12[0], R12[1], R23[0], R23[1], R13[0], R13[1]],
    &[(1, 2), (1, 3), (2, 3)],
    &[(1, 2), (1, 3), R23[0], R23[1]],
    &[(2, 1), (3, 1), R23[0], R23[1]],
];

pub const ANCHOR_PATTERNS: [Edges; 13] = [
    &[R12[0], R12[1], (1, 3), (3, 2)],
    &[(2, 1), R13[0], R13[1], (3, 2)],
    &[(2, 1), (1, 3), R23[0], R23[1]],
    &[R12[0], R12[1], R13[0], R13[1], (2, 3)],
    &[R12[0], R12[1], (1, 3), R23[0], R23[1]],
    &[(2, 1), R13[0], R13[1], R23[0], R23[1]],
    &[(2, 1), (1, 3), (2, 3)],
    &[(2, 1), (3, 1), (2, 3)],
    &[(1, 2), (1, 3), (2, 3)],
    &[(2, 1), R13[0], R13[1], (2, 3)],
    &[(1, 2), (1, 3), R23[0], R23[1]],
    &[(1, 2), R13[0], R13[1], (3, 2)],
    &[(2, 1), (3, 1), R23[0], R23[1]],
];

fn matches(graph: &DirectedGraph, v: [usize; 3], pattern: Edges) -> bool {
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                let want = pattern.contains(&(a + 1, b + 1));
                if graph.has_edge(v[a], v[b]) != want {
                    return false;
                }
            }
        }
    }
    true
}

/// Brute-force motif matrix: every ordered node triple is tried against
/// the pattern, matches are deduplicated as (node set, anchor set), and
/// each unordered anchor pair of a distinct instance adds one in both
/// directions.
pub fn oracle_motif_matrix(graph: &DirectedGraph, pattern: Edges, anchors: &[usize]) -> Vec<Vec<f64>> {
    let n = graph.node_count();
    let mut instances: BTreeSet<(BTreeSet<usize>, BTreeSet<usize>)> = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a == b || b == c || a == c {
                    continue;
                }
                let v = [a, b, c];
                if matches(graph, v, pattern) {
                    let nodes = v.iter().copied().collect();
                    let anchor_nodes = anchors.iter().map(|&p| v[p - 1]).collect();
                    instances.insert((nodes, anchor_nodes));
                }
            }
        }
    }
    let mut m = vec![vec![0.0; n]; n];
    for (_, anchor_nodes) in instances {
        let a: Vec<usize> = anchor_nodes.into_iter().collect();
        for x in 0..a.len() {
            for y in x + 1..a.len() {
                m[a[x]][a[y]] += 1.0;
                m[a[y]][a[x]] += 1.0;
            }
        }
    }
    m
}

pub fn oracle_simple(graph: &DirectedGraph, k: usize) -> Vec<Vec<f64>> {
    oracle_motif_matrix(graph, SIMPLE_PATTERNS[k - 1], &[1, 2, 3])
}

pub fn oracle_anchor(graph: &DirectedGraph, k: usize) -> Vec<Vec<f64>> {
    oracle_motif_matrix(graph, ANCHOR_PATTERNS[k - 1], &[2, 3])
}

/// Erdős–Rényi digraph: each ordered pair is an edge with probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    DirectedGraph::from_index_edges(n, &edges).unwrap()
}

/// Random digraph where each one-way edge is reciprocated with
/// probability `reciprocity`, so both `B` and `U` are populated.
pub fn random_graph_with_reciprocity(n: usize, p: f64, reciprocity: f64, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                if rng.random_bool(reciprocity) {
                    edges.push((i, j));
                    edges.push((j, i));
                } else if rng.random_bool(0.5) {
                    edges.push((i, j));
                } else {
                    edges.push((j, i));
                }
            }
        }
    }
    DirectedGraph::from_index_edges(n, &edges).unwrap()
}

pub fn dense(m: &SparseMatrix) -> Vec<Vec<f64>> {
    m.to_dense()
}

/// Dense `(X·Y)⊙Z`.
pub fn dense_kernel(x: &[Vec<f64>], y: &[Vec<f64>], z: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    let m = z[0].len();
    let inner = y.len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0.0;
            for k in 0..inner {
                s += x[i][k] * y[k][j];
            }
            out[i][j] = s * z[i][j];
        }
    }
    out
}

/// Fixed point of `x = d·Pᵀx + (1 − d)/N·e`, by a dense LU solve.
pub fn dense_pagerank(p: &SparseMatrix, d: f64) -> Vec<f64> {
    let n = p.rows();
    let mut a = DMatrix::<f64>::identity(n, n);
    for (i, j, v) in p.iter() {
        a[(j, i)] -= d * v;
    }
    let b = DVector::from_element(n, (1.0 - d) / n as f64);
    a.lu().solve(&b).expect("I − dPᵀ is non-singular for d < 1").iter().copied().collect()
}

/// Three nodes point at node 1, and 2 ↔ 3.
pub fn star_with_pair() -> DirectedGraph {
    DirectedGraph::from_id_edges(&[("2", "1"), ("3", "1"), ("4", "1"), ("2", "3"), ("3", "2")]).unwrap()
}

/// Nodes 1 and 3 share two M6 instances, nodes 3 and 5 share one.
pub fn mixed_fixture() -> DirectedGraph {
    DirectedGraph::from_id_edges(&[
        ("1", "2"),
        ("1", "3"),
        ("2", "3"),
        ("3", "2"),
        ("1", "5"),
        ("3", "5"),
        ("5", "3"),
        ("4", "1"),
    ])
    .unwrap()
}

pub fn at(m: &SparseMatrix, g: &DirectedGraph, a: &str, b: &str) -> f64 {
    m.get(g.nodes().index_of(a).unwrap(), g.nodes().index_of(b).unwrap())
}

fn weakly_connected(graph: &DirectedGraph, nodes: &[usize]) -> bool {
    let linked = |a: usize, b: usize| graph.has_edge(a, b) || graph.has_edge(b, a);
    let mut seen = vec![false; nodes.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for y in 0..nodes.len() {
            if !seen[y] && linked(nodes[x], nodes[y]) {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Isomorphism-invariant key: the largest adjacency bitstring over all
/// relabelings.
pub fn oracle_class_key(graph: &DirectedGraph, nodes: &[usize]) -> u64 {
    let k = nodes.len();
    permutations(k)
        .into_iter()
        .map(|p| {
            let mut key = 0u64;
            for a in 0..k {
                for b in 0..k {
                    key = key << 1 | graph.has_edge(nodes[p[a]], nodes[p[b]]) as u64;
                }
            }
            key
        })
        .max()
        .unwrap()
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for v in start..n {
        cur.push(v);
        subsets(n, k, v + 1, cur, out);
        cur.pop();
    }
}

/// Every weakly connected `k`-node set, grouped by class key.
pub fn oracle_census(graph: &DirectedGraph, k: usize) -> std::collections::BTreeMap<u64, Vec<Vec<usize>>> {
    let mut all = Vec::new();
    subsets(graph.node_count(), k, 0, &mut Vec::new(), &mut all);
    let mut out: std::collections::BTreeMap<u64, Vec<Vec<usize>>> = Default::default();
    for s in all {
        if weakly_connected(graph, &s) {
            out.entry(oracle_class_key(graph, &s)).or_default().push(s);
        }
    }
    out
}

pub fn oracle_concentrations(graph: &DirectedGraph, k: usize) -> std::collections::BTreeMap<u64, f64> {
    let c = oracle_census(graph, k);
    let total: usize = c.values().map(Vec::len).sum();
    c.into_iter().map(|(key, sets)| (key, sets.len() as f64 / total as f64)).collect()
}

fn undirected_edges(graph: &DirectedGraph) -> Vec<(usize, usize)> {
    let n = graph.node_count();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if graph.has_edge(a, b) || graph.has_edge(b, a) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Probability that edge expansion emits `target`, summed over every
/// expansion sequence by explicit recursion.
pub fn oracle_emit_probability(graph: &DirectedGraph, target: &[usize]) -> f64 {
    let edges = undirected_edges(graph);
    fn expand(edges: &[(usize, usize)], target: &[usize], cur: &mut Vec<usize>) -> f64 {
        if cur.len() == target.len() {
            return 1.0;
        }
        let boundary: Vec<usize> = edges
            .iter()
            .filter_map(|&(a, b)| match (cur.contains(&a), cur.contains(&b)) {
                (true, false) => Some(b),
                (false, true) => Some(a),
                _ => None,
            })
            .collect();
        let mut p = 0.0;
        for &next in target {
            if cur.contains(&next) {
                continue;
            }
            let hits = boundary.iter().filter(|&&v| v == next).count();
            if hits > 0 {
                cur.push(next);
                p += hits as f64 / boundary.len() as f64 * expand(edges, target, cur);
                cur.pop();
            }
        }
        p
    }
    let mut total = 0.0;
    for &(a, b) in &edges {
        if target.contains(&a) && target.contains(&b) {
            total += expand(&edges, target, &mut vec![a, b]) / edges.len() as f64;
        }
    }
    total
}
