//! Canonical labels for directed patterns on at most five nodes.
//!
//! The label is the smallest off-diagonal adjacency bitstring over all
//! `k!` relabelings, tagged with `k` so patterns of different sizes never
//! collide.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

pub const MAX_PATTERN_NODES: usize = 5;

/// Isomorphism-class label of a small directed pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalId(pub u64);

impl CanonicalId {
    pub fn node_count(self) -> usize {
        (self.0 >> 32) as usize
    }

    /// Canonical adjacency bitstring without the size tag.
    pub fn code(self) -> u32 {
        self.0 as u32
    }
}

impl fmt::Display for CanonicalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A `k × k` binary adjacency pattern, `k ≤ 5`, stored row-major in the low
/// `k²` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    k: u8,
    bits: u32,
}

impl Pattern {
    pub fn empty(k: usize) -> Result<Self> {
        if k > MAX_PATTERN_NODES {
            return Err(Error::Unsupported(format!(
                "patterns on {k} nodes (at most {MAX_PATTERN_NODES})"
            )));
        }
        Ok(Pattern { k: k as u8, bits: 0 })
    }

    /// Pattern from rows of 0/1 entries.
    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        let k = rows.len();
        let mut p = Pattern::empty(k)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::invalid("pattern rows must form a square matrix"));
            }
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    p.set(r, c);
                }
            }
        }
        Ok(p)
    }

    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut p = Pattern::empty(k)?;
        for &(r, c) in edges {
            if r >= k || c >= k {
                return Err(Error::OutOfRange(format!("pattern edge ({r}, {c}) on {k} nodes")));
            }
            p.set(r, c);
        }
        Ok(p)
    }

    /// Subgraph of `graph` induced by `nodes`, in the order given.
    pub fn induced(graph: &DirectedGraph, nodes: &[usize]) -> Result<Self> {
        let mut p = Pattern::empty(nodes.len())?;
        for (r, &a) in nodes.iter().enumerate() {
            for (c, &b) in nodes.iter().enumerate() {
                if r != c && graph.has_edge(a, b) {
                    p.set(r, c);
                }
            }
        }
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn has(&self, r: usize, c: usize) -> bool {
        self.bits >> (r * self.k() + c) & 1 == 1
    }

    fn set(&mut self, r: usize, c: usize) {
        self.bits |= 1 << (r * self.k() + c);
    }

    pub fn edge_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn has_self_loop(&self) -> bool {
        (0..self.k()).any(|i| self.has(i, i))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.k();
        (0..k)
            .flat_map(|r| (0..k).map(move |c| (r, c)))
            .filter(|&(r, c)| self.has(r, c))
            .collect()
    }

    /// Connectivity ignoring edge direction.
    pub fn is_weakly_connected(&self) -> bool {
        let k = self.k();
        if k == 0 {
            return false;
        }
        let mut seen = 1u32;
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            for u in 0..k {
                if seen >> u & 1 == 0 && (self.has(v, u) || self.has(u, v)) {
                    seen |= 1 << u;
                    stack.push(u);
                }
            }
        }
        seen.count_ones() as usize == k
    }

    /// `πBπᵀ`: node `i` of the result is node `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Pattern {
        let k = self.k();
        let mut out = Pattern { k: self.k, bits: 0 };
        for r in 0..k {
            for c in 0..k {
                if self.has(perm[r], perm[c]) {
                    out.set(r, c);
                }
            }
        }
        out
    }

    /// Off-diagonal entries read row-major, first entry most significant.
    fn code_under(&self, perm: &[u8]) -> u32 {
        let k = self.k();
        let mut code = 0u32;
        for r in 0..k {
            for c in 0..k {
                if r != c {
                    code = code << 1 | self.has(perm[r] as usize, perm[c] as usize) as u32;
                }
            }
        }
        code
    }
}

impl fmt::Display for Pattern {
    /// Rows of 0/1 separated by `/`, e.g. `011/001/000`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.k();
        for r in 0..k {
            if r > 0 {
                write!(f, "/")?;
            }
            for c in 0..k {
                write!(f, "{}", self.has(r, c) as u8)?;
            }
        }
        Ok(())
    }
}

fn permutations(k: usize) -> &'static [Vec<u8>] {
    static TABLE: OnceLock<Vec<Vec<Vec<u8>>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=MAX_PATTERN_NODES)
            .map(|k| (0..k as u8).permutations(k).collect())
            .collect()
    });
    &table[k]
}

/// Canonical label and the relabeled pattern that attains it.
pub fn canonical_form_with_representative(pattern: &Pattern) -> Result<(CanonicalId, Pattern)> {
    if pattern.has_self_loop() {
        return Err(Error::invalid("pattern has a non-zero diagonal"));
    }
    let k = pattern.k();
    let (code, best) = permutations(k)
        .iter()
        .map(|perm| (pattern.code_under(perm), perm))
        .min_by_key(|&(code, _)| code)
        .expect("at least one permutation");
    let perm: Vec<usize> = best.iter().map(|&p| p as usize).collect();
    Ok((CanonicalId((k as u64) << 32 | code as u64), pattern.permuted(&perm)))
}

pub fn canonical_form(pattern: &Pattern) -> Result<CanonicalId> {
    canonical_form_with_representative(pattern).map(|(id, _)| id)
}

/// Memoizing wrapper around [`canonical_form`].
#[derive(Default)]
pub struct Classifier {
    cache: HashMap<Pattern, (CanonicalId, Pattern)>,
}

impl Classifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn classify(&mut self, pattern: &Pattern) -> Result<(CanonicalId, Pattern)> {
        if let Some(hit) = self.cache.get(pattern) {
            return Ok(*hit);
        }
        let out = canonical_form_with_representative(pattern)?;
        self.cache.insert(*pattern, out);
        Ok(out)
    }
}

/// Every weakly connected isomorphism class on `k` nodes, by exhaustive
/// scan over all `2^(k(k−1))` patterns.
pub fn connected_classes(k: usize) -> Result<Vec<CanonicalId>> {
    if k > MAX_PATTERN_NODES {
        return Err(Error::Unsupported(format!("patterns on {k} nodes")));
    }
    let slots: Vec<(usize, usize)> = (0..k)
        .flat_map(|r| (0..k).map(move |c| (r, c)))
        .filter(|(r, c)| r != c)
        .collect();
    let mut ids = std::collections::BTreeSet::new();
    for mask in 0u32..(1 << slots.len()) {
        let mut p = Pattern::empty(k)?;
        for (bit, &(r, c)) in slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                p.set(r, c);
            }
        }
        if p.is_weakly_connected() {
            ids.insert(canonical_form(&p)?);
        }
    }
    Ok(ids.into_iter().collect())
}
