//! Motif-based adjacency matrices.
//!
//! Triangular 3-node motifs are computed in closed form from the
//! reciprocal part `B` and one-way part `U` of the adjacency matrix, each
//! term being one [`motif_kernel`] call. Larger motifs go through
//! [`motif_adjacency_from_instances`] on an explicit instance list.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{split_bidirectional, DirectedGraph};
use crate::sampling::{CanonicalId, MotifInstance};
use crate::sparse::{motif_kernel, SparseMatrix};

pub const SIMPLE_MOTIF_COUNT: u8 = 7;
pub const ANCHOR_MOTIF_COUNT: u8 = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MotifFamily {
    Simple3,
    Anchor3,
    Sampled,
    Ensemble,
}

/// Identifies which motif a matrix was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MotifId {
    family: MotifFamily,
    index: u64,
}

impl MotifId {
    pub fn simple(k: u8) -> Result<Self> {
        if !(1..=SIMPLE_MOTIF_COUNT).contains(&k) {
            return Err(Error::OutOfRange(format!("simple motif index {k} (expected 1..=7)")));
        }
        Ok(MotifId {
            family: MotifFamily::Simple3,
            index: k as u64,
        })
    }

    pub fn anchor(k: u8) -> Result<Self> {
        if !(1..=ANCHOR_MOTIF_COUNT).contains(&k) {
            return Err(Error::OutOfRange(format!("anchor motif index {k} (expected 1..=13)")));
        }
        Ok(MotifId {
            family: MotifFamily::Anchor3,
            index: k as u64,
        })
    }

    pub fn sampled(class: CanonicalId) -> Self {
        MotifId {
            family: MotifFamily::Sampled,
            index: class.0,
        }
    }

    pub fn ensemble() -> Self {
        MotifId {
            family: MotifFamily::Ensemble,
            index: 0,
        }
    }

    pub fn family(&self) -> MotifFamily {
        self.family
    }

    pub fn index(&self) -> u64 {
        self.index
    }
}

impl fmt::Display for MotifId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            MotifFamily::Simple3 => write!(f, "simple:{}", self.index),
            MotifFamily::Anchor3 => write!(f, "anchor:{}", self.index),
            MotifFamily::Sampled => write!(f, "sampled:{}", self.index),
            MotifFamily::Ensemble => write!(f, "ensemble"),
        }
    }
}

impl FromStr for MotifId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ensemble" {
            return Ok(MotifId::ensemble());
        }
        let (family, index) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("motif {s:?}: expected family:index")))?;
        let bad = || Error::invalid(format!("motif {s:?}: bad index"));
        match family {
            "simple" => MotifId::simple(index.parse().map_err(|_| bad())?),
            "anchor" => MotifId::anchor(index.parse().map_err(|_| bad())?),
            "sampled" => Ok(MotifId::sampled(CanonicalId(index.parse().map_err(|_| bad())?))),
            _ => Err(Error::invalid(format!("unknown motif family {family:?}"))),
        }
    }
}

/// A motif-based adjacency matrix `W_M` of co-occurrence counts.
#[derive(Clone, Debug, PartialEq)]
pub struct MotifAdjacency {
    pub motif: MotifId,
    pub matrix: SparseMatrix,
    pub symmetric: bool,
}

impl MotifAdjacency {
    pub fn write_coordinate<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        self.matrix.write_coordinate(
            out,
            &[
                format!("motif {}", self.motif),
                format!("symmetric {}", self.symmetric),
            ],
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Operand {
    B,
    U,
    Ut,
}

use Operand::{Ut, B, U};

/// One `(X · Y) ⊙ Z` term.
type Term = (Operand, Operand, Operand);

struct Formula {
    terms: &'static [Term],
    /// Result is `C + Cᵀ` rather than `C`.
    add_transpose: bool,
}

const SIMPLE_FORMULAS: [Formula; 7] = [
    // M1: one-way 3-cycle
    Formula { terms: &[(U, U, Ut)], add_transpose: true },
    // M2
    Formula { terms: &[(B, U, Ut), (U, B, Ut), (U, U, B)], add_transpose: true },
    // M3
    Formula { terms: &[(B, B, U), (B, U, B), (U, B, B)], add_transpose: true },
    // M4: fully reciprocal triangle
    Formula { terms: &[(B, B, B)], add_transpose: false },
    // M5: transitive triangle
    Formula { terms: &[(U, U, U), (U, Ut, U), (Ut, U, U)], add_transpose: true },
    // M6: one source pointing at a reciprocal pair
    Formula { terms: &[(U, B, U), (B, Ut, Ut), (Ut, U, B)], add_transpose: false },
    // M7: a reciprocal pair pointing at one sink
    Formula { terms: &[(Ut, B, Ut), (B, U, U), (U, Ut, B)], add_transpose: false },
];

const ANCHOR_FORMULAS: [Formula; 13] = [
    Formula { terms: &[(B, U, Ut)], add_transpose: true },
    Formula { terms: &[(U, B, Ut)], add_transpose: true },
    Formula { terms: &[(U, U, B)], add_transpose: true },
    Formula { terms: &[(B, B, U)], add_transpose: true },
    Formula { terms: &[(B, U, B)], add_transpose: true },
    Formula { terms: &[(U, B, B)], add_transpose: true },
    Formula { terms: &[(U, U, U)], add_transpose: true },
    Formula { terms: &[(U, Ut, U)], add_transpose: true },
    Formula { terms: &[(Ut, U, U)], add_transpose: true },
    Formula { terms: &[(U, B, U)], add_transpose: true },
    Formula { terms: &[(Ut, U, B)], add_transpose: false },
    Formula { terms: &[(Ut, B, Ut)], add_transpose: true },
    Formula { terms: &[(U, Ut, B)], add_transpose: false },
];

/// `B`, `U` and `Uᵀ` of one graph, computed once and shared by all motif
/// formulas.
pub struct Decomposition {
    b: SparseMatrix,
    u: SparseMatrix,
    ut: SparseMatrix,
}

impl Decomposition {
    pub fn new(graph: &DirectedGraph) -> Result<Self> {
        let (b, u) = split_bidirectional(graph)?;
        let ut = u.transpose();
        Ok(Decomposition { b, u, ut })
    }

    fn operand(&self, op: Operand) -> &SparseMatrix {
        match op {
            B => &self.b,
            U => &self.u,
            Ut => &self.ut,
        }
    }

    fn evaluate(&self, formula: &Formula) -> Result<SparseMatrix> {
        let mut c = SparseMatrix::zeros(self.b.rows(), self.b.cols());
        for &(x, y, z) in formula.terms {
            let term = motif_kernel(self.operand(x), self.operand(y), self.operand(z))?;
            c = c.add(&term)?;
        }
        if formula.add_transpose {
            c = c.add(&c.transpose())?;
        }
        Ok(c)
    }

    pub fn simple(&self, k: u8) -> Result<MotifAdjacency> {
        let motif = MotifId::simple(k)?;
        let matrix = self.evaluate(&SIMPLE_FORMULAS[k as usize - 1])?;
        Ok(MotifAdjacency {
            motif,
            matrix,
            symmetric: true,
        })
    }

    pub fn anchor(&self, k: u8) -> Result<MotifAdjacency> {
        let motif = MotifId::anchor(k)?;
        let matrix = self.evaluate(&ANCHOR_FORMULAS[k as usize - 1])?;
        Ok(MotifAdjacency {
            motif,
            matrix,
            symmetric: true,
        })
    }
}

/// `W_M` of the 3-node simple motif `M_k`, `k` in `1..=7`.
pub fn simple_motif_matrix(graph: &DirectedGraph, k: u8) -> Result<MotifAdjacency> {
    MotifId::simple(k)?;
    Decomposition::new(graph)?.simple(k)
}

/// `W_M` of the anchored 3-node motif `M̂_k`, `k` in `1..=13`. Only pairs in
/// the two anchor positions of an instance are counted.
pub fn anchor_motif_matrix(graph: &DirectedGraph, k: u8) -> Result<MotifAdjacency> {
    MotifId::anchor(k)?;
    Decomposition::new(graph)?.anchor(k)
}

/// All seven simple-motif matrices, sharing one decomposition and
/// computed in parallel.
pub fn all_simple_motif_matrices(graph: &DirectedGraph) -> Result<Vec<MotifAdjacency>> {
    use rayon::prelude::*;
    let dec = Decomposition::new(graph)?;
    (1..=SIMPLE_MOTIF_COUNT).into_par_iter().map(|k| dec.simple(k)).collect()
}

/// How an instance list turns into matrix counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceCounting {
    /// Every unordered anchor pair of an instance gets one in both
    /// directions.
    AnchorCooccur,
    /// Every ordered pair `(i, j)` of instance nodes gets one when the edge
    /// `i → j` exists.
    DirectEdgeOnly,
}

impl FromStr for InstanceCounting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anchor" | "anchor-cooccur" => Ok(InstanceCounting::AnchorCooccur),
            "direct" | "direct-edge" => Ok(InstanceCounting::DirectEdgeOnly),
            _ => Err(Error::invalid(format!("unknown counting mode {s:?}"))),
        }
    }
}

/// Builds `W_M` from motif instances. Instances equal as (node set,
/// anchor set) are counted once.
pub fn motif_adjacency_from_instances(
    motif: MotifId,
    instances: &[MotifInstance],
    graph: &DirectedGraph,
    mode: InstanceCounting,
) -> Result<MotifAdjacency> {
    let n = graph.node_count();
    let mut unique: BTreeSet<(&[usize], &[usize])> = BTreeSet::new();
    for inst in instances {
        if let Some(&bad) = inst.nodes().iter().chain(inst.anchors()).find(|&&v| v >= n) {
            return Err(Error::OutOfRange(format!("instance node {bad} in a graph of {n} nodes")));
        }
        if inst.anchors().len() < 2 {
            return Err(Error::invalid("motif instance needs at least two anchors"));
        }
        unique.insert((inst.nodes(), inst.anchors()));
    }

    let mut triplets = Vec::new();
    for (nodes, anchors) in unique {
        match mode {
            InstanceCounting::AnchorCooccur => {
                for (a, &i) in anchors.iter().enumerate() {
                    for &j in &anchors[a + 1..] {
                        triplets.push((i, j, 1.0));
                        triplets.push((j, i, 1.0));
                    }
                }
            }
            InstanceCounting::DirectEdgeOnly => {
                for &i in nodes {
                    for &j in nodes {
                        if i != j && graph.has_edge(i, j) {
                            triplets.push((i, j, 1.0));
                        }
                    }
                }
            }
        }
    }
    Ok(MotifAdjacency {
        motif,
        matrix: SparseMatrix::from_triplets(n, n, triplets)?,
        symmetric: mode == InstanceCounting::AnchorCooccur,
    })
}

/// Weighted sum `Σ w_k W_{M_k}`; uniform `1/m` weights by default.
pub fn ensemble_matrix(matrices: &[MotifAdjacency], weights: Option<&[f64]>) -> Result<MotifAdjacency> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::invalid("ensemble of zero matrices"))?;
    let m = matrices.len();
    let uniform = vec![1.0 / m as f64; m];
    let weights = match weights {
        Some(w) => {
            if w.len() != m {
                return Err(Error::invalid(format!("{} weights for {m} matrices", w.len())));
            }
            if w.iter().any(|&x| !x.is_finite() || x < 0.0) {
                return Err(Error::invalid("ensemble weights must be non-negative"));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("ensemble weights sum to {total}, expected 1")));
            }
            w
        }
        None => &uniform[..],
    };
    if m == 1 && weights[0] == 1.0 {
        return Ok(first.clone());
    }
    let mut sum = SparseMatrix::zeros(first.matrix.rows(), first.matrix.cols());
    for (adj, &w) in matrices.iter().zip(weights) {
        sum = sum.add(&adj.matrix.scale(w)?)?;
    }
    Ok(MotifAdjacency {
        motif: MotifId::ensemble(),
        matrix: sum,
        symmetric: matrices.iter().all(|a| a.symmetric),
    })
}
