//! Subgraph census for 3- to 5-node motifs: exact enumeration, edge
//! expansion sampling with exact per-sample probabilities, degree
//! preserving null models and motif significance.

mod canonical;
mod census;
mod enumerate;
mod esa;
mod randomize;
mod undirected;

pub use canonical::{
    canonical_form, canonical_form_with_representative, connected_classes, CanonicalId, Classifier, Pattern,
    MAX_PATTERN_NODES,
};
pub use census::{
    census, concentration, top_motifs, z_score, z_scores, Census, CensusMethod, MotifSearch, RankCriterion,
    SubgraphClass, TopMotif, TopMotifs, ZScore,
};
pub use enumerate::{enumerate_subgraphs, EnumeratedClass, Enumeration, DEFAULT_MAX_SUBGRAPHS};
pub use esa::{esa_sample, emit_probability, Sample, SampleSet, SamplingParams};
pub use randomize::{randomize_graph, randomize_graph_with_attempts, SwapStats};
pub use undirected::UndirectedView;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// A motif `(B, A)`: edge pattern on `k` nodes and its anchor positions
/// (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotifSpec {
    pattern: Pattern,
    anchors: Vec<usize>,
}

impl MotifSpec {
    pub fn new(pattern: Pattern, mut anchors: Vec<usize>) -> Result<Self> {
        anchors.sort_unstable();
        anchors.dedup();
        if pattern.has_self_loop() {
            return Err(Error::invalid("motif pattern has a non-zero diagonal"));
        }
        if anchors.len() < 2 {
            return Err(Error::invalid("motif needs at least two anchor positions"));
        }
        if anchors.iter().any(|&a| a >= pattern.k()) {
            return Err(Error::OutOfRange("anchor position".into()));
        }
        if !pattern.is_weakly_connected() {
            return Err(Error::invalid("motif pattern is not weakly connected"));
        }
        Ok(MotifSpec { pattern, anchors })
    }

    /// Motif whose anchor set is every node.
    pub fn simple(pattern: Pattern) -> Result<Self> {
        let k = pattern.k();
        Self::new(pattern, (0..k).collect())
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    pub fn k(&self) -> usize {
        self.pattern.k()
    }

    pub fn is_simple(&self) -> bool {
        self.anchors.len() == self.k()
    }

    /// All instances of this motif on the node set `nodes`: one per
    /// distinct anchor subset over orderings `v` with `W_v = B`.
    pub fn instances_on(&self, graph: &DirectedGraph, nodes: &[usize]) -> Result<Vec<MotifInstance>> {
        if nodes.len() != self.k() {
            return Ok(Vec::new());
        }
        let mut found = std::collections::BTreeSet::new();
        for perm in itertools::Itertools::permutations(nodes.iter().copied(), nodes.len()) {
            if Pattern::induced(graph, &perm)? == self.pattern {
                let mut anchors: Vec<usize> = self.anchors.iter().map(|&a| perm[a]).collect();
                anchors.sort_unstable();
                found.insert(anchors);
            }
        }
        found
            .into_iter()
            .map(|anchors| MotifInstance::new(nodes.to_vec(), anchors))
            .collect()
    }
}

/// An occurrence `(set(v), set(χ_A(v)))`: unordered node set and anchor
/// subset, both stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MotifInstance {
    nodes: Vec<usize>,
    anchors: Vec<usize>,
}

impl MotifInstance {
    pub fn new(mut nodes: Vec<usize>, mut anchors: Vec<usize>) -> Result<Self> {
        nodes.sort_unstable();
        anchors.sort_unstable();
        if nodes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("motif instance repeats a node"));
        }
        if anchors.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("motif instance repeats an anchor"));
        }
        if anchors.iter().any(|a| nodes.binary_search(a).is_err()) {
            return Err(Error::invalid("instance anchors must be a subset of its nodes"));
        }
        Ok(MotifInstance { nodes, anchors })
    }

    /// Instance whose anchors are all of its nodes.
    pub fn simple(nodes: Vec<usize>) -> Result<Self> {
        let anchors = nodes.clone();
        Self::new(nodes, anchors)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }
}
