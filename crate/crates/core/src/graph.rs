//! Directed graphs, edge-list ingestion and the reciprocal/one-way split.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Bijection between external string ids and dense indices `0..N`,
/// assigned in first-seen order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeTable {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ids<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = NodeTable::new();
        for id in ids {
            let id = id.into();
            if table.index.contains_key(&id) {
                return Err(Error::invalid(format!("duplicate node id {id:?}")));
            }
            table.intern(&id);
        }
        Ok(table)
    }

    /// Returns the index of `id`, inserting it if unseen.
    pub fn intern(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), i);
        i
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Writes `index<TAB>id` lines so index-based outputs stay reportable.
    pub fn write_tsv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "index\tnode_id")?;
        for (i, id) in self.ids.iter().enumerate() {
            writeln!(out, "{i}\t{id}")?;
        }
        Ok(())
    }
}

/// Counters reported by [`load_edge_list`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub lines: usize,
    pub self_loops_dropped: usize,
    pub duplicate_edges: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectedGraph {
    nodes: NodeTable,
    adjacency: SparseMatrix,
    weighted: bool,
}

impl DirectedGraph {
    /// Builds a graph from index pairs. Self-loops are rejected; duplicate
    /// pairs collapse (unweighted) or sum (weighted).
    pub fn from_edges<I>(nodes: NodeTable, edges: I, weighted: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let n = nodes.len();
        let mut triplets = Vec::new();
        for (s, d, w) in edges {
            if s == d {
                return Err(Error::invalid(format!("self-loop on node {s}")));
            }
            triplets.push((s, d, if weighted { w } else { 1.0 }));
        }
        let mut adjacency = SparseMatrix::from_triplets(n, n, triplets)?;
        if !weighted {
            adjacency = adjacency.binarized();
        }
        Ok(DirectedGraph {
            nodes,
            adjacency,
            weighted,
        })
    }

    /// Unweighted graph on nodes `"0".."n-1"`.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let nodes = NodeTable::from_ids((0..n).map(|i| i.to_string()))?;
        Self::from_edges(nodes, edges.iter().map(|&(s, d)| (s, d, 1.0)), false)
    }

    /// Unweighted graph with string ids, nodes interned in first-seen order.
    pub fn from_id_edges(edges: &[(&str, &str)]) -> Result<Self> {
        let mut nodes = NodeTable::new();
        let idx: Vec<(usize, usize, f64)> = edges
            .iter()
            .map(|(s, d)| (nodes.intern(s), nodes.intern(d), 1.0))
            .collect();
        Self::from_edges(nodes, idx, false)
    }

    pub fn nodes(&self) -> &NodeTable {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.nnz()
    }

    /// The adjacency matrix `W` (raw weights when weighted).
    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.adjacency.contains(src, dst)
    }

    pub fn out_neighbors(&self, node: usize) -> &[usize] {
        self.adjacency.row(node).0
    }

    /// Copy with every edge weight replaced by one.
    pub fn binarize(&self) -> DirectedGraph {
        DirectedGraph {
            nodes: self.nodes.clone(),
            adjacency: self.adjacency.binarized(),
            weighted: false,
        }
    }

    pub(crate) fn require_unweighted(&self) -> Result<()> {
        if self.weighted {
            Err(Error::WeightedGraph)
        } else {
            Ok(())
        }
    }

    /// Node-induced subgraph on `keep` (indices into this graph). The
    /// returned graph numbers nodes in the order given and keeps their ids.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<DirectedGraph> {
        let mut remap = vec![usize::MAX; self.node_count()];
        let mut nodes = NodeTable::new();
        for (new, &old) in keep.iter().enumerate() {
            if old >= self.node_count() {
                return Err(Error::OutOfRange(format!("node index {old}")));
            }
            if remap[old] != usize::MAX {
                return Err(Error::invalid(format!("node index {old} repeated")));
            }
            remap[old] = new;
            nodes.intern(self.nodes.id(old));
        }
        let mut triplets = Vec::new();
        for &old in keep {
            let (cols, vals) = self.adjacency.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                if remap[c] != usize::MAX {
                    triplets.push((remap[old], remap[c], v));
                }
            }
        }
        let n = nodes.len();
        Ok(DirectedGraph {
            nodes,
            adjacency: SparseMatrix::from_triplets(n, n, triplets)?,
            weighted: self.weighted,
        })
    }

    /// Edge set keyed by external ids; equal for graphs that differ only in
    /// index assignment.
    pub fn edge_set_by_id(&self) -> BTreeSet<(String, String, u64)> {
        self.adjacency
            .iter()
            .map(|(r, c, v)| {
                (
                    self.nodes.id(r).to_string(),
                    self.nodes.id(c).to_string(),
                    v.to_bits(),
                )
            })
            .collect()
    }

    /// Number of edges whose reverse edge is also present.
    pub fn reciprocated_edge_count(&self) -> usize {
        self.adjacency
            .iter()
            .filter(|&(r, c, _)| self.adjacency.contains(c, r))
            .count()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        self.adjacency.col_counts()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|r| self.adjacency.row_nnz(r)).collect()
    }
}

/// Reads a `src<TAB>dst[<TAB>weight]` edge list. Lines starting with `#`
/// and blank lines are skipped; lines without a tab are split on
/// whitespace.
pub fn load_edge_list<R: BufRead>(source: R, weighted: bool) -> Result<(DirectedGraph, IngestStats)> {
    let mut nodes = NodeTable::new();
    let mut stats = IngestStats::default();
    let mut triplets = Vec::new();

    for (lineno, line) in source.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        stats.lines += 1;
        let fields: Vec<&str> = if trimmed.contains('\t') {
            trimmed.split('\t').map(str::trim).collect()
        } else {
            trimmed.split_whitespace().collect()
        };
        if fields.len() < 2 || fields.len() > 3 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected src<TAB>dst[<TAB>weight], got {trimmed:?}"),
            });
        }
        let weight = match fields.get(2) {
            Some(w) => {
                let w: f64 = w.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("weight {w:?} is not a number"),
                })?;
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::invalid(format!(
                        "line {lineno}: weight must be finite and non-negative, got {w}"
                    )));
                }
                w
            }
            None => 1.0,
        };
        let s = nodes.intern(fields[0]);
        let d = nodes.intern(fields[1]);
        if s == d {
            stats.self_loops_dropped += 1;
            continue;
        }
        triplets.push((s, d, if weighted { weight } else { 1.0 }));
    }

    let n = nodes.len();
    let edge_lines = triplets.len();
    let mut adjacency = SparseMatrix::from_triplets(n, n, triplets)?;
    if !weighted {
        adjacency = adjacency.binarized();
    }
    stats.duplicate_edges = edge_lines.saturating_sub(adjacency.nnz());
    if stats.self_loops_dropped > 0 {
        log::info!("dropped {} self-loops", stats.self_loops_dropped);
    }
    Ok((
        DirectedGraph {
            nodes,
            adjacency,
            weighted,
        },
        stats,
    ))
}

/// Reciprocal part `B = W ⊙ Wᵀ` and one-way part `U = W − B` of an
/// unweighted graph.
pub fn split_bidirectional(graph: &DirectedGraph) -> Result<(SparseMatrix, SparseMatrix)> {
    graph.require_unweighted()?;
    let w = graph.adjacency();
    let b = w.hadamard(&w.transpose())?;
    let u = w.subtract(&b)?;
    Ok((b, u))
}

/// `|E| / (N (N − 1))`.
pub fn density(graph: &DirectedGraph) -> Result<f64> {
    let n = graph.node_count();
    if n < 2 {
        return Err(Error::invalid(format!("density needs at least 2 nodes, got {n}")));
    }
    Ok(graph.edge_count() as f64 / (n as f64 * (n as f64 - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, weighted: bool) -> DirectedGraph {
        load_edge_list(text.as_bytes(), weighted).unwrap().0
    }

    /// Edges 2→1, 3→1, 4→1 and 2↔3.
    fn triangle_with_pendant() -> DirectedGraph {
        load("2\t1\n3\t1\n4\t1\n2\t3\n3\t2\n", false)
    }

    #[test]
    fn bidirectional_pair() {
        let g = load("a\tb\nb\ta\n", false);
        assert_eq!(g.node_count(), 2);
        let (a, b) = (g.nodes().index_of("a").unwrap(), g.nodes().index_of("b").unwrap());
        assert_eq!(g.adjacency().get(a, b), 1.0);
        assert_eq!(g.adjacency().get(b, a), 1.0);
    }

    #[test]
    fn duplicates_collapse_or_sum() {
        let once = load("a\tb\nb\ta\n", false);
        let twice = load("a\tb\nb\ta\na\tb\n", false);
        assert_eq!(once, twice);
        let (_, stats) = load_edge_list("a\tb\nb\ta\na\tb\n".as_bytes(), false).unwrap();
        assert_eq!(stats.duplicate_edges, 1);

        let w = load("a\tb\t2\na\tb\t0.5\nb\ta\n", true);
        assert_eq!(w.adjacency().get(0, 1), 2.5);
        assert_eq!(w.adjacency().get(1, 0), 1.0);
    }

    #[test]
    fn comments_self_loops_and_errors() {
        let (g, stats) = load_edge_list("# header\na\ta\na\tb\n\n".as_bytes(), false).unwrap();
        assert_eq!(stats.self_loops_dropped, 1);
        assert_eq!(g.edge_count(), 1);

        let err = load_edge_list("a\tb\nbroken\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = load_edge_list("a\tb\t-1\n".as_bytes(), true).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
        let err = load_edge_list("a\tb\tx\n".as_bytes(), true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn split_of_pendant_triangle() {
        let g = triangle_with_pendant();
        let (b, u) = split_bidirectional(&g).unwrap();
        let ix = |id: &str| g.nodes().index_of(id).unwrap();
        let b_entries: Vec<_> = b.iter().map(|(r, c, _)| (g.nodes().id(r), g.nodes().id(c))).collect();
        assert_eq!(b_entries.len(), 2);
        assert!(b.contains(ix("2"), ix("3")) && b.contains(ix("3"), ix("2")));
        assert_eq!(u.nnz(), 3);
        for s in ["2", "3", "4"] {
            assert!(u.contains(ix(s), ix("1")));
        }
    }

    #[test]
    fn split_edge_cases() {
        let cycle = load("a\tb\nb\ta\n", false);
        let (b, u) = split_bidirectional(&cycle).unwrap();
        assert_eq!(&b, cycle.adjacency());
        assert_eq!(u.nnz(), 0);

        let empty = DirectedGraph::from_index_edges(3, &[]).unwrap();
        let (b, u) = split_bidirectional(&empty).unwrap();
        assert_eq!(b.nnz() + u.nnz(), 0);

        let weighted = load("a\tb\t2\n", true);
        assert!(matches!(split_bidirectional(&weighted), Err(Error::WeightedGraph)));
        assert!(split_bidirectional(&weighted.binarize()).is_ok());
    }

    #[test]
    fn density_values() {
        let complete = DirectedGraph::from_index_edges(3, &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]).unwrap();
        assert_eq!(density(&complete).unwrap(), 1.0);
        let single = DirectedGraph::from_index_edges(1, &[]).unwrap();
        assert!(density(&single).is_err());
    }

    #[test]
    fn published_network_densities() {
        // Node and edge counts of the DBLP and Ciao networks.
        let dblp: f64 = 941_936.0 / (35_315.0 * 35_314.0);
        assert!((dblp - 0.00076).abs() < 5e-5);
        let ciao: f64 = 57_544.0 / (2_342.0 * 2_341.0);
        assert!((ciao - 0.01049).abs() < 1e-5);
    }

    #[test]
    fn induced_subgraph_keeps_ids() {
        let g = triangle_with_pendant();
        let keep: Vec<usize> = ["1", "2", "4"].iter().map(|s| g.nodes().index_of(s).unwrap()).collect();
        let sub = g.induced_subgraph(&keep).unwrap();
        assert_eq!(sub.node_count(), 3);
        let edges = sub.edge_set_by_id();
        let pairs: Vec<(&str, &str)> = edges.iter().map(|(a, b, _)| (a.as_str(), b.as_str())).collect();
        assert_eq!(pairs, vec![("2", "1"), ("4", "1")]);
    }
}
