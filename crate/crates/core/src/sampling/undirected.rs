use crate::graph::DirectedGraph;

/// Undirected support of a directed graph: `u ~ v` when either `u → v` or
/// `v → u` exists.
#[derive(Clone, Debug)]
pub struct UndirectedView {
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl UndirectedView {
    pub fn new(graph: &DirectedGraph) -> Self {
        let n = graph.node_count();
        let mut neighbors = vec![Vec::new(); n];
        for (r, c, _) in graph.adjacency().iter() {
            neighbors[r].push(c);
            neighbors[c].push(r);
        }
        let mut edges = Vec::new();
        for (v, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            edges.extend(list.iter().filter(|&&u| u > v).map(|&u| (v, u)));
        }
        UndirectedView { neighbors, edges }
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Undirected edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}
