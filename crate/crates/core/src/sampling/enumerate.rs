//! Exact enumeration of weakly connected induced subgraphs (ESU).

use std::collections::BTreeMap;

use super::canonical::{CanonicalId, Classifier, Pattern, MAX_PATTERN_NODES};
use super::undirected::UndirectedView;
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

pub const DEFAULT_MAX_SUBGRAPHS: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct EnumeratedClass {
    pub representative: Pattern,
    pub count: u64,
    /// Sorted node sets, in discovery order. Empty when instances were not
    /// requested.
    pub instances: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Enumeration {
    pub classes: BTreeMap<CanonicalId, EnumeratedClass>,
    pub total: u64,
}

/// Counts every weakly connected induced `n`-node subgraph exactly once per
/// node set, grouped by isomorphism class. Refuses once more than
/// `max_subgraphs` subgraphs have been seen.
pub fn enumerate_subgraphs(
    graph: &DirectedGraph,
    n: usize,
    max_subgraphs: u64,
    keep_instances: bool,
) -> Result<Enumeration> {
    if !(2..=MAX_PATTERN_NODES).contains(&n) {
        return Err(Error::Unsupported(format!("subgraph size {n} (expected 2..=5)")));
    }
    let view = UndirectedView::new(graph);
    let mut out = Enumeration::default();
    let mut classifier = Classifier::new();
    let mut sub = Vec::with_capacity(n);

    let mut emit = |nodes: &[usize]| -> Result<()> {
        out.total += 1;
        if out.total > max_subgraphs {
            return Err(Error::WorkCapExceeded(format!(
                "more than {max_subgraphs} connected {n}-node subgraphs; use sampling instead"
            )));
        }
        let mut sorted = nodes.to_vec();
        sorted.sort_unstable();
        let pattern = Pattern::induced(graph, &sorted)?;
        let (id, rep) = classifier.classify(&pattern)?;
        let entry = out.classes.entry(id).or_insert_with(|| EnumeratedClass {
            representative: rep,
            count: 0,
            instances: Vec::new(),
        });
        entry.count += 1;
        if keep_instances {
            entry.instances.push(sorted);
        }
        Ok(())
    };

    for root in 0..view.node_count() {
        let ext: Vec<usize> = view.neighbors(root).iter().copied().filter(|&u| u > root).collect();
        sub.push(root);
        extend(&view, &mut sub, ext, root, n, &mut emit)?;
        sub.pop();
    }
    Ok(out)
}

fn extend<F>(
    view: &UndirectedView,
    sub: &mut Vec<usize>,
    mut ext: Vec<usize>,
    root: usize,
    n: usize,
    emit: &mut F,
) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    if sub.len() == n {
        return emit(sub);
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        // Exclusive neighbours of w: not in sub and not adjacent to it.
        for &u in view.neighbors(w) {
            if u > root && !sub.contains(&u) && !sub.iter().any(|&s| view.adjacent(s, u)) && !next.contains(&u) {
                next.push(u);
            }
        }
        sub.push(w);
        extend(view, sub, next, root, n, emit)?;
        sub.pop();
    }
    Ok(())
}
