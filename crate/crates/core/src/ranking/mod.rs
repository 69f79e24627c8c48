//! Combination of edge and motif relations, PageRank, and baseline
//! rankings.

mod centrality;
mod combine;
mod pagerank;

pub use centrality::{betweenness, closeness, path_centrality, CentralityOptions, PathCentrality};
pub use combine::{combine, combine_linear, combine_nonlinear, CombinationMode, CombinationParams};
pub use pagerank::{pagerank, transition_matrix, PageRankParams, RankVector, Transition};

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeTable};
use crate::motif::MotifAdjacency;

#[derive(Clone, Debug, PartialEq)]
pub struct RankedNode {
    pub rank: usize,
    pub node_id: String,
    pub index: usize,
    pub score: f64,
}

/// Top-K list, scores non-increasing, ranks starting at 1.
#[derive(Clone, Debug, PartialEq)]
pub struct RankingResult {
    pub entries: Vec<RankedNode>,
    pub warning: Option<String>,
}

impl RankingResult {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.node_id.as_str()).collect()
    }

    /// `rank<TAB>node_id<TAB>score`, scores to 12 significant digits,
    /// preceded by `# key=value` comment lines.
    pub fn write_tsv<W: Write>(&self, out: &mut W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "rank\tnode_id\tscore")?;
        for e in &self.entries {
            writeln!(out, "{}\t{}\t{}", e.rank, e.node_id, format_significant(e.score, 12))?;
        }
        Ok(())
    }
}

/// `%.{digits}g`-style formatting: shortest of fixed or scientific
/// notation, trailing zeros removed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let sci = format!("{:.*e}", digits - 1, x);
    // Rounding can carry into the next power of ten; trust the formatter.
    let exp = sci
        .split_once('e')
        .and_then(|(_, e)| e.parse::<i32>().ok())
        .unwrap_or(exp);
    if exp < -4 || exp >= digits as i32 {
        let (mantissa, e) = sci.split_once('e').expect("scientific format");
        let mantissa = trim_zeros(mantissa);
        let sign = if e.starts_with('-') { "-" } else { "+" };
        let digits_e = e.trim_start_matches('-');
        format!("{mantissa}e{sign}{digits_e:0>2}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The `k` highest-scoring nodes, ties broken by ascending external id.
pub fn rank_nodes(scores: &[f64], nodes: &NodeTable, k: usize) -> Result<RankingResult> {
    if k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    if scores.len() != nodes.len() {
        return Err(Error::invalid(format!(
            "{} scores for {} nodes",
            scores.len(),
            nodes.len()
        )));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| nodes.id(a).cmp(nodes.id(b)))
    });
    let warning = (k > scores.len()).then(|| {
        let w = format!("K = {k} exceeds the {} ranked nodes; returning all", scores.len());
        log::debug!("{w}");
        w
    });
    let entries = order
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(r, i)| RankedNode {
            rank: r + 1,
            node_id: nodes.id(i).to_string(),
            index: i,
            score: scores[i],
        })
        .collect();
    Ok(RankingResult { entries, warning })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Baseline {
    /// In-degree.
    Ind,
    /// Betweenness.
    Bet,
    /// Closeness.
    Clo,
    /// PageRank on the binary adjacency.
    Bpr,
    /// PageRank on edge weights.
    Wpr,
}

impl Baseline {
    pub const ALL: [Baseline; 5] = [Baseline::Ind, Baseline::Bet, Baseline::Clo, Baseline::Bpr, Baseline::Wpr];
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Baseline::Ind => "IND",
            Baseline::Bet => "BET",
            Baseline::Clo => "CLO",
            Baseline::Bpr => "BPR",
            Baseline::Wpr => "WPR",
        })
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "IND" => Ok(Baseline::Ind),
            "BET" => Ok(Baseline::Bet),
            "CLO" => Ok(Baseline::Clo),
            "BPR" => Ok(Baseline::Bpr),
            "WPR" => Ok(Baseline::Wpr),
            _ => Err(Error::invalid(format!("unknown baseline {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RankingParams {
    pub pagerank: PageRankParams,
    pub centrality: CentralityOptions,
}

pub fn baseline_scores(graph: &DirectedGraph, method: Baseline, params: &RankingParams) -> Result<Vec<f64>> {
    let w = graph.adjacency();
    match method {
        Baseline::Ind => Ok(graph.in_degrees().into_iter().map(|d| d as f64).collect()),
        Baseline::Bet => betweenness(w, &params.centrality),
        Baseline::Clo => closeness(w, &params.centrality),
        Baseline::Bpr => {
            let p = transition_matrix(&w.binarized())?;
            Ok(pagerank(&p.matrix, &params.pagerank)?.scores)
        }
        Baseline::Wpr => {
            let p = transition_matrix(w)?;
            Ok(pagerank(&p.matrix, &params.pagerank)?.scores)
        }
    }
}

/// Motif-based PageRank: PageRank on `H` combining the binary adjacency
/// with `motif`.
pub fn mpr_scores(
    graph: &DirectedGraph,
    motif: &MotifAdjacency,
    combination: &CombinationParams,
    pagerank_params: &PageRankParams,
) -> Result<RankVector> {
    let h = combine(&graph.adjacency().binarized(), &motif.matrix, combination)?;
    let p = transition_matrix(&h)?;
    pagerank(&p.matrix, pagerank_params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_nodes_top_k_and_ties() {
        let nodes = NodeTable::from_ids(["1", "2", "3"]).unwrap();
        let r = rank_nodes(&[0.1, 0.7, 0.2], &nodes, 2).unwrap();
        assert_eq!(r.ids(), vec!["2", "3"]);
        assert_eq!(r.entries[0].rank, 1);

        let tied = NodeTable::from_ids(["c", "a", "b"]).unwrap();
        let r = rank_nodes(&[1.0, 1.0, 1.0], &tied, 3).unwrap();
        assert_eq!(r.ids(), vec!["a", "b", "c"]);

        let r = rank_nodes(&[0.1, 0.7, 0.2], &nodes, 5).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.warning.is_some());
        assert!(rank_nodes(&[0.1, 0.7, 0.2], &nodes, 0).is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.5, 12), "0.5");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(2.0 / 3.0, 12), "0.666666666667");
        assert_eq!(format_significant(123456.0, 12), "123456");
        assert_eq!(format_significant(1.5e-7, 12), "1.5e-07");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(0.0001, 12), "0.0001");
        assert_eq!(format_significant(1e12, 12), "1e+12");
        assert_eq!(format_significant(9.9999999999999e-6, 12), "1e-05");
    }

    #[test]
    fn tsv_layout() {
        let nodes = NodeTable::from_ids(["x", "y"]).unwrap();
        let r = rank_nodes(&[0.25, 0.75], &nodes, 2).unwrap();
        let mut buf = Vec::new();
        r.write_tsv(&mut buf, &["alpha=1".into()]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# alpha=1\nrank\tnode_id\tscore\n1\ty\t0.75\n2\tx\t0.25\n"
        );
    }

    #[test]
    fn in_degree_baseline() {
        let g = DirectedGraph::from_id_edges(&[("2", "1"), ("3", "1"), ("4", "1"), ("2", "3"), ("3", "2")]).unwrap();
        let s = baseline_scores(&g, Baseline::Ind, &RankingParams::default()).unwrap();
        let at = |id: &str| s[g.nodes().index_of(id).unwrap()];
        assert_eq!((at("1"), at("2"), at("3"), at("4")), (3.0, 1.0, 1.0, 0.0));
    }

    #[test]
    fn bet_and_clo_baselines() {
        let g = DirectedGraph::from_id_edges(&[("a", "b"), ("b", "c")]).unwrap();
        let s = baseline_scores(&g, Baseline::Bet, &RankingParams::default()).unwrap();
        assert_eq!(s, vec![0.0, 1.0, 0.0]);
        let two = DirectedGraph::from_id_edges(&[("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(baseline_scores(&two, Baseline::Clo, &RankingParams::default()).unwrap(), vec![1.0, 1.0]);
        assert!("XYZ".parse::<Baseline>().is_err());
    }

    #[test]
    fn wpr_equals_bpr_on_unit_weights() {
        let (g, _) = crate::graph::load_edge_list("a\tb\t1\nb\tc\t1\nc\ta\t1\na\tc\t1\n".as_bytes(), true).unwrap();
        let params = RankingParams::default();
        assert_eq!(
            baseline_scores(&g, Baseline::Bpr, &params).unwrap(),
            baseline_scores(&g, Baseline::Wpr, &params).unwrap()
        );
    }
}
