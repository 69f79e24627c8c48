use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::motif::{
    all_simple_motif_matrices, anchor_motif_matrix, ensemble_matrix, motif_adjacency_from_instances,
    simple_motif_matrix, InstanceCounting, MotifAdjacency, MotifFamily, MotifId,
};
use crate::ranking::{baseline_scores, mpr_scores, Baseline, CombinationMode, CombinationParams, RankingParams};
use crate::sampling::{census, CanonicalId, CensusMethod, MotifInstance};
use crate::sparse::SparseMatrix;

/// Settings used when a motif matrix comes from a subgraph census.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceOptions {
    pub counting: InstanceCounting,
    pub census: CensusMethod,
}

impl Default for InstanceOptions {
    fn default() -> Self {
        InstanceOptions {
            counting: InstanceCounting::DirectEdgeOnly,
            census: CensusMethod::default(),
        }
    }
}

/// Builds `W_M` for any motif family on `graph`.
pub fn build_motif_matrix(graph: &DirectedGraph, motif: MotifId, opts: &InstanceOptions) -> Result<MotifAdjacency> {
    match motif.family() {
        MotifFamily::Simple3 => simple_motif_matrix(graph, motif.index() as u8),
        MotifFamily::Anchor3 => anchor_motif_matrix(graph, motif.index() as u8),
        MotifFamily::Ensemble => ensemble_matrix(&all_simple_motif_matrices(graph)?, None),
        MotifFamily::Sampled => {
            let class = CanonicalId(motif.index());
            let n = class.node_count();
            let c = census(graph, n, opts.census, true)?;
            let sets = c.instances.get(&class).map(Vec::as_slice).unwrap_or(&[]);
            if sets.is_empty() {
                log::warn!("class {class} has no instances; motif matrix is empty");
                let size = graph.node_count();
                return Ok(MotifAdjacency {
                    motif,
                    matrix: SparseMatrix::zeros(size, size),
                    symmetric: true,
                });
            }
            let instances = sets
                .iter()
                .map(|s| MotifInstance::simple(s.clone()))
                .collect::<Result<Vec<_>>>()?;
            motif_adjacency_from_instances(motif, &instances, graph, opts.counting)
        }
    }
}

/// A ranking method under evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Baseline(Baseline),
    Mpr {
        motif: MotifId,
        combination: CombinationParams,
    },
}

impl Method {
    pub fn mpr(motif: MotifId, mode: CombinationMode, alpha: f64) -> Result<Self> {
        Ok(Method::Mpr {
            motif,
            combination: CombinationParams::new(alpha, mode)?,
        })
    }

    pub fn scores(&self, graph: &DirectedGraph, params: &RankingParams, opts: &InstanceOptions) -> Result<Vec<f64>> {
        match self {
            Method::Baseline(b) => baseline_scores(graph, *b, params),
            Method::Mpr { motif, combination } => {
                // Motif relations are defined on the binary structure only.
                let binary;
                let g = if graph.is_weighted() {
                    binary = graph.binarize();
                    &binary
                } else {
                    graph
                };
                let wm = build_motif_matrix(g, *motif, opts)?;
                Ok(mpr_scores(g, &wm, combination, &params.pagerank)?.scores)
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Baseline(b) => write!(f, "{b}"),
            Method::Mpr { motif, combination } => {
                write!(f, "mpr:{motif}:{}:{}", combination.mode, combination.alpha)
            }
        }
    }
}

/// Accepts a baseline name (`BPR`) or `mpr:<motif>:<mode>:<alpha>`, for
/// example `mpr:simple:7:linear:0.5` or `mpr:ensemble:nonlinear:0.2`.
impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some(rest) = s.strip_prefix("mpr:") else {
            return s.parse().map(Method::Baseline);
        };
        let mut parts = rest.rsplitn(3, ':');
        let (Some(alpha), Some(mode), Some(motif)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::invalid(format!("method {s:?}: expected mpr:<motif>:<mode>:<alpha>")));
        };
        let alpha: f64 = alpha
            .parse()
            .map_err(|_| Error::invalid(format!("method {s:?}: bad alpha {alpha:?}")))?;
        Method::mpr(motif.parse()?, mode.parse()?, alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_round_trip() {
        for s in ["BPR", "IND", "mpr:simple:7:linear:0.5", "mpr:anchor:10:nonlinear:0", "mpr:ensemble:linear:1"] {
            assert_eq!(s.parse::<Method>().unwrap().to_string(), s);
        }
        assert!("mpr:simple:7:linear".parse::<Method>().is_err());
        assert!("mpr:simple:7:linear:1.5".parse::<Method>().is_err());
        assert!("PR".parse::<Method>().is_err());
    }

    #[test]
    fn sampled_family_matches_closed_form_support() {
        // Reciprocal triangle: one fully connected class instance.
        let g = DirectedGraph::from_index_edges(3, &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]).unwrap();
        let m4 = simple_motif_matrix(&g, 4).unwrap();
        let class = crate::sampling::canonical_form(&crate::sampling::Pattern::induced(&g, &[0, 1, 2]).unwrap()).unwrap();
        let sampled = build_motif_matrix(
            &g,
            MotifId::sampled(class),
            &InstanceOptions {
                counting: InstanceCounting::AnchorCooccur,
                ..InstanceOptions::default()
            },
        )
        .unwrap();
        assert_eq!(sampled.matrix, m4.matrix);
    }
}
