//! Motif-based PageRank.
//!
//! Ranks nodes of a directed network by running PageRank on a combination
//! of the edge adjacency matrix `W` and a motif-based adjacency matrix
//! `W_M`, whose entries count how many motif instances a node pair shares.
//!
//! - [`graph`] and [`sparse`]: ingestion and the sparse kernels.
//! - [`motif`]: closed-form 3-node motif matrices, instance-based matrices
//!   and ensembles.
//! - [`sampling`]: subgraph census, null models and motif selection.
//! - [`ranking`]: combination, transition matrices, PageRank and baselines.
//! - [`evaluation`]: NDCG, RMSE, α-sweeps, significance tests and features.

pub mod error;
pub mod evaluation;
pub mod graph;
pub mod motif;
pub mod ranking;
pub mod sampling;
pub mod sparse;

pub use error::{Error, Result};
pub use graph::{density, load_edge_list, split_bidirectional, DirectedGraph, IngestStats, NodeTable};
pub use motif::{
    anchor_motif_matrix, ensemble_matrix, motif_adjacency_from_instances, simple_motif_matrix, InstanceCounting,
    MotifAdjacency, MotifId,
};
pub use sparse::{motif_kernel, SparseMatrix};
