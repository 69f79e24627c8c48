use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::NodeTable;
use crate::ranking::{format_significant, path_centrality, CentralityOptions};
use crate::sparse::SparseMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow {
    pub node_id: String,
    pub in_degree: usize,
    pub out_degree: usize,
    pub betweenness: f64,
    pub closeness: f64,
}

/// Degrees from the nonzero structure of `matrix`; betweenness and
/// closeness on its unweighted support.
pub fn extract_features(matrix: &SparseMatrix, nodes: &NodeTable, opts: &CentralityOptions) -> Result<Vec<FeatureRow>> {
    if !matrix.is_square() || matrix.rows() != nodes.len() {
        return Err(Error::invalid(format!(
            "features of a {:?} matrix for {} nodes",
            matrix.dims(),
            nodes.len()
        )));
    }
    let paths = path_centrality(matrix, opts)?;
    let in_deg = matrix.col_counts();
    Ok((0..matrix.rows())
        .map(|i| FeatureRow {
            node_id: nodes.id(i).to_string(),
            in_degree: in_deg[i],
            out_degree: matrix.row_nnz(i),
            betweenness: paths.betweenness[i],
            closeness: paths.closeness[i],
        })
        .collect())
}

pub fn write_features_tsv<W: Write>(out: &mut W, rows: &[FeatureRow], comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "node_id\tin\tout\tbetweenness\tcloseness")?;
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.node_id,
            r.in_degree,
            r.out_degree,
            format_significant(r.betweenness, 12),
            format_significant(r.closeness, 12)
        )?;
    }
    Ok(())
}
