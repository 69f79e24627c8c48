//! Python bindings: `import mpr`.

use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use mpr_core::evaluation::{build_motif_matrix, ndcg_at_k_with, IdcgMode, InstanceOptions, Method, RelevanceTable};
use mpr_core::ranking::{rank_nodes, Baseline, CombinationMode, CombinationParams, PageRankParams, RankedNode, RankingParams, RankingResult};
use mpr_core::sampling::{census as run_census, CensusMethod, SamplingParams, DEFAULT_MAX_SUBGRAPHS};
use mpr_core::{density, load_edge_list, DirectedGraph, MotifId, NodeTable};

fn py_err(e: mpr_core::Error) -> PyErr {
    match e {
        mpr_core::Error::Io(e) => PyIOError::new_err(e.to_string()),
        mpr_core::Error::Numerical(m) => PyRuntimeError::new_err(m),
        mpr_core::Error::WorkCapExceeded(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A directed graph with string node ids.
#[pyclass(name = "Graph", frozen)]
pub struct PyGraph {
    inner: DirectedGraph,
}

#[pymethods]
impl PyGraph {
    /// `edges` is a list of `(src, dst)` or `(src, dst, weight)` tuples.
    #[new]
    #[pyo3(signature = (edges, weighted = false))]
    fn new(edges: Vec<Bound<'_, PyAny>>, weighted: bool) -> PyResult<Self> {
        let mut nodes = NodeTable::new();
        let mut triplets = Vec::with_capacity(edges.len());
        for e in edges {
            let (s, d, w): (String, String, f64) = match e.extract::<(String, String, f64)>() {
                Ok(t) => t,
                Err(_) => {
                    let (s, d): (String, String) = e.extract()?;
                    (s, d, 1.0)
                }
            };
            if s == d {
                continue;
            }
            triplets.push((nodes.intern(&s), nodes.intern(&d), w));
        }
        let inner = DirectedGraph::from_edges(nodes, triplets, weighted).map_err(py_err)?;
        Ok(PyGraph { inner })
    }

    /// Reads a tab-separated edge list.
    #[staticmethod]
    #[pyo3(signature = (path, weighted = false))]
    fn from_file(path: &str, weighted: bool) -> PyResult<Self> {
        let file = File::open(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        let (inner, _) = load_edge_list(BufReader::new(file), weighted).map_err(py_err)?;
        Ok(PyGraph { inner })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn weighted(&self) -> bool {
        self.inner.is_weighted()
    }

    /// Node ids in index order.
    fn nodes(&self) -> Vec<String> {
        self.inner.nodes().ids().to_vec()
    }

    fn density(&self) -> PyResult<f64> {
        density(&self.inner).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.inner.node_count(), self.inner.edge_count())
    }
}

/// Sparse motif-based adjacency `W_M`.
#[pyclass(name = "MotifMatrix", frozen)]
pub struct PyMotifMatrix {
    #[pyo3(get)]
    motif: String,
    #[pyo3(get)]
    symmetric: bool,
    ids: Vec<String>,
    entries: Vec<(usize, usize, f64)>,
}

#[pymethods]
impl PyMotifMatrix {
    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.ids.len(), self.ids.len())
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `(src_id, dst_id, value)` for each stored entry.
    fn entries(&self) -> Vec<(String, String, f64)> {
        self.entries
            .iter()
            .map(|&(r, c, v)| (self.ids[r].clone(), self.ids[c].clone(), v))
            .collect()
    }

    /// Value at a pair of node ids, 0 when absent.
    fn get(&self, src: &str, dst: &str) -> f64 {
        self.entries
            .iter()
            .find(|&&(r, c, _)| self.ids[r] == src && self.ids[c] == dst)
            .map_or(0.0, |e| e.2)
    }

    fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.ids.len();
        let mut m = vec![vec![0.0; n]; n];
        for &(r, c, v) in &self.entries {
            m[r][c] = v;
        }
        m
    }
}

/// `simple:1`..`simple:7`, `anchor:1`..`anchor:13`, `ensemble` or
/// `sampled:<class id>`.
#[pyfunction]
fn motif_matrix(graph: &PyGraph, motif: &str) -> PyResult<PyMotifMatrix> {
    let id: MotifId = motif.parse().map_err(py_err)?;
    let g = graph.inner.binarize();
    let wm = build_motif_matrix(&g, id, &InstanceOptions::default()).map_err(py_err)?;
    Ok(PyMotifMatrix {
        motif: wm.motif.to_string(),
        symmetric: wm.symmetric,
        ids: g.nodes().ids().to_vec(),
        entries: wm.matrix.iter().collect(),
    })
}

fn method_from(motif: Option<&str>, baseline: Option<&str>, mode: &str, alpha: f64) -> PyResult<Method> {
    match (motif, baseline) {
        (Some(_), Some(_)) => Err(PyValueError::new_err("give motif or baseline, not both")),
        (None, Some(b)) => Ok(Method::Baseline(b.parse::<Baseline>().map_err(py_err)?)),
        (m, None) => {
            let motif: MotifId = m.unwrap_or("simple:7").parse().map_err(py_err)?;
            let mode: CombinationMode = mode.parse().map_err(py_err)?;
            Ok(Method::Mpr {
                motif,
                combination: CombinationParams::new(alpha, mode).map_err(py_err)?,
            })
        }
    }
}

/// Score of every node, keyed by node id.
#[pyfunction]
#[pyo3(signature = (graph, motif = None, baseline = None, mode = "linear", alpha = 0.5, damping = 0.85))]
fn scores(
    graph: &PyGraph,
    motif: Option<&str>,
    baseline: Option<&str>,
    mode: &str,
    alpha: f64,
    damping: f64,
) -> PyResult<HashMap<String, f64>> {
    let method = method_from(motif, baseline, mode, alpha)?;
    let params = RankingParams {
        pagerank: PageRankParams {
            damping,
            ..PageRankParams::default()
        },
        ..RankingParams::default()
    };
    let s = method
        .scores(&graph.inner, &params, &InstanceOptions::default())
        .map_err(py_err)?;
    Ok(graph.inner.nodes().ids().iter().cloned().zip(s).collect())
}

/// Top-`k` `(node_id, score)` pairs, highest first; ties by node id.
#[pyfunction]
#[pyo3(signature = (graph, motif = None, baseline = None, mode = "linear", alpha = 0.5, k = 10, damping = 0.85))]
#[allow(clippy::too_many_arguments)]
fn rank(
    graph: &PyGraph,
    motif: Option<&str>,
    baseline: Option<&str>,
    mode: &str,
    alpha: f64,
    k: usize,
    damping: f64,
) -> PyResult<Vec<(String, f64)>> {
    let all = scores(graph, motif, baseline, mode, alpha, damping)?;
    let nodes = graph.inner.nodes();
    let s: Vec<f64> = nodes.ids().iter().map(|id| all[id]).collect();
    let r = rank_nodes(&s, nodes, k).map_err(py_err)?;
    Ok(r.entries.into_iter().map(|e| (e.node_id, e.score)).collect())
}

/// NDCG@k of `ranking` (node ids, best first) against `relevance`.
#[pyfunction]
#[pyo3(signature = (ranking, relevance, k, idcg = "local"))]
fn ndcg(ranking: Vec<String>, relevance: HashMap<String, f64>, k: usize, idcg: &str) -> PyResult<f64> {
    let mode: IdcgMode = idcg.parse().map_err(py_err)?;
    let table = RelevanceTable::from_pairs(relevance).map_err(py_err)?;
    let result = RankingResult {
        entries: ranking
            .into_iter()
            .enumerate()
            .map(|(i, node_id)| RankedNode {
                rank: i + 1,
                node_id,
                index: i,
                score: 0.0,
            })
            .collect(),
        warning: None,
    };
    Ok(ndcg_at_k_with(&result, &table, k, mode).map_err(py_err)?.value)
}

/// Subgraph census as a list of `(canonical_id, weight, concentration)`.
#[pyfunction]
#[pyo3(signature = (graph, n = 3, method = "exact", samples = SamplingParams::DEFAULT_SAMPLES, seed = 0))]
fn census(graph: &PyGraph, n: usize, method: &str, samples: usize, seed: u64) -> PyResult<Vec<(u64, f64, f64)>> {
    let method = match method {
        "exact" => CensusMethod::Exact {
            max_subgraphs: DEFAULT_MAX_SUBGRAPHS,
        },
        "sampled" => CensusMethod::Sampled {
            num_samples: samples,
            seed,
        },
        other => return Err(PyValueError::new_err(format!("unknown census method {other:?}"))),
    };
    let c = run_census(&graph.inner.binarize(), n, method, false).map_err(py_err)?;
    Ok(c.classes
        .iter()
        .map(|cl| (cl.canonical_id.0, cl.weight, cl.concentration))
        .collect())
}

#[pymodule]
fn mpr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyMotifMatrix>()?;
    m.add_function(wrap_pyfunction!(motif_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(scores, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(ndcg, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    Ok(())
}
