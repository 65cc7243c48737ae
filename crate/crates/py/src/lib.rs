//! Python bindings for `slicemod`.

use std::sync::Arc;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use slicemod::affinity::{self, AffinityConfig, CandidateWindow, ImageBuffer};
use slicemod::diagnostics::{self, SliceDiagnostics};
use slicemod::graph;
use slicemod::louvain::{self, OptimizerParams};
use slicemod::modularity::{self, QualityNormalization};
use slicemod::multislice::{self, GammaSchedule};
use slicemod::Error;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io { .. } => PyOSError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn parse_norm(name: &str) -> PyResult<QualityNormalization> {
    name.parse().map_err(to_py)
}

/// Weighted undirected graph.
#[pyclass(name = "Graph", module = "slicemod_py", frozen)]
pub struct PyGraph {
    inner: Arc<graph::Graph>,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        let inner = graph::Graph::from_edges(n, edges).map_err(to_py)?;
        Ok(PyGraph { inner: Arc::new(inner) })
    }

    /// Parses whitespace-separated `u v [w]` lines.
    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        let inner = graph::Graph::load_edge_list(text).map_err(to_py)?;
        Ok(PyGraph { inner: Arc::new(inner) })
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list()
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
    fn total_weight_2m(&self) -> f64 {
        self.inner.total_weight_2m()
    }

    fn strengths(&self) -> Vec<f64> {
        self.inner.strengths().to_vec()
    }

    fn weight(&self, u: usize, v: usize) -> PyResult<f64> {
        let n = self.inner.node_count();
        if u >= n || v >= n {
            return Err(PyValueError::new_err(format!("node out of range 0..{n}")));
        }
        Ok(self.inner.weight(u, v))
    }

    fn neighbors(&self, node: usize) -> PyResult<Vec<(usize, f64)>> {
        if node >= self.inner.node_count() {
            return Err(PyValueError::new_err(format!("node {node} out of range")));
        }
        Ok(self.inner.neighbors(node).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={}, 2m={})",
            self.inner.node_count(),
            self.inner.edge_count(),
            self.inner.total_weight_2m()
        )
    }
}

/// Copies of one graph across slices with per-slice resolution and
/// nearest-neighbour coupling `omega`.
#[pyclass(name = "MultisliceNetwork", module = "slicemod_py", frozen)]
pub struct PyMultislice {
    inner: multislice::MultisliceNetwork,
}

#[pymethods]
impl PyMultislice {
    #[new]
    fn new(graph: &PyGraph, gammas: Vec<f64>, omega: f64) -> PyResult<Self> {
        let gammas = GammaSchedule::new(gammas).map_err(to_py)?;
        let inner = multislice::build_uniform_multislice(graph.inner.clone(), gammas, omega).map_err(to_py)?;
        Ok(PyMultislice { inner })
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.inner.num_nodes()
    }

    #[getter]
    fn num_slices(&self) -> usize {
        self.inner.num_slices()
    }

    #[getter]
    fn gammas(&self) -> Vec<f64> {
        self.inner.gammas().values().to_vec()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega()
    }

    #[getter]
    fn two_mu(&self) -> f64 {
        self.inner.two_mu()
    }

    #[getter]
    fn base(&self) -> PyGraph {
        PyGraph { inner: self.inner.shared_base() }
    }
}

/// Community labels of every (node, slice) pair.
#[pyclass(name = "Partition", module = "slicemod_py")]
pub struct PyPartition {
    inner: modularity::Partition,
}

#[pymethods]
impl PyPartition {
    /// `labels` is slice-major: entry `s * n + i` is node `i` in slice `s`.
    #[new]
    fn new(network: &PyMultislice, labels: Vec<usize>) -> PyResult<Self> {
        let inner = modularity::Partition::new(&network.inner, labels).map_err(to_py)?;
        Ok(PyPartition { inner })
    }

    #[staticmethod]
    fn singletons(network: &PyMultislice) -> Self {
        PyPartition { inner: modularity::Partition::singletons(&network.inner) }
    }

    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.inner.labels().to_vec()
    }

    fn slice_labels(&self, slice: usize) -> PyResult<Vec<usize>> {
        if slice >= self.inner.num_slices() {
            return Err(PyValueError::new_err(format!("slice {slice} out of range")));
        }
        Ok(self.inner.slice_labels(slice).to_vec())
    }

    #[getter]
    fn num_communities(&self) -> usize {
        self.inner.num_communities()
    }

    fn move_node(&mut self, network: &PyMultislice, node: usize, slice: usize, target: usize) -> PyResult<()> {
        self.inner.move_node(&network.inner, node, slice, target).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Partition(nodes={}, slices={}, communities={})",
            self.inner.num_nodes(),
            self.inner.num_slices(),
            self.inner.num_communities()
        )
    }
}

#[pyclass(name = "OptimizeResult", module = "slicemod_py", frozen, get_all)]
pub struct PyOptimizeResult {
    partition: Py<PyPartition>,
    quality: f64,
    passes_used: usize,
    restart_index_of_best: usize,
}

#[pyfunction]
#[pyo3(signature = (graph, labels, gamma = 1.0))]
fn modularity_single(graph: &PyGraph, labels: Vec<usize>, gamma: f64) -> PyResult<f64> {
    modularity::modularity_single(&graph.inner, &labels, gamma).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (network, partition, normalization = "conventional"))]
fn modularity_multislice(network: &PyMultislice, partition: &PyPartition, normalization: &str) -> PyResult<f64> {
    modularity::modularity_multislice(&network.inner, &partition.inner, parse_norm(normalization)?).map_err(to_py)
}

/// Quality change from moving `(node, slice)` into community `target`.
#[pyfunction]
#[pyo3(signature = (network, partition, node, slice, target, normalization = "conventional"))]
fn delta_move(
    network: &PyMultislice,
    partition: &PyPartition,
    node: usize,
    slice: usize,
    target: usize,
    normalization: &str,
) -> PyResult<f64> {
    modularity::delta_move(&network.inner, &partition.inner, node, slice, target, parse_norm(normalization)?)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (network, seed = 0, restarts = 1, max_passes = 100, min_delta = 1e-10, normalization = "conventional"))]
fn optimize(
    py: Python<'_>,
    network: &PyMultislice,
    seed: u64,
    restarts: usize,
    max_passes: usize,
    min_delta: f64,
    normalization: &str,
) -> PyResult<PyOptimizeResult> {
    let norm = parse_norm(normalization)?;
    let params = OptimizerParams {
        seed,
        restarts,
        max_passes,
        min_delta,
        ..OptimizerParams::default()
    };
    let r = py
        .detach(|| louvain::optimize(&network.inner, &params, norm))
        .map_err(to_py)?;
    Ok(PyOptimizeResult {
        partition: Py::new(py, PyPartition { inner: r.partition })?,
        quality: r.quality,
        passes_used: r.passes_used,
        restart_index_of_best: r.restart_index_of_best,
    })
}

/// Exhaustive optimum for networks with at most 12 supra-nodes.
#[pyfunction]
#[pyo3(signature = (network, normalization = "conventional"))]
fn brute_force_optimum(network: &PyMultislice, normalization: &str) -> PyResult<(PyPartition, f64)> {
    let r = louvain::brute_force_optimum(&network.inner, parse_norm(normalization)?).map_err(to_py)?;
    Ok((PyPartition { inner: r.partition }, r.quality))
}

#[pyfunction]
fn linear_gamma_schedule(start: f64, step: f64, count: usize) -> PyResult<Vec<f64>> {
    Ok(multislice::linear_gamma_schedule(start, step, count)
        .map_err(to_py)?
        .values()
        .to_vec())
}

/// Patch-similarity graph over the pixels of a row-major image with values in [0, 1].
#[pyfunction]
#[pyo3(signature = (width, height, channels, pixels, patch_radius = 1, tau_rank = 30, knn = 30, window = "10"))]
#[allow(clippy::too_many_arguments)]
fn build_affinity_graph(
    py: Python<'_>,
    width: usize,
    height: usize,
    channels: usize,
    pixels: Vec<f64>,
    patch_radius: usize,
    tau_rank: usize,
    knn: usize,
    window: &str,
) -> PyResult<PyGraph> {
    let img = ImageBuffer::new(width, height, channels, pixels).map_err(to_py)?;
    let cfg = AffinityConfig {
        patch_radius,
        tau_rank,
        knn,
        window: window.parse::<CandidateWindow>().map_err(to_py)?,
    };
    let g = py.detach(|| affinity::build_affinity_graph(&img, &cfg)).map_err(to_py)?;
    Ok(PyGraph { inner: Arc::new(g) })
}

#[pyfunction]
fn persistence(partition: &PyPartition) -> PyResult<f64> {
    diagnostics::persistence(&partition.inner).map_err(to_py)
}

/// Per-slice community counts and sizes plus persistence, as a dict.
#[pyfunction]
#[pyo3(signature = (partition, quality = 0.0))]
fn slice_diagnostics<'py>(py: Python<'py>, partition: &PyPartition, quality: f64) -> PyResult<Bound<'py, PyDict>> {
    let d = SliceDiagnostics::compute(&partition.inner, quality);
    let out = PyDict::new(py);
    out.set_item("community_counts", &d.community_counts)?;
    out.set_item("community_sizes", &d.community_sizes)?;
    out.set_item("persistence_to_next", &d.persistence_to_next)?;
    out.set_item("global_persistence", d.global_persistence)?;
    out.set_item("quality", d.quality)?;
    out.set_item("csv", d.to_csv())?;
    Ok(out)
}

#[pymodule]
fn slicemod_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyMultislice>()?;
    m.add_class::<PyPartition>()?;
    m.add_class::<PyOptimizeResult>()?;
    m.add_function(wrap_pyfunction!(modularity_single, m)?)?;
    m.add_function(wrap_pyfunction!(modularity_multislice, m)?)?;
    m.add_function(wrap_pyfunction!(delta_move, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(linear_gamma_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(build_affinity_graph, m)?)?;
    m.add_function(wrap_pyfunction!(persistence, m)?)?;
    m.add_function(wrap_pyfunction!(slice_diagnostics, m)?)?;
    Ok(())
}
