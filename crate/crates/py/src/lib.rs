//! Python bindings. Edge sets cross the boundary as sorted lists of edge
//! indices (`tail * power + jump - 1`); reports come back as dicts.

use cyclepow_core::decomposition::{PartitionOptions, RemarkOptions};
use cyclepow_core::wcsc::{self, EnumerateOptions};
use cyclepow_core::{self as core, CyclePowerGraph, EdgeSet, ExportFormat, StripParams};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn py_err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn indices(s: &EdgeSet) -> Vec<usize> {
    s.indices().collect()
}

/// Directed cycle power `Cay(Z_n, {1..power})`.
#[pyclass(name = "CyclePowerGraph", module = "cyclepow", frozen)]
struct PyGraph {
    g: CyclePowerGraph,
}

impl PyGraph {
    fn set(&self, edges: Vec<usize>) -> PyResult<EdgeSet> {
        EdgeSet::from_indices(self.g.n(), self.g.power(), edges).map_err(py_err)
    }
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, power = 2))]
    fn new(n: usize, power: usize) -> PyResult<Self> {
        Ok(PyGraph {
            g: CyclePowerGraph::new(n, power).map_err(py_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.g.n()
    }

    #[getter]
    fn power(&self) -> usize {
        self.g.power()
    }

    fn edge_count(&self) -> usize {
        self.g.edge_count()
    }

    /// `(tail, head, jump)` of edge `idx`.
    fn edge(&self, idx: usize) -> PyResult<(usize, usize, usize)> {
        if idx >= self.g.edge_count() {
            return Err(PyValueError::new_err(format!(
                "edge index {idx} out of range"
            )));
        }
        let e = self.g.edge(idx);
        Ok((e.tail, self.g.head(idx), e.jump))
    }

    fn edge_index(&self, tail: i64, jump: usize) -> PyResult<usize> {
        if jump == 0 || jump > self.g.power() {
            return Err(PyValueError::new_err(format!(
                "jump {jump} not in 1..={}",
                self.g.power()
            )));
        }
        Ok(self.g.edge_index(tail, jump))
    }

    fn triangles(&self) -> Vec<[usize; 3]> {
        self.g.triangles().iter().map(|t| t.members).collect()
    }

    fn is_weakly_connected(&self, edges: Vec<usize>) -> PyResult<bool> {
        Ok(self.g.is_weakly_connected(&self.set(edges)?))
    }

    fn is_closed(&self, edges: Vec<usize>) -> PyResult<bool> {
        Ok(wcsc::is_closed(&self.g, &self.set(edges)?))
    }

    fn is_wcsc(&self, edges: Vec<usize>) -> PyResult<bool> {
        Ok(wcsc::is_wcsc(&self.g, &self.set(edges)?))
    }

    fn closure(&self, edges: Vec<usize>) -> PyResult<Vec<usize>> {
        Ok(indices(&wcsc::closure(&self.g, &self.set(edges)?)))
    }

    /// Closure plus the edges added, in the order they were added.
    fn closure_trace(&self, edges: Vec<usize>) -> PyResult<(Vec<usize>, Vec<usize>)> {
        let (s, added) = wcsc::closure_trace(&self.g, &self.set(edges)?);
        Ok((indices(&s), added))
    }

    fn classify<'py>(&self, py: Python<'py>, edges: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &wcsc::classify(&self.g, &self.set(edges)?))
    }

    fn homology_trivial(&self, edges: Vec<usize>) -> PyResult<bool> {
        Ok(wcsc::homology_trivial(&self.g, &self.set(edges)?))
    }

    fn canonical_form(&self, edges: Vec<usize>) -> PyResult<Vec<usize>> {
        Ok(indices(&self.g.canonical_form(&self.set(edges)?)))
    }

    #[pyo3(signature = (force = false))]
    fn enumerate_wcsc(&self, py: Python<'_>, force: bool) -> PyResult<Vec<Vec<usize>>> {
        let opts = EnumerateOptions {
            force,
            parallel: true,
        };
        let all = py
            .detach(|| wcsc::enumerate_wcsc(&self.g, opts))
            .map_err(py_err)?;
        Ok(all.iter().map(indices).collect())
    }

    fn wcsc_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let all = py
            .detach(|| wcsc::enumerate_wcsc(&self.g, EnumerateOptions::default()))
            .map_err(py_err)?;
        to_dict(py, &wcsc::wcsc_report(&self.g, &all))
    }

    #[pyo3(signature = (edges, root = 0))]
    fn is_arborescence(&self, edges: Vec<usize>, root: usize) -> PyResult<bool> {
        Ok(core::is_arborescence(&self.g, &self.set(edges)?, root))
    }

    /// Exact tree count from the Laplacian minor.
    #[pyo3(signature = (root = 0))]
    fn count_trees(&self, root: usize) -> PyResult<BigInt> {
        let (dg, _) = core::Digraph::from_edge_set(&self.g, &self.g.full_set());
        if root >= self.g.n() {
            return Err(PyValueError::new_err(format!("root {root} out of range")));
        }
        Ok(core::count_arborescences_det(&dg, root))
    }

    #[pyo3(signature = (root = 0))]
    fn enumerate_trees(&self, py: Python<'_>, root: usize) -> PyResult<Vec<Vec<usize>>> {
        if root >= self.g.n() {
            return Err(PyValueError::new_err(format!("root {root} out of range")));
        }
        Ok(py.detach(|| {
            core::enumerate_arborescences(&self.g, root)
                .map(|t| indices(&t.edges))
                .collect()
        }))
    }

    /// Strip `(k, j)` whose closure contains the tree rooted at `root`.
    #[pyo3(signature = (edges, root = 0))]
    fn locate_tree(&self, edges: Vec<usize>, root: usize) -> PyResult<(usize, usize)> {
        let tree = core::Arborescence {
            edges: self.set(edges)?,
            root,
        };
        let p = core::locate_tree(&self.g, &tree).map_err(py_err)?;
        Ok((p.k, p.j))
    }

    /// Graphviz DOT or JSON text for the subgraph (default: the whole graph).
    #[pyo3(signature = (edges = None, format = "dot"))]
    fn export(&self, edges: Option<Vec<usize>>, format: &str) -> PyResult<String> {
        let fmt: ExportFormat = format.parse().map_err(py_err)?;
        let s = match edges {
            Some(e) => self.set(e)?,
            None => self.g.full_set(),
        };
        Ok(self.g.export(&s, fmt))
    }

    fn __repr__(&self) -> String {
        format!(
            "CyclePowerGraph(n={}, power={})",
            self.g.n(),
            self.g.power()
        )
    }
}

#[pyfunction]
fn jacobsthal(m: usize) -> BigInt {
    core::jacobsthal(m)
}

#[pyfunction]
fn spectral_product(n: usize) -> PyResult<f64> {
    core::spectral_product(n).map_err(py_err)
}

#[pyfunction]
fn count_strip(m: usize) -> PyResult<BigInt> {
    core::count_strip(m).map_err(py_err)
}

#[pyfunction]
fn count_square_cycle(n: usize) -> PyResult<BigInt> {
    core::count_square_cycle(n).map_err(py_err)
}

#[pyfunction]
fn count_strip_with_tails(n: usize, k: usize, j: usize) -> PyResult<BigInt> {
    core::count_strip_with_tails(n, StripParams::new(k, j)).map_err(py_err)
}

#[pyfunction]
fn strip_with_tails(n: usize, k: usize, j: usize) -> PyResult<Vec<usize>> {
    Ok(indices(
        &core::strip_with_tails(n, StripParams::new(k, j)).map_err(py_err)?,
    ))
}

#[pyfunction]
fn escape_route(n: usize, k: usize, j: usize) -> PyResult<Vec<usize>> {
    Ok(indices(
        &core::escape_route(n, StripParams::new(k, j)).map_err(py_err)?,
    ))
}

/// Tree count of an arbitrary digraph given as `(tail, head)` arcs.
#[pyfunction]
#[pyo3(signature = (n, arcs, root = 0))]
fn count_digraph(n: usize, arcs: Vec<(usize, usize)>, root: usize) -> PyResult<BigInt> {
    if root >= n {
        return Err(PyValueError::new_err(format!("root {root} out of range")));
    }
    let dg = core::Digraph::new(n, arcs).map_err(py_err)?;
    Ok(core::count_arborescences_det(&dg, root))
}

#[pyfunction]
#[pyo3(signature = (n, root = 0, oracle = true))]
fn verify_partition<'py>(
    py: Python<'py>,
    n: usize,
    root: usize,
    oracle: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = PartitionOptions {
        oracle,
        ..PartitionOptions::default()
    };
    let report = py
        .detach(|| core::verify_partition(n, root, opts))
        .map_err(py_err)?;
    to_dict(py, &report)
}

#[pyfunction]
#[pyo3(signature = (n, raw_oracle = false))]
fn verify_classification<'py>(
    py: Python<'py>,
    n: usize,
    raw_oracle: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let report = py
        .detach(|| wcsc::verify_classification(n, raw_oracle, EnumerateOptions::default()))
        .map_err(py_err)?;
    to_dict(py, &report)
}

#[pyfunction]
fn verify_cube_remark<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let report = py
        .detach(|| core::verify_cube_remark(n, RemarkOptions::default()))
        .map_err(py_err)?;
    to_dict(py, &report)
}

#[pymodule]
pub fn cyclepow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(jacobsthal, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_product, m)?)?;
    m.add_function(wrap_pyfunction!(count_strip, m)?)?;
    m.add_function(wrap_pyfunction!(count_square_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(count_strip_with_tails, m)?)?;
    m.add_function(wrap_pyfunction!(strip_with_tails, m)?)?;
    m.add_function(wrap_pyfunction!(escape_route, m)?)?;
    m.add_function(wrap_pyfunction!(count_digraph, m)?)?;
    m.add_function(wrap_pyfunction!(verify_partition, m)?)?;
    m.add_function(wrap_pyfunction!(verify_classification, m)?)?;
    m.add_function(wrap_pyfunction!(verify_cube_remark, m)?)?;
    Ok(())
}
