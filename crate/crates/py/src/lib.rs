//! Python bindings for the tagrec library: dataset handling, tripartite
//! graph construction, the three diffusion kernels and the experiment
//! harness.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use tagrec::diffusion::{diffuse, recommend, Algorithm};
use tagrec::graph::TripartiteGraph;
use tagrec::harness::{emit_report, run_experiment, ExperimentConfig};
use tagrec::ingest;
use tagrec::metrics;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_algorithm(code: &str) -> PyResult<Algorithm> {
    Algorithm::parse(code)
        .ok_or_else(|| value_err(format!("unknown algorithm '{code}' (expected uo, uot or uto)")))
}

/// A list of (user, object, tags) assignments.
#[pyclass(name = "Dataset")]
#[derive(Clone)]
struct PyDataset {
    inner: ingest::Dataset,
}

#[pymethods]
impl PyDataset {
    /// Build a dataset from (user, object, tags) triples.
    #[new]
    fn new(records: Vec<(String, String, Vec<String>)>) -> PyResult<Self> {
        let mut text = String::new();
        for (user, object, tags) in &records {
            if tags.is_empty() {
                return Err(value_err(format!(
                    "assignment ({user}, {object}) has no tags"
                )));
            }
            text.push_str(&format!("{}\t{}\t{}\n", user, object, tags.join(",")));
        }
        Ok(PyDataset {
            inner: ingest::parse_records(&text).map_err(value_err)?,
        })
    }

    /// Parse the tab-separated record format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyDataset {
            inner: ingest::parse_records(text).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| PyIOError::new_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn assignments(&self) -> Vec<(String, String, Vec<String>)> {
        self.inner
            .assignments
            .iter()
            .map(|a| (a.user.clone(), a.object.clone(), a.tags.clone()))
            .collect()
    }

    /// Apply the five purification constraints to a fixpoint.
    fn purify(&self) -> PyDataset {
        PyDataset {
            inner: ingest::purify(&self.inner),
        }
    }

    /// Seeded train/test division; returns (train, test).
    fn split(&self, ratio: f64, seed: u64) -> PyResult<(PyDataset, PyDataset)> {
        let pair = ingest::split(&self.inner, ratio, seed).map_err(value_err)?;
        Ok((
            PyDataset { inner: pair.train },
            PyDataset { inner: pair.test },
        ))
    }

    /// Summary statistics as a dict (n, m, r and the three mean degrees).
    fn summarize<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        use pyo3::types::PyDict;
        let s = ingest::summarize(&self.inner);
        let d = PyDict::new_bound(py);
        d.set_item("n", s.n)?;
        d.set_item("m", s.m)?;
        d.set_item("r", s.r)?;
        d.set_item("k_mean", s.mean_objects_per_user)?;
        d.set_item("k_prime_mean", s.mean_tags_per_object)?;
        d.set_item("k_dprime_mean", s.mean_tags_per_user)?;
        Ok(d)
    }

    fn serialize(&self) -> String {
        ingest::serialize_records(&self.inner)
    }
}

/// Immutable sparse user-object-tag graph.
#[pyclass(name = "Graph")]
struct PyGraph {
    inner: TripartiteGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(dataset: &PyDataset) -> PyResult<Self> {
        Ok(PyGraph {
            inner: tagrec::graph::build_graph(&dataset.inner).map_err(value_err)?,
        })
    }

    fn n(&self) -> usize {
        self.inner.n()
    }

    fn m(&self) -> usize {
        self.inner.m()
    }

    fn r(&self) -> usize {
        self.inner.r()
    }

    /// Diffusion scores for one user, indexed by object id.
    fn diffuse(&self, algorithm: &str, user: &str) -> PyResult<Vec<f64>> {
        let alg = parse_algorithm(algorithm)?;
        let uid = self.inner.user_id(user).map_err(value_err)?;
        Ok(diffuse(&self.inner, alg, uid).map_err(value_err)?.scores)
    }

    /// Top-L uncollected objects as (label, score) pairs, best first.
    fn recommend(
        &self,
        algorithm: &str,
        user: &str,
        length: usize,
    ) -> PyResult<Vec<(String, f64)>> {
        let alg = parse_algorithm(algorithm)?;
        let uid = self.inner.user_id(user).map_err(value_err)?;
        let scores = diffuse(&self.inner, alg, uid).map_err(value_err)?;
        let list = recommend(&self.inner, &scores, length);
        Ok(list
            .objects
            .iter()
            .map(|&o| {
                (
                    self.inner.object_label(o).to_string(),
                    scores.scores[o as usize],
                )
            })
            .collect())
    }

    /// Ranking score of a withheld object for one user under one algorithm.
    fn ranking_score(&self, algorithm: &str, user: &str, object: &str) -> PyResult<f64> {
        let alg = parse_algorithm(algorithm)?;
        let uid = self.inner.user_id(user).map_err(value_err)?;
        let oid = self.inner.object_id(object).map_err(value_err)?;
        let scores = diffuse(&self.inner, alg, uid).map_err(value_err)?;
        Ok(metrics::ranking_score(&self.inner, &scores, oid)
            .map_err(value_err)?
            .rs)
    }

    /// Shannon entropy (natural log) of the user's tag-usage frequencies.
    fn user_entropy(&self, user: &str) -> PyResult<f64> {
        let uid = self.inner.user_id(user).map_err(value_err)?;
        metrics::user_entropy(&self.inner, uid).map_err(value_err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<PyGraph> {
        Ok(PyGraph {
            inner: TripartiteGraph::from_text(text).map_err(value_err)?,
        })
    }
}

/// Run a full multi-realization experiment and write the CSV report.
///
/// Returns {algorithm: {"rs": ..., "rs_low": ..., "rs_high": ...}} with
/// None for undefined values.
#[pyfunction]
#[pyo3(signature = (dataset_path, output_dir, algorithms=vec!["uo".into(), "uot".into(), "uto".into()], ratio=0.9, realizations=50, seed=0, lengths=vec![10, 20, 50], threshold=10))]
#[allow(clippy::too_many_arguments)]
fn evaluate<'py>(
    py: Python<'py>,
    dataset_path: PathBuf,
    output_dir: PathBuf,
    algorithms: Vec<String>,
    ratio: f64,
    realizations: u32,
    seed: u64,
    lengths: Vec<usize>,
    threshold: u32,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let cfg = ExperimentConfig {
        dataset: dataset_path,
        algorithms: algorithms
            .iter()
            .map(|a| parse_algorithm(a))
            .collect::<PyResult<_>>()?,
        ratio,
        realizations,
        master_seed: seed,
        lengths,
        threshold,
        output_dir: output_dir.clone(),
        ..ExperimentConfig::default()
    };
    let report = py
        .allow_threads(|| run_experiment(&cfg))
        .map_err(value_err)?;
    emit_report(&report, &output_dir).map_err(value_err)?;
    let out = PyDict::new_bound(py);
    for a in &report.algorithms {
        let row = PyDict::new_bound(py);
        row.set_item("rs", a.rs.map(|x| x.mean))?;
        row.set_item("rs_low", a.rs_low.map(|x| x.mean))?;
        row.set_item("rs_high", a.rs_high.map(|x| x.mean))?;
        out.set_item(a.algorithm.code(), row)?;
    }
    Ok(out)
}

#[pymodule]
fn tagrec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    Ok(())
}
