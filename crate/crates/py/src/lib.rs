//! Python bindings. Results that are naturally records come back as plain
//! dicts and lists; unreachable costs are `float("inf")`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use railnet::scenario::parse_scenarios;
use railnet::{Analyzer, ExpandedGraph, Measure, ParseMode, RawNetwork, Restriction, WeightKind};

fn err(e: railnet::Error) -> PyErr {
    if e.is_data_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn weight(name: &str) -> PyResult<WeightKind> {
    name.parse().map_err(err)
}

fn measure(m: Measure) -> f64 {
    m.value().unwrap_or(f64::INFINITY)
}

/// A railway network document.
#[pyclass(module = "pyrailnet", frozen)]
struct Network {
    inner: RawNetwork,
}

#[pymethods]
impl Network {
    /// Parses a JSON network document.
    #[staticmethod]
    #[pyo3(signature = (text, lenient = false))]
    fn from_json(text: &str, lenient: bool) -> PyResult<Self> {
        let mode = if lenient { ParseMode::Lenient } else { ParseMode::Strict };
        Ok(Network {
            inner: railnet::parse_network_with(text, mode).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (path, lenient = false))]
    fn load(path: &str, lenient: bool) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PyValueError::new_err(format!("{path}: {e}")))?;
        Self::from_json(&text, lenient)
    }

    fn to_json(&self) -> String {
        railnet::render_network(&self.inner)
    }

    #[getter]
    fn station_ids(&self) -> Vec<String> {
        self.inner.stations.iter().map(|s| s.id.clone()).collect()
    }

    #[getter]
    fn section_ids(&self) -> Vec<String> {
        self.inner.sections.iter().map(|s| s.id.clone()).collect()
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &railnet::validate(&self.inner))
    }

    /// Copy with pass-through joints merged into their neighbours.
    fn contract(&self) -> Network {
        Network {
            inner: railnet::contract_joint_nodes(&self.inner),
        }
    }

    /// Four-port expansion weighted by `"time"` or `"distance"`.
    #[pyo3(signature = (weight_kind = "time"))]
    fn expand(&self, weight_kind: &str) -> PyResult<Graph> {
        Ok(Graph {
            inner: railnet::expand(&self.inner, weight(weight_kind)?),
        })
    }

    /// Applies a scenario given as a JSON object.
    fn apply_scenario(&self, scenario_json: &str) -> PyResult<Network> {
        let specs = parse_scenarios(scenario_json, ParseMode::Strict).map_err(err)?;
        let mut net = self.inner.clone();
        for s in &specs {
            net = railnet::apply_scenario(&net, s).map_err(err)?;
        }
        Ok(Network { inner: net })
    }

    fn __repr__(&self) -> String {
        format!(
            "Network({} stations, {} sections)",
            self.inner.stations.len(),
            self.inner.sections.len()
        )
    }
}

/// Expanded directed graph of one weight kind.
#[pyclass(module = "pyrailnet", frozen)]
struct Graph {
    inner: ExpandedGraph,
}

#[pymethods]
impl Graph {
    #[getter]
    fn weight_kind(&self) -> &'static str {
        self.inner.weight_kind().as_str()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.nodes().len()
    }

    #[getter]
    fn arc_count(&self) -> usize {
        self.inner.arcs().len()
    }

    #[pyo3(signature = (origin, destination, removed = Vec::new()))]
    fn shortest_path<'py>(
        &self,
        py: Python<'py>,
        origin: &str,
        destination: &str,
        removed: Vec<String>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let view = self.inner.remove_sections(&removed).map_err(err)?;
        let r = railnet::shortest_path(&view, origin, destination).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("cost", r.cost.unwrap_or(f64::INFINITY))?;
        d.set_item("sections", r.sections)?;
        d.set_item("reversals", r.reversals)?;
        Ok(d.into_any())
    }

    /// `{"origins", "costs", "total", "reciprocal_total"}` over eligible
    /// stations; `total` is inf when any pair is unreachable.
    #[pyo3(signature = (removed = Vec::new()))]
    fn all_pairs<'py>(&self, py: Python<'py>, removed: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
        let view = self.inner.remove_sections(&removed).map_err(err)?;
        let m = py.detach(|| railnet::all_pairs(&view));
        let d = PyDict::new(py);
        d.set_item("total", railnet::total_cost(&m).unwrap_or(f64::INFINITY))?;
        d.set_item("reciprocal_total", railnet::routing::sum_reciprocals(&m.costs))?;
        d.set_item("origins", m.origins)?;
        d.set_item("costs", m.costs)?;
        Ok(d.into_any())
    }

    /// Section id to number of station pairs whose path uses it.
    #[pyo3(signature = (removed = Vec::new()))]
    fn flows<'py>(&self, py: Python<'py>, removed: Vec<String>) -> PyResult<Bound<'py, PyDict>> {
        let view = self.inner.remove_sections(&removed).map_err(err)?;
        let usage = py.detach(|| railnet::section_flows(&railnet::all_pairs(&view)));
        let d = PyDict::new(py);
        for (id, c) in usage.section_ids.iter().zip(&usage.counts) {
            d.set_item(id, c)?;
        }
        Ok(d)
    }

    fn nri(&self, py: Python<'_>, section: &str) -> PyResult<f64> {
        py.detach(|| Analyzer::new(&self.inner).nri(section).map(|r| measure(r.q)))
            .map_err(err)
    }

    fn nri_pair(&self, py: Python<'_>, u: &str, v: &str) -> PyResult<f64> {
        py.detach(|| Analyzer::new(&self.inner).nri_pair(u, v).map(|r| measure(r.q)))
            .map_err(err)
    }

    /// Redundancy records, one per target, in target order.
    #[pyo3(signature = (targets, unrestricted = false))]
    fn redundancy<'py>(
        &self,
        py: Python<'py>,
        targets: Vec<String>,
        unrestricted: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let restriction = if unrestricted {
            Restriction::Unrestricted
        } else {
            Restriction::BaselineAvoidsTarget
        };
        let results = py
            .detach(|| Analyzer::new(&self.inner).redundancy_sweep(&targets, restriction))
            .map_err(err)?;
        to_py(py, &results)
    }

    fn to_dot(&self) -> String {
        self.inner.to_dot()
    }
}

/// Compares scenarios (a JSON object or array) against `network`.
#[pyfunction]
#[pyo3(signature = (network, scenarios_json, busiest = None, weight_kind = "both"))]
fn compare<'py>(
    py: Python<'py>,
    network: &Network,
    scenarios_json: &str,
    busiest: Option<&str>,
    weight_kind: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let specs = parse_scenarios(scenarios_json, ParseMode::Strict).map_err(err)?;
    let kinds = railnet::report::parse_weight_selection(weight_kind).map_err(err)?;
    let report = py
        .detach(|| railnet::compare_scenarios(&network.inner, &specs, busiest, &kinds))
        .map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn pyrailnet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Network>()?;
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
