//! Python bindings for hiergraph.
//!
//! Plain data (attributes, node maps, edits, relations, reports) crosses
//! the boundary as the same JSON-shaped values the files use, so a dict
//! read from a fixture can be passed straight in.

use ::hiergraph as core;
use core::propagation::{self, Direction, PlanFile, Relation};
use core::{AttrSet, Edit, NodeId, NodeMap};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::sync::Arc;

create_exception!(hiergraph, HiergraphError, PyException, "Raised when a graph operation, construction or propagation fails.");

fn err(e: core::Error) -> PyErr {
    HiergraphError::new_err(e.to_string())
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let json = PyModule::import(obj.py(), "json")?;
    let text: String = json.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(PyModule::import(py, "json")?.call_method1("loads", (text,))?.unbind())
}

fn attrs_arg(attrs: Option<&Bound<'_, PyAny>>) -> PyResult<AttrSet> {
    attrs.map(from_py).transpose().map(Option::unwrap_or_default)
}

fn node_map(map: std::collections::BTreeMap<String, String>) -> NodeMap {
    map.into_iter().map(|(a, b)| (NodeId::from(a), NodeId::from(b))).collect()
}

fn plain_map(map: &NodeMap) -> std::collections::BTreeMap<String, String> {
    map.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn direction(s: &str) -> PyResult<Direction> {
    match s {
        "fwd" | "forward" => Ok(Direction::Forward),
        "bwd" | "backward" => Ok(Direction::Backward),
        _ => Err(PyValueError::new_err(format!("direction must be 'fwd' or 'bwd', not {s:?}"))),
    }
}

/// A simple directed graph whose nodes and edges carry set-valued attributes.
#[pyclass(module = "hiergraph", name = "Graph", from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: Arc<core::Graph>,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new() -> Self {
        PyGraph { inner: Arc::new(core::Graph::new()) }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let g: core::Graph = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyGraph { inner: Arc::new(g) })
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&*self.inner).expect("graphs serialize")
    }

    #[pyo3(signature = (id, attrs=None))]
    fn add_node(&mut self, id: &str, attrs: Option<&Bound<'_, PyAny>>) -> PyResult<()> {
        let attrs = attrs_arg(attrs)?;
        Arc::make_mut(&mut self.inner).add_node(id, attrs).map_err(err)
    }

    #[pyo3(signature = (source, target, attrs=None))]
    fn add_edge(&mut self, source: &str, target: &str, attrs: Option<&Bound<'_, PyAny>>) -> PyResult<()> {
        let attrs = attrs_arg(attrs)?;
        Arc::make_mut(&mut self.inner).add_edge(source, target, attrs).map_err(err)
    }

    /// Applies an edit given as a dict such as `{"op": "clone_node", ...}`.
    fn apply(&mut self, edit: &Bound<'_, PyAny>) -> PyResult<()> {
        let edit: Edit = from_py(edit)?;
        self.inner = Arc::new(core::attr_graph::apply_edit(&self.inner, &edit).map_err(err)?);
        Ok(())
    }

    fn nodes(&self) -> Vec<String> {
        self.inner.nodes().map(|(n, _)| n.to_string()).collect()
    }

    fn edges(&self) -> Vec<(String, String)> {
        self.inner.edges().map(|(a, b, _)| (a.to_string(), b.to_string())).collect()
    }

    fn node_attrs(&self, py: Python<'_>, id: &str) -> PyResult<Py<PyAny>> {
        let a = self.inner.node_attrs(&NodeId::from(id)).ok_or_else(|| PyKeyError::new_err(id.to_string()))?;
        to_py(py, a)
    }

    fn is_isomorphic(&self, other: &PyGraph) -> bool {
        core::attr_graph::is_isomorphic(&self.inner, &other.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __eq__(&self, other: &PyGraph) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Graph({} nodes, {} edges)", self.inner.node_count(), self.inner.edge_count())
    }
}

/// A structure- and attribute-preserving map between two graphs.
#[pyclass(module = "hiergraph", name = "Homomorphism", from_py_object)]
#[derive(Clone)]
struct PyHom {
    inner: core::Homomorphism,
}

#[pymethods]
impl PyHom {
    #[new]
    fn new(source: &PyGraph, target: &PyGraph, mapping: std::collections::BTreeMap<String, String>) -> PyResult<Self> {
        let inner = core::Homomorphism::new(source.inner.clone(), target.inner.clone(), node_map(mapping)).map_err(err)?;
        Ok(PyHom { inner })
    }

    #[staticmethod]
    fn identity(g: &PyGraph) -> Self {
        PyHom { inner: core::Homomorphism::identity(g.inner.clone()) }
    }

    #[getter]
    fn source(&self) -> PyGraph {
        PyGraph { inner: self.inner.source().clone() }
    }

    #[getter]
    fn target(&self) -> PyGraph {
        PyGraph { inner: self.inner.target().clone() }
    }

    #[getter]
    fn mapping(&self) -> std::collections::BTreeMap<String, String> {
        plain_map(self.inner.map())
    }

    fn is_mono(&self) -> bool {
        self.inner.is_mono()
    }

    fn is_epi(&self) -> bool {
        self.inner.is_epi()
    }

    fn is_iso(&self) -> bool {
        self.inner.is_iso()
    }

    /// `self ∘ first`.
    fn after(&self, first: &PyHom) -> PyResult<PyHom> {
        Ok(PyHom { inner: self.inner.after(&first.inner).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("Homomorphism({:?})", plain_map(self.inner.map()))
    }
}

fn hom(inner: core::Homomorphism) -> PyHom {
    PyHom { inner }
}

fn graph(inner: Arc<core::Graph>) -> PyGraph {
    PyGraph { inner }
}

/// Pullback of the cospan `f: A → C ← B: g`, as `(P, P → A, P → B)`.
#[pyfunction]
fn pullback(f: &PyHom, g: &PyHom) -> PyResult<(PyGraph, PyHom, PyHom)> {
    let pb = core::category::pullback(&f.inner, &g.inner).map_err(err)?;
    Ok((graph(pb.object), hom(pb.to_left), hom(pb.to_right)))
}

/// Pushout of the span `B ← A → C`, as `(D, B → D, C → D)`.
#[pyfunction]
fn pushout(f: &PyHom, g: &PyHom) -> PyResult<(PyGraph, PyHom, PyHom)> {
    let po = core::category::pushout(&f.inner, &g.inner).map_err(err)?;
    Ok((graph(po.object), hom(po.from_left), hom(po.from_right)))
}

/// Final pullback complement of `k: K → L` along the mono `m: L ↣ G`,
/// as `(D, K → D, D → G)`.
#[pyfunction]
fn final_pbc(k: &PyHom, m: &PyHom) -> PyResult<(PyGraph, PyHom, PyHom)> {
    let pbc = core::category::final_pbc(&k.inner, &m.inner).map_err(err)?;
    Ok((graph(pbc.object), hom(pbc.from_interface), hom(pbc.to_host)))
}

/// Epi-mono factorization of `f`, as `(image, epi, mono)`.
#[pyfunction]
fn image_factorization(f: &PyHom) -> PyResult<(PyGraph, PyHom, PyHom)> {
    let im = core::category::image_factorization(&f.inner).map_err(err)?;
    Ok((graph(im.image), hom(im.epi), hom(im.mono)))
}

/// A span `L ← P → R` whose left leg is a monomorphism.
#[pyclass(module = "hiergraph", name = "Rule", from_py_object)]
#[derive(Clone)]
struct PyRule {
    inner: core::Rule,
}

#[pymethods]
impl PyRule {
    /// The rule performing `edits` (a list of edit dicts) on `pattern`.
    #[staticmethod]
    fn from_edits(pattern: &PyGraph, edits: &Bound<'_, PyAny>) -> PyResult<Self> {
        let edits: Vec<Edit> = from_py(edits)?;
        Ok(PyRule { inner: core::rules::build_rule(&pattern.inner, &edits).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyRule { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).expect("rules serialize")
    }

    #[getter]
    fn lhs(&self) -> PyGraph {
        graph(self.inner.lhs().clone())
    }

    #[getter]
    fn interface(&self) -> PyGraph {
        graph(self.inner.interface().clone())
    }

    #[getter]
    fn rhs(&self) -> PyGraph {
        graph(self.inner.rhs().clone())
    }

    fn is_restrictive(&self) -> bool {
        self.inner.is_restrictive()
    }

    fn is_expansive(&self) -> bool {
        self.inner.is_expansive()
    }

    /// Monomorphic matches of the left-hand side (or of the interface
    /// when `kind="interface"`) in `host` extending `anchors`.
    #[pyo3(signature = (host, kind="lhs", anchors=None))]
    fn matches(&self, host: &PyGraph, kind: &str, anchors: Option<std::collections::BTreeMap<String, String>>) -> PyResult<Vec<PyHom>> {
        let kind = match kind {
            "lhs" => core::MatchKind::Restrictive,
            "interface" => core::MatchKind::Expansive,
            _ => return Err(PyValueError::new_err(format!("kind must be 'lhs' or 'interface', not {kind:?}"))),
        };
        let anchors = node_map(anchors.unwrap_or_default());
        Ok(core::rules::find_matches(&self.inner, &host.inner, kind, &anchors).into_iter().map(hom).collect())
    }

    /// Rewrites the target of `m: L ↣ G`, returning the result graph and
    /// the match of the right-hand side in it.
    fn apply(&self, m: &PyHom) -> PyResult<(PyGraph, PyHom)> {
        let res = core::rules::sqpo_rewrite(&self.inner, &m.inner).map_err(err)?;
        Ok((graph(res.output), hom(res.rhs_match)))
    }
}

/// Named graphs connected by typing homomorphisms along a DAG.
#[pyclass(module = "hiergraph", name = "Hierarchy", from_py_object)]
#[derive(Clone)]
struct PyHierarchy {
    inner: core::Hierarchy,
}

#[pymethods]
impl PyHierarchy {
    #[new]
    fn new() -> Self {
        PyHierarchy { inner: core::Hierarchy::new() }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyHierarchy { inner })
    }

    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.inner).expect("hierarchies serialize");
        s.push('\n');
        s
    }

    fn add_object(&mut self, name: &str, g: &PyGraph) -> PyResult<()> {
        self.inner.add_object(name, g.inner.clone()).map_err(err)
    }

    fn add_typing(&mut self, source: &str, target: &str, mapping: std::collections::BTreeMap<String, String>) -> PyResult<()> {
        self.inner.add_typing(source, target, node_map(mapping)).map_err(err)
    }

    fn names(&self) -> Vec<String> {
        self.inner.names().cloned().collect()
    }

    fn object(&self, name: &str) -> PyResult<PyGraph> {
        self.inner.object(name).cloned().map(graph).ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    /// The typing along any path from `source` to `target`.
    fn typing(&self, source: &str, target: &str) -> PyResult<PyHom> {
        self.inner.composed_typing(source, target).map(hom).map_err(err)
    }

    /// Violations, one string each; empty when the hierarchy is valid.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(|v| v.to_string()).collect()
    }

    /// Rewrites object `node` with `rule` at `match` and propagates the
    /// update through the hierarchy, in place. `relation` and `plan` take
    /// the JSON shapes of the relation and plan files. Returns the report.
    #[pyo3(signature = (node, rule, r#match, direction, relation=None, plan=None))]
    fn rewrite(
        &mut self,
        py: Python<'_>,
        node: &str,
        rule: &PyRule,
        r#match: std::collections::BTreeMap<String, String>,
        direction: &str,
        relation: Option<&Bound<'_, PyAny>>,
        plan: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<Py<PyAny>> {
        let dir = self::direction(direction)?;
        let host = self.inner.object(node).ok_or_else(|| PyKeyError::new_err(node.to_string()))?.clone();
        let pattern = match dir {
            Direction::Forward => rule.inner.interface().clone(),
            Direction::Backward => rule.inner.lhs().clone(),
        };
        let instance = core::Homomorphism::new(pattern, host, node_map(r#match)).map_err(err)?;
        let relation = match relation {
            Some(r) => Some(Relation::from_json(&from_py::<serde_json::Value>(r)?, dir).map_err(err)?),
            None => None,
        };
        let plan: Option<PlanFile> = plan.map(from_py).transpose()?;
        let rp = propagation::build_plan(&self.inner, node, &rule.inner, &instance, dir, plan.as_ref(), relation.as_ref()).map_err(err)?;
        let report = propagation::propagate_with_relation(&mut self.inner, &rp).map_err(err)?;
        to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        format!("Hierarchy({:?})", self.names())
    }
}

#[pymodule]
fn hiergraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HiergraphError", m.py().get_type::<HiergraphError>())?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyHom>()?;
    m.add_class::<PyRule>()?;
    m.add_class::<PyHierarchy>()?;
    m.add_function(wrap_pyfunction!(pullback, m)?)?;
    m.add_function(wrap_pyfunction!(pushout, m)?)?;
    m.add_function(wrap_pyfunction!(final_pbc, m)?)?;
    m.add_function(wrap_pyfunction!(image_factorization, m)?)?;
    Ok(())
}
