//! Attributed simple directed graphs.
//!
//! Nodes and edges carry an [`AttrSet`]: a map from keys to finite sets of
//! values. Attribute sets are ordered by key-wise containment, and a
//! homomorphism must map every element to one whose attributes contain its
//! own. At most one edge exists per ordered pair of nodes; loops are allowed.

mod edit;
mod hom;
mod search;

pub use edit::{apply_edit, apply_edits, Edit, Element};
pub use hom::{compose, Homomorphism, NodeMap};
pub use search::{find_isomorphism, find_monomorphisms, for_each_hom, is_isomorphic};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Identifier of a node within one graph.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl From<&NodeId> for NodeId {
    fn from(id: &NodeId) -> Self {
        id.clone()
    }
}

/// A single attribute value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Bool(bool),
    Int(i64),
    Str(String),
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Bool(b) => write!(f, "{b}"),
            AttrValue::Int(i) => write!(f, "{i}"),
            AttrValue::Str(s) => write!(f, "{s:?}"),
        }
    }
}

impl From<&str> for AttrValue {
    fn from(s: &str) -> Self {
        AttrValue::Str(s.to_string())
    }
}

impl From<String> for AttrValue {
    fn from(s: String) -> Self {
        AttrValue::Str(s)
    }
}

impl From<i64> for AttrValue {
    fn from(i: i64) -> Self {
        AttrValue::Int(i)
    }
}

impl From<bool> for AttrValue {
    fn from(b: bool) -> Self {
        AttrValue::Bool(b)
    }
}

/// Set-valued attributes keyed by name.
///
/// Keys never map to an empty set through the public API; the empty
/// attribute set is the bottom of the containment order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttrSet(BTreeMap<String, BTreeSet<AttrValue>>);

impl AttrSet {
    pub fn new() -> Self {
        AttrSet::default()
    }

    /// Builder form of [`AttrSet::insert_all`].
    pub fn with<V: Into<AttrValue>>(mut self, key: &str, values: impl IntoIterator<Item = V>) -> Self {
        self.insert_all(key, values);
        self
    }

    pub fn insert(&mut self, key: &str, value: impl Into<AttrValue>) {
        self.0.entry(key.to_string()).or_default().insert(value.into());
    }

    pub fn insert_all<V: Into<AttrValue>>(&mut self, key: &str, values: impl IntoIterator<Item = V>) {
        let mut values = values.into_iter().peekable();
        if values.peek().is_none() {
            return;
        }
        let set = self.0.entry(key.to_string()).or_default();
        set.extend(values.map(Into::into));
    }

    pub fn is_empty(&self) -> bool {
        self.0.values().all(BTreeSet::is_empty)
    }

    pub fn get(&self, key: &str) -> Option<&BTreeSet<AttrValue>> {
        self.0.get(key)
    }

    pub fn contains(&self, key: &str, value: &AttrValue) -> bool {
        self.0.get(key).is_some_and(|s| s.contains(value))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<AttrValue>)> {
        self.0.iter()
    }

    /// Every `(key, value)` pair, in order.
    pub fn pairs(&self) -> impl Iterator<Item = (&String, &AttrValue)> {
        self.0.iter().flat_map(|(k, vs)| vs.iter().map(move |v| (k, v)))
    }

    /// Key-wise containment.
    pub fn is_subset(&self, other: &AttrSet) -> bool {
        self.pairs().all(|(k, v)| other.contains(k, v))
    }

    pub fn union(&self, other: &AttrSet) -> AttrSet {
        let mut out = self.clone();
        for (k, v) in other.pairs() {
            out.insert(k, v.clone());
        }
        out
    }

    pub fn intersection(&self, other: &AttrSet) -> AttrSet {
        let mut out = AttrSet::new();
        for (k, v) in self.pairs() {
            if other.contains(k, v) {
                out.insert(k, v.clone());
            }
        }
        out
    }

    pub fn difference(&self, other: &AttrSet) -> AttrSet {
        let mut out = AttrSet::new();
        for (k, v) in self.pairs() {
            if !other.contains(k, v) {
                out.insert(k, v.clone());
            }
        }
        out
    }

    fn empty_keys(&self) -> impl Iterator<Item = &String> {
        self.0.iter().filter(|(_, v)| v.is_empty()).map(|(k, _)| k)
    }
}

/// An attributed simple directed graph.
///
/// Node and edge maps are ordered, so iteration and serialization are
/// deterministic. Mutators keep the graph well formed; a graph read from
/// JSON may still contain dangling edges or empty attribute sets, which
/// [`validate_graph`] reports.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    nodes: BTreeMap<NodeId, AttrSet>,
    edges: BTreeMap<(NodeId, NodeId), AttrSet>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Graph with the given nodes, no edges and no attributes.
    pub fn discrete<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<NodeId>,
    {
        let nodes = ids.into_iter().map(|id| (id.into(), AttrSet::new())).collect();
        Graph { nodes, edges: BTreeMap::new() }
    }

    /// Builder: adds or replaces a node.
    pub fn with_node(mut self, id: impl Into<NodeId>, attrs: AttrSet) -> Self {
        self.nodes.insert(id.into(), attrs);
        self
    }

    /// Builder: adds or replaces an edge.
    ///
    /// # Panics
    ///
    /// Panics if either endpoint is missing.
    pub fn with_edge(mut self, from: impl Into<NodeId>, to: impl Into<NodeId>, attrs: AttrSet) -> Self {
        let (from, to) = (from.into(), to.into());
        assert!(self.has_node(&from) && self.has_node(&to), "edge {from} -> {to} has a missing endpoint");
        self.edges.insert((from, to), attrs);
        self
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_node(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn has_edge(&self, from: &NodeId, to: &NodeId) -> bool {
        self.edges.contains_key(&(from.clone(), to.clone()))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&NodeId, &AttrSet)> {
        self.nodes.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId, &AttrSet)> {
        self.edges.iter().map(|((u, v), a)| (u, v, a))
    }

    pub fn node_attrs(&self, id: &NodeId) -> Option<&AttrSet> {
        self.nodes.get(id)
    }

    pub fn edge_attrs(&self, from: &NodeId, to: &NodeId) -> Option<&AttrSet> {
        self.edges.get(&(from.clone(), to.clone()))
    }

    pub fn successors<'a>(&'a self, id: &'a NodeId) -> impl Iterator<Item = &'a NodeId> + 'a {
        self.edges.keys().filter(move |(u, _)| u == id).map(|(_, v)| v)
    }

    pub fn predecessors<'a>(&'a self, id: &'a NodeId) -> impl Iterator<Item = &'a NodeId> + 'a {
        self.edges.keys().filter(move |(_, v)| v == id).map(|(u, _)| u)
    }

    pub fn add_node(&mut self, id: impl Into<NodeId>, attrs: AttrSet) -> Result<()> {
        let id = id.into();
        if self.nodes.contains_key(&id) {
            return Err(Error::DuplicateNode(id));
        }
        self.nodes.insert(id, attrs);
        Ok(())
    }

    pub fn add_edge(&mut self, from: impl Into<NodeId>, to: impl Into<NodeId>, attrs: AttrSet) -> Result<()> {
        let (from, to) = (from.into(), to.into());
        for end in [&from, &to] {
            if !self.has_node(end) {
                return Err(Error::UnknownNode(end.clone()));
            }
        }
        if self.has_edge(&from, &to) {
            return Err(Error::DuplicateEdge(from, to));
        }
        self.edges.insert((from, to), attrs);
        Ok(())
    }

    /// Removes a node together with its incident edges.
    pub fn remove_node(&mut self, id: &NodeId) -> Result<AttrSet> {
        let attrs = self.nodes.remove(id).ok_or_else(|| Error::UnknownNode(id.clone()))?;
        self.edges.retain(|(u, v), _| u != id && v != id);
        Ok(attrs)
    }

    pub fn remove_edge(&mut self, from: &NodeId, to: &NodeId) -> Result<AttrSet> {
        self.edges
            .remove(&(from.clone(), to.clone()))
            .ok_or_else(|| Error::UnknownEdge(from.clone(), to.clone()))
    }

    pub fn node_attrs_mut(&mut self, id: &NodeId) -> Result<&mut AttrSet> {
        self.nodes.get_mut(id).ok_or_else(|| Error::UnknownNode(id.clone()))
    }

    pub fn edge_attrs_mut(&mut self, from: &NodeId, to: &NodeId) -> Result<&mut AttrSet> {
        self.edges
            .get_mut(&(from.clone(), to.clone()))
            .ok_or_else(|| Error::UnknownEdge(from.clone(), to.clone()))
    }

    /// Inserts an edge or widens the attributes of an existing one.
    pub(crate) fn merge_edge(&mut self, from: NodeId, to: NodeId, attrs: &AttrSet) {
        let slot = self.edges.entry((from, to)).or_default();
        *slot = slot.union(attrs);
    }

    /// Inserts a node or widens the attributes of an existing one.
    pub(crate) fn merge_node(&mut self, id: NodeId, attrs: &AttrSet) {
        let slot = self.nodes.entry(id).or_default();
        *slot = slot.union(attrs);
    }

    /// Subgraph induced by `keep`, with attributes unchanged.
    pub fn induced<'a>(&self, keep: impl IntoIterator<Item = &'a NodeId>) -> Graph {
        let keep: BTreeSet<&NodeId> = keep.into_iter().collect();
        Graph {
            nodes: self.nodes.iter().filter(|(n, _)| keep.contains(n)).map(|(n, a)| (n.clone(), a.clone())).collect(),
            edges: self
                .edges
                .iter()
                .filter(|((u, v), _)| keep.contains(u) && keep.contains(v))
                .map(|(k, a)| (k.clone(), a.clone()))
                .collect(),
        }
    }

    /// Every `(key, value)` pair appearing anywhere in the graph.
    pub fn alphabet(&self) -> BTreeSet<(String, AttrValue)> {
        let node_pairs = self.nodes.values().flat_map(|a| a.pairs());
        let edge_pairs = self.edges.values().flat_map(|a| a.pairs());
        node_pairs.chain(edge_pairs).map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

/// A structural problem found by [`validate_graph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphViolation {
    DanglingEdge { from: NodeId, to: NodeId, missing: NodeId },
    EmptyAttrSet { element: Element, key: String },
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::DanglingEdge { from, to, missing } => {
                write!(f, "edge {from} -> {to} refers to missing node {missing}")
            }
            GraphViolation::EmptyAttrSet { element, key } => {
                write!(f, "{element} has an empty value set for key {key:?}")
            }
        }
    }
}

/// Lists every structural problem in `g`; an empty list means well formed.
pub fn validate_graph(g: &Graph) -> Vec<GraphViolation> {
    let mut out = Vec::new();
    for (id, attrs) in &g.nodes {
        for key in attrs.empty_keys() {
            out.push(GraphViolation::EmptyAttrSet { element: Element::Node(id.clone()), key: key.clone() });
        }
    }
    for ((u, v), attrs) in &g.edges {
        for end in [u, v] {
            if !g.nodes.contains_key(end) {
                out.push(GraphViolation::DanglingEdge { from: u.clone(), to: v.clone(), missing: end.clone() });
            }
        }
        for key in attrs.empty_keys() {
            out.push(GraphViolation::EmptyAttrSet { element: Element::Edge(u.clone(), v.clone()), key: key.clone() });
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    nodes: Vec<NodeRepr>,
    edges: Vec<EdgeRepr>,
}

#[derive(Serialize, Deserialize)]
struct NodeRepr {
    id: NodeId,
    #[serde(default)]
    attrs: AttrSet,
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    from: NodeId,
    to: NodeId,
    #[serde(default)]
    attrs: AttrSet,
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            nodes: g.nodes.into_iter().map(|(id, attrs)| NodeRepr { id, attrs }).collect(),
            edges: g.edges.into_iter().map(|((from, to), attrs)| EdgeRepr { from, to, attrs }).collect(),
        }
    }
}

impl TryFrom<GraphRepr> for Graph {
    type Error = String;

    fn try_from(repr: GraphRepr) -> Result<Self, String> {
        let mut g = Graph::new();
        for n in repr.nodes {
            if g.nodes.insert(n.id.clone(), n.attrs).is_some() {
                return Err(format!("duplicate node id {}", n.id));
            }
        }
        for e in repr.edges {
            if g.edges.insert((e.from.clone(), e.to.clone()), e.attrs).is_some() {
                return Err(format!("duplicate edge {} -> {}", e.from, e.to));
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Graph {
        Graph::new()
            .with_node("a", AttrSet::new().with("color", ["red"]))
            .with_node("b", AttrSet::new().with("n", [1i64, 2]))
            .with_edge("a", "b", AttrSet::new().with("w", [true]))
            .with_edge("b", "b", AttrSet::new())
    }

    #[test]
    fn attr_set_algebra() {
        let x = AttrSet::new().with("k", ["a", "b"]);
        let y = AttrSet::new().with("k", ["b", "c"]).with("j", [1i64]);
        assert_eq!(x.intersection(&y), AttrSet::new().with("k", ["b"]));
        assert_eq!(x.difference(&y), AttrSet::new().with("k", ["a"]));
        assert_eq!(x.union(&y).pairs().count(), 4);
        assert!(AttrSet::new().is_subset(&x));
        assert!(!x.is_subset(&y));
        assert!(x.difference(&x).is_empty());
    }

    #[test]
    fn empty_insert_adds_no_key() {
        let a = AttrSet::new().with::<&str>("k", []);
        assert_eq!(a, AttrSet::new());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let g = sample();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(
            text,
            r#"{"nodes":[{"id":"a","attrs":{"color":["red"]}},{"id":"b","attrs":{"n":[1,2]}}],"edges":[{"from":"a","to":"b","attrs":{"w":[true]}},{"from":"b","to":"b","attrs":{}}]}"#
        );
        let back: Graph = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn duplicate_ids_fail_to_parse() {
        let text = r#"{"nodes":[{"id":"a"},{"id":"a"}],"edges":[]}"#;
        assert!(serde_json::from_str::<Graph>(text).is_err());
    }

    #[test]
    fn validation_reports_dangling_and_empty() {
        let text = r#"{"nodes":[{"id":"a","attrs":{"k":[]}}],"edges":[{"from":"a","to":"z"}]}"#;
        let g: Graph = serde_json::from_str(text).unwrap();
        let v = validate_graph(&g);
        assert_eq!(v.len(), 2);
        assert!(validate_graph(&sample()).is_empty());
    }

    #[test]
    fn remove_node_drops_incident_edges() {
        let mut g = sample();
        g.remove_node(&"b".into()).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(matches!(g.remove_node(&"b".into()), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn mutators_reject_duplicates() {
        let mut g = sample();
        assert!(g.add_node("a", AttrSet::new()).is_err());
        assert!(g.add_edge("a", "b", AttrSet::new()).is_err());
        assert!(g.add_edge("a", "q", AttrSet::new()).is_err());
    }
}
