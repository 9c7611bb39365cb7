use super::{AttrSet, Graph, NodeId};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A node or an edge of a graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Node(NodeId),
    Edge(NodeId, NodeId),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Node(n) => write!(f, "node {n}"),
            Element::Edge(u, v) => write!(f, "edge {u} -> {v}"),
        }
    }
}

/// Primitive graph edits.
///
/// `CloneNode` keeps the original under `id` and adds the copy as `new_id`;
/// the copy receives the node's attributes and every incident edge, with a
/// loop on the original yielding all four loops and cross edges.
/// `MergeNodes` replaces `ids` by `new_id`, which may reuse one of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Edit {
    AddNode {
        id: NodeId,
        #[serde(default)]
        attrs: AttrSet,
    },
    AddEdge {
        from: NodeId,
        to: NodeId,
        #[serde(default)]
        attrs: AttrSet,
    },
    DeleteNode {
        id: NodeId,
    },
    DeleteEdge {
        from: NodeId,
        to: NodeId,
    },
    CloneNode {
        id: NodeId,
        new_id: NodeId,
    },
    MergeNodes {
        ids: Vec<NodeId>,
        new_id: NodeId,
    },
    AddAttrs {
        target: Element,
        attrs: AttrSet,
    },
    RemoveAttrs {
        target: Element,
        attrs: AttrSet,
    },
}

impl Edit {
    /// True for edits that only remove or duplicate structure.
    pub fn is_restrictive(&self) -> bool {
        matches!(
            self,
            Edit::DeleteNode { .. } | Edit::DeleteEdge { .. } | Edit::CloneNode { .. } | Edit::RemoveAttrs { .. }
        )
    }
}

fn attrs_mut<'a>(g: &'a mut Graph, target: &Element) -> Result<&'a mut AttrSet> {
    match target {
        Element::Node(n) => g.node_attrs_mut(n),
        Element::Edge(u, v) => g.edge_attrs_mut(u, v),
    }
}

/// Applies one edit, returning the edited graph.
pub fn apply_edit(g: &Graph, edit: &Edit) -> Result<Graph> {
    let mut g = g.clone();
    match edit {
        Edit::AddNode { id, attrs } => g.add_node(id.clone(), attrs.clone())?,
        Edit::AddEdge { from, to, attrs } => g.add_edge(from.clone(), to.clone(), attrs.clone())?,
        Edit::DeleteNode { id } => {
            g.remove_node(id)?;
        }
        Edit::DeleteEdge { from, to } => {
            g.remove_edge(from, to)?;
        }
        Edit::CloneNode { id, new_id } => clone_node(&mut g, id, new_id)?,
        Edit::MergeNodes { ids, new_id } => merge_nodes(&mut g, ids, new_id)?,
        Edit::AddAttrs { target, attrs } => {
            let slot = attrs_mut(&mut g, target)?;
            *slot = slot.union(attrs);
        }
        Edit::RemoveAttrs { target, attrs } => {
            let slot = attrs_mut(&mut g, target)?;
            if !attrs.is_subset(slot) {
                return Err(Error::InvalidEdit(format!("{target} lacks some of the attributes to remove")));
            }
            *slot = slot.difference(attrs);
        }
    }
    Ok(g)
}

/// Applies edits left to right.
pub fn apply_edits(g: &Graph, edits: &[Edit]) -> Result<Graph> {
    edits.iter().try_fold(g.clone(), |acc, e| apply_edit(&acc, e))
}

fn clone_node(g: &mut Graph, id: &NodeId, new_id: &NodeId) -> Result<()> {
    let attrs = g.node_attrs(id).cloned().ok_or_else(|| Error::UnknownNode(id.clone()))?;
    g.add_node(new_id.clone(), attrs)?;
    let incident: Vec<(NodeId, NodeId, AttrSet)> = g
        .edges()
        .filter(|(u, v, _)| *u == id || *v == id)
        .map(|(u, v, a)| (u.clone(), v.clone(), a.clone()))
        .collect();
    let twins = |x: &NodeId| if x == id { vec![id.clone(), new_id.clone()] } else { vec![x.clone()] };
    for (u, v, a) in incident {
        for u2 in twins(&u) {
            for v2 in twins(&v) {
                g.merge_edge(u2.clone(), v2, &a);
            }
        }
    }
    Ok(())
}

fn merge_nodes(g: &mut Graph, ids: &[NodeId], new_id: &NodeId) -> Result<()> {
    let group: BTreeSet<&NodeId> = ids.iter().collect();
    if group.is_empty() {
        return Err(Error::InvalidEdit("merge of an empty node set".into()));
    }
    for id in &group {
        if !g.has_node(id) {
            return Err(Error::UnknownNode((*id).clone()));
        }
    }
    if g.has_node(new_id) && !group.contains(new_id) {
        return Err(Error::DuplicateNode(new_id.clone()));
    }
    let rename = |x: &NodeId| if group.contains(x) { new_id.clone() } else { x.clone() };
    let mut out = Graph::new();
    for (n, a) in g.nodes() {
        out.merge_node(rename(n), a);
    }
    for (u, v, a) in g.edges() {
        out.merge_edge(rename(u), rename(v), a);
    }
    *g = out;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_graph() -> Graph {
        Graph::new()
            .with_node("a", AttrSet::new().with("t", ["x"]))
            .with_node("b", AttrSet::new())
            .with_edge("a", "a", AttrSet::new().with("w", [1i64]))
            .with_edge("a", "b", AttrSet::new())
    }

    #[test]
    fn clone_duplicates_loops_and_edges() {
        let g = apply_edit(&loop_graph(), &Edit::CloneNode { id: "a".into(), new_id: "a2".into() }).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.edge_attrs(&"a2".into(), &"a".into()), Some(&AttrSet::new().with("w", [1i64])));
        assert_eq!(g.node_attrs(&"a2".into()), g.node_attrs(&"a".into()));
    }

    #[test]
    fn merge_unions_attributes_and_edges() {
        let g = loop_graph().with_node("c", AttrSet::new().with("t", ["y"])).with_edge("c", "b", AttrSet::new().with("w", [2i64]));
        let m = apply_edit(&g, &Edit::MergeNodes { ids: vec!["a".into(), "c".into()], new_id: "a".into() }).unwrap();
        assert_eq!(m.node_count(), 2);
        assert_eq!(m.node_attrs(&"a".into()), Some(&AttrSet::new().with("t", ["x", "y"])));
        assert_eq!(m.edge_attrs(&"a".into(), &"b".into()), Some(&AttrSet::new().with("w", [2i64])));
        assert!(m.has_edge(&"a".into(), &"a".into()));
    }

    #[test]
    fn merge_into_existing_foreign_id_fails() {
        let e = Edit::MergeNodes { ids: vec!["a".into()], new_id: "b".into() };
        assert!(apply_edit(&loop_graph(), &e).is_err());
    }

    #[test]
    fn remove_attrs_requires_presence() {
        let ok = Edit::RemoveAttrs { target: Element::Node("a".into()), attrs: AttrSet::new().with("t", ["x"]) };
        assert!(apply_edit(&loop_graph(), &ok).unwrap().node_attrs(&"a".into()).unwrap().is_empty());
        let bad = Edit::RemoveAttrs { target: Element::Node("b".into()), attrs: AttrSet::new().with("t", ["x"]) };
        assert!(apply_edit(&loop_graph(), &bad).is_err());
    }

    #[test]
    fn edit_json_shape() {
        let e: Edit = serde_json::from_str(r#"{"op":"add_attrs","target":{"edge":["a","b"]},"attrs":{"k":[1]}}"#).unwrap();
        assert_eq!(e, Edit::AddAttrs { target: Element::Edge("a".into(), "b".into()), attrs: AttrSet::new().with("k", [1i64]) });
    }
}
