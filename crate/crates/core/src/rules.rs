//! Span rules `L <-l- P -r-> R` and their sesqui-pushout application.
//!
//! The left leg may clone (non-injective) or delete (non-surjective); the
//! right leg may merge or add. A rule is *restrictive* when its right leg
//! is an isomorphism and *expansive* when its left leg is.

use crate::attr_graph::{apply_edit, find_monomorphisms, AttrSet, Edit, Element, Graph, Homomorphism, NodeId, NodeMap};
use crate::category::{final_pbc, pushout, FreshNames};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

/// A rewriting rule given by a span of homomorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RuleRepr", into = "RuleRepr")]
pub struct Rule {
    left: Homomorphism,
    right: Homomorphism,
}

impl Rule {
    /// Builds a rule from its two legs, which must share their source.
    pub fn new(left: Homomorphism, right: Homomorphism) -> Result<Self> {
        if **left.source() != **right.source() {
            return Err(Error::InvalidRule("legs have different interfaces".into()));
        }
        left.check().map_err(|e| Error::InvalidRule(format!("left leg: {e}")))?;
        right.check().map_err(|e| Error::InvalidRule(format!("right leg: {e}")))?;
        let right = right.with_source(left.source().clone());
        Ok(Rule { left, right })
    }

    /// The rule that changes nothing.
    pub fn identity(g: impl Into<Arc<Graph>>) -> Self {
        let id = Homomorphism::identity(g);
        Rule { left: id.clone(), right: id }
    }

    /// Rule with identity left leg and the given right leg.
    pub fn expansive(right: Homomorphism) -> Self {
        Rule { left: Homomorphism::identity(right.source().clone()), right }
    }

    /// Rule with the given left leg and identity right leg.
    pub fn restrictive(left: Homomorphism) -> Self {
        Rule { right: Homomorphism::identity(left.source().clone()), left }
    }

    pub fn lhs(&self) -> &Arc<Graph> {
        self.left.target()
    }

    pub fn interface(&self) -> &Arc<Graph> {
        self.left.source()
    }

    pub fn rhs(&self) -> &Arc<Graph> {
        self.right.target()
    }

    /// `P → L`.
    pub fn left(&self) -> &Homomorphism {
        &self.left
    }

    /// `P → R`.
    pub fn right(&self) -> &Homomorphism {
        &self.right
    }

    pub fn is_restrictive(&self) -> bool {
        self.right.is_iso()
    }

    pub fn is_expansive(&self) -> bool {
        self.left.is_iso()
    }
}

#[derive(Serialize, Deserialize)]
struct RuleRepr {
    lhs: Graph,
    interface: Graph,
    rhs: Graph,
    left: NodeMap,
    right: NodeMap,
}

impl From<Rule> for RuleRepr {
    fn from(r: Rule) -> Self {
        RuleRepr {
            lhs: (**r.lhs()).clone(),
            interface: (**r.interface()).clone(),
            rhs: (**r.rhs()).clone(),
            left: r.left.map().clone(),
            right: r.right.map().clone(),
        }
    }
}

impl TryFrom<RuleRepr> for Rule {
    type Error = String;

    fn try_from(r: RuleRepr) -> Result<Self, String> {
        let p = Arc::new(r.interface);
        let left = Homomorphism::new(p.clone(), r.lhs, r.left).map_err(|e| format!("left leg: {e}"))?;
        let right = Homomorphism::new(p, r.rhs, r.right).map_err(|e| format!("right leg: {e}"))?;
        Rule::new(left, right).map_err(|e| e.to_string())
    }
}

/// Which side of a rule a match instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    /// Instances of the left-hand side `L`.
    Restrictive,
    /// Instances of the interface `P`.
    Expansive,
}

/// Monomorphic matches of the chosen side of `rule` into `host` that
/// extend `anchors`, in a deterministic order.
pub fn find_matches(rule: &Rule, host: &Arc<Graph>, kind: MatchKind, anchors: &NodeMap) -> Vec<Homomorphism> {
    let pattern = match kind {
        MatchKind::Restrictive => rule.lhs(),
        MatchKind::Expansive => rule.interface(),
    };
    find_monomorphisms(pattern, host, anchors)
        .into_iter()
        .map(|m| Homomorphism::from_parts(pattern.clone(), host.clone(), m))
        .collect()
}

/// Builds a rule from a pattern and a sequence of primitive edits.
///
/// `L` is the pattern, `R` is the pattern with the edits applied, and `P`
/// keeps every element of `L` that survives the restrictive edits, with a
/// copy for each clone. The edits refer to node ids of the graph as it
/// stands after the previous edits.
pub fn build_rule(pattern: &Graph, edits: &[Edit]) -> Result<Rule> {
    let lhs = Arc::new(pattern.clone());
    let mut p = pattern.clone();
    let mut to_l: NodeMap = pattern.node_ids().map(|n| (n.clone(), n.clone())).collect();
    let mut r = pattern.clone();
    let mut to_r = to_l.clone();
    let pre = |to_r: &NodeMap, n: &NodeId| -> Vec<NodeId> { to_r.iter().filter(|(_, v)| *v == n).map(|(k, _)| k.clone()).collect() };
    for edit in edits {
        let next_r = apply_edit(&r, edit)?;
        match edit {
            Edit::AddNode { .. } | Edit::AddEdge { .. } | Edit::AddAttrs { .. } => {}
            Edit::DeleteNode { id } => {
                for x in pre(&to_r, id) {
                    p.remove_node(&x)?;
                    to_l.remove(&x);
                    to_r.remove(&x);
                }
            }
            Edit::DeleteEdge { from, to } => {
                for x in pre(&to_r, from) {
                    for y in pre(&to_r, to) {
                        if p.has_edge(&x, &y) {
                            p.remove_edge(&x, &y)?;
                        }
                    }
                }
            }
            Edit::CloneNode { id, new_id } => {
                let originals = pre(&to_r, id);
                let mut names = FreshNames::default();
                for n in p.node_ids() {
                    names.reserve(n);
                }
                let copies: Vec<(NodeId, NodeId)> = originals
                    .iter()
                    .map(|x| {
                        let proposal = if originals.len() == 1 { new_id.to_string() } else { format!("{new_id}.{x}") };
                        (x.clone(), names.claim(&proposal))
                    })
                    .collect();
                let twin = |n: &NodeId| -> Vec<NodeId> {
                    let mut v = vec![n.clone()];
                    v.extend(copies.iter().filter(|(x, _)| x == n).map(|(_, c)| c.clone()));
                    v
                };
                let incident: Vec<(NodeId, NodeId, AttrSet)> = p
                    .edges()
                    .filter(|(u, v, _)| originals.contains(u) || originals.contains(v))
                    .map(|(u, v, a)| (u.clone(), v.clone(), a.clone()))
                    .collect();
                for (x, c) in &copies {
                    p.add_node(c.clone(), p.node_attrs(x).cloned().unwrap_or_default())?;
                    to_l.insert(c.clone(), to_l[x].clone());
                    to_r.insert(c.clone(), new_id.clone());
                }
                for (u, v, a) in incident {
                    for u2 in twin(&u) {
                        for v2 in twin(&v) {
                            p.merge_edge(u2.clone(), v2, &a);
                        }
                    }
                }
            }
            Edit::MergeNodes { ids, new_id } => {
                let group: BTreeSet<&NodeId> = ids.iter().collect();
                for v in to_r.values_mut() {
                    if group.contains(v) {
                        *v = new_id.clone();
                    }
                }
            }
            Edit::RemoveAttrs { target, attrs } => match target {
                Element::Node(n) => {
                    for x in pre(&to_r, n) {
                        let slot = p.node_attrs_mut(&x)?;
                        *slot = slot.difference(attrs);
                    }
                }
                Element::Edge(u, v) => {
                    for x in pre(&to_r, u) {
                        for y in pre(&to_r, v) {
                            if let Ok(slot) = p.edge_attrs_mut(&x, &y) {
                                *slot = slot.difference(attrs);
                            }
                        }
                    }
                }
            },
        }
        r = next_r;
    }
    let p = Arc::new(p);
    let left = Homomorphism::new(p.clone(), lhs, to_l)?;
    let right = Homomorphism::new(p, r, to_r)?;
    Rule::new(left, right)
}

/// Result of one sesqui-pushout step `G ← D → H`.
#[derive(Clone, Debug)]
pub struct SqpoResult {
    /// Intermediate graph `D`.
    pub mid: Arc<Graph>,
    /// `D → G`.
    pub mid_to_input: Homomorphism,
    /// Interface match `P → D`.
    pub interface_match: Homomorphism,
    /// Result graph `H`.
    pub output: Arc<Graph>,
    /// `D → H`.
    pub mid_to_output: Homomorphism,
    /// Right-hand side match `R → H`.
    pub rhs_match: Homomorphism,
}

/// Applies `rule` at the monomorphic match `m: L ↣ G`: a final pullback
/// complement of the left leg followed by a pushout along the right leg.
pub fn sqpo_rewrite(rule: &Rule, m: &Homomorphism) -> Result<SqpoResult> {
    if **m.source() != **rule.lhs() {
        return Err(Error::Mismatch("match does not instantiate the left-hand side".into()));
    }
    let m = m.with_source(rule.lhs().clone());
    let pbc = final_pbc(rule.left(), &m)?;
    let po = pushout(&pbc.from_interface, rule.right())?;
    Ok(SqpoResult {
        mid: pbc.object.clone(),
        mid_to_input: pbc.to_host,
        interface_match: pbc.from_interface,
        output: po.object.clone(),
        mid_to_output: po.from_left,
        rhs_match: po.from_right,
    })
}

/// Turns a match of the interface of an expansive rule into a match of
/// its left-hand side.
pub fn lhs_match(rule: &Rule, interface_match: &Homomorphism) -> Result<Homomorphism> {
    let inv = rule.left().inverse().map_err(|_| Error::InvalidRule("left leg is not an isomorphism".into()))?;
    interface_match.after(&inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attr_graph::{apply_edits, is_isomorphic};

    fn pattern() -> Graph {
        Graph::new()
            .with_node("a", AttrSet::new().with("t", ["x", "y"]))
            .with_node("b", AttrSet::new())
            .with_edge("a", "b", AttrSet::new())
    }

    #[test]
    fn builder_clone_and_delete() {
        let edits = [
            Edit::CloneNode { id: "a".into(), new_id: "a2".into() },
            Edit::DeleteNode { id: "b".into() },
            Edit::RemoveAttrs { target: Element::Node("a2".into()), attrs: AttrSet::new().with("t", ["y"]) },
        ];
        let rule = build_rule(&pattern(), &edits).unwrap();
        assert_eq!(rule.interface().node_count(), 2);
        assert!(rule.is_restrictive());
        assert_eq!(rule.interface().node_attrs(&"a2".into()), Some(&AttrSet::new().with("t", ["x"])));
        assert_eq!(**rule.rhs(), apply_edits(&pattern(), &edits).unwrap());
    }

    #[test]
    fn builder_add_and_merge() {
        let edits = [
            Edit::AddNode { id: "c".into(), attrs: AttrSet::new() },
            Edit::AddEdge { from: "c".into(), to: "a".into(), attrs: AttrSet::new() },
            Edit::MergeNodes { ids: vec!["a".into(), "b".into()], new_id: "ab".into() },
        ];
        let rule = build_rule(&pattern(), &edits).unwrap();
        assert!(rule.is_expansive());
        assert_eq!(rule.rhs().node_count(), 2);
        assert_eq!(rule.right().apply(&"a".into()).as_str(), "ab");
        assert_eq!(**rule.rhs(), apply_edits(&pattern(), &edits).unwrap());
    }

    #[test]
    fn builder_rejects_missing_attrs() {
        let edits = [Edit::RemoveAttrs { target: Element::Node("b".into()), attrs: AttrSet::new().with("t", ["x"]) }];
        assert!(build_rule(&pattern(), &edits).is_err());
    }

    #[test]
    fn rewrite_with_identity_rule_is_iso() {
        let host = Arc::new(pattern().with_node("c", AttrSet::new()).with_edge("b", "c", AttrSet::new()));
        let rule = Rule::identity(pattern());
        let ms = find_matches(&rule, &host, MatchKind::Restrictive, &NodeMap::new());
        assert_eq!(ms.len(), 1);
        let out = sqpo_rewrite(&rule, &ms[0]).unwrap();
        assert!(is_isomorphic(&out.output, &host));
    }

    #[test]
    fn rewrite_clone_then_merge_back() {
        let host = Arc::new(pattern());
        let rule = build_rule(
            &Graph::discrete(["a"]).with_node("a", AttrSet::new().with("t", ["x", "y"])),
            &[Edit::CloneNode { id: "a".into(), new_id: "a2".into() }],
        )
        .unwrap();
        let m = find_matches(&rule, &host, MatchKind::Restrictive, &NodeMap::new()).remove(0);
        let out = sqpo_rewrite(&rule, &m).unwrap();
        assert_eq!(out.output.node_count(), 3);
        assert_eq!(out.output.edge_count(), 2);
    }

    #[test]
    fn rule_json_round_trip() {
        let rule = build_rule(&pattern(), &[Edit::CloneNode { id: "a".into(), new_id: "a2".into() }]).unwrap();
        let text = serde_json::to_string(&rule).unwrap();
        let back: Rule = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rule);
        assert!(serde_json::from_str::<Rule>(r#"{"lhs":{"nodes":[],"edges":[]},"interface":{"nodes":[{"id":"p"}],"edges":[]},"rhs":{"nodes":[],"edges":[]},"left":{},"right":{}}"#).is_err());
    }

    #[test]
    fn anchored_matching() {
        let host = Arc::new(Graph::discrete(["u", "v", "w"]));
        let rule = Rule::identity(Graph::discrete(["a"]));
        assert_eq!(find_matches(&rule, &host, MatchKind::Restrictive, &NodeMap::new()).len(), 3);
        let anchors = NodeMap::from([("a".into(), "v".into())]);
        let ms = find_matches(&rule, &host, MatchKind::Restrictive, &anchors);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].apply(&"a".into()).as_str(), "v");
    }
}
