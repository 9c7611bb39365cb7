//! Hierarchies: DAGs whose objects are graphs and whose arrows are typing
//! homomorphisms, such that all parallel paths compose to the same map.

use crate::attr_graph::{validate_graph, Graph, Homomorphism, NodeId, NodeMap};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Two paths between the same pair of objects that disagree on a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutativityViolation {
    pub from: String,
    pub to: String,
    pub path1: Vec<String>,
    pub path2: Vec<String>,
    pub node: NodeId,
}

impl fmt::Display for CommutativityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PAIR {} {}: {} != {} at node {}", self.from, self.to, self.path1.join("->"), self.path2.join("->"), self.node)
    }
}

/// Anything that makes a hierarchy invalid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HierarchyViolation {
    Graph { object: String, problem: String },
    Typing { from: String, to: String, problem: String },
    Cycle { objects: Vec<String> },
    Skeleton(String),
    Commutativity(CommutativityViolation),
}

impl fmt::Display for HierarchyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HierarchyViolation::Graph { object, problem } => write!(f, "GRAPH {object}: {problem}"),
            HierarchyViolation::Typing { from, to, problem } => write!(f, "TYPING {from} {to}: {problem}"),
            HierarchyViolation::Cycle { objects } => write!(f, "CYCLE through {}", objects.join(", ")),
            HierarchyViolation::Skeleton(why) => write!(f, "SKELETON: {why}"),
            HierarchyViolation::Commutativity(v) => v.fmt(f),
        }
    }
}

/// Optional typing of the hierarchy's shape by a fixed skeleton graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonTyping {
    pub graph: Graph,
    /// Skeleton node of each object.
    pub map: BTreeMap<String, NodeId>,
}

/// A hierarchy of graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HierarchyRepr", into = "HierarchyRepr")]
pub struct Hierarchy {
    objects: BTreeMap<String, Arc<Graph>>,
    typings: BTreeMap<(String, String), NodeMap>,
    skeleton: Option<SkeletonTyping>,
}

impl Hierarchy {
    pub fn new() -> Self {
        Hierarchy::default()
    }

    pub fn add_object(&mut self, name: &str, g: impl Into<Arc<Graph>>) -> Result<()> {
        if self.objects.contains_key(name) {
            return Err(Error::DuplicateObject(name.to_string()));
        }
        let g = g.into();
        if let Some(v) = validate_graph(&g).first() {
            return Err(Error::InvalidHierarchy(format!("graph {name}: {v}")));
        }
        self.objects.insert(name.to_string(), g);
        Ok(())
    }

    /// Adds the typing `from → to`, rejecting non-homomorphisms, cycles
    /// and anything that breaks commutativity.
    pub fn add_typing(&mut self, from: &str, to: &str, map: NodeMap) -> Result<()> {
        let (a, b) = (self.require(from)?, self.require(to)?);
        if self.typings.contains_key(&(from.to_string(), to.to_string())) {
            return Err(Error::DuplicateTyping(from.to_string(), to.to_string()));
        }
        if from == to || self.descendants(to).contains(from) {
            return Err(Error::Cycle(from.to_string(), to.to_string()));
        }
        Homomorphism::new(a.clone(), b.clone(), map.clone())?;
        self.typings.insert((from.to_string(), to.to_string()), map);
        let broken = self.validate_commutativity();
        if !broken.is_empty() {
            self.typings.remove(&(from.to_string(), to.to_string()));
            return Err(Error::NotCommutative(broken));
        }
        Ok(())
    }

    /// Attaches a skeleton; the object map must be a homomorphism from the
    /// hierarchy's shape to the skeleton graph.
    pub fn set_skeleton(&mut self, skeleton: SkeletonTyping) -> Result<()> {
        let old = self.skeleton.replace(skeleton);
        if let Some(why) = self.skeleton_problem() {
            self.skeleton = old;
            return Err(Error::InvalidHierarchy(why));
        }
        Ok(())
    }

    pub fn skeleton(&self) -> Option<&SkeletonTyping> {
        self.skeleton.as_ref()
    }

    fn require(&self, name: &str) -> Result<&Arc<Graph>> {
        self.objects.get(name).ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn object(&self, name: &str) -> Option<&Arc<Graph>> {
        self.objects.get(name)
    }

    pub fn objects(&self) -> impl Iterator<Item = (&String, &Arc<Graph>)> {
        self.objects.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.objects.keys()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.objects.contains_key(name)
    }

    /// The typing `from → to`, if that arrow exists.
    pub fn typing(&self, from: &str, to: &str) -> Option<Homomorphism> {
        let map = self.typings.get(&(from.to_string(), to.to_string()))?;
        Some(Homomorphism::from_parts(self.objects[from].clone(), self.objects[to].clone(), map.clone()))
    }

    /// Arrows of the hierarchy, ordered by `(from, to)`.
    pub fn arrows(&self) -> impl Iterator<Item = (&String, &String)> {
        self.typings.keys().map(|(a, b)| (a, b))
    }

    pub fn successors(&self, name: &str) -> Vec<String> {
        self.typings.keys().filter(|(a, _)| a == name).map(|(_, b)| b.clone()).collect()
    }

    pub fn predecessors(&self, name: &str) -> Vec<String> {
        self.typings.keys().filter(|(_, b)| b == name).map(|(a, _)| a.clone()).collect()
    }

    /// Objects reachable from `name` by a non-empty path.
    pub fn descendants(&self, name: &str) -> BTreeSet<String> {
        self.reach(name, |h, n| h.successors(n))
    }

    /// Objects from which `name` is reachable by a non-empty path.
    pub fn ancestors(&self, name: &str) -> BTreeSet<String> {
        self.reach(name, |h, n| h.predecessors(n))
    }

    fn reach(&self, name: &str, step: impl Fn(&Self, &str) -> Vec<String>) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = step(self, name);
        while let Some(n) = stack.pop() {
            if seen.insert(n.clone()) {
                stack.extend(step(self, &n));
            }
        }
        seen
    }

    /// Objects in an order where every arrow goes forward; ties are broken
    /// by name. Fails on a cycle.
    pub fn topological_order(&self) -> Result<Vec<String>> {
        let mut indeg: BTreeMap<&String, usize> = self.objects.keys().map(|k| (k, 0)).collect();
        for (_, b) in self.typings.keys() {
            *indeg.get_mut(b).expect("typing endpoint") += 1;
        }
        let mut ready: BTreeSet<&String> = indeg.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
        let mut out = Vec::new();
        while let Some(n) = ready.pop_first() {
            out.push(n.clone());
            for ((a, b), _) in self.typings.iter() {
                if a == n {
                    let d = indeg.get_mut(b).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(b);
                    }
                }
            }
        }
        if out.len() != self.objects.len() {
            let stuck: Vec<String> = indeg.into_iter().filter(|(_, d)| *d > 0).map(|(k, _)| k.clone()).collect();
            return Err(Error::InvalidHierarchy(format!("cycle through {}", stuck.join(", "))));
        }
        Ok(out)
    }

    /// Every pair of paths with a common source and target that disagree,
    /// one report per disagreeing pair of objects and incoming arrow.
    ///
    /// From each source the first path found to every object is memoised;
    /// every other arrow into that object is then compared against it.
    pub fn validate_commutativity(&self) -> Vec<CommutativityViolation> {
        let Ok(order) = self.topological_order() else { return Vec::new() };
        let mut out = Vec::new();
        for src in self.objects.keys() {
            let mut comp: BTreeMap<&String, (NodeMap, Vec<String>)> = BTreeMap::new();
            let id: NodeMap = self.objects[src].node_ids().map(|n| (n.clone(), n.clone())).collect();
            comp.insert(src, (id, vec![src.clone()]));
            for n in &order {
                if n == src {
                    continue;
                }
                for p in self.predecessors(n) {
                    let Some((pm, ppath)) = comp.get(&p) else { continue };
                    let step = &self.typings[&(p.clone(), n.clone())];
                    let candidate: NodeMap = pm.iter().filter_map(|(k, v)| step.get(v).map(|w| (k.clone(), w.clone()))).collect();
                    let mut path = ppath.clone();
                    path.push(n.clone());
                    match comp.get(n) {
                        None => {
                            comp.insert(n, (candidate, path));
                        }
                        Some((first, fpath)) => {
                            if let Some((k, _)) = first.iter().find(|(k, v)| candidate.get(*k) != Some(*v)) {
                                out.push(CommutativityViolation {
                                    from: src.clone(),
                                    to: n.clone(),
                                    path1: fpath.clone(),
                                    path2: path,
                                    node: k.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn skeleton_problem(&self) -> Option<String> {
        let s = self.skeleton.as_ref()?;
        for name in self.objects.keys() {
            match s.map.get(name) {
                None => return Some(format!("object {name} has no skeleton type")),
                Some(t) if !s.graph.has_node(t) => return Some(format!("object {name} is typed by missing node {t}")),
                Some(_) => {}
            }
        }
        if let Some(extra) = s.map.keys().find(|k| !self.objects.contains_key(*k)) {
            return Some(format!("skeleton map mentions unknown object {extra}"));
        }
        for (a, b) in self.typings.keys() {
            if !s.graph.has_edge(&s.map[a], &s.map[b]) {
                return Some(format!("arrow {a} -> {b} has no skeleton edge {} -> {}", s.map[a], s.map[b]));
            }
        }
        None
    }

    /// Every problem with this hierarchy; empty means valid.
    pub fn validate(&self) -> Vec<HierarchyViolation> {
        let mut out = Vec::new();
        for (name, g) in &self.objects {
            for v in validate_graph(g) {
                out.push(HierarchyViolation::Graph { object: name.clone(), problem: v.to_string() });
            }
        }
        for ((a, b), map) in &self.typings {
            let h = Homomorphism::from_parts(self.objects[a].clone(), self.objects[b].clone(), map.clone());
            if let Err(e) = h.check() {
                out.push(HierarchyViolation::Typing { from: a.clone(), to: b.clone(), problem: e.to_string() });
            }
        }
        if let Some(why) = self.skeleton_problem() {
            out.push(HierarchyViolation::Skeleton(why));
        }
        if let Err(Error::InvalidHierarchy(why)) = self.topological_order() {
            let objects = why.trim_start_matches("cycle through ").split(", ").map(str::to_string).collect();
            out.push(HierarchyViolation::Cycle { objects });
            return out;
        }
        out.extend(self.validate_commutativity().into_iter().map(HierarchyViolation::Commutativity));
        out
    }

    /// The composite typing along any path from `from` to `to`; the
    /// identity when they coincide.
    pub fn composed_typing(&self, from: &str, to: &str) -> Result<Homomorphism> {
        let a = self.require(from)?.clone();
        self.require(to)?;
        if from == to {
            return Ok(Homomorphism::identity(a));
        }
        let mut best: BTreeMap<String, NodeMap> = BTreeMap::new();
        best.insert(from.to_string(), a.node_ids().map(|n| (n.clone(), n.clone())).collect());
        for n in self.topological_order()? {
            let Some(m) = best.get(&n).cloned() else { continue };
            for s in self.successors(&n) {
                if best.contains_key(&s) {
                    continue;
                }
                let step = &self.typings[&(n.clone(), s.clone())];
                best.insert(s, m.iter().map(|(k, v)| (k.clone(), step[v].clone())).collect());
            }
        }
        let map = best.remove(to).ok_or_else(|| Error::NoPath(from.to_string(), to.to_string()))?;
        Ok(Homomorphism::from_parts(a, self.objects[to].clone(), map))
    }

    /// Sub-hierarchy on `s` and everything it is typed by.
    pub fn forward_subgraph(&self, s: &str) -> Result<Hierarchy> {
        self.require(s)?;
        let mut keep = self.descendants(s);
        keep.insert(s.to_string());
        Ok(self.restricted(&keep))
    }

    /// Sub-hierarchy on `s` and everything typed by it.
    pub fn backward_subgraph(&self, s: &str) -> Result<Hierarchy> {
        self.require(s)?;
        let mut keep = self.ancestors(s);
        keep.insert(s.to_string());
        Ok(self.restricted(&keep))
    }

    fn restricted(&self, keep: &BTreeSet<String>) -> Hierarchy {
        Hierarchy {
            objects: self.objects.iter().filter(|(k, _)| keep.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
            typings: self
                .typings
                .iter()
                .filter(|((a, b), _)| keep.contains(a) && keep.contains(b))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            skeleton: None,
        }
    }

    pub(crate) fn replace_object(&mut self, name: &str, g: Arc<Graph>) {
        self.objects.insert(name.to_string(), g);
    }

    pub(crate) fn replace_typing(&mut self, from: &str, to: &str, map: NodeMap) {
        self.typings.insert((from.to_string(), to.to_string()), map);
    }
}

#[derive(Serialize, Deserialize)]
struct HierarchyRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    skeleton: Option<SkeletonTyping>,
    graphs: BTreeMap<String, Graph>,
    typings: Vec<TypingRepr>,
}

/// JSON form of a homomorphism between named graphs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypingRepr {
    pub from: String,
    pub to: String,
    pub map: NodeMap,
}

impl From<Hierarchy> for HierarchyRepr {
    fn from(h: Hierarchy) -> Self {
        HierarchyRepr {
            skeleton: h.skeleton,
            graphs: h.objects.into_iter().map(|(k, v)| (k, Arc::unwrap_or_clone(v))).collect(),
            typings: h.typings.into_iter().map(|((from, to), map)| TypingRepr { from, to, map }).collect(),
        }
    }
}

impl TryFrom<HierarchyRepr> for Hierarchy {
    type Error = String;

    /// Only structural references are checked here; [`Hierarchy::validate`]
    /// reports the rest.
    fn try_from(r: HierarchyRepr) -> Result<Self, String> {
        let objects: BTreeMap<String, Arc<Graph>> = r.graphs.into_iter().map(|(k, v)| (k, Arc::new(v))).collect();
        let mut typings = BTreeMap::new();
        for t in r.typings {
            for end in [&t.from, &t.to] {
                if !objects.contains_key(end) {
                    return Err(format!("typing refers to unknown graph {end}"));
                }
            }
            if typings.insert((t.from.clone(), t.to.clone()), t.map).is_some() {
                return Err(format!("duplicate typing {} -> {}", t.from, t.to));
            }
        }
        Ok(Hierarchy { objects, typings, skeleton: r.skeleton })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AttrSet;

    fn nm(pairs: &[(&str, &str)]) -> NodeMap {
        pairs.iter().map(|(a, b)| (NodeId::from(*a), NodeId::from(*b))).collect()
    }

    /// Diamond a -> {b, c} -> d where `bend` decides whether c agrees.
    fn diamond(bend: bool) -> Hierarchy {
        let mut h = Hierarchy::new();
        h.add_object("d", Graph::discrete(["t", "u"])).unwrap();
        h.add_object("b", Graph::discrete(["b1"])).unwrap();
        h.add_object("c", Graph::discrete(["c1"])).unwrap();
        h.add_object("a", Graph::discrete(["x"])).unwrap();
        h.add_typing("b", "d", nm(&[("b1", "t")])).unwrap();
        h.add_typing("c", "d", nm(&[("c1", if bend { "u" } else { "t" })])).unwrap();
        h.add_typing("a", "b", nm(&[("x", "b1")])).unwrap();
        h
    }

    #[test]
    fn broken_diamond_is_rejected_once() {
        let mut h = diamond(true);
        let err = h.add_typing("a", "c", nm(&[("x", "c1")])).unwrap_err();
        let Error::NotCommutative(v) = err else { panic!("expected commutativity error") };
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "PAIR a d: a->b->d != a->c->d at node x");
        assert!(h.typing("a", "c").is_none());
        let mut ok = diamond(false);
        ok.add_typing("a", "c", nm(&[("x", "c1")])).unwrap();
        assert!(ok.validate().is_empty());
    }

    #[test]
    fn cycles_and_bad_homs_rejected() {
        let mut h = diamond(false);
        assert!(matches!(h.add_typing("d", "a", nm(&[("t", "x"), ("u", "x")])), Err(Error::Cycle(..))));
        h.add_object("e", Graph::discrete(["e1", "e2"]).with_edge("e1", "e2", AttrSet::new())).unwrap();
        assert!(h.add_typing("e", "d", nm(&[("e1", "t"), ("e2", "u")])).is_err());
    }

    #[test]
    fn subgraphs_and_composites() {
        let mut h = diamond(false);
        h.add_typing("a", "c", nm(&[("x", "c1")])).unwrap();
        let fwd = h.forward_subgraph("b").unwrap();
        assert_eq!(fwd.names().cloned().collect::<Vec<_>>(), ["b", "d"]);
        let bwd = h.backward_subgraph("c").unwrap();
        assert_eq!(bwd.names().cloned().collect::<Vec<_>>(), ["a", "c"]);
        assert_eq!(h.composed_typing("a", "d").unwrap().apply(&"x".into()).as_str(), "t");
        assert!(matches!(h.composed_typing("b", "c"), Err(Error::NoPath(..))));
        assert_eq!(h.topological_order().unwrap(), ["a", "b", "c", "d"]);
    }

    #[test]
    fn json_round_trip_and_lenient_load() {
        let h = diamond(false);
        let text = serde_json::to_string(&h).unwrap();
        let back: Hierarchy = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
        let broken = r#"{"graphs":{"a":{"nodes":[{"id":"x"}],"edges":[]},"b":{"nodes":[],"edges":[]}},"typings":[{"from":"a","to":"b","map":{"x":"y"}}]}"#;
        let h: Hierarchy = serde_json::from_str(broken).unwrap();
        assert_eq!(h.validate().len(), 1);
        let unknown = r#"{"graphs":{},"typings":[{"from":"a","to":"b","map":{}}]}"#;
        assert!(serde_json::from_str::<Hierarchy>(unknown).is_err());
    }

    #[test]
    fn skeleton_must_type_the_shape() {
        let mut h = diamond(false);
        let graph = Graph::discrete(["inst", "meta"]).with_edge("inst", "meta", AttrSet::new()).with_edge("inst", "inst", AttrSet::new());
        let map: BTreeMap<String, NodeId> = [("a", "inst"), ("b", "inst"), ("c", "inst"), ("d", "meta")].iter().map(|(k, v)| (k.to_string(), NodeId::from(*v))).collect();
        h.set_skeleton(SkeletonTyping { graph: graph.clone(), map: map.clone() }).unwrap();
        let mut bad = map;
        bad.insert("a".into(), "meta".into());
        assert!(h.set_skeleton(SkeletonTyping { graph, map: bad }).is_err());
    }
}
