use super::{Graph, NodeId};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// A node mapping, keyed by source node.
pub type NodeMap = BTreeMap<NodeId, NodeId>;

/// A homomorphism between two attributed graphs.
///
/// Edges are mapped implicitly through their endpoints, which is enough
/// for simple graphs.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    source: Arc<Graph>,
    target: Arc<Graph>,
    map: NodeMap,
}

impl PartialEq for Homomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.hom_equal(other)
    }
}

impl Eq for Homomorphism {}

impl Homomorphism {
    /// Builds a homomorphism, checking totality, edge preservation and
    /// attribute containment.
    pub fn new(source: impl Into<Arc<Graph>>, target: impl Into<Arc<Graph>>, map: NodeMap) -> Result<Self> {
        let h = Homomorphism::from_parts(source, target, map);
        h.check()?;
        Ok(h)
    }

    /// Builds without checking; use [`Homomorphism::check`] afterwards if
    /// the parts are untrusted.
    pub fn from_parts(source: impl Into<Arc<Graph>>, target: impl Into<Arc<Graph>>, map: NodeMap) -> Self {
        Homomorphism { source: source.into(), target: target.into(), map }
    }

    pub fn identity(g: impl Into<Arc<Graph>>) -> Self {
        let g = g.into();
        let map = g.node_ids().map(|n| (n.clone(), n.clone())).collect();
        Homomorphism { source: g.clone(), target: g, map }
    }

    /// Inclusion of `sub` into `sup`, mapping every node to the same id.
    pub fn inclusion(sub: impl Into<Arc<Graph>>, sup: impl Into<Arc<Graph>>) -> Result<Self> {
        let sub = sub.into();
        let map = sub.node_ids().map(|n| (n.clone(), n.clone())).collect();
        Homomorphism::new(sub, sup, map)
    }

    pub fn source(&self) -> &Arc<Graph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Graph> {
        &self.target
    }

    pub fn map(&self) -> &NodeMap {
        &self.map
    }

    pub fn into_map(self) -> NodeMap {
        self.map
    }

    /// Image of a source node.
    ///
    /// # Panics
    ///
    /// Panics if `n` is not a source node; checked homomorphisms are total.
    pub fn apply(&self, n: &NodeId) -> &NodeId {
        self.map.get(n).unwrap_or_else(|| panic!("node {n} is outside the domain"))
    }

    pub fn get(&self, n: &NodeId) -> Option<&NodeId> {
        self.map.get(n)
    }

    /// Source nodes mapped to `t`, in order.
    pub fn preimage(&self, t: &NodeId) -> Vec<NodeId> {
        self.map.iter().filter(|(_, v)| *v == t).map(|(k, _)| k.clone()).collect()
    }

    /// Reports the first way in which this is not a homomorphism.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::NotAHomomorphism(msg));
        for (n, attrs) in self.source.nodes() {
            let Some(t) = self.map.get(n) else {
                return bad(format!("node {n} is unmapped"));
            };
            let Some(t_attrs) = self.target.node_attrs(t) else {
                return bad(format!("node {n} maps to missing node {t}"));
            };
            if !attrs.is_subset(t_attrs) {
                return bad(format!("attributes of node {n} are not contained in those of {t}"));
            }
        }
        if let Some(extra) = self.map.keys().find(|k| !self.source.has_node(k)) {
            return bad(format!("map mentions {extra}, which is not a source node"));
        }
        for (u, v, attrs) in self.source.edges() {
            let (tu, tv) = (&self.map[u], &self.map[v]);
            match self.target.edge_attrs(tu, tv) {
                None => return bad(format!("edge {u} -> {v} has no image {tu} -> {tv}")),
                Some(t_attrs) if !attrs.is_subset(t_attrs) => {
                    return bad(format!("attributes of edge {u} -> {v} are not contained in its image"))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    pub fn is_homomorphism(&self) -> bool {
        self.check().is_ok()
    }

    /// Injective on nodes, hence on edges.
    pub fn is_mono(&self) -> bool {
        let image: BTreeSet<&NodeId> = self.map.values().collect();
        image.len() == self.map.len()
    }

    /// Surjective on nodes, edges and attribute values.
    pub fn is_epi(&self) -> bool {
        for (t, t_attrs) in self.target.nodes() {
            let pre = self.preimage(t);
            if pre.is_empty() {
                return false;
            }
            let covered = pre.iter().filter_map(|p| self.source.node_attrs(p)).fold(Default::default(), |a: super::AttrSet, b| a.union(b));
            if !t_attrs.is_subset(&covered) {
                return false;
            }
        }
        let mut covered: BTreeMap<(NodeId, NodeId), super::AttrSet> = BTreeMap::new();
        for (u, v, a) in self.source.edges() {
            let slot = covered.entry((self.map[u].clone(), self.map[v].clone())).or_default();
            *slot = slot.union(a);
        }
        self.target.edges().all(|(u, v, a)| covered.get(&(u.clone(), v.clone())).is_some_and(|c| a.is_subset(c)))
    }

    /// Mono and epi with equal attributes, i.e. an isomorphism.
    pub fn is_iso(&self) -> bool {
        self.is_mono()
            && self.is_epi()
            && self.source.node_count() == self.target.node_count()
            && self.source.nodes().all(|(n, a)| self.target.node_attrs(&self.map[n]) == Some(a))
            && self.source.edges().all(|(u, v, a)| self.target.edge_attrs(&self.map[u], &self.map[v]) == Some(a))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Homomorphism) -> Result<Homomorphism> {
        compose(self, first)
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<Homomorphism> {
        if !self.is_iso() {
            return Err(Error::Mismatch("only isomorphisms have inverses".into()));
        }
        let map = self.map.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
        Ok(Homomorphism::from_parts(self.target.clone(), self.source.clone(), map))
    }

    /// Same source, target and node map.
    pub fn hom_equal(&self, other: &Homomorphism) -> bool {
        self.map == other.map && *self.source == *other.source && *self.target == *other.target
    }

    /// Same node map on a shared source and target, ignoring identity of
    /// the target object.
    pub fn agrees_with(&self, other: &Homomorphism) -> bool {
        self.map == other.map
    }

    /// Replaces the target by a structurally equal graph.
    pub fn with_target(&self, target: Arc<Graph>) -> Homomorphism {
        Homomorphism { source: self.source.clone(), target, map: self.map.clone() }
    }

    /// Replaces the source by a structurally equal graph.
    pub fn with_source(&self, source: Arc<Graph>) -> Homomorphism {
        Homomorphism { source, target: self.target.clone(), map: self.map.clone() }
    }
}

/// Composite `g ∘ f`; `f`'s target must equal `g`'s source.
pub fn compose(g: &Homomorphism, f: &Homomorphism) -> Result<Homomorphism> {
    if *f.target != *g.source {
        return Err(Error::Mismatch("target of the first arrow differs from source of the second".into()));
    }
    let map = f
        .map
        .iter()
        .map(|(k, v)| {
            let w = g.map.get(v).ok_or_else(|| Error::NotAHomomorphism(format!("node {v} is unmapped")))?;
            Ok((k.clone(), w.clone()))
        })
        .collect::<Result<NodeMap>>()?;
    Ok(Homomorphism::from_parts(f.source.clone(), g.target.clone(), map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AttrSet;

    fn path() -> Graph {
        Graph::discrete(["a", "b"]).with_edge("a", "b", AttrSet::new())
    }

    fn map(pairs: &[(&str, &str)]) -> NodeMap {
        pairs.iter().map(|(a, b)| (NodeId::from(*a), NodeId::from(*b))).collect()
    }

    #[test]
    fn checks_edges_and_attrs() {
        let t = Graph::new().with_node("x", AttrSet::new().with("k", [1i64])).with_edge("x", "x", AttrSet::new());
        assert!(Homomorphism::new(path(), t.clone(), map(&[("a", "x"), ("b", "x")])).is_ok());
        assert!(Homomorphism::new(path(), Graph::discrete(["x"]), map(&[("a", "x"), ("b", "x")])).is_err());
        let attributed = Graph::new().with_node("a", AttrSet::new().with("k", [2i64]));
        assert!(Homomorphism::new(attributed, t, map(&[("a", "x")])).is_err());
        assert!(Homomorphism::new(path(), path(), map(&[("a", "a")])).is_err());
    }

    #[test]
    fn mono_epi_iso() {
        let id = Homomorphism::identity(path());
        assert!(id.is_mono() && id.is_epi() && id.is_iso());
        let fold = Homomorphism::new(
            Graph::discrete(["a", "b"]),
            Graph::discrete(["x"]),
            map(&[("a", "x"), ("b", "x")]),
        )
        .unwrap();
        assert!(!fold.is_mono() && fold.is_epi());
        let inc = Homomorphism::inclusion(Graph::discrete(["a", "b"]), path()).unwrap();
        assert!(inc.is_mono() && !inc.is_epi() && !inc.is_iso());
        let attr_inc = Homomorphism::inclusion(Graph::discrete(["x"]), Graph::new().with_node("x", AttrSet::new().with("k", ["v"]))).unwrap();
        assert!(!attr_inc.is_epi());
    }

    #[test]
    fn composition_and_inverse() {
        let f = Homomorphism::identity(path());
        let swap_target = Graph::discrete(["p", "q"]).with_edge("p", "q", AttrSet::new());
        let g = Homomorphism::new(path(), swap_target, map(&[("a", "p"), ("b", "q")])).unwrap();
        let gf = compose(&g, &f).unwrap();
        assert_eq!(gf.map(), g.map());
        let back = g.inverse().unwrap();
        assert!(compose(&back, &g).unwrap().hom_equal(&Homomorphism::identity(path())));
        assert!(compose(&f, &g).is_err());
    }
}
