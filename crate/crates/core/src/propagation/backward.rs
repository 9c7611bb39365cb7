//! Backward propagation of a restrictive rewrite of `T` to a graph `G` it types.

use crate::attr_graph::{compose, Graph, Homomorphism, NodeId, NodeMap};
use crate::category::{final_pbc, pullback, FinalPbc, Pullback};
use crate::{Error, Result};
use std::sync::Arc;

/// The part of `G` typed by the match: `L ← L_G ↣ G`.
#[derive(Clone, Debug)]
pub struct Restriction {
    /// `L_G`, with the node ids of `G`.
    pub graph: Arc<Graph>,
    /// `m̂: L_G ↣ G`.
    pub instance: Homomorphism,
    /// `ĥ: L_G → L`.
    pub typing: Homomorphism,
}

/// Pulls the match `m: L ↣ T` back along `h: G → T`.
pub fn restriction_pullback(h: &Homomorphism, m: &Homomorphism) -> Result<Restriction> {
    if !m.is_mono() {
        return Err(Error::NotMono("the match of a restrictive rule"));
    }
    let pb = pullback(h, m)?;
    let rename: NodeMap = pb.to_left.map().iter().map(|(p, g)| (p.clone(), g.clone())).collect();
    let mut graph = Graph::new();
    for (p, attrs) in pb.object.nodes() {
        graph.add_node(rename[p].clone(), attrs.clone())?;
    }
    for (u, v, attrs) in pb.object.edges() {
        graph.add_edge(rename[u].clone(), rename[v].clone(), attrs.clone())?;
    }
    let graph = Arc::new(graph);
    let instance = graph.node_ids().map(|g| (g.clone(), g.clone())).collect();
    let typing = pb.to_right.map().iter().map(|(p, l)| (rename[p].clone(), l.clone())).collect();
    Ok(Restriction {
        instance: Homomorphism::from_parts(graph.clone(), h.source().clone(), instance),
        typing: Homomorphism::from_parts(graph.clone(), m.source().clone(), typing),
        graph,
    })
}

/// Splits `r: L⁻ → L` as `L⁻ -pre-> L′ -post-> L`, with `retyping: L_G → L′`
/// choosing the new type of each instance in the strict phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardFactorization {
    pub mid: Arc<Graph>,
    /// `r′: L′ → L`.
    pub post: Homomorphism,
    /// `r⁻: L⁻ → L′`.
    pub pre: Homomorphism,
    /// `ĥ′: L_G → L′`.
    pub retyping: Homomorphism,
}

impl BackwardFactorization {
    pub fn new(post: Homomorphism, pre: Homomorphism, retyping: Homomorphism) -> Result<Self> {
        let mid = post.source().clone();
        if **pre.target() != *mid || **retyping.target() != *mid {
            return Err(Error::Mismatch("factorization arrows disagree on the middle object".into()));
        }
        for (h, name) in [(&post, "post"), (&pre, "pre"), (&retyping, "retyping")] {
            h.check().map_err(|e| Error::FactorizationViolated(format!("{name} arrow: {e}")))?;
        }
        Ok(BackwardFactorization { pre: pre.with_target(mid.clone()), retyping: retyping.with_target(mid.clone()), post, mid })
    }

    /// Everything happens in the canonical phase: `L′ = L`.
    pub fn canonical(rule: &Homomorphism, restriction: &Restriction) -> Self {
        let l = rule.target().clone();
        BackwardFactorization {
            mid: l.clone(),
            post: Homomorphism::identity(l.clone()),
            pre: rule.clone(),
            retyping: restriction.typing.with_target(l),
        }
    }

    /// The first instance of an element of `L` that `post` deletes.
    pub fn deleted_instance(&self, restriction_typing: &Homomorphism) -> Option<(NodeId, NodeId)> {
        let image: std::collections::BTreeSet<&NodeId> = self.post.map().values().collect();
        restriction_typing
            .map()
            .iter()
            .find(|(_, l)| !image.contains(l))
            .map(|(g, l)| (g.clone(), l.clone()))
    }

    /// Checks `post ∘ pre = rule` and `post ∘ retyping = ĥ`.
    pub fn check(&self, rule: &Homomorphism, restriction_typing: &Homomorphism) -> Result<()> {
        let bad = |m: &str| Err(Error::FactorizationViolated(m.to_string()));
        if **self.pre.source() != **rule.source() || **self.post.target() != **rule.target() {
            return bad("factorization does not span the rule");
        }
        if **self.retyping.source() != **restriction_typing.source() {
            return bad("retyping does not start at the restriction of the match");
        }
        if let Some((instance, element)) = self.deleted_instance(restriction_typing) {
            return Err(Error::InstanceOfDeletedElement { instance, element });
        }
        if compose(&self.post, &self.pre)?.map() != rule.map() {
            return bad("post ∘ pre differs from the rule");
        }
        if compose(&self.post, &self.retyping)?.map() != restriction_typing.map() {
            return bad("post ∘ retyping differs from the typing of the restriction");
        }
        Ok(())
    }
}

/// Outcome of the strict phase.
#[derive(Clone, Debug)]
pub struct BackwardStrict {
    /// `T′`, with `m′: L′ ↣ T′` and `t′: T′ → T`.
    pub rewrite: FinalPbc,
    /// `h′: G → T′`.
    pub typing: Homomorphism,
}

impl BackwardStrict {
    pub fn graph(&self) -> &Arc<Graph> {
        &self.rewrite.object
    }

    pub fn instance(&self) -> &Homomorphism {
        &self.rewrite.from_interface
    }

    pub fn trace(&self) -> &Homomorphism {
        &self.rewrite.to_host
    }
}

/// Strict phase: rewrites `T` by the final pullback complement of `r′`
/// and `m`, retyping `G` by `T′` as the factorization prescribes.
pub fn backward_strict(h: &Homomorphism, m: &Homomorphism, restriction: &Restriction, fact: &BackwardFactorization) -> Result<BackwardStrict> {
    let rule = compose(&fact.post, &fact.pre)?;
    fact.check(&rule, &restriction.typing)?;
    let rewrite = final_pbc(&fact.post, m)?;
    let assign: NodeMap = fact.retyping.map().clone();
    let typing = rewrite.mediate(h, &assign)?;
    Ok(BackwardStrict { rewrite, typing })
}

/// Outcome of the canonical phase.
#[derive(Clone, Debug)]
pub struct BackwardCanonical {
    /// `T⁻`, with `m⁻: L⁻ ↣ T⁻` and `t⁻: T⁻ → T′`.
    pub types: FinalPbc,
    /// `G⁻` with `g⁻: G⁻ → G` and `h⁻: G⁻ → T⁻`.
    pub rewrite: Pullback,
}

/// Canonical phase: completes the rewrite of `T′` along `r⁻` and pulls it
/// back along `h′`.
pub fn backward_canonical(strict: &BackwardStrict, pre: &Homomorphism) -> Result<BackwardCanonical> {
    let types = final_pbc(pre, strict.instance())?;
    let rewrite = pullback(&strict.typing, &types.to_host)?;
    Ok(BackwardCanonical { types, rewrite })
}

/// Lifting of `r⁻` to `G` and the rewrite it induces.
#[derive(Clone, Debug)]
pub struct Lifting {
    /// `L_G⁻` with `r̂⁻: L_G⁻ → L_G` and `ĥ⁻: L_G⁻ → L⁻`.
    pub rule: Pullback,
    /// `G⁻` with `m̂⁻: L_G⁻ ↣ G⁻` and `g⁻: G⁻ → G`.
    pub rewrite: FinalPbc,
    /// `h⁻: G⁻ → T⁻`.
    pub typing: Homomorphism,
}

/// Lifts `r⁻` along the retyping `ĥ′`, applies the lifted rule to `G` at
/// `m̂` and types the result by `T⁻`.
pub fn lift_rule(restriction: &Restriction, fact: &BackwardFactorization, strict: &BackwardStrict, types: &FinalPbc) -> Result<Lifting> {
    let rule = pullback(&fact.retyping, &fact.pre)?;
    let rewrite = final_pbc(&rule.to_left, &restriction.instance)?;
    let x = compose(&strict.typing, &rewrite.to_host)?;
    let assign = lifted_assignment(&rewrite, &rule.to_right);
    let typing = types.mediate(&x, &assign)?;
    Ok(Lifting { rule, rewrite, typing })
}

/// Sends each node `m̂⁻(y)` to `h(y)`.
pub(crate) fn lifted_assignment(rewrite: &FinalPbc, h: &Homomorphism) -> NodeMap {
    rewrite.from_interface.map().iter().map(|(y, z)| (z.clone(), h.apply(y).clone())).collect()
}

/// Outcome of the clean-up phase.
#[derive(Clone, Debug)]
pub struct BackwardCleanup {
    /// `G⊖` with `g⊖: G⊖ → G⁻`.
    pub rewrite: FinalPbc,
    /// `h⁻ ∘ g⊖`.
    pub typing: Homomorphism,
}

/// Clean-up: keeps only the part of the instance `m̂⁻` selected by the
/// mono `r⊖`, deleting the remaining clones from `G⁻`.
pub fn backward_cleanup(instance: &Homomorphism, keep: &Homomorphism, typing: &Homomorphism) -> Result<BackwardCleanup> {
    if !keep.is_mono() {
        return Err(Error::NotMono("a backward clean-up rule"));
    }
    let rewrite = final_pbc(keep, instance)?;
    let typing = compose(typing, &rewrite.to_host)?;
    Ok(BackwardCleanup { rewrite, typing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attr_graph::{find_isomorphism, AttrSet};

    fn nm(pairs: &[(&str, &str)]) -> NodeMap {
        pairs.iter().map(|(a, b)| (NodeId::from(*a), NodeId::from(*b))).collect()
    }

    /// `T = {t, u}`, `G = {a, b, c}` with `a, b : t` and `c : u`; the rule
    /// clones `t` into `t1, t2` and deletes `u`.
    fn setup() -> (Homomorphism, Homomorphism, Homomorphism) {
        let t = Arc::new(Graph::discrete(["t", "u"]));
        let g = Arc::new(Graph::discrete(["a", "b", "c"]).with_edge("a", "c", AttrSet::new()));
        let t = Arc::new((*t).clone().with_edge("t", "u", AttrSet::new()));
        let h = Homomorphism::new(g, t.clone(), nm(&[("a", "t"), ("b", "t"), ("c", "u")])).unwrap();
        let m = Homomorphism::identity(t.clone());
        let lm = Graph::discrete(["t1", "t2"]);
        let r = Homomorphism::new(lm, t, nm(&[("t1", "t"), ("t2", "t")])).unwrap();
        (h, m, r)
    }

    #[test]
    fn restriction_keeps_host_ids() {
        let (h, m, _) = setup();
        let res = restriction_pullback(&h, &m).unwrap();
        assert_eq!(res.graph.node_ids().map(|n| n.as_str()).collect::<Vec<_>>(), ["a", "b", "c"]);
        assert!(res.instance.is_mono());
        assert_eq!(res.typing.apply(&"c".into()).as_str(), "u");
    }

    #[test]
    fn canonical_route_matches_lifting() {
        let (h, m, r) = setup();
        let res = restriction_pullback(&h, &m).unwrap();
        let fact = BackwardFactorization::canonical(&r, &res);
        let strict = backward_strict(&h, &m, &res, &fact).unwrap();
        assert_eq!(**strict.graph(), **m.target());
        let can = backward_canonical(&strict, &fact.pre).unwrap();
        assert_eq!(can.types.object.node_count(), 2);
        assert_eq!(can.rewrite.object.node_count(), 4);
        let lift = lift_rule(&res, &fact, &strict, &can.types).unwrap();
        let iso = find_isomorphism(&can.rewrite.object, &lift.rewrite.object, &|_, _| true).unwrap();
        for (x, t) in can.rewrite.to_right.map() {
            assert_eq!(lift.typing.apply(&iso[x]), t);
        }
    }

    #[test]
    fn strict_clone_retypes_instances() {
        let (h, m, _) = setup();
        let res = restriction_pullback(&h, &m).unwrap();
        let t = m.target().clone();
        let mid = Arc::new(Graph::discrete(["t1", "t2", "u"]).with_edge("t1", "u", AttrSet::new()).with_edge("t2", "u", AttrSet::new()));
        let post = Homomorphism::new(mid.clone(), t, nm(&[("t1", "t"), ("t2", "t"), ("u", "u")])).unwrap();
        let lm = Arc::new(Graph::discrete(["t1", "t2"]));
        let pre = Homomorphism::new(lm, mid.clone(), nm(&[("t1", "t1"), ("t2", "t2")])).unwrap();
        let retyping = Homomorphism::new(res.graph.clone(), mid, nm(&[("a", "t1"), ("b", "t2"), ("c", "u")])).unwrap();
        let fact = BackwardFactorization::new(post, pre, retyping).unwrap();
        let strict = backward_strict(&h, &m, &res, &fact).unwrap();
        assert_eq!(strict.graph().node_count(), 3);
        assert_eq!(strict.typing.apply(&"a".into()).as_str(), "t∥t1");
        assert_eq!(strict.typing.apply(&"b".into()).as_str(), "t∥t2");
        let can = backward_canonical(&strict, &fact.pre).unwrap();
        assert_eq!(can.rewrite.object.node_count(), 2);
    }

    #[test]
    fn deleting_a_live_type_is_rejected() {
        let (h, m, _) = setup();
        let res = restriction_pullback(&h, &m).unwrap();
        let t = m.target().clone();
        let mid = Arc::new(Graph::discrete(["t"]));
        let post = Homomorphism::new(mid.clone(), t, nm(&[("t", "t")])).unwrap();
        let retyping = Homomorphism::from_parts(res.graph.clone(), mid.clone(), nm(&[("a", "t"), ("b", "t"), ("c", "t")]));
        let fact = BackwardFactorization { mid: mid.clone(), post, pre: Homomorphism::identity(mid), retyping };
        let err = backward_strict(&h, &m, &res, &fact).unwrap_err();
        assert!(matches!(err, Error::InstanceOfDeletedElement { ref element, .. } if element.as_str() == "u"));
    }

    #[test]
    fn cleanup_with_identity_keeps_everything() {
        let (h, m, r) = setup();
        let res = restriction_pullback(&h, &m).unwrap();
        let fact = BackwardFactorization::canonical(&r, &res);
        let strict = backward_strict(&h, &m, &res, &fact).unwrap();
        let can = backward_canonical(&strict, &fact.pre).unwrap();
        let lift = lift_rule(&res, &fact, &strict, &can.types).unwrap();
        let keep = Homomorphism::identity(lift.rule.object.clone());
        let out = backward_cleanup(&lift.rewrite.from_interface, &keep, &lift.typing).unwrap();
        assert_eq!(*out.rewrite.object, *lift.rewrite.object);
        let empty = Homomorphism::from_parts(Graph::new(), lift.rule.object.clone(), NodeMap::new());
        let out = backward_cleanup(&lift.rewrite.from_interface, &empty, &lift.typing).unwrap();
        assert_eq!(out.rewrite.object.node_count(), 0);
    }
}
