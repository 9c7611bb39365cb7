//! Forward propagation of an expansive rewrite of `G` to its type `T`.

use crate::attr_graph::{compose, Graph, Homomorphism};
use crate::category::{image_factorization, pushout, Pushout};
use crate::{Error, Result};
use std::sync::Arc;

/// Splits `r: L → L⁺` as `L -pre-> L′ -post-> L⁺`, with `typing: L′ → T`
/// typing the strict part in the existing `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForwardFactorization {
    pub mid: Arc<Graph>,
    /// `r′: L → L′`.
    pub pre: Homomorphism,
    /// `r⁺: L′ → L⁺`.
    pub post: Homomorphism,
    /// `x: L′ → T`.
    pub typing: Homomorphism,
}

impl ForwardFactorization {
    /// Assembles a factorization; the three arrows must agree on `L′`.
    pub fn new(pre: Homomorphism, post: Homomorphism, typing: Homomorphism) -> Result<Self> {
        let mid = pre.target().clone();
        if **post.source() != *mid || **typing.source() != *mid {
            return Err(Error::Mismatch("factorization arrows disagree on the middle object".into()));
        }
        for (h, name) in [(&pre, "pre"), (&post, "post"), (&typing, "typing")] {
            h.check().map_err(|e| Error::FactorizationViolated(format!("{name} arrow: {e}")))?;
        }
        Ok(ForwardFactorization { post: post.with_source(mid.clone()), typing: typing.with_source(mid.clone()), pre, mid })
    }

    /// Everything happens in the canonical phase: `L′ = L`.
    pub fn canonical(rule: &Homomorphism, typing: &Homomorphism) -> Self {
        let l = rule.source().clone();
        ForwardFactorization {
            mid: l.clone(),
            pre: Homomorphism::identity(l.clone()),
            post: rule.clone(),
            typing: typing.with_source(l),
        }
    }

    /// Checks `post ∘ pre = rule` and `typing ∘ pre = expected`, where
    /// `expected` is the typing of `L` in `T`.
    pub fn check(&self, rule: &Homomorphism, expected: &Homomorphism) -> Result<()> {
        let bad = |m: &str| Err(Error::FactorizationViolated(m.to_string()));
        if **self.pre.source() != **rule.source() || **self.post.target() != **rule.target() {
            return bad("factorization does not span the rule");
        }
        if **self.typing.target() != **expected.target() {
            return bad("factorization is typed by the wrong graph");
        }
        if compose(&self.post, &self.pre)?.map() != rule.map() {
            return bad("post ∘ pre differs from the rule");
        }
        if compose(&self.typing, &self.pre)?.map() != expected.map() {
            return bad("typing ∘ pre differs from the typing of the match");
        }
        Ok(())
    }
}

/// Outcome of the strict phase.
#[derive(Clone, Debug)]
pub struct ForwardStrict {
    /// `G′`.
    pub graph: Arc<Graph>,
    /// `g′: G → G′`.
    pub trace: Homomorphism,
    /// `m′: L′ → G′`.
    pub instance: Homomorphism,
    /// `h′: G′ → T`.
    pub typing: Homomorphism,
}

/// Strict phase: pushes out `m` along `r′`; `G′` stays typed by `T`.
pub fn forward_strict(h: &Homomorphism, m: &Homomorphism, fact: &ForwardFactorization) -> Result<ForwardStrict> {
    fact.check(&compose(&fact.post, &fact.pre)?, &compose(h, m)?)?;
    let po = pushout(m, &fact.pre)?;
    let typing = po.mediate(h, &fact.typing)?;
    Ok(ForwardStrict { graph: po.object, trace: po.from_left, instance: po.from_right, typing })
}

/// Outcome of the canonical phase.
#[derive(Clone, Debug)]
pub struct ForwardCanonical {
    /// `G⁺`, with `g⁺: G′ → G⁺` and `m⁺: L⁺ → G⁺`.
    pub rewrite: Pushout,
    /// `T⁺`.
    pub typed_by: Arc<Graph>,
    /// `t⁺: T → T⁺`.
    pub type_trace: Homomorphism,
    /// `h⁺: G⁺ → T⁺`.
    pub typing: Homomorphism,
}

/// Canonical phase: completes the rewrite of `G′` along `r⁺` and pushes
/// `h′` out along the result to obtain `T⁺`.
pub fn forward_canonical(strict: &ForwardStrict, post: &Homomorphism) -> Result<ForwardCanonical> {
    let rewrite = pushout(&strict.instance, post)?;
    let types = pushout(&strict.typing, &rewrite.from_left)?;
    Ok(ForwardCanonical { rewrite, typed_by: types.object, type_trace: types.from_left, typing: types.from_right })
}

/// Projection of `r⁺` onto `T`.
#[derive(Clone, Debug)]
pub struct RuleProjection {
    /// `L_T`, the image of `L′` in `T`.
    pub lhs: Arc<Graph>,
    /// `ĥ′: L′ → L_T`.
    pub to_lhs: Homomorphism,
    /// `m̂′: L_T ↣ T`.
    pub instance: Homomorphism,
    /// `r̂⁺: L_T → L_T⁺`.
    pub rule: Homomorphism,
    /// `L⁺ → L_T⁺`.
    pub from_rhs: Homomorphism,
}

/// Projects `r⁺: L′ → L⁺` along the typing `L′ → T`.
pub fn project_rule(post: &Homomorphism, typing: &Homomorphism) -> Result<RuleProjection> {
    let imf = image_factorization(typing)?;
    let po = pushout(&imf.epi, post)?;
    Ok(RuleProjection { lhs: imf.image, to_lhs: imf.epi, instance: imf.mono, rule: po.from_left, from_rhs: po.from_right })
}

/// `T⁺` obtained by applying a projected rule to `T`.
#[derive(Clone, Debug)]
pub struct ProjectedRewrite {
    pub typed_by: Arc<Graph>,
    /// `t⁺: T → T⁺`.
    pub type_trace: Homomorphism,
    /// `m̂⁺: L_T⁺ ↣ T⁺`.
    pub instance: Homomorphism,
}

impl RuleProjection {
    pub fn apply(&self) -> Result<ProjectedRewrite> {
        let po = pushout(&self.instance, &self.rule)?;
        Ok(ProjectedRewrite { typed_by: po.object, type_trace: po.from_left, instance: po.from_right })
    }
}

/// Full forward step through the projection: `G⁺` by pushout, `T⁺` by the
/// projected rule, and `h⁺` from the universal property of `G⁺`.
#[derive(Clone, Debug)]
pub struct ForwardProjected {
    pub rewrite: Pushout,
    pub projection: RuleProjection,
    pub types: ProjectedRewrite,
    /// `h⁺: G⁺ → T⁺`.
    pub typing: Homomorphism,
}

pub fn forward_via_projection(strict: &ForwardStrict, post: &Homomorphism) -> Result<ForwardProjected> {
    let rewrite = pushout(&strict.instance, post)?;
    let projection = project_rule(post, &compose(&strict.typing, &strict.instance)?)?;
    let types = projection.apply()?;
    let typing = rewrite.mediate(
        &compose(&types.type_trace, &strict.typing)?,
        &compose(&types.instance, &projection.from_rhs)?,
    )?;
    Ok(ForwardProjected { rewrite, projection, types, typing })
}

/// Outcome of the clean-up phase.
#[derive(Clone, Debug)]
pub struct ForwardCleanup {
    /// `T⊕`.
    pub typed_by: Arc<Graph>,
    /// `t⊕: T⁺ ↠ T⊕`.
    pub type_trace: Homomorphism,
    /// `m̂⊕`.
    pub instance: Homomorphism,
    /// `t⊕ ∘ h⁺`.
    pub typing: Homomorphism,
}

/// Clean-up: merges elements of `T⁺` through the epi `r⊕` at the
/// monomorphic instance `m̂⁺`, retyping `G⁺` accordingly.
pub fn forward_cleanup(instance: &Homomorphism, epi: &Homomorphism, typing: &Homomorphism) -> Result<ForwardCleanup> {
    if !epi.is_epi() {
        return Err(Error::NotEpi("a forward clean-up rule"));
    }
    if !instance.is_mono() {
        return Err(Error::NotMono("the instance of a clean-up rule"));
    }
    let po = pushout(instance, epi)?;
    let typing = compose(&po.from_left, typing)?;
    Ok(ForwardCleanup { typed_by: po.object, type_trace: po.from_left, instance: po.from_right, typing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attr_graph::{find_isomorphism, AttrSet, NodeId, NodeMap};

    fn nm(pairs: &[(&str, &str)]) -> NodeMap {
        pairs.iter().map(|(a, b)| (NodeId::from(*a), NodeId::from(*b))).collect()
    }

    /// `G = {a, b}` typed by `T = {t}`; the rule adds `c` with an edge from `a`.
    fn setup() -> (Homomorphism, Homomorphism, Homomorphism) {
        let t = Arc::new(Graph::discrete(["t"]));
        let g = Arc::new(Graph::discrete(["a", "b"]));
        let h = Homomorphism::new(g.clone(), t, nm(&[("a", "t"), ("b", "t")])).unwrap();
        let l = Arc::new(Graph::discrete(["x"]));
        let lp = Graph::discrete(["x", "c"]).with_edge("x", "c", AttrSet::new());
        let r = Homomorphism::new(l.clone(), lp, nm(&[("x", "x")])).unwrap();
        let m = Homomorphism::new(l, g, nm(&[("x", "a")])).unwrap();
        (h, m, r)
    }

    #[test]
    fn identity_strict_phase_keeps_graph() {
        let (h, m, r) = setup();
        let fact = ForwardFactorization::canonical(&r, &compose(&h, &m).unwrap());
        let s = forward_strict(&h, &m, &fact).unwrap();
        assert_eq!(*s.graph, **h.source());
        assert_eq!(s.typing.map(), h.map());
    }

    #[test]
    fn canonical_adds_new_type() {
        let (h, m, r) = setup();
        let fact = ForwardFactorization::canonical(&r, &compose(&h, &m).unwrap());
        let s = forward_strict(&h, &m, &fact).unwrap();
        let c = forward_canonical(&s, &fact.post).unwrap();
        assert_eq!(c.rewrite.object.node_count(), 3);
        assert_eq!(c.typed_by.node_count(), 2);
        assert_eq!(c.typed_by.edge_count(), 1);
        assert!(c.typing.is_homomorphism());
        let p = forward_via_projection(&s, &fact.post).unwrap();
        let iso = find_isomorphism(&c.typed_by, &p.types.typed_by, &|_, _| true).unwrap();
        for (g, t) in c.typing.map() {
            assert_eq!(&iso[t], p.typing.apply(g));
        }
    }

    #[test]
    fn strict_typing_of_new_node() {
        let (h, m, r) = setup();
        let t_loop = Arc::new(Graph::discrete(["t"]).with_edge("t", "t", AttrSet::new()));
        let h = h.with_target(t_loop.clone());
        let lp = r.target().clone();
        let typing = Homomorphism::new(lp.clone(), t_loop, nm(&[("x", "t"), ("c", "t")])).unwrap();
        let fact = ForwardFactorization::new(r.clone(), Homomorphism::identity(lp), typing).unwrap();
        let s = forward_strict(&h, &m, &fact).unwrap();
        assert_eq!(s.graph.node_count(), 3);
        let c = forward_canonical(&s, &fact.post).unwrap();
        assert_eq!(*c.typed_by, **h.target());
    }

    #[test]
    fn bad_factorization_is_rejected() {
        let (h, m, r) = setup();
        let wrong = Homomorphism::new(r.source().clone(), h.target().clone(), nm(&[("x", "t")])).unwrap();
        let mut fact = ForwardFactorization::canonical(&r, &wrong);
        let t2 = Arc::new(Graph::discrete(["t", "u"]));
        fact.typing = Homomorphism::new(r.source().clone(), t2, nm(&[("x", "u")])).unwrap();
        assert!(forward_strict(&h, &m, &fact).is_err());
    }

    #[test]
    fn cleanup_requires_epi() {
        let (h, m, r) = setup();
        let fact = ForwardFactorization::canonical(&r, &compose(&h, &m).unwrap());
        let s = forward_strict(&h, &m, &fact).unwrap();
        let c = forward_canonical(&s, &fact.post).unwrap();
        let inc = Homomorphism::inclusion(Graph::discrete(["t"]), c.typed_by.clone()).unwrap();
        let not_epi = Homomorphism::inclusion(Graph::discrete(["t"]), Graph::discrete(["t", "z"])).unwrap();
        assert!(matches!(forward_cleanup(&inc, &not_epi, &c.typing), Err(Error::NotEpi(_))));
        let id = Homomorphism::identity(inc.source().clone());
        let out = forward_cleanup(&inc, &id, &c.typing).unwrap();
        assert_eq!(*out.typed_by, *c.typed_by);
    }
}
