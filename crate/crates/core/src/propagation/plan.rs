//! Propagation plans: one factorization per affected object plus the
//! connectors that make neighbouring factorizations agree.

use super::backward::{restriction_pullback, BackwardFactorization, Restriction};
use super::forward::ForwardFactorization;
use crate::attr_graph::{compose, for_each_hom, Graph, Homomorphism, NodeId, NodeMap};
use crate::hierarchy::{Hierarchy, TypingRepr};
use crate::rules::{MatchKind, Rule};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

/// Which way a rewrite travels through the hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Expansive rewrites, pushed to the objects typing the origin.
    #[serde(rename = "fwd")]
    Forward,
    /// Restrictive rewrites, pulled back to the objects typed by the origin.
    #[serde(rename = "bwd")]
    Backward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        }
    }

    /// The side of a rule that a match of this direction instantiates.
    pub fn match_kind(self) -> MatchKind {
        match self {
            Direction::Forward => MatchKind::Expansive,
            Direction::Backward => MatchKind::Restrictive,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factorizations {
    Forward(BTreeMap<String, ForwardFactorization>),
    Backward(BTreeMap<String, BackwardFactorization>),
}

impl Factorizations {
    pub fn direction(&self) -> Direction {
        match self {
            Factorizations::Forward(_) => Direction::Forward,
            Factorizations::Backward(_) => Direction::Backward,
        }
    }

    fn nodes(&self) -> BTreeSet<&String> {
        match self {
            Factorizations::Forward(m) => m.keys().collect(),
            Factorizations::Backward(m) => m.keys().collect(),
        }
    }
}

/// Everything needed to propagate one rewrite through a hierarchy.
///
/// Forward plans carry `r: L → L⁺` and a match `L ↣ G₀`; backward plans
/// carry `r: L⁻ → L` and a match `L ↣ G₀`.
#[derive(Clone, Debug)]
pub struct PropagationPlan {
    pub origin: String,
    pub rule: Homomorphism,
    pub instance: Homomorphism,
    pub factorizations: Factorizations,
    /// Connectors `Lᵢ → Lⱼ` for arrows `i → j`; missing ones are searched for.
    pub connectors: BTreeMap<(String, String), Homomorphism>,
}

/// Why a plan cannot be executed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComposabilityViolation {
    MissingFactorization { node: String },
    UnexpectedFactorization { node: String },
    Factorization { node: String, reason: String },
    InstanceOfDeletedElement { node: String, instance: NodeId, element: NodeId },
    Connector { from: String, to: String, reason: String },
}

impl fmt::Display for ComposabilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComposabilityViolation::MissingFactorization { node } => write!(f, "MISSING factorization for {node}"),
            ComposabilityViolation::UnexpectedFactorization { node } => write!(f, "UNEXPECTED factorization for {node}, which the rewrite cannot reach"),
            ComposabilityViolation::Factorization { node, reason } => write!(f, "FACTORIZATION {node}: {reason}"),
            ComposabilityViolation::InstanceOfDeletedElement { node, instance, element } => {
                write!(f, "DELETED {node}: {instance} is an instance of deleted element {element}")
            }
            ComposabilityViolation::Connector { from, to, reason } => write!(f, "CONNECTOR {from} -> {to}: {reason}"),
        }
    }
}

/// Objects a rewrite of `origin` reaches, in processing order, grouped in
/// waves. Forward waves start at the sinks, backward waves at the sources;
/// the origin comes last and names are sorted within a wave.
pub fn waves(h: &Hierarchy, origin: &str, direction: Direction) -> Result<Vec<Vec<String>>> {
    let scope = match direction {
        Direction::Forward => h.forward_subgraph(origin)?,
        Direction::Backward => h.backward_subgraph(origin)?,
    };
    let mut left: BTreeSet<String> = scope.names().filter(|n| *n != origin).cloned().collect();
    let mut out = Vec::new();
    while !left.is_empty() {
        let wave: Vec<String> = left
            .iter()
            .filter(|n| {
                let blockers = match direction {
                    Direction::Forward => scope.successors(n),
                    Direction::Backward => scope.predecessors(n),
                };
                blockers.iter().all(|b| !left.contains(b))
            })
            .cloned()
            .collect();
        for n in &wave {
            left.remove(n);
        }
        out.push(wave);
    }
    out.push(vec![origin.to_string()]);
    Ok(out)
}

/// Arrows between objects of the plan's scope that need a connector.
pub fn connector_arrows(h: &Hierarchy, origin: &str, direction: Direction) -> Result<Vec<(String, String)>> {
    let scope: BTreeSet<String> = waves(h, origin, direction)?.into_iter().flatten().collect();
    Ok(h.arrows()
        .filter(|(a, b)| scope.contains(*a) && scope.contains(*b))
        .filter(|(a, b)| match direction {
            Direction::Forward => *a != origin,
            Direction::Backward => *b != origin,
        })
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect())
}

impl PropagationPlan {
    /// Plan with the trivial factorization `Lᵢ = L` everywhere.
    pub fn canonical(h: &Hierarchy, origin: &str, rule: &Homomorphism, instance: &Homomorphism, direction: Direction) -> Result<Self> {
        let mut plan = PropagationPlan {
            origin: origin.to_string(),
            rule: rule.clone(),
            instance: instance.clone(),
            factorizations: match direction {
                Direction::Forward => Factorizations::Forward(BTreeMap::new()),
                Direction::Backward => Factorizations::Backward(BTreeMap::new()),
            },
            connectors: BTreeMap::new(),
        };
        plan.validate_shape(h)?;
        for name in waves(h, origin, direction)?.into_iter().flatten().filter(|n| n != origin) {
            match &mut plan.factorizations {
                Factorizations::Forward(m) => {
                    let typing = compose(&h.composed_typing(origin, &name)?, instance)?;
                    m.insert(name, ForwardFactorization::canonical(rule, &typing));
                }
                Factorizations::Backward(m) => {
                    let res = restriction(h, origin, &name, instance)?;
                    m.insert(name, BackwardFactorization::canonical(rule, &res));
                }
            }
        }
        Ok(plan)
    }

    pub fn direction(&self) -> Direction {
        self.factorizations.direction()
    }

    /// Checks that the rule, the match and the origin fit together.
    pub fn validate_shape(&self, h: &Hierarchy) -> Result<()> {
        let g0 = h.object(&self.origin).ok_or_else(|| Error::UnknownObject(self.origin.clone()))?;
        let bad = |m: &str| Err(Error::InvalidPlan(m.to_string()));
        if **self.instance.target() != **g0 {
            return bad("the match does not land in the origin");
        }
        let lhs = match self.direction() {
            Direction::Forward => self.rule.source(),
            Direction::Backward => self.rule.target(),
        };
        if **self.instance.source() != **lhs {
            return bad("the match does not instantiate the rule");
        }
        self.rule.check().map_err(|e| Error::InvalidPlan(format!("rule: {e}")))?;
        self.instance.check().map_err(|e| Error::InvalidPlan(format!("match: {e}")))?;
        if !self.instance.is_mono() {
            return bad("the match is not a monomorphism");
        }
        Ok(())
    }
}

/// `L_G` for object `name` of the backward scope of `origin`.
pub(crate) fn restriction(h: &Hierarchy, origin: &str, name: &str, instance: &Homomorphism) -> Result<Restriction> {
    restriction_pullback(&h.composed_typing(name, origin)?, instance)
}

/// Checks the whole plan; an empty result means [`super::propagate_forward`]
/// or [`super::propagate_backward`] will succeed.
pub fn check_composability(h: &Hierarchy, plan: &PropagationPlan) -> Result<Vec<ComposabilityViolation>> {
    Ok(resolve(h, plan)?.err().unwrap_or_default())
}

/// The connectors of a composable plan, found or checked for every arrow
/// that needs one.
pub fn resolve_connectors(h: &Hierarchy, plan: &PropagationPlan) -> Result<BTreeMap<(String, String), Homomorphism>> {
    Ok(resolve(h, plan)?.map_err(Error::NotComposable)?.connectors)
}

/// Per-object data of a plan that passed every check.
pub(crate) struct Resolved {
    pub waves: Vec<Vec<String>>,
    pub connectors: BTreeMap<(String, String), Homomorphism>,
    pub restrictions: BTreeMap<String, Restriction>,
}

pub(crate) fn resolve(h: &Hierarchy, plan: &PropagationPlan) -> Result<std::result::Result<Resolved, Vec<ComposabilityViolation>>> {
    plan.validate_shape(h)?;
    let direction = plan.direction();
    let origin = plan.origin.as_str();
    let waves = waves(h, origin, direction)?;
    let scope: BTreeSet<&String> = waves.iter().flatten().filter(|n| *n != origin).collect();
    let mut out = Vec::new();
    let given = plan.factorizations.nodes();
    for n in &scope {
        if !given.contains(n) {
            out.push(ComposabilityViolation::MissingFactorization { node: (*n).clone() });
        }
    }
    for n in &given {
        if !scope.contains(n) {
            out.push(ComposabilityViolation::UnexpectedFactorization { node: (*n).clone() });
        }
    }
    let mut restrictions = BTreeMap::new();
    let mut good: BTreeSet<String> = BTreeSet::new();
    for n in scope.iter().filter(|n| given.contains(**n)) {
        let outcome = match &plan.factorizations {
            Factorizations::Forward(m) => {
                let typing = compose(&h.composed_typing(origin, n)?, &plan.instance)?;
                m[*n].check(&plan.rule, &typing)
            }
            Factorizations::Backward(m) => {
                let res = restriction(h, origin, n, &plan.instance)?;
                let outcome = m[*n].check(&plan.rule, &res.typing);
                restrictions.insert((*n).clone(), res);
                outcome
            }
        };
        match outcome {
            Ok(()) => {
                good.insert((*n).clone());
            }
            Err(Error::InstanceOfDeletedElement { instance, element }) => {
                out.push(ComposabilityViolation::InstanceOfDeletedElement { node: (*n).clone(), instance, element })
            }
            Err(e) => out.push(ComposabilityViolation::Factorization { node: (*n).clone(), reason: e.to_string() }),
        }
    }
    let mut connectors = BTreeMap::new();
    let needed = connector_arrows(h, origin, direction)?;
    for (a, b) in plan.connectors.keys() {
        if !needed.iter().any(|(x, y)| x == a && y == b) {
            out.push(ComposabilityViolation::Connector { from: a.clone(), to: b.clone(), reason: "not an arrow that needs a connector".into() });
        }
    }
    for (a, b) in needed {
        if !good.contains(&a) || !good.contains(&b) {
            continue;
        }
        let h_ab = h.typing(&a, &b).expect("arrow of the hierarchy");
        let found = match &plan.factorizations {
            Factorizations::Forward(m) => {
                let (fi, fj) = (&m[&a], &m[&b]);
                match plan.connectors.get(&(a.clone(), b.clone())) {
                    Some(l) => check_forward_connector(l, fi, fj, &h_ab).map(|()| l.clone()),
                    None => find_forward_connector(fi, fj, &h_ab),
                }
            }
            Factorizations::Backward(m) => {
                let (fi, fj) = (&m[&a], &m[&b]);
                match plan.connectors.get(&(a.clone(), b.clone())) {
                    Some(l) => check_backward_connector(l, fi, fj, &h_ab).map(|()| l.clone()),
                    None => find_backward_connector(fi, fj, &h_ab),
                }
            }
        };
        match found {
            Ok(l) => {
                connectors.insert((a, b), l);
            }
            Err(reason) => out.push(ComposabilityViolation::Connector { from: a, to: b, reason }),
        }
    }
    if !out.is_empty() {
        return Ok(Err(out));
    }
    Ok(Ok(Resolved { waves, connectors, restrictions }))
}

fn same_map(f: &Homomorphism, g: &Homomorphism) -> bool {
    f.map() == g.map()
}

fn composite(g: &Homomorphism, f: &Homomorphism) -> std::result::Result<Homomorphism, String> {
    compose(g, f).map_err(|e| e.to_string())
}

fn check_forward_connector(l: &Homomorphism, fi: &ForwardFactorization, fj: &ForwardFactorization, h_ij: &Homomorphism) -> std::result::Result<(), String> {
    if **l.source() != *fi.mid || **l.target() != *fj.mid {
        return Err("connector does not join the two middle objects".into());
    }
    l.check().map_err(|e| e.to_string())?;
    if !same_map(&composite(l, &fi.pre)?, &fj.pre) {
        return Err("connector does not carry the strict part of the source to that of the target".into());
    }
    if !same_map(&composite(&fj.post, l)?, &fi.post) {
        return Err("connector does not commute with the canonical parts".into());
    }
    if !same_map(&composite(&fj.typing, l)?, &composite(h_ij, &fi.typing)?) {
        return Err("connector does not commute with the typings".into());
    }
    Ok(())
}

fn check_backward_connector(l: &Homomorphism, fi: &BackwardFactorization, fj: &BackwardFactorization, h_ij: &Homomorphism) -> std::result::Result<(), String> {
    if **l.source() != *fi.mid || **l.target() != *fj.mid {
        return Err("connector does not join the two middle objects".into());
    }
    l.check().map_err(|e| e.to_string())?;
    if !same_map(&composite(&fj.post, l)?, &fi.post) {
        return Err("connector does not commute with the strict parts".into());
    }
    if !same_map(&composite(l, &fi.pre)?, &fj.pre) {
        return Err("connector does not carry the canonical part of the source to that of the target".into());
    }
    let hat = restricted_typing(fi.retyping.source(), fj.retyping.source(), h_ij)?;
    if !same_map(&composite(l, &fi.retyping)?, &composite(&fj.retyping, &hat)?) {
        return Err("connector does not commute with the retypings".into());
    }
    Ok(())
}

/// The arrow `L_Gi → L_Gj` induced by `h_ij`; both restrictions carry host ids.
fn restricted_typing(lgi: &Arc<Graph>, lgj: &Arc<Graph>, h_ij: &Homomorphism) -> std::result::Result<Homomorphism, String> {
    let mut map = NodeMap::new();
    for g in lgi.node_ids() {
        let t = h_ij.get(g).ok_or_else(|| format!("{g} is not typed by the arrow"))?;
        if !lgj.has_node(t) {
            return Err(format!("{g} is typed by {t}, which lies outside the restriction"));
        }
        map.insert(g.clone(), t.clone());
    }
    Ok(Homomorphism::from_parts(lgi.clone(), lgj.clone(), map))
}

/// Searches for a homomorphism `Lᵢ → Lⱼ` agreeing with `forced` and
/// satisfying `allowed` elsewhere.
fn search_connector(
    source: &Arc<Graph>,
    target: &Arc<Graph>,
    forced: &[(NodeId, NodeId)],
    allowed: &dyn Fn(&NodeId, &NodeId) -> bool,
) -> std::result::Result<Homomorphism, String> {
    let mut fixed = NodeMap::new();
    for (u, v) in forced {
        if let Some(prev) = fixed.insert(u.clone(), v.clone()) {
            if prev != *v {
                return Err(format!("{u} would have to map to both {prev} and {v}"));
            }
        }
    }
    let filter = |u: &NodeId, v: &NodeId| match fixed.get(u) {
        Some(f) => f == v,
        None => allowed(u, v),
    };
    let mut found = None;
    for_each_hom(source, target, &filter, false, |m| {
        found = Some(m.clone());
        ControlFlow::Break(())
    });
    found
        .map(|m| Homomorphism::from_parts(source.clone(), target.clone(), m))
        .ok_or_else(|| "no arrow between the middle objects satisfies the connector conditions".to_string())
}

fn find_forward_connector(fi: &ForwardFactorization, fj: &ForwardFactorization, h_ij: &Homomorphism) -> std::result::Result<Homomorphism, String> {
    let forced: Vec<(NodeId, NodeId)> = fi.pre.map().iter().map(|(a, u)| (u.clone(), fj.pre.apply(a).clone())).collect();
    let allowed = |u: &NodeId, v: &NodeId| {
        fj.post.get(v) == fi.post.get(u) && fj.typing.get(v).is_some_and(|t| Some(t) == fi.typing.get(u).and_then(|x| h_ij.get(x)))
    };
    let l = search_connector(&fi.mid, &fj.mid, &forced, &allowed)?;
    check_forward_connector(&l, fi, fj, h_ij)?;
    Ok(l)
}

fn find_backward_connector(fi: &BackwardFactorization, fj: &BackwardFactorization, h_ij: &Homomorphism) -> std::result::Result<Homomorphism, String> {
    let hat = restricted_typing(fi.retyping.source(), fj.retyping.source(), h_ij)?;
    let mut forced: Vec<(NodeId, NodeId)> = fi.pre.map().iter().map(|(a, u)| (u.clone(), fj.pre.apply(a).clone())).collect();
    forced.extend(fi.retyping.map().iter().map(|(g, u)| (u.clone(), fj.retyping.apply(hat.apply(g)).clone())));
    let allowed = |u: &NodeId, v: &NodeId| fj.post.get(v) == fi.post.get(u);
    let l = search_connector(&fi.mid, &fj.mid, &forced, &allowed)?;
    check_backward_connector(&l, fi, fj, h_ij)?;
    Ok(l)
}

/// JSON form of a plan. Arrows are given as node maps; graphs of the rule
/// and of the hierarchy supply their endpoints.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    #[serde(default, rename = "match", skip_serializing_if = "Option::is_none")]
    pub instance: Option<NodeMap>,
    #[serde(default)]
    pub factorizations: BTreeMap<String, FactorizationFile>,
    #[serde(default)]
    pub connectors: Vec<TypingRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<serde_json::Value>,
}

/// JSON form of one factorization. For forward plans `pre: L → L′`,
/// `post: L′ → L⁺` and `typing_or_retyping: L′ → T`; for backward plans
/// `pre: L⁻ → L′`, `post: L′ → L` and `typing_or_retyping: L_G → L′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationFile {
    pub mid: Graph,
    pub pre: NodeMap,
    pub post: NodeMap,
    pub typing_or_retyping: NodeMap,
}

/// The arrow of `rule` that propagates in `direction`.
pub fn rule_arrow(rule: &Rule, direction: Direction) -> Result<Homomorphism> {
    match direction {
        Direction::Forward if rule.is_expansive() => Ok(rule.right().clone()),
        Direction::Backward if rule.is_restrictive() => Ok(rule.left().clone()),
        Direction::Forward => Err(Error::InvalidPlan("forward propagation needs a rule whose left leg is an isomorphism".into())),
        Direction::Backward => Err(Error::InvalidPlan("backward propagation needs a rule whose right leg is an isomorphism".into())),
    }
}

impl PlanFile {
    /// Builds a plan for `rule` at `instance`, using the factorizations
    /// and connectors of the file and canonical factorizations elsewhere.
    /// The file's own origin, rule and match must agree with the arguments.
    pub fn to_plan(&self, h: &Hierarchy, origin: &str, rule: &Rule, instance: &Homomorphism, direction: Direction) -> Result<PropagationPlan> {
        if self.origin.as_deref().is_some_and(|o| o != origin) {
            return Err(Error::InvalidPlan(format!("plan is for origin {}, not {origin}", self.origin.as_deref().unwrap_or_default())));
        }
        if self.rule.as_ref().is_some_and(|r| r != rule) {
            return Err(Error::InvalidPlan("plan was written for a different rule".into()));
        }
        if self.instance.as_ref().is_some_and(|m| m != instance.map()) {
            return Err(Error::InvalidPlan("plan was written for a different match".into()));
        }
        let arrow = rule_arrow(rule, direction)?;
        let mut plan = PropagationPlan::canonical(h, origin, &arrow, instance, direction)?;
        let inv = |e: Error, n: &str| Error::InvalidPlan(format!("factorization for {n}: {e}"));
        for (n, f) in &self.factorizations {
            if !h.contains(n) {
                return Err(Error::UnknownObject(n.clone()));
            }
            let mid = Arc::new(f.mid.clone());
            match &mut plan.factorizations {
                Factorizations::Forward(m) => {
                    let pre = Homomorphism::new(arrow.source().clone(), mid.clone(), f.pre.clone()).map_err(|e| inv(e, n))?;
                    let post = Homomorphism::new(mid.clone(), arrow.target().clone(), f.post.clone()).map_err(|e| inv(e, n))?;
                    let typing = Homomorphism::new(mid, h.object(n).unwrap().clone(), f.typing_or_retyping.clone()).map_err(|e| inv(e, n))?;
                    m.insert(n.clone(), ForwardFactorization::new(pre, post, typing)?);
                }
                Factorizations::Backward(m) => {
                    let res = restriction(h, origin, n, instance)?;
                    let pre = Homomorphism::new(arrow.source().clone(), mid.clone(), f.pre.clone()).map_err(|e| inv(e, n))?;
                    let post = Homomorphism::new(mid.clone(), arrow.target().clone(), f.post.clone()).map_err(|e| inv(e, n))?;
                    let retyping = Homomorphism::new(res.graph.clone(), mid, f.typing_or_retyping.clone()).map_err(|e| inv(e, n))?;
                    m.insert(n.clone(), BackwardFactorization::new(post, pre, retyping)?);
                }
            }
        }
        for c in &self.connectors {
            let mid = |n: &str| -> Result<Arc<Graph>> {
                match &plan.factorizations {
                    Factorizations::Forward(m) => m.get(n).map(|f| f.mid.clone()),
                    Factorizations::Backward(m) => m.get(n).map(|f| f.mid.clone()),
                }
                .ok_or_else(|| Error::InvalidPlan(format!("connector endpoint {n} has no factorization")))
            };
            let l = Homomorphism::from_parts(mid(&c.from)?, mid(&c.to)?, c.map.clone());
            plan.connectors.insert((c.from.clone(), c.to.clone()), l);
        }
        Ok(plan)
    }
}
