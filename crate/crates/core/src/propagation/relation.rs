//! Controlled propagation described by relations instead of explicit
//! factorizations and clean-up rules.
//!
//! A forward relation lists, for each object, which nodes added by the
//! rule should get which type. Each key is either an existing node of the
//! object or a fresh label; nodes sharing a key end up with the same type.
//! A node listed under exactly one existing node is added strictly; the
//! others are added canonically and merged afterwards.
//!
//! A backward relation sends instances of cloned nodes to the copy they
//! should follow. A cloned node whose instances are all related is cloned
//! strictly; otherwise it is cloned canonically and the clones not chosen
//! by the relation are deleted afterwards.

use super::backward::{BackwardFactorization, Restriction};
use super::forward::ForwardFactorization;
use super::plan::{restriction, waves, Direction, Factorizations, PropagationPlan};
use super::update::{propagate_observed, RewriteReport};
use crate::attr_graph::{compose, Graph, Homomorphism, NodeId, NodeMap};
use crate::category::{pullback, union_attrs, FreshNames};
use crate::hierarchy::Hierarchy;
use crate::rules::Rule;
use crate::{Error, Result};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Key of a forward relation to the added nodes it types.
pub type ForwardRelation = BTreeMap<String, BTreeSet<NodeId>>;

/// Instance to the copy it follows.
pub type BackwardRelation = BTreeMap<NodeId, NodeId>;

/// Relations for every object they concern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Relation {
    Forward(BTreeMap<String, ForwardRelation>),
    Backward(BTreeMap<String, BackwardRelation>),
}

impl Relation {
    pub fn empty(direction: Direction) -> Self {
        match direction {
            Direction::Forward => Relation::Forward(BTreeMap::new()),
            Direction::Backward => Relation::Backward(BTreeMap::new()),
        }
    }

    /// Reads the JSON form for the given direction.
    pub fn from_json(value: &serde_json::Value, direction: Direction) -> Result<Self> {
        Ok(match direction {
            Direction::Forward => Relation::Forward(serde_json::from_value(value.clone())?),
            Direction::Backward => Relation::Backward(serde_json::from_value(value.clone())?),
        })
    }

    pub fn direction(&self) -> Direction {
        match self {
            Relation::Forward(_) => Direction::Forward,
            Relation::Backward(_) => Direction::Backward,
        }
    }
}

/// Nodes of `L⁺` outside the image of `r`.
fn added_nodes(rule: &Homomorphism) -> BTreeSet<NodeId> {
    let image: BTreeSet<&NodeId> = rule.map().values().collect();
    rule.target().node_ids().filter(|n| !image.contains(n)).cloned().collect()
}

/// Added node to the existing node it is strictly typed by.
fn strict_forward(rule: &Homomorphism, t: &Graph, rel: &ForwardRelation) -> Result<BTreeMap<NodeId, NodeId>> {
    let added = added_nodes(rule);
    let mut existing: BTreeMap<&NodeId, Vec<NodeId>> = BTreeMap::new();
    for (key, nodes) in rel {
        for a in nodes {
            if !added.contains(a) {
                return Err(Error::InvalidRelation(format!("{a} is not a node added by the rule")));
            }
            let key = NodeId::from(key.as_str());
            if t.has_node(&key) {
                existing.entry(a).or_default().push(key);
            }
        }
    }
    Ok(existing.into_iter().filter(|(_, ks)| ks.len() == 1).map(|(a, mut ks)| (a.clone(), ks.remove(0))).collect())
}

/// Forward factorization adding strictly every node related to exactly
/// one existing node of `T`.
///
/// `rule` is `r: L → L⁺` and `typing` is `h ∘ m: L → T`.
pub fn derive_forward_factorization(rule: &Homomorphism, typing: &Homomorphism, rel: &ForwardRelation) -> Result<ForwardFactorization> {
    let t = typing.target();
    let strict = strict_forward(rule, t, rel)?;
    let (l, lp) = (rule.source(), rule.target());
    let mut names = FreshNames::default();
    for n in l.node_ids() {
        names.reserve(n);
    }
    let mut mid = (**l).clone();
    let mut post = rule.map().clone();
    let mut x = typing.map().clone();
    for (a, ty) in &strict {
        let id = names.claim(a.as_str());
        mid.add_node(id.clone(), lp.node_attrs(a).unwrap().intersection(t.node_attrs(ty).unwrap()))?;
        post.insert(id.clone(), a.clone());
        x.insert(id, ty.clone());
    }
    let fresh: BTreeSet<NodeId> = mid.node_ids().filter(|n| !l.has_node(n)).cloned().collect();
    let ids: Vec<NodeId> = mid.node_ids().cloned().collect();
    for u in &ids {
        for v in &ids {
            if !fresh.contains(u) && !fresh.contains(v) {
                continue;
            }
            if let (Some(e), Some(te)) = (lp.edge_attrs(&post[u], &post[v]), t.edge_attrs(&x[u], &x[v])) {
                mid.add_edge(u.clone(), v.clone(), e.intersection(te))?;
            }
        }
    }
    let mid = Arc::new(mid);
    let pre = Homomorphism::new(l.clone(), mid.clone(), l.node_ids().map(|n| (n.clone(), n.clone())).collect())?;
    let post = Homomorphism::new(mid.clone(), lp.clone(), post)?;
    let x = Homomorphism::new(mid, t.clone(), x)?;
    ForwardFactorization::new(pre, post, x)
}

/// A clean-up rule together with its instance.
#[derive(Clone, Debug)]
pub struct CleanupRule {
    pub origin: String,
    /// Forward: the epi `S ↠ S′`. Backward: the mono `L_G⊖ ↣ L_G⁻`.
    pub rule: Homomorphism,
    pub instance: Homomorphism,
}

/// Forward clean-up for one object: merges, in `T⁺`, the images of all
/// keys and nodes that the relation groups together.
pub fn forward_cleanup_rule(name: &str, rel: &ForwardRelation, old: &Graph, report: &RewriteReport, current: &Arc<Graph>) -> Result<Option<CleanupRule>> {
    let (Some(trace), Some(inst)) = (report.traces.get(name), report.instances.get(name)) else {
        return Ok(None);
    };
    let mut items: Vec<(bool, String)> = Vec::new();
    let mut index = BTreeMap::new();
    let mut item = |key: (bool, String), items: &mut Vec<(bool, String)>| -> usize {
        *index.entry(key.clone()).or_insert_with(|| {
            items.push(key);
            items.len() - 1
        })
    };
    let mut links = Vec::new();
    for (key, nodes) in rel {
        let k = item((true, key.clone()), &mut items);
        for a in nodes {
            links.push((k, item((false, a.to_string()), &mut items)));
        }
    }
    let mut parent: Vec<usize> = (0..items.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (a, b) in links {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra.max(rb)] = ra.min(rb);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..items.len() {
        groups.entry(find(&mut parent, i)).or_default().push(i);
    }
    let mut s = Graph::new();
    let mut s2 = Graph::new();
    let mut epi = NodeMap::new();
    for members in groups.values() {
        let mut images = BTreeSet::new();
        let (mut existing, mut fresh) = (Vec::new(), Vec::new());
        for &i in members {
            let (is_key, id) = &items[i];
            let id = NodeId::from(id.as_str());
            if *is_key && old.has_node(&id) {
                images.insert(trace.apply(&id).clone());
                existing.push(id);
            } else if *is_key {
                fresh.push(id);
            } else {
                images.insert(inst.apply(&id).clone());
            }
        }
        if images.len() < 2 {
            continue;
        }
        existing.sort();
        fresh.sort();
        let label = match (existing.len(), fresh.first()) {
            (1, _) | (_, None) => existing[0].clone(),
            (_, Some(f)) => f.clone(),
        };
        for n in &images {
            s.add_node(n.clone(), current.node_attrs(n).unwrap().clone())?;
            epi.insert(n.clone(), label.clone());
        }
        s2.add_node(label, union_attrs(current, &images))?;
    }
    if s.node_count() == 0 {
        return Ok(None);
    }
    let s = Arc::new(s);
    Ok(Some(CleanupRule {
        origin: name.to_string(),
        rule: Homomorphism::new(s.clone(), s2, epi)?,
        instance: Homomorphism::inclusion(s, current.clone())?,
    }))
}

/// Copies of each node of `L` under `r: L⁻ → L`.
fn copies(rule: &Homomorphism) -> BTreeMap<&NodeId, Vec<&NodeId>> {
    let mut out: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for (c, l) in rule.map() {
        out.entry(l).or_default().push(c);
    }
    out
}

fn check_backward(rule: &Homomorphism, res: &Restriction, rel: &BackwardRelation) -> Result<()> {
    for (g, c) in rel {
        let l = res
            .typing
            .get(g)
            .ok_or_else(|| Error::InvalidRelation(format!("{g} is not an instance of the match")))?;
        if !rule.map().values().any(|x| x == l) {
            return Err(Error::InstanceOfDeletedElement { instance: g.clone(), element: l.clone() });
        }
        if rule.get(c) != Some(l) {
            return Err(Error::InvalidRelation(format!("{c} is not a copy of {l}, the type of {g}")));
        }
    }
    Ok(())
}

/// Nodes of `L` cloned strictly: at least two copies, and every instance related.
fn strict_backward(rule: &Homomorphism, res: &Restriction, rel: &BackwardRelation) -> BTreeSet<NodeId> {
    copies(rule)
        .into_iter()
        .filter(|(_, cs)| cs.len() >= 2)
        .filter(|(l, _)| res.typing.map().iter().filter(|(_, t)| t == l).all(|(g, _)| rel.contains_key(g)))
        .map(|(l, _)| l.clone())
        .collect()
}

/// Backward factorization cloning strictly every node of `L` whose
/// instances are all related; `rule` is `r: L⁻ → L`.
pub fn derive_backward_factorization(rule: &Homomorphism, res: &Restriction, rel: &BackwardRelation) -> Result<BackwardFactorization> {
    check_backward(rule, res, rel)?;
    let strict = strict_backward(rule, res, rel);
    let l = rule.target();
    let cps = copies(rule);
    let mut names = FreshNames::default();
    for n in l.node_ids().filter(|n| !strict.contains(*n)) {
        names.reserve(n);
    }
    let mut over: BTreeMap<&NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut copy_id: BTreeMap<&NodeId, NodeId> = BTreeMap::new();
    let mut mid = Graph::new();
    let mut post = NodeMap::new();
    for (n, attrs) in l.nodes() {
        if strict.contains(n) {
            for c in &cps[n] {
                let id = names.claim(c.as_str());
                mid.add_node(id.clone(), attrs.clone())?;
                post.insert(id.clone(), n.clone());
                over.entry(n).or_default().push(id.clone());
                copy_id.insert(c, id);
            }
        } else {
            mid.add_node(n.clone(), attrs.clone())?;
            post.insert(n.clone(), n.clone());
            over.entry(n).or_default().push(n.clone());
        }
    }
    for (u, v, attrs) in l.edges() {
        for a in &over[u] {
            for b in &over[v] {
                mid.add_edge(a.clone(), b.clone(), attrs.clone())?;
            }
        }
    }
    let mid = Arc::new(mid);
    let pre: NodeMap = rule.map().iter().map(|(c, n)| (c.clone(), copy_id.get(c).cloned().unwrap_or_else(|| n.clone()))).collect();
    let retyping: NodeMap = res
        .typing
        .map()
        .iter()
        .map(|(g, n)| (g.clone(), if strict.contains(n) { copy_id[&rel[g]].clone() } else { n.clone() }))
        .collect();
    BackwardFactorization::new(
        Homomorphism::new(mid.clone(), l.clone(), post)?,
        Homomorphism::new(rule.source().clone(), mid.clone(), pre)?,
        Homomorphism::new(res.graph.clone(), mid, retyping)?,
    )
}

/// Backward clean-up for one object: deletes the clones of related
/// instances that the relation did not choose.
pub fn backward_cleanup_rule(name: &str, rule: &Homomorphism, res: &Restriction, fact: &BackwardFactorization, rel: &BackwardRelation, report: &RewriteReport) -> Result<Option<CleanupRule>> {
    let Some(inst) = report.instances.get(name) else { return Ok(None) };
    let strict = strict_backward(rule, res, rel);
    let lift = pullback(&fact.retyping, &fact.pre)?;
    let keep: Vec<&NodeId> = lift
        .object
        .node_ids()
        .filter(|p| {
            let g = lift.to_left.apply(p);
            let c = lift.to_right.apply(p);
            match rel.get(g) {
                Some(chosen) => strict.contains(res.typing.apply(g)) || chosen == c,
                None => true,
            }
        })
        .collect();
    if keep.len() == lift.object.node_count() {
        return Ok(None);
    }
    let kept = lift.object.induced(keep);
    Ok(Some(CleanupRule {
        origin: name.to_string(),
        rule: Homomorphism::inclusion(kept, lift.object.clone())?,
        instance: inst.with_source(lift.object.clone()),
    }))
}

/// Adds the entries that other objects' relations force: a forward entry
/// reaches every object typing the related one, a backward entry every
/// instance typed by a related one. Existing entries are left alone.
fn close_relation(h: &Hierarchy, origin: &str, rule: &Homomorphism, instance: &Homomorphism, rel: &Relation) -> Result<Relation> {
    let order: Vec<String> = waves(h, origin, rel.direction())?.into_iter().flatten().filter(|n| n != origin).collect();
    Ok(match rel {
        Relation::Forward(r) => {
            let mut out = r.clone();
            for i in order.iter().rev() {
                let Some(ri) = r.get(i) else { continue };
                let strict = strict_forward(rule, h.object(i).unwrap(), ri)?;
                for j in h.descendants(i) {
                    let hij = h.composed_typing(i, &j)?;
                    let rj = out.entry(j.clone()).or_default();
                    let mentioned: BTreeSet<NodeId> = rj.values().flatten().cloned().collect();
                    for (a, t) in &strict {
                        if !mentioned.contains(a) {
                            rj.entry(hij.apply(t).to_string()).or_default().insert(a.clone());
                        }
                    }
                }
            }
            out.retain(|k, _| order.contains(k));
            Relation::Forward(out)
        }
        Relation::Backward(r) => {
            let mut out = r.clone();
            for i in order.iter().rev() {
                let Some(ri) = r.get(i) else { continue };
                for a in h.ancestors(i) {
                    let hai = h.composed_typing(&a, i)?;
                    let ra = restriction(h, origin, &a, instance)?;
                    let entry = out.entry(a.clone()).or_default();
                    for g in ra.graph.node_ids() {
                        if let Some(c) = ri.get(hai.apply(g)) {
                            entry.entry(g.clone()).or_insert_with(|| c.clone());
                        }
                    }
                }
            }
            out.retain(|k, _| order.contains(k));
            Relation::Backward(out)
        }
    })
}

/// A plan derived from a relation, with the clean-ups it still needs.
#[derive(Clone, Debug)]
pub struct RelationPlan {
    pub plan: PropagationPlan,
    pub relation: Relation,
}

/// Replaces the canonical factorizations of `plan` by those derived from
/// `rel` wherever `rel` says something; factorizations listed in
/// `explicit` are kept as they are.
pub fn apply_relation(h: &Hierarchy, mut plan: PropagationPlan, rel: &Relation, explicit: &BTreeSet<String>) -> Result<RelationPlan> {
    if rel.direction() != plan.direction() {
        return Err(Error::InvalidRelation(format!("relation is for direction {}, plan for {}", rel.direction(), plan.direction())));
    }
    let closed = close_relation(h, &plan.origin, &plan.rule, &plan.instance, rel)?;
    match (&closed, &mut plan.factorizations) {
        (Relation::Forward(r), Factorizations::Forward(m)) => {
            for (n, rn) in r {
                if explicit.contains(n) || !m.contains_key(n) {
                    continue;
                }
                let typing = compose(&h.composed_typing(&plan.origin, n)?, &plan.instance)?;
                m.insert(n.clone(), derive_forward_factorization(&plan.rule, &typing, rn)?);
            }
        }
        (Relation::Backward(r), Factorizations::Backward(m)) => {
            for (n, rn) in r {
                if explicit.contains(n) || !m.contains_key(n) {
                    continue;
                }
                let res = restriction(h, &plan.origin, n, &plan.instance)?;
                m.insert(n.clone(), derive_backward_factorization(&plan.rule, &res, rn)?);
            }
        }
        _ => unreachable!("directions checked above"),
    }
    for n in rel_nodes(rel) {
        if !h.contains(&n) {
            return Err(Error::UnknownObject(n));
        }
    }
    Ok(RelationPlan { plan, relation: closed })
}

fn rel_nodes(rel: &Relation) -> Vec<String> {
    match rel {
        Relation::Forward(r) => r.keys().cloned().collect(),
        Relation::Backward(r) => r.keys().cloned().collect(),
    }
}

/// Outcome of a propagation followed by its clean-ups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ControlledRewrite {
    pub rewrite: RewriteReport,
    pub cleanups: Vec<RewriteReport>,
}

/// Runs `plan` and then, as separate propagations, the clean-ups that
/// `relation` calls for: forward ones from the sinks, backward ones from
/// the sources.
pub fn propagate_with_relation(h: &mut Hierarchy, rp: &RelationPlan) -> Result<ControlledRewrite> {
    propagate_with_relation_observed(h, rp, &mut |_, _| {})
}

/// As [`propagate_with_relation`], calling `observer` after each replaced
/// object of the rewrite and of every clean-up.
pub fn propagate_with_relation_observed(h: &mut Hierarchy, rp: &RelationPlan, observer: &mut dyn FnMut(&Hierarchy, &str)) -> Result<ControlledRewrite> {
    let before = h.clone();
    let rewrite = propagate_observed(h, &rp.plan, observer)?;
    let order: Vec<String> = rewrite.waves.iter().flatten().filter(|n| **n != rp.plan.origin).cloned().collect();
    let mut cleanups = Vec::new();
    for n in &order {
        let cleanup = match (&rp.relation, &rp.plan.factorizations) {
            (Relation::Forward(r), _) => match r.get(n) {
                Some(rn) => forward_cleanup_rule(n, rn, before.object(n).unwrap(), &rewrite, h.object(n).unwrap())?,
                None => None,
            },
            (Relation::Backward(r), Factorizations::Backward(m)) => match r.get(n) {
                Some(rn) => {
                    let res = restriction(&before, &rp.plan.origin, n, &rp.plan.instance)?;
                    backward_cleanup_rule(n, &rp.plan.rule, &res, &m[n], rn, &rewrite)?
                }
                None => None,
            },
            _ => None,
        };
        if let Some(c) = cleanup {
            let plan = PropagationPlan::canonical(h, &c.origin, &c.rule, &c.instance, rp.plan.direction())?;
            cleanups.push(propagate_observed(h, &plan, observer)?);
        }
    }
    Ok(ControlledRewrite { rewrite, cleanups })
}

/// Builds the full plan for `rule` at `instance` from an optional plan
/// file and an optional relation: explicit factorizations first, then
/// relation-derived ones, canonical ones elsewhere.
pub fn build_plan(
    h: &Hierarchy,
    origin: &str,
    rule: &Rule,
    instance: &Homomorphism,
    direction: Direction,
    file: Option<&super::plan::PlanFile>,
    relation: Option<&Relation>,
) -> Result<RelationPlan> {
    let default = super::plan::PlanFile::default();
    let file = file.unwrap_or(&default);
    let plan = file.to_plan(h, origin, rule, instance, direction)?;
    let from_file = match &file.relation {
        Some(v) => Some(Relation::from_json(v, direction)?),
        None => None,
    };
    let rel = match (relation, from_file) {
        (Some(_), Some(_)) => return Err(Error::InvalidPlan("relation given both in the plan and separately".into())),
        (Some(r), None) => r.clone(),
        (None, Some(r)) => r,
        (None, None) => Relation::empty(direction),
    };
    let explicit: BTreeSet<String> = file.factorizations.keys().cloned().collect();
    apply_relation(h, plan, &rel, &explicit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attr_graph::AttrSet;
    use crate::propagation::backward::restriction_pullback;

    fn nm(pairs: &[(&str, &str)]) -> NodeMap {
        pairs.iter().map(|(a, b)| (NodeId::from(*a), NodeId::from(*b))).collect()
    }

    #[test]
    fn forward_strict_node_gets_existing_type() {
        let t = Arc::new(Graph::discrete(["c"]).with_node("sq", AttrSet::new().with("k", ["v"])));
        let l = Arc::new(Graph::discrete(["x"]));
        let lp = Arc::new(Graph::discrete(["x"]).with_node("s1", AttrSet::new().with("k", ["v", "w"])).with_node("s2", AttrSet::new()));
        let r = Homomorphism::new(l.clone(), lp, nm(&[("x", "x")])).unwrap();
        let typing = Homomorphism::new(l, t, nm(&[("x", "c")])).unwrap();
        let rel: ForwardRelation = [("sq".to_string(), BTreeSet::from(["s1".into()])), ("new".to_string(), BTreeSet::from(["s2".into()]))].into();
        let f = derive_forward_factorization(&r, &typing, &rel).unwrap();
        assert_eq!(f.mid.node_count(), 2);
        assert_eq!(f.typing.apply(&"s1".into()).as_str(), "sq");
        assert_eq!(f.mid.node_attrs(&"s1".into()).unwrap(), &AttrSet::new().with("k", ["v"]));
        let empty = derive_forward_factorization(&r, &typing, &ForwardRelation::new()).unwrap();
        assert_eq!(*empty.mid, **r.source());
        let bad: ForwardRelation = [("sq".to_string(), BTreeSet::from(["x".into()]))].into();
        assert!(matches!(derive_forward_factorization(&r, &typing, &bad), Err(Error::InvalidRelation(_))));
    }

    #[test]
    fn backward_relation_strictness() {
        let t = Arc::new(Graph::discrete(["sq"]));
        let g = Arc::new(Graph::discrete(["q1", "q2", "q3"]));
        let h = Homomorphism::new(g, t.clone(), nm(&[("q1", "sq"), ("q2", "sq"), ("q3", "sq")])).unwrap();
        let m = Homomorphism::identity(t.clone());
        let r = Homomorphism::new(Graph::discrete(["a", "b"]), t, nm(&[("a", "sq"), ("b", "sq")])).unwrap();
        let res = restriction_pullback(&h, &m).unwrap();
        let partial: BackwardRelation = nm(&[("q1", "a"), ("q2", "b")]);
        let f = derive_backward_factorization(&r, &res, &partial).unwrap();
        assert_eq!(*f.mid, **r.target());
        let full: BackwardRelation = nm(&[("q1", "a"), ("q2", "b"), ("q3", "a")]);
        let f = derive_backward_factorization(&r, &res, &full).unwrap();
        assert_eq!(f.mid.node_count(), 2);
        assert_eq!(f.retyping.apply(&"q3".into()).as_str(), "a");
        let wrong: BackwardRelation = nm(&[("q1", "zz")]);
        assert!(matches!(derive_backward_factorization(&r, &res, &wrong), Err(Error::InvalidRelation(_))));
    }
}
