//! In-place update of a hierarchy along a checked plan.
//!
//! Every graph and arrow of the result is computed before the hierarchy
//! is touched. Objects are then replaced one at a time, in waves, and
//! the hierarchy is valid after each replacement.

use super::plan::{resolve, Direction, Factorizations, PropagationPlan, Resolved};
use crate::attr_graph::{compose, Homomorphism, NodeMap};
use crate::category::{final_pbc, pullback, pushout, FinalPbc, Pullback, Pushout};
use crate::hierarchy::{Hierarchy, TypingRepr};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// What a propagation changed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ReportRepr", try_from = "ReportRepr")]
pub struct RewriteReport {
    pub origin: String,
    pub direction: Direction,
    /// Objects in the order they were replaced.
    pub waves: Vec<Vec<String>>,
    /// Forward: `Gᵢ → Gᵢ⁺`. Backward: `Gᵢ⁻ → Gᵢ`.
    pub traces: BTreeMap<String, Homomorphism>,
    /// Final typing of every arrow incident to a replaced object.
    pub typings: BTreeMap<(String, String), NodeMap>,
    /// Forward: `L⁺ → Gᵢ⁺`. Backward: `L_Gᵢ⁻ ↣ Gᵢ⁻`, and `L⁻ ↣ G₀⁻` at the origin.
    pub instances: BTreeMap<String, Homomorphism>,
}

#[derive(Serialize, Deserialize)]
struct ReportRepr {
    origin: String,
    direction: Direction,
    waves: Vec<Vec<String>>,
    traces: BTreeMap<String, NodeMap>,
    typings: Vec<TypingRepr>,
    instances: BTreeMap<String, NodeMap>,
}

impl From<RewriteReport> for ReportRepr {
    fn from(r: RewriteReport) -> Self {
        ReportRepr {
            origin: r.origin,
            direction: r.direction,
            waves: r.waves,
            traces: r.traces.into_iter().map(|(k, v)| (k, v.into_map())).collect(),
            typings: r.typings.into_iter().map(|((from, to), map)| TypingRepr { from, to, map }).collect(),
            instances: r.instances.into_iter().map(|(k, v)| (k, v.into_map())).collect(),
        }
    }
}

impl TryFrom<ReportRepr> for RewriteReport {
    type Error = String;

    /// The graphs are not part of the JSON form, so arrows come back with
    /// empty endpoints and only their maps are meaningful.
    fn try_from(r: ReportRepr) -> Result<Self, String> {
        let bare = |m: NodeMap| Homomorphism::from_parts(crate::Graph::new(), crate::Graph::new(), m);
        Ok(RewriteReport {
            origin: r.origin,
            direction: r.direction,
            waves: r.waves,
            traces: r.traces.into_iter().map(|(k, v)| (k, bare(v))).collect(),
            typings: r.typings.into_iter().map(|t| ((t.from, t.to), t.map)).collect(),
            instances: r.instances.into_iter().map(|(k, v)| (k, bare(v))).collect(),
        })
    }
}

/// Applies a forward plan to `h` in place.
pub fn propagate_forward(h: &mut Hierarchy, plan: &PropagationPlan) -> Result<RewriteReport> {
    propagate_forward_observed(h, plan, &mut |_, _| {})
}

/// As [`propagate_forward`], calling `observer` after each replaced object.
pub fn propagate_forward_observed(h: &mut Hierarchy, plan: &PropagationPlan, observer: &mut dyn FnMut(&Hierarchy, &str)) -> Result<RewriteReport> {
    let Factorizations::Forward(facts) = &plan.factorizations else {
        return Err(Error::InvalidPlan("expected a forward plan".into()));
    };
    let resolved = prepare(h, plan)?;
    let origin = plan.origin.as_str();
    let mut rewrites: BTreeMap<String, Pushout> = BTreeMap::new();
    for (n, f) in facts {
        rewrites.insert(n.clone(), pushout(&f.typing.with_target(h.object(n).unwrap().clone()), &f.post)?);
    }
    rewrites.insert(origin.to_string(), pushout(&plan.instance, &plan.rule)?);
    let mut new_typings = BTreeMap::new();
    for (a, b) in scope_arrows(h, &resolved) {
        let h_ab = h.typing(&a, &b).unwrap();
        let (pa, pb) = (&rewrites[&a], &rewrites[&b]);
        let u = pa.mediate(&compose(&pb.from_left, &h_ab)?, &pb.from_right)?;
        new_typings.insert((a, b), u);
    }
    let mut report = RewriteReport {
        origin: origin.to_string(),
        direction: Direction::Forward,
        waves: resolved.waves.clone(),
        traces: BTreeMap::new(),
        typings: BTreeMap::new(),
        instances: BTreeMap::new(),
    };
    for n in resolved.waves.iter().flatten() {
        let po = &rewrites[n];
        h.replace_object(n, po.object.clone());
        for p in h.predecessors(n) {
            let old = h.typing(&p, n).unwrap().with_target(po.from_left.source().clone());
            h.replace_typing(&p, n, compose(&po.from_left, &old)?.into_map());
        }
        for s in h.successors(n) {
            if let Some(u) = new_typings.get(&(n.clone(), s.clone())) {
                h.replace_typing(n, &s, u.map().clone());
            }
        }
        report.traces.insert(n.clone(), po.from_left.clone());
        report.instances.insert(n.clone(), po.from_right.clone());
        observer(h, n);
    }
    report.typings = incident_typings(h, &resolved);
    Ok(report)
}

/// Applies a backward plan to `h` in place.
pub fn propagate_backward(h: &mut Hierarchy, plan: &PropagationPlan) -> Result<RewriteReport> {
    propagate_backward_observed(h, plan, &mut |_, _| {})
}

/// As [`propagate_backward`], calling `observer` after each replaced object.
pub fn propagate_backward_observed(h: &mut Hierarchy, plan: &PropagationPlan, observer: &mut dyn FnMut(&Hierarchy, &str)) -> Result<RewriteReport> {
    let Factorizations::Backward(facts) = &plan.factorizations else {
        return Err(Error::InvalidPlan("expected a backward plan".into()));
    };
    let resolved = prepare(h, plan)?;
    let origin = plan.origin.as_str();
    let mut lifts: BTreeMap<String, Pullback> = BTreeMap::new();
    let mut rewrites: BTreeMap<String, FinalPbc> = BTreeMap::new();
    for (n, f) in facts {
        let res = &resolved.restrictions[n];
        let lift = pullback(&f.retyping, &f.pre)?;
        rewrites.insert(n.clone(), final_pbc(&lift.to_left, &res.instance)?);
        lifts.insert(n.clone(), lift);
    }
    rewrites.insert(origin.to_string(), final_pbc(&plan.rule, &plan.instance)?);
    let mut new_typings = BTreeMap::new();
    for (a, b) in scope_arrows(h, &resolved) {
        let h_ab = h.typing(&a, &b).unwrap();
        let (ra, rb) = (&rewrites[&a], &rewrites[&b]);
        let x = compose(&h_ab, &ra.to_host)?;
        let lift_a = &lifts[&a];
        let to_b = if b == origin {
            lift_a.to_right.clone()
        } else {
            let hat = Homomorphism::from_parts(
                lift_a.to_left.target().clone(),
                lifts[&b].to_left.target().clone(),
                lift_a.to_left.target().node_ids().map(|g| (g.clone(), h_ab.apply(g).clone())).collect(),
            );
            lifts[&b].mediate(&compose(&hat, &lift_a.to_left)?, &lift_a.to_right)?
        };
        let assign = super::backward::lifted_assignment(ra, &to_b);
        new_typings.insert((a, b), rb.mediate(&x, &assign)?);
    }
    let mut report = RewriteReport {
        origin: origin.to_string(),
        direction: Direction::Backward,
        waves: resolved.waves.clone(),
        traces: BTreeMap::new(),
        typings: BTreeMap::new(),
        instances: BTreeMap::new(),
    };
    for n in resolved.waves.iter().flatten() {
        let pbc = &rewrites[n];
        h.replace_object(n, pbc.object.clone());
        for p in h.predecessors(n) {
            if let Some(u) = new_typings.get(&(p.clone(), n.clone())) {
                h.replace_typing(&p, n, u.map().clone());
            }
        }
        for s in h.successors(n) {
            let old = h.typing(n, &s).unwrap().with_source(pbc.to_host.target().clone());
            h.replace_typing(n, &s, compose(&old, &pbc.to_host)?.into_map());
        }
        report.traces.insert(n.clone(), pbc.to_host.clone());
        report.instances.insert(n.clone(), pbc.from_interface.clone());
        observer(h, n);
    }
    report.typings = incident_typings(h, &resolved);
    Ok(report)
}

fn prepare(h: &Hierarchy, plan: &PropagationPlan) -> Result<Resolved> {
    if let Some(v) = h.validate().first() {
        return Err(Error::InvalidHierarchy(v.to_string()));
    }
    resolve(h, plan)?.map_err(Error::NotComposable)
}

fn scope_arrows(h: &Hierarchy, resolved: &Resolved) -> Vec<(String, String)> {
    let in_scope = |n: &str| resolved.waves.iter().flatten().any(|x| x == n);
    h.arrows().filter(|(a, b)| in_scope(a) && in_scope(b)).map(|(a, b)| (a.clone(), b.clone())).collect()
}

fn incident_typings(h: &Hierarchy, resolved: &Resolved) -> BTreeMap<(String, String), NodeMap> {
    let in_scope = |n: &str| resolved.waves.iter().flatten().any(|x| x == n);
    h.arrows()
        .filter(|(a, b)| in_scope(a) || in_scope(b))
        .map(|(a, b)| ((a.clone(), b.clone()), h.typing(a, b).unwrap().into_map()))
        .collect()
}

/// Applies a plan in the direction it was built for.
pub fn propagate(h: &mut Hierarchy, plan: &PropagationPlan) -> Result<RewriteReport> {
    match plan.direction() {
        Direction::Forward => propagate_forward(h, plan),
        Direction::Backward => propagate_backward(h, plan),
    }
}

/// As [`propagate`], calling `observer` after each replaced object.
pub fn propagate_observed(h: &mut Hierarchy, plan: &PropagationPlan, observer: &mut dyn FnMut(&Hierarchy, &str)) -> Result<RewriteReport> {
    match plan.direction() {
        Direction::Forward => propagate_forward_observed(h, plan, observer),
        Direction::Backward => propagate_backward_observed(h, plan, observer),
    }
}
