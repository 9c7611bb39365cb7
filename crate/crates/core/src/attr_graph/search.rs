use super::{AttrSet, Graph, NodeId, NodeMap};
use std::collections::BTreeSet;
use std::ops::ControlFlow;

struct Search<'a, F> {
    source: &'a Graph,
    target: &'a Graph,
    order: Vec<&'a NodeId>,
    candidates: Vec<Vec<&'a NodeId>>,
    injective: bool,
    exact: bool,
    assigned: Vec<&'a NodeId>,
    used: BTreeSet<&'a NodeId>,
    visit: F,
}

impl<'a, F: FnMut(&NodeMap) -> ControlFlow<()>> Search<'a, F> {
    fn attrs_ok(&self, a: &AttrSet, b: Option<&AttrSet>) -> bool {
        match b {
            None => false,
            Some(b) if self.exact => a == b,
            Some(b) => a.is_subset(b),
        }
    }

    fn consistent(&self, depth: usize, t: &NodeId) -> bool {
        let s = self.order[depth];
        let pairs = self.order[..depth].iter().zip(&self.assigned).chain(std::iter::once((&s, &t)));
        for (s2, t2) in pairs {
            if let Some(a) = self.source.edge_attrs(s, s2) {
                if !self.attrs_ok(a, self.target.edge_attrs(t, t2)) {
                    return false;
                }
            } else if self.exact && self.target.has_edge(t, t2) {
                return false;
            }
            if let Some(a) = self.source.edge_attrs(s2, s) {
                if !self.attrs_ok(a, self.target.edge_attrs(t2, t)) {
                    return false;
                }
            } else if self.exact && self.target.has_edge(t2, t) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, depth: usize) -> ControlFlow<()> {
        if depth == self.order.len() {
            let map: NodeMap = self.order.iter().zip(&self.assigned).map(|(s, t)| ((*s).clone(), (*t).clone())).collect();
            return (self.visit)(&map);
        }
        for i in 0..self.candidates[depth].len() {
            let t = self.candidates[depth][i];
            if self.injective && self.used.contains(t) {
                continue;
            }
            if !self.consistent(depth, t) {
                continue;
            }
            self.assigned.push(t);
            self.used.insert(t);
            let flow = self.run(depth + 1);
            self.assigned.pop();
            if self.injective {
                self.used.remove(t);
            }
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn search<F>(source: &Graph, target: &Graph, allowed: &dyn Fn(&NodeId, &NodeId) -> bool, injective: bool, exact: bool, visit: F)
where
    F: FnMut(&NodeMap) -> ControlFlow<()>,
{
    let mut rows: Vec<(&NodeId, Vec<&NodeId>)> = source
        .nodes()
        .map(|(s, sa)| {
            let cands = target
                .nodes()
                .filter(|(_, ta)| if exact { sa == *ta } else { sa.is_subset(ta) })
                .filter(|(t, _)| allowed(s, t))
                .map(|(t, _)| t)
                .collect();
            (s, cands)
        })
        .collect();
    // Most constrained first keeps the tree small; the sort is stable, so
    // enumeration order stays deterministic.
    rows.sort_by_key(|(_, c)| c.len());
    let (order, candidates) = rows.into_iter().unzip();
    let mut s = Search {
        source,
        target,
        order,
        candidates,
        injective,
        exact,
        assigned: Vec::new(),
        used: BTreeSet::new(),
        visit,
    };
    let _ = s.run(0);
}

/// Enumerates homomorphisms `source → target` whose node choices satisfy
/// `allowed`, calling `visit` on each until it breaks.
pub fn for_each_hom<F>(source: &Graph, target: &Graph, allowed: &dyn Fn(&NodeId, &NodeId) -> bool, injective: bool, visit: F)
where
    F: FnMut(&NodeMap) -> ControlFlow<()>,
{
    search(source, target, allowed, injective, false, visit);
}

/// All monomorphisms `pattern ↣ host` extending `anchors`, in a
/// deterministic order.
pub fn find_monomorphisms(pattern: &Graph, host: &Graph, anchors: &NodeMap) -> Vec<NodeMap> {
    let mut out = Vec::new();
    let allowed = |s: &NodeId, t: &NodeId| anchors.get(s).is_none_or(|a| a == t);
    search(pattern, host, &allowed, true, false, |m| {
        out.push(m.clone());
        ControlFlow::Continue(())
    });
    out.sort();
    out
}

/// An isomorphism `a → b` respecting `compatible`, if one exists.
pub fn find_isomorphism(a: &Graph, b: &Graph, compatible: &dyn Fn(&NodeId, &NodeId) -> bool) -> Option<NodeMap> {
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let mut found = None;
    search(a, b, compatible, true, true, |m| {
        found = Some(m.clone());
        ControlFlow::Break(())
    });
    found
}

pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    find_isomorphism(a, b, &|_, _| true).is_some()
}
