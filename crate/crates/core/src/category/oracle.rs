//! Brute-force checkers for universal properties.
//!
//! Each checker enumerates test objects up to [`OracleConfig::node_bound`]
//! nodes and counts mediating morphisms. For a fixed node-level cone the
//! set of test objects is ordered by structure: a mediator for the largest
//! one restricts to every smaller one, and a mediator for any of them is a
//! mediator for the smallest. Existence is therefore checked on the largest
//! test object and uniqueness on the smallest.

use super::{FinalPbc, ImageFactorization, Pullback, Pushout};
use crate::attr_graph::{compose, for_each_hom, AttrSet, AttrValue, Graph, Homomorphism, NodeId};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

/// Budget for oracle enumeration.
#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Largest number of nodes in a test object.
    pub node_bound: usize,
    /// Largest number of test objects before giving up.
    pub max_tests: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { node_bound: 4, max_tests: 200_000 }
    }
}

/// Outcome of a universal-property check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

macro_rules! fail {
    ($($t:tt)*) => { return Ok(Verdict::Fails(format!($($t)*))) };
}

struct Budget {
    used: usize,
    limit: usize,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::ResourceBound { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

fn count_homs(x: &Graph, y: &Graph, allowed: &dyn Fn(&NodeId, &NodeId) -> bool, limit: usize) -> usize {
    let mut n = 0;
    for_each_hom(x, y, allowed, false, |_| {
        n += 1;
        if n >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    n
}

fn valid_arrow(h: &Homomorphism, from: &Graph, to: &Graph, name: &str) -> Option<String> {
    if **h.source() != *from || **h.target() != *to {
        return Some(format!("{name} has the wrong endpoints"));
    }
    h.check().err().map(|e| format!("{name}: {e}"))
}

fn same_map(a: &Homomorphism, b: &Homomorphism) -> bool {
    a.map() == b.map()
}

/// Multisets of size `n` over `0..m`, as non-decreasing index vectors.
fn multisets(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(m: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(m, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Set partitions of `0..k` into at most `max_blocks` blocks, as
/// restricted growth strings.
fn partitions(k: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, max_blocks: usize, blocks: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks.min(max_blocks.saturating_sub(1)) {
            cur.push(b);
            go(k, max_blocks, blocks.max(b + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, max_blocks, 0, &mut Vec::new(), &mut out);
    out
}

fn x_id(i: usize) -> NodeId {
    NodeId::from(format!("x{i}"))
}

/// Checks that `candidate` is a pullback of `A --f--> C <--g-- B`.
pub fn verify_pullback(candidate: &Pullback, f: &Homomorphism, g: &Homomorphism, cfg: &OracleConfig) -> Result<Verdict> {
    let p = &candidate.object;
    for (h, to, name) in [(&candidate.to_left, f.source(), "left projection"), (&candidate.to_right, g.source(), "right projection")] {
        if let Some(why) = valid_arrow(h, p, to, name) {
            fail!("{why}");
        }
    }
    if !same_map(&compose(f, &candidate.to_left)?, &compose(g, &candidate.to_right)?) {
        fail!("square does not commute");
    }
    let (a, b) = (f.source(), g.source());
    let pairs: Vec<(&NodeId, &NodeId)> = a
        .node_ids()
        .flat_map(|x| b.node_ids().filter(move |y| f.apply(x) == g.apply(y)).map(move |y| (x, y)))
        .collect();
    let mut budget = Budget { used: 0, limit: cfg.max_tests };
    for n in 1..=cfg.node_bound {
        for combo in multisets(pairs.len(), n) {
            budget.tick()?;
            let chosen: Vec<(&NodeId, &NodeId)> = combo.iter().map(|&i| pairs[i]).collect();
            let x_min = Graph::discrete((0..n).map(x_id));
            let mut x_max = Graph::new();
            for (i, (na, nb)) in chosen.iter().enumerate() {
                let attrs = a.node_attrs(na).unwrap().intersection(b.node_attrs(nb).unwrap());
                x_max.add_node(x_id(i), attrs)?;
            }
            for (i, (a1, b1)) in chosen.iter().enumerate() {
                for (j, (a2, b2)) in chosen.iter().enumerate() {
                    if let (Some(ea), Some(eb)) = (a.edge_attrs(a1, a2), b.edge_attrs(b1, b2)) {
                        x_max.add_edge(x_id(i), x_id(j), ea.intersection(eb))?;
                    }
                }
            }
            let index: BTreeMap<NodeId, (&NodeId, &NodeId)> = chosen.iter().enumerate().map(|(i, c)| (x_id(i), *c)).collect();
            let allowed = |x: &NodeId, q: &NodeId| {
                let (na, nb) = index[x];
                candidate.to_left.apply(q) == na && candidate.to_right.apply(q) == nb
            };
            if count_homs(&x_max, p, &allowed, 1) == 0 {
                fail!("no mediator for the cone over {chosen:?}");
            }
            if count_homs(&x_min, p, &allowed, 2) > 1 {
                fail!("several mediators for the cone over {chosen:?}");
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Checks that `candidate` is a pushout of `B <--f-- A --g--> C`.
pub fn verify_pushout(candidate: &Pushout, f: &Homomorphism, g: &Homomorphism, cfg: &OracleConfig) -> Result<Verdict> {
    let q = &candidate.object;
    let (b, c) = (f.target(), g.target());
    for (h, from, name) in [(&candidate.from_left, b, "left injection"), (&candidate.from_right, c, "right injection")] {
        if let Some(why) = valid_arrow(h, from, q, name) {
            fail!("{why}");
        }
    }
    if !same_map(&compose(&candidate.from_left, f)?, &compose(&candidate.from_right, g)?) {
        fail!("square does not commute");
    }
    // Elements of B ⊔ C, tagged by side, and the classes forced by A.
    let elems: Vec<(bool, &NodeId)> = b.node_ids().map(|n| (true, n)).chain(c.node_ids().map(|n| (false, n))).collect();
    let pos: BTreeMap<(bool, &NodeId), usize> = elems.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut class: Vec<usize> = (0..elems.len()).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for x in f.source().node_ids() {
            let (i, j) = (pos[&(true, f.apply(x))], pos[&(false, g.apply(x))]);
            let (ci, cj) = (class[i], class[j]);
            let m = ci.min(cj);
            for k in 0..class.len() {
                if (class[k] == ci || class[k] == cj) && class[k] != m {
                    class[k] = m;
                    changed = true;
                }
            }
        }
    }
    let reps: Vec<usize> = class.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let rep_index: BTreeMap<usize, usize> = reps.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let mut alphabet: BTreeSet<(String, AttrValue)> = b.alphabet();
    alphabet.extend(c.alphabet());
    alphabet.extend(q.alphabet());
    let mut full = AttrSet::new();
    for (k, v) in &alphabet {
        full.insert(k, v.clone());
    }
    let bound = cfg.node_bound;
    let mut y_max = Graph::discrete((0..bound).map(x_id));
    for i in 0..bound {
        *y_max.node_attrs_mut(&x_id(i))? = full.clone();
        for j in 0..bound {
            y_max.add_edge(x_id(i), x_id(j), full.clone())?;
        }
    }
    let mut pre: BTreeMap<&NodeId, Vec<usize>> = BTreeMap::new();
    for (i, (side, n)) in elems.iter().enumerate() {
        let inj = if *side { &candidate.from_left } else { &candidate.from_right };
        pre.entry(inj.apply(n)).or_default().push(i);
    }
    let mut budget = Budget { used: 0, limit: cfg.max_tests };
    for part in partitions(reps.len(), bound) {
        budget.tick()?;
        let block = |i: usize| part[rep_index[&class[i]]];
        let mut y_min = Graph::discrete((0..bound).map(x_id));
        for (i, (side, n)) in elems.iter().enumerate() {
            let src = if *side { b } else { c };
            y_min.merge_node(x_id(block(i)), src.node_attrs(n).unwrap());
        }
        for (side, src) in [(true, b), (false, c)] {
            for (u, v, a) in src.edges() {
                y_min.merge_edge(x_id(block(pos[&(side, u)])), x_id(block(pos[&(side, v)])), a);
            }
        }
        let allowed = |qn: &NodeId, y: &NodeId| pre.get(qn).is_none_or(|is| is.iter().all(|&i| x_id(block(i)) == *y));
        if count_homs(q, &y_min, &allowed, 1) == 0 {
            fail!("no mediator for the cocone given by partition {part:?}");
        }
        if count_homs(q, &y_max, &allowed, 2) > 1 {
            fail!("several mediators for the cocone given by partition {part:?}");
        }
    }
    Ok(Verdict::Holds)
}

/// Checks that `candidate` is a final pullback complement of
/// `K --f--> L ↣m G`.
pub fn verify_final_pbc(candidate: &FinalPbc, f: &Homomorphism, m: &Homomorphism, cfg: &OracleConfig) -> Result<Verdict> {
    let (k, l, g) = (f.source(), f.target(), m.target());
    let d = &candidate.object;
    let (kd, dg) = (&candidate.from_interface, &candidate.to_host);
    if let Some(why) = valid_arrow(kd, k, d, "interface arrow") {
        fail!("{why}");
    }
    if let Some(why) = valid_arrow(dg, d, g, "host arrow") {
        fail!("{why}");
    }
    let square = Pullback { object: k.clone(), to_left: kd.clone(), to_right: f.clone() };
    match verify_pullback(&square, dg, m, cfg)? {
        Verdict::Holds => {}
        Verdict::Fails(why) => fail!("square is not a pullback: {why}"),
    }
    let inv_m: BTreeMap<&NodeId, &NodeId> = m.map().iter().map(|(a, b)| (b, a)).collect();
    let g_nodes: Vec<&NodeId> = g.node_ids().collect();
    let mut budget = Budget { used: 0, limit: cfg.max_tests };
    for n in 1..=cfg.node_bound {
        for combo in multisets(g_nodes.len(), n) {
            let xs: Vec<&NodeId> = combo.iter().map(|&i| g_nodes[i]).collect();
            let ls: Vec<Option<&NodeId>> = xs.iter().map(|x| inv_m.get(x).copied()).collect();
            let options: Vec<Vec<NodeId>> = ls.iter().map(|l| l.map(|l| f.preimage(l)).unwrap_or_default()).collect();
            if ls.iter().zip(&options).any(|(l, o)| l.is_some() && o.is_empty()) {
                continue;
            }
            let matched: Vec<usize> = (0..n).filter(|&i| ls[i].is_some()).collect();
            for choice in cartesian(&matched.iter().map(|&i| options[i].len()).collect::<Vec<_>>()) {
                budget.tick()?;
                let h: BTreeMap<usize, &NodeId> = matched.iter().zip(&choice).map(|(&i, &c)| (i, &options[i][c])).collect();
                let x_min = Graph::discrete((0..n).map(x_id));
                let x_max = largest_cone(&xs, &ls, &h, k, l, g)?;
                let allowed = |xn: &NodeId, dn: &NodeId| {
                    let i: usize = xn.as_str()[1..].parse().unwrap();
                    dg.apply(dn) == xs[i] && h.get(&i).is_none_or(|kn| kd.apply(kn) == dn)
                };
                if count_homs(&x_max, d, &allowed, 1) == 0 {
                    fail!("no mediator for the test object over {xs:?} with interface choice {h:?}");
                }
                if count_homs(&x_min, d, &allowed, 2) > 1 {
                    fail!("several mediators for the test object over {xs:?} with interface choice {h:?}");
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Largest test object with the given node map into `G` for which the
/// pulled-back interface still maps into `K` via `h`.
fn largest_cone(xs: &[&NodeId], ls: &[Option<&NodeId>], h: &BTreeMap<usize, &NodeId>, k: &Graph, l: &Graph, g: &Graph) -> Result<Graph> {
    let n = xs.len();
    let mut x = Graph::new();
    for i in 0..n {
        let mut attrs = g.node_attrs(xs[i]).unwrap().clone();
        if let (Some(ln), Some(kn)) = (ls[i], h.get(&i)) {
            let forbidden = l.node_attrs(ln).unwrap().difference(k.node_attrs(kn).unwrap());
            attrs = attrs.difference(&forbidden);
        }
        x.add_node(x_id(i), attrs)?;
    }
    for i in 0..n {
        for j in 0..n {
            let Some(ge) = g.edge_attrs(xs[i], xs[j]) else { continue };
            let mut attrs = ge.clone();
            if let (Some(li), Some(lj), Some(ki), Some(kj)) = (ls[i], ls[j], h.get(&i), h.get(&j)) {
                if let Some(le) = l.edge_attrs(li, lj) {
                    match k.edge_attrs(ki, kj) {
                        None => continue,
                        Some(ke) => attrs = attrs.difference(&le.difference(ke)),
                    }
                }
            }
            x.add_edge(x_id(i), x_id(j), attrs)?;
        }
    }
    Ok(x)
}

fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out.into_iter().flat_map(|p| (0..s).map(move |c| [p.clone(), vec![c]].concat())).collect();
    }
    out
}

/// Checks that `candidate` is an epi-mono factorization of `f` through
/// its image: the least sub-object of the target through which `f`
/// factors.
pub fn verify_image(candidate: &ImageFactorization, f: &Homomorphism, cfg: &OracleConfig) -> Result<Verdict> {
    let (a, b, i) = (f.source(), f.target(), &candidate.image);
    if let Some(why) = valid_arrow(&candidate.epi, a, i, "epi part") {
        fail!("{why}");
    }
    if let Some(why) = valid_arrow(&candidate.mono, i, b, "mono part") {
        fail!("{why}");
    }
    if !candidate.epi.is_epi() {
        fail!("first factor is not an epimorphism");
    }
    if !candidate.mono.is_mono() {
        fail!("second factor is not a monomorphism");
    }
    if !same_map(&compose(&candidate.mono, &candidate.epi)?, f) {
        fail!("factors do not compose to the arrow");
    }
    // Least sub-object through which f factors, computed directly.
    let mut least = Graph::new();
    for (n, attrs) in a.nodes() {
        let t = f.apply(n).clone();
        if least.has_node(&t) {
            let cur = least.node_attrs_mut(&t)?;
            *cur = cur.union(attrs);
        } else {
            least.add_node(t, attrs.clone())?;
        }
    }
    for (u, v, attrs) in a.edges() {
        let (fu, fv) = (f.apply(u).clone(), f.apply(v).clone());
        match least.edge_attrs_mut(&fu, &fv) {
            Ok(cur) => *cur = cur.union(attrs),
            Err(_) => least.add_edge(fu, fv, attrs.clone())?,
        }
    }
    let extra: Vec<&NodeId> = b.node_ids().filter(|n| !least.has_node(n)).collect();
    let mut budget = Budget { used: 0, limit: cfg.max_tests };
    for size in 0..=extra.len().min(cfg.node_bound) {
        for combo in multisets(extra.len(), size) {
            if combo.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            budget.tick()?;
            let mut sub = least.clone();
            for &e in &combo {
                sub.add_node(extra[e].clone(), AttrSet::new())?;
            }
            let allowed = |n: &NodeId, t: &NodeId| candidate.mono.apply(n) == t;
            match count_homs(i, &sub, &allowed, 2) {
                0 => fail!("image does not factor through the sub-object with extra nodes {combo:?}"),
                1 => {}
                _ => fail!("image factors in several ways through the sub-object with extra nodes {combo:?}"),
            }
        }
    }
    Ok(Verdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attr_graph::NodeMap;
    use crate::category::{final_pbc, image_factorization, pullback, pushout};
    use std::sync::Arc;

    fn nm(pairs: &[(&str, &str)]) -> NodeMap {
        pairs.iter().map(|(a, b)| (NodeId::from(*a), NodeId::from(*b))).collect()
    }

    #[test]
    fn enumeration_helpers() {
        assert_eq!(multisets(3, 2).len(), 6);
        // Bell numbers restricted to at most three blocks.
        assert_eq!(partitions(4, 3).len(), 14);
        assert_eq!(partitions(0, 4).len(), 1);
        assert_eq!(cartesian(&[2, 3]).len(), 6);
    }

    fn loop_cospan() -> (Homomorphism, Homomorphism) {
        let c = Arc::new(Graph::discrete(["c"]).with_edge("c", "c", AttrSet::new()));
        let a = Graph::discrete(["a1", "a2"]).with_edge("a1", "a2", AttrSet::new());
        let b = Graph::discrete(["b"]).with_edge("b", "b", AttrSet::new());
        let f = Homomorphism::new(a, c.clone(), nm(&[("a1", "c"), ("a2", "c")])).unwrap();
        let g = Homomorphism::new(b, c, nm(&[("b", "c")])).unwrap();
        (f, g)
    }

    #[test]
    fn pullback_passes_and_wrong_one_fails() {
        let (f, g) = loop_cospan();
        let pb = pullback(&f, &g).unwrap();
        let cfg = OracleConfig::default();
        assert_eq!(verify_pullback(&pb, &f, &g, &cfg).unwrap(), Verdict::Holds);
        let mut broken = (*pb.object).clone();
        broken.remove_edge(&"a1⋈b".into(), &"a2⋈b".into()).unwrap();
        let broken = Arc::new(broken);
        let wrong = Pullback {
            object: broken.clone(),
            to_left: pb.to_left.with_source(broken.clone()),
            to_right: pb.to_right.with_source(broken),
        };
        assert!(!verify_pullback(&wrong, &f, &g, &cfg).unwrap().holds());
    }

    #[test]
    fn pushout_passes_and_junk_fails() {
        let a = Arc::new(Graph::discrete(["k"]));
        let f = Homomorphism::new(a.clone(), Graph::discrete(["p", "q"]), nm(&[("k", "p")])).unwrap();
        let g = Homomorphism::new(a, Graph::discrete(["r"]).with_edge("r", "r", AttrSet::new()), nm(&[("k", "r")])).unwrap();
        let po = pushout(&f, &g).unwrap();
        let cfg = OracleConfig::default();
        assert!(verify_pushout(&po, &f, &g, &cfg).unwrap().holds());
        let junk = Arc::new((*po.object).clone().with_node("junk", AttrSet::new()));
        let wrong = Pushout {
            object: junk.clone(),
            from_left: po.from_left.with_target(junk.clone()),
            from_right: po.from_right.with_target(junk),
        };
        assert!(!verify_pushout(&wrong, &f, &g, &cfg).unwrap().holds());
    }

    #[test]
    fn final_pbc_passes() {
        let l = Arc::new(Graph::discrete(["s"]).with_edge("s", "s", AttrSet::new()));
        let k = Graph::discrete(["s1", "s2"]).with_edge("s1", "s2", AttrSet::new());
        let g = Graph::discrete(["g", "h"]).with_edge("g", "g", AttrSet::new()).with_edge("h", "g", AttrSet::new());
        let f = Homomorphism::new(k, l.clone(), nm(&[("s1", "s"), ("s2", "s")])).unwrap();
        let m = Homomorphism::new(l, g, nm(&[("s", "g")])).unwrap();
        let c = final_pbc(&f, &m).unwrap();
        let cfg = OracleConfig::default();
        assert_eq!(verify_final_pbc(&c, &f, &m, &cfg).unwrap(), Verdict::Holds);
    }

    #[test]
    fn plain_pullback_complement_is_not_final() {
        // Dropping an edge from an unmatched node still leaves a pullback
        // square, but one that is not final.
        let l = Arc::new(Graph::discrete(["s"]).with_edge("s", "s", AttrSet::new()));
        let k = Graph::discrete(["s1", "s2"]).with_edge("s1", "s2", AttrSet::new());
        let g = Graph::discrete(["g", "h"]).with_edge("g", "g", AttrSet::new()).with_edge("h", "g", AttrSet::new());
        let f = Homomorphism::new(k, l.clone(), nm(&[("s1", "s"), ("s2", "s")])).unwrap();
        let m = Homomorphism::new(l, g, nm(&[("s", "g")])).unwrap();
        let good = final_pbc(&f, &m).unwrap();
        let mut smaller = (*good.object).clone();
        smaller.remove_edge(&"h".into(), &"g∥s1".into()).unwrap();
        let smaller = Arc::new(smaller);
        let wrong = FinalPbc {
            object: smaller.clone(),
            from_interface: good.from_interface.with_target(smaller.clone()),
            to_host: good.to_host.with_source(smaller),
            origin: good.origin.clone(),
        };
        assert!(!verify_final_pbc(&wrong, &f, &m, &OracleConfig::default()).unwrap().holds());
    }

    #[test]
    fn image_passes() {
        let f = Homomorphism::new(
            Graph::discrete(["a", "b"]),
            Graph::discrete(["x", "y"]).with_edge("x", "y", AttrSet::new()),
            nm(&[("a", "x"), ("b", "x")]),
        )
        .unwrap();
        let imf = image_factorization(&f).unwrap();
        assert!(verify_image(&imf, &f, &OracleConfig::default()).unwrap().holds());
        let whole = ImageFactorization {
            image: f.target().clone(),
            epi: f.clone(),
            mono: Homomorphism::identity(f.target().clone()),
        };
        assert!(!verify_image(&whole, &f, &OracleConfig::default()).unwrap().holds());
    }

    #[test]
    fn budget_is_enforced() {
        let (f, g) = loop_cospan();
        let pb = pullback(&f, &g).unwrap();
        let cfg = OracleConfig { node_bound: 4, max_tests: 3 };
        assert!(matches!(verify_pullback(&pb, &f, &g, &cfg), Err(Error::ResourceBound { limit: 3 })));
    }
}
