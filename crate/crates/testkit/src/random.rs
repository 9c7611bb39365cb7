//! Seeded generators for graphs, typed graphs, hierarchies and rewrites.
//!
//! Attributes use the single key `a` over the values `0`, `1` and `2`.

use hiergraph::propagation::{restriction_pullback, BackwardRelation, ForwardRelation, Relation};
use hiergraph::attr_graph::apply_edit;
use hiergraph::{AttrSet, Edit, Element, Graph, Hierarchy, Homomorphism, NodeId, NodeMap, Rule};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

pub type TestRng = ChaCha8Rng;

pub const KEY: &str = "a";
pub const VALUES: [i64; 3] = [0, 1, 2];

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_attrs(rng: &mut TestRng) -> AttrSet {
    let vs: Vec<i64> = VALUES.iter().copied().filter(|_| rng.random_bool(0.4)).collect();
    if vs.is_empty() {
        AttrSet::new()
    } else {
        AttrSet::new().with(KEY, vs)
    }
}

/// A random subset of `a`.
pub fn sub_attrs(rng: &mut TestRng, a: &AttrSet) -> AttrSet {
    let mut out = AttrSet::new();
    for (k, v) in a.pairs() {
        if rng.random_bool(0.6) {
            out.insert(k, v.clone());
        }
    }
    out
}

fn id(prefix: &str, i: usize) -> NodeId {
    NodeId::from(format!("{prefix}{i}"))
}

/// Up to `max_nodes` nodes named `{prefix}{i}`, with random edges and attributes.
pub fn random_graph(rng: &mut TestRng, max_nodes: usize, prefix: &str) -> Graph {
    let n = rng.random_range(0..=max_nodes);
    let mut g = Graph::new();
    for i in 0..n {
        g.add_node(id(prefix, i), random_attrs(rng)).unwrap();
    }
    for i in 0..n {
        for j in 0..n {
            if rng.random_bool(if i == j { 0.15 } else { 0.3 }) {
                g.add_edge(id(prefix, i), id(prefix, j), random_attrs(rng)).unwrap();
            }
        }
    }
    g
}

/// A graph of `n` nodes with an arbitrary homomorphism into `t`.
///
/// `t` must have a node unless `n` is zero.
pub fn random_typed(rng: &mut TestRng, t: &Arc<Graph>, n: usize, prefix: &str) -> Homomorphism {
    let targets: Vec<NodeId> = t.node_ids().cloned().collect();
    let mut g = Graph::new();
    let mut map = NodeMap::new();
    for i in 0..n {
        let x = targets.choose(rng).expect("typing graph has nodes").clone();
        g.add_node(id(prefix, i), sub_attrs(rng, t.node_attrs(&x).unwrap())).unwrap();
        map.insert(id(prefix, i), x);
    }
    for i in 0..n {
        for j in 0..n {
            let (u, v) = (id(prefix, i), id(prefix, j));
            if let Some(a) = t.edge_attrs(&map[&u], &map[&v]) {
                if rng.random_bool(0.5) {
                    g.add_edge(u, v, sub_attrs(rng, a)).unwrap();
                }
            }
        }
    }
    Homomorphism::new(g, t.clone(), map).unwrap()
}

/// A homomorphism out of `a` into a larger graph: nodes may be merged
/// (unless `injective`), attributes and edges added, and up to `extra`
/// nodes created.
pub fn random_extension(rng: &mut TestRng, a: &Arc<Graph>, injective: bool, extra: usize, prefix: &str) -> Homomorphism {
    let nodes: Vec<NodeId> = a.node_ids().cloned().collect();
    let mut class = NodeMap::new();
    let mut next = 0;
    for (i, n) in nodes.iter().enumerate() {
        let c = if !injective && i > 0 && rng.random_bool(0.3) {
            class[&nodes[rng.random_range(0..i)]].clone()
        } else {
            next += 1;
            id(prefix, next - 1)
        };
        class.insert(n.clone(), c);
    }
    let mut b = Graph::new();
    for c in class.values().collect::<BTreeSet<_>>() {
        let merged = class.iter().filter(|(_, x)| *x == c).fold(AttrSet::new(), |acc, (n, _)| acc.union(a.node_attrs(n).unwrap()));
        let grown = if rng.random_bool(0.3) { merged.union(&random_attrs(rng)) } else { merged };
        b.add_node(c.clone(), grown).unwrap();
    }
    for _ in 0..rng.random_range(0..=extra) {
        next += 1;
        b.add_node(id(prefix, next - 1), random_attrs(rng)).unwrap();
    }
    let mut edges: BTreeMap<(NodeId, NodeId), AttrSet> = BTreeMap::new();
    for (u, v, e) in a.edges() {
        let slot = edges.entry((class[u].clone(), class[v].clone())).or_default();
        *slot = slot.union(e);
    }
    let all: Vec<NodeId> = b.node_ids().cloned().collect();
    for u in &all {
        for v in &all {
            if rng.random_bool(0.15) {
                let slot = edges.entry((u.clone(), v.clone())).or_default();
                *slot = slot.union(&random_attrs(rng));
            }
        }
    }
    for ((u, v), e) in edges {
        b.add_edge(u, v, e).unwrap();
    }
    Homomorphism::new(a.clone(), b, class).unwrap()
}

/// The subgraph of `g` induced by a random subset of its nodes, with its inclusion.
pub fn random_induced(rng: &mut TestRng, g: &Arc<Graph>, p: f64) -> Homomorphism {
    let keep: Vec<NodeId> = g.node_ids().filter(|_| rng.random_bool(p)).cloned().collect();
    Homomorphism::inclusion(g.induced(&keep), g.clone()).unwrap()
}

/// A cospan `A → C ← B` for a pullback.
pub fn pullback_instance(rng: &mut TestRng) -> (Homomorphism, Homomorphism) {
    let c = Arc::new(nonempty_graph(rng, 3, "c"));
    let na = rng.random_range(0..=3);
    let nb = rng.random_range(0..=3);
    (random_typed(rng, &c, na, "a"), random_typed(rng, &c, nb, "b"))
}

/// A span `B ← A → C` for a pushout.
pub fn pushout_instance(rng: &mut TestRng) -> (Homomorphism, Homomorphism) {
    let a = Arc::new(random_graph(rng, 3, "a"));
    let (inj_f, inj_g) = (rng.random_bool(0.5), rng.random_bool(0.5));
    let f = random_extension(rng, &a, inj_f, 1, "b");
    let g = random_extension(rng, &a, inj_g, 1, "c");
    (f, g)
}

/// `K → L ↣ G` for a final pullback complement.
pub fn pbc_instance(rng: &mut TestRng) -> (Homomorphism, Homomorphism) {
    let l = Arc::new(nonempty_graph(rng, 3, "l"));
    let nk = rng.random_range(0..=3);
    let k = random_typed(rng, &l, nk, "k");
    let m = random_extension(rng, &l, true, 2, "g");
    (k, m)
}

/// An arbitrary homomorphism for an image factorization.
pub fn image_instance(rng: &mut TestRng) -> Homomorphism {
    let b = Arc::new(nonempty_graph(rng, 4, "b"));
    let na = rng.random_range(0..=4);
    random_typed(rng, &b, na, "a")
}

fn nonempty_graph(rng: &mut TestRng, max_nodes: usize, prefix: &str) -> Graph {
    loop {
        let g = random_graph(rng, max_nodes, prefix);
        if g.node_count() > 0 {
            return g;
        }
    }
}

/// One typing arrow `h: G → T`, a match `m` and a rule, with a relation
/// for the single object concerned.
#[derive(Clone, Debug)]
pub struct SingleArrow {
    pub typing: Homomorphism,
    pub instance: Homomorphism,
    /// Forward: `r: L → L⁺`. Backward: `r: L⁻ → L`.
    pub rule: Homomorphism,
    pub forward: ForwardRelation,
    pub backward: BackwardRelation,
}

/// `G → T` with an expansive rule matched in `G` and a relation typing
/// some added nodes by existing or fresh nodes of `T`.
pub fn forward_arrow(rng: &mut TestRng) -> SingleArrow {
    let t = Arc::new(nonempty_graph(rng, 3, "t"));
    let ng = rng.random_range(1..=4);
    let h = random_typed(rng, &t, ng, "g");
    let m = random_induced(rng, h.source(), 0.6);
    let r = random_extension(rng, m.source(), false, 2, "p");
    let forward = random_forward_relation(rng, &r, &t);
    SingleArrow { typing: h, instance: m, rule: r, forward, backward: BackwardRelation::new() }
}

/// `G → T` with a restrictive rule matched in `T` and a relation
/// choosing copies for some instances.
pub fn backward_arrow(rng: &mut TestRng) -> SingleArrow {
    let t = Arc::new(nonempty_graph(rng, 3, "t"));
    let ng = rng.random_range(1..=4);
    let h = random_typed(rng, &t, ng, "g");
    let m = random_induced(rng, &t, 0.7);
    let nl = rng.random_range(0..=m.source().node_count() + 2);
    let r = if m.source().node_count() == 0 {
        Homomorphism::identity(m.source().clone())
    } else {
        random_typed(rng, m.source(), nl, "c")
    };
    let res = restriction_pullback(&h, &m).unwrap();
    let backward = random_backward_relation(rng, &r, &res.typing, 0.7);
    SingleArrow { typing: h, instance: m, rule: r, forward: ForwardRelation::new(), backward }
}

fn added_nodes(rule: &Homomorphism) -> Vec<NodeId> {
    let image: BTreeSet<&NodeId> = rule.map().values().collect();
    rule.target().node_ids().filter(|n| !image.contains(n)).cloned().collect()
}

/// Relates each added node of `rule`, with some probability, to an
/// existing node of `t` or to a fresh label.
pub fn random_forward_relation(rng: &mut TestRng, rule: &Homomorphism, t: &Graph) -> ForwardRelation {
    let existing: Vec<NodeId> = t.node_ids().cloned().collect();
    let mut rel = ForwardRelation::new();
    for a in added_nodes(rule) {
        let key = match rng.random_range(0..10) {
            0..=5 if !existing.is_empty() => existing.choose(rng).unwrap().to_string(),
            6 | 7 => format!("fresh{}", rng.random_range(0..2)),
            _ => continue,
        };
        rel.entry(key).or_default().insert(a);
    }
    rel
}

/// Sends each instance whose type has copies, with probability `p`, to one of them.
pub fn random_backward_relation(rng: &mut TestRng, rule: &Homomorphism, restriction_typing: &Homomorphism, p: f64) -> BackwardRelation {
    let mut rel = BackwardRelation::new();
    for (g, l) in restriction_typing.map() {
        let copies = rule.preimage(l);
        if !copies.is_empty() && rng.random_bool(p) {
            rel.insert(g.clone(), copies.choose(rng).unwrap().clone());
        }
    }
    rel
}

/// Shape limits for [`random_hierarchy`].
#[derive(Clone, Copy, Debug)]
pub struct HierarchyShape {
    pub max_objects: usize,
    pub max_arrows: usize,
    pub max_nodes: usize,
}

impl Default for HierarchyShape {
    fn default() -> Self {
        HierarchyShape { max_objects: 6, max_arrows: 8, max_nodes: 4 }
    }
}

pub fn object_name(i: usize) -> String {
    format!("o{i}")
}

/// A valid hierarchy on `o0, o1, …` whose arrows all go from lower to
/// higher indices. Objects are built from the sinks down, choosing the
/// images of each new node so that all paths commute.
pub fn random_hierarchy(rng: &mut TestRng, shape: HierarchyShape) -> Hierarchy {
    let n = rng.random_range(2..=shape.max_objects);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs.shuffle(rng);
    let mut arrows: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..n - 1 {
        if arrows.len() < shape.max_arrows && rng.random_bool(0.85) {
            arrows.insert((i, rng.random_range(i + 1..n)));
        }
    }
    let wanted = rng.random_range(arrows.len()..=shape.max_arrows);
    for p in pairs {
        if arrows.len() >= wanted {
            break;
        }
        arrows.insert(p);
    }
    let mut h = Hierarchy::new();
    for i in (0..n).rev() {
        let name = object_name(i);
        let succ: Vec<String> = arrows.iter().filter(|(a, _)| *a == i).map(|(_, b)| object_name(*b)).collect();
        if succ.is_empty() {
            h.add_object(&name, random_graph(rng, shape.max_nodes, &format!("{name}n"))).unwrap();
            continue;
        }
        let (g, typings) = typed_over(rng, &h, &succ, shape.max_nodes, &format!("{name}n"));
        h.add_object(&name, g).unwrap();
        for (s, map) in succ.iter().zip(typings) {
            h.add_typing(&name, s, map).unwrap();
        }
    }
    h
}

/// A graph typed by every object of `succ`, consistently with the
/// composed typings between them.
fn typed_over(rng: &mut TestRng, h: &Hierarchy, succ: &[String], max_nodes: usize, prefix: &str) -> (Graph, Vec<NodeMap>) {
    let reach = |s: &String| -> BTreeSet<String> {
        let mut d = h.descendants(s);
        d.insert(s.clone());
        d
    };
    let mut composed: BTreeMap<(String, String), Homomorphism> = BTreeMap::new();
    for s in succ {
        for d in reach(s) {
            composed.insert((s.clone(), d.clone()), h.composed_typing(s, &d).unwrap());
        }
    }
    let mut g = Graph::new();
    let mut maps: Vec<NodeMap> = vec![NodeMap::new(); succ.len()];
    let count = rng.random_range(0..=max_nodes);
    for i in 0..count {
        let Some(images) = (0..10).find_map(|_| choose_images(rng, h, succ, &composed, &reach)) else {
            continue;
        };
        let common = images
            .iter()
            .zip(succ)
            .map(|(x, s)| h.object(s).unwrap().node_attrs(x).unwrap().clone())
            .reduce(|a, b| a.intersection(&b))
            .unwrap();
        g.add_node(id(prefix, i), sub_attrs(rng, &common)).unwrap();
        for (m, x) in maps.iter_mut().zip(images) {
            m.insert(id(prefix, i), x);
        }
    }
    let nodes: Vec<NodeId> = g.node_ids().cloned().collect();
    for u in &nodes {
        for v in &nodes {
            let mut common: Option<AttrSet> = None;
            for (m, s) in maps.iter().zip(succ) {
                match h.object(s).unwrap().edge_attrs(&m[u], &m[v]) {
                    Some(a) => common = Some(common.map_or(a.clone(), |c| c.intersection(a))),
                    None => {
                        common = None;
                        break;
                    }
                }
            }
            if let Some(c) = common {
                if rng.random_bool(0.5) {
                    g.add_edge(u.clone(), v.clone(), sub_attrs(rng, &c)).unwrap();
                }
            }
        }
    }
    (g, maps)
}

fn choose_images(
    rng: &mut TestRng,
    h: &Hierarchy,
    succ: &[String],
    composed: &BTreeMap<(String, String), Homomorphism>,
    reach: &dyn Fn(&String) -> BTreeSet<String>,
) -> Option<Vec<NodeId>> {
    let mut chosen: Vec<NodeId> = Vec::new();
    for (k, j) in succ.iter().enumerate() {
        let reach_j = reach(j);
        let candidates: Vec<NodeId> = h
            .object(j)
            .unwrap()
            .node_ids()
            .filter(|x| {
                chosen.iter().zip(succ).all(|(y, s)| {
                    reach(s)
                        .intersection(&reach_j)
                        .all(|d| composed[&(s.clone(), d.clone())].apply(y) == composed[&(j.clone(), d.clone())].apply(x))
                })
            })
            .cloned()
            .collect();
        chosen.push(candidates.choose(rng)?.clone());
        debug_assert_eq!(chosen.len(), k + 1);
    }
    Some(chosen)
}

/// A rewrite of one object of a hierarchy together with a relation for
/// one object it reaches.
#[derive(Clone, Debug)]
pub struct RandomRewrite {
    pub origin: String,
    pub rule: Rule,
    pub instance: Homomorphism,
    pub relation: Relation,
}

fn pick_origin(rng: &mut TestRng, h: &Hierarchy, reach: impl Fn(&str) -> BTreeSet<String>) -> (String, Vec<String>) {
    let names: Vec<String> = h.names().cloned().collect();
    let with_reach: Vec<&String> = names.iter().filter(|n| !reach(n).is_empty()).collect();
    let origin = match with_reach.choose(rng) {
        Some(n) => (*n).clone(),
        None => names.choose(rng).unwrap().clone(),
    };
    let others = reach(&origin).into_iter().collect();
    (origin, others)
}

/// An expansive rewrite of a random object with a forward relation for
/// one of its descendants.
pub fn random_forward_rewrite(rng: &mut TestRng, h: &Hierarchy) -> RandomRewrite {
    let (origin, below) = pick_origin(rng, h, |n| h.descendants(n));
    let g = h.object(&origin).unwrap().clone();
    let instance = random_induced(rng, &g, 0.5);
    let r = random_extension(rng, instance.source(), false, 2, "p");
    let mut rel = BTreeMap::new();
    if let Some(j) = below.choose(rng) {
        rel.insert(j.clone(), random_forward_relation(rng, &r, h.object(j).unwrap()));
    }
    RandomRewrite { origin, rule: Rule::expansive(r), instance, relation: Relation::Forward(rel) }
}

/// A restrictive rewrite of a random object with a backward relation for
/// one of its ancestors.
pub fn random_backward_rewrite(rng: &mut TestRng, h: &Hierarchy) -> RandomRewrite {
    let (origin, above) = pick_origin(rng, h, |n| h.ancestors(n));
    let g = h.object(&origin).unwrap().clone();
    let instance = random_induced(rng, &g, 0.7);
    let l = instance.source().clone();
    let r = if l.node_count() == 0 {
        Homomorphism::identity(l)
    } else {
        let n = rng.random_range(0..=l.node_count() + 2);
        random_typed(rng, &l, n, "c")
    };
    let mut rel = BTreeMap::new();
    if let Some(j) = above.choose(rng) {
        let res = restriction_pullback(&h.composed_typing(j, &origin).unwrap(), &instance).unwrap();
        let p = if rng.random_bool(0.5) { 1.0 } else { 0.6 };
        rel.insert(j.clone(), random_backward_relation(rng, &r, &res.typing, p));
    }
    RandomRewrite { origin, rule: Rule::restrictive(r), instance, relation: Relation::Backward(rel) }
}

/// A sequence of `len` edits, each valid on the graph left by the previous ones.
pub fn random_edits(rng: &mut TestRng, g: &Graph, len: usize) -> Vec<Edit> {
    let mut current = g.clone();
    let mut out = Vec::new();
    let mut fresh = 0;
    let new_id = |fresh: &mut usize| {
        *fresh += 1;
        NodeId::from(format!("e{fresh}"))
    };
    while out.len() < len {
        let nodes: Vec<NodeId> = current.node_ids().cloned().collect();
        let edges: Vec<(NodeId, NodeId)> = current.edges().map(|(u, v, _)| (u.clone(), v.clone())).collect();
        let edit = match rng.random_range(0..8) {
            0 => Edit::AddNode { id: new_id(&mut fresh), attrs: random_attrs(rng) },
            1 if !nodes.is_empty() => {
                let (u, v) = (nodes.choose(rng).unwrap().clone(), nodes.choose(rng).unwrap().clone());
                if current.has_edge(&u, &v) {
                    continue;
                }
                Edit::AddEdge { from: u, to: v, attrs: random_attrs(rng) }
            }
            2 if !nodes.is_empty() => Edit::DeleteNode { id: nodes.choose(rng).unwrap().clone() },
            3 if !edges.is_empty() => {
                let (u, v) = edges.choose(rng).unwrap().clone();
                Edit::DeleteEdge { from: u, to: v }
            }
            4 if !nodes.is_empty() => Edit::CloneNode { id: nodes.choose(rng).unwrap().clone(), new_id: new_id(&mut fresh) },
            5 if nodes.len() >= 2 => {
                let ids: Vec<NodeId> = nodes.choose_multiple(rng, 2).cloned().collect();
                let new_id = if rng.random_bool(0.5) { ids[0].clone() } else { new_id(&mut fresh) };
                Edit::MergeNodes { ids, new_id }
            }
            6 | 7 if !nodes.is_empty() => {
                let target = match edges.choose(rng) {
                    Some((u, v)) if rng.random_bool(0.3) => Element::Edge(u.clone(), v.clone()),
                    _ => Element::Node(nodes.choose(rng).unwrap().clone()),
                };
                let present = match &target {
                    Element::Node(n) => current.node_attrs(n).unwrap().clone(),
                    Element::Edge(u, v) => current.edge_attrs(u, v).unwrap().clone(),
                };
                if rng.random_bool(0.5) || present.is_empty() {
                    Edit::AddAttrs { target, attrs: random_attrs(rng) }
                } else {
                    Edit::RemoveAttrs { target, attrs: sub_attrs(rng, &present) }
                }
            }
            _ => continue,
        };
        current = apply_edit(&current, &edit).expect("generated edits are valid");
        out.push(edit);
    }
    out
}
