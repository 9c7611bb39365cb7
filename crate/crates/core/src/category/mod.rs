//! Limits and colimits used by sesqui-pushout rewriting.
//!
//! Node identifiers of constructed objects are chosen deterministically
//! from the identifiers of the inputs, so repeated runs produce the same
//! graphs byte for byte.

pub mod oracle;

use crate::attr_graph::{AttrSet, Graph, Homomorphism, NodeId, NodeMap};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Hands out identifiers, suffixing `#n` on collision.
#[derive(Default)]
pub(crate) struct FreshNames {
    used: BTreeSet<NodeId>,
}

impl FreshNames {
    pub(crate) fn claim(&mut self, proposal: &str) -> NodeId {
        let mut id = NodeId::from(proposal);
        let mut n = 1;
        while self.used.contains(&id) {
            id = NodeId::from(format!("{proposal}#{n}"));
            n += 1;
        }
        self.used.insert(id.clone());
        id
    }

    pub(crate) fn reserve(&mut self, id: &NodeId) {
        self.used.insert(id.clone());
    }
}

fn same_object(a: &Graph, b: &Graph, what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::Mismatch(what.to_string()))
    }
}

/// Pullback object with its two projections.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub object: Arc<Graph>,
    /// Projection onto the source of the first arrow.
    pub to_left: Homomorphism,
    /// Projection onto the source of the second arrow.
    pub to_right: Homomorphism,
}

/// Pullback of the cospan `A --f--> C <--g-- B`.
///
/// Nodes are the pairs `(a, b)` with `f(a) = g(b)`, named `a⋈b`; edges
/// exist where both components have one, and attributes are intersected.
pub fn pullback(f: &Homomorphism, g: &Homomorphism) -> Result<Pullback> {
    same_object(f.target(), g.target(), "pullback arrows must share a target")?;
    let (a, b) = (f.source(), g.source());
    let mut obj = Graph::new();
    let mut pairs: BTreeMap<(NodeId, NodeId), NodeId> = BTreeMap::new();
    let mut names = FreshNames::default();
    for (na, aa) in a.nodes() {
        for (nb, ab) in b.nodes() {
            if f.apply(na) == g.apply(nb) {
                let id = names.claim(&format!("{na}⋈{nb}"));
                obj.add_node(id.clone(), aa.intersection(ab))?;
                pairs.insert((na.clone(), nb.clone()), id);
            }
        }
    }
    for (a1, a2, ea) in a.edges() {
        for (b1, b2, eb) in b.edges() {
            if let (Some(p), Some(q)) = (pairs.get(&(a1.clone(), b1.clone())), pairs.get(&(a2.clone(), b2.clone()))) {
                obj.add_edge(p.clone(), q.clone(), ea.intersection(eb))?;
            }
        }
    }
    let obj = Arc::new(obj);
    let left = pairs.iter().map(|((x, _), p)| (p.clone(), x.clone())).collect();
    let right = pairs.iter().map(|((_, y), p)| (p.clone(), y.clone())).collect();
    Ok(Pullback {
        to_left: Homomorphism::from_parts(obj.clone(), a.clone(), left),
        to_right: Homomorphism::from_parts(obj.clone(), b.clone(), right),
        object: obj,
    })
}

impl Pullback {
    /// The unique `u: X → P` with `to_left ∘ u = x_a` and `to_right ∘ u = x_b`.
    pub fn mediate(&self, x_a: &Homomorphism, x_b: &Homomorphism) -> Result<Homomorphism> {
        same_object(x_a.source(), x_b.source(), "mediator arrows must share a source")?;
        let index: BTreeMap<(&NodeId, &NodeId), &NodeId> = self
            .object
            .node_ids()
            .map(|p| ((self.to_left.apply(p), self.to_right.apply(p)), p))
            .collect();
        let mut map = NodeMap::new();
        for x in x_a.source().node_ids() {
            let key = (x_a.apply(x), x_b.apply(x));
            let p = index
                .get(&key)
                .ok_or_else(|| Error::NoMediator(format!("({}, {}) is not a pullback node", key.0, key.1)))?;
            map.insert(x.clone(), (*p).clone());
        }
        let u = Homomorphism::from_parts(x_a.source().clone(), self.object.clone(), map);
        u.check().map_err(|e| Error::NoMediator(e.to_string()))?;
        Ok(u)
    }
}

/// Pushout object with its two injections.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub object: Arc<Graph>,
    /// Injection of the target of the first arrow.
    pub from_left: Homomorphism,
    /// Injection of the target of the second arrow.
    pub from_right: Homomorphism,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Pushout of the span `B <--f-- A --g--> C`.
///
/// Nodes are equivalence classes of `B ⊔ C` generated by `f(a) ~ g(a)`.
/// A class with exactly one `B` member keeps that id; otherwise one with
/// exactly one `C` member keeps the `C` id; otherwise the sorted member
/// ids of one side are joined with `+`.
pub fn pushout(f: &Homomorphism, g: &Homomorphism) -> Result<Pushout> {
    same_object(f.source(), g.source(), "pushout arrows must share a source")?;
    let (b, c) = (f.target(), g.target());
    let b_ids: Vec<&NodeId> = b.node_ids().collect();
    let c_ids: Vec<&NodeId> = c.node_ids().collect();
    let b_idx: BTreeMap<&NodeId, usize> = b_ids.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let c_idx: BTreeMap<&NodeId, usize> = c_ids.iter().enumerate().map(|(i, n)| (*n, i + b_ids.len())).collect();
    let mut uf = UnionFind::new(b_ids.len() + c_ids.len());
    for x in f.source().node_ids() {
        uf.union(b_idx[f.apply(x)], c_idx[g.apply(x)]);
    }
    let mut classes: BTreeMap<usize, (Vec<&NodeId>, Vec<&NodeId>)> = BTreeMap::new();
    for (i, n) in b_ids.iter().enumerate() {
        classes.entry(uf.find(i)).or_default().0.push(n);
    }
    for (i, n) in c_ids.iter().enumerate() {
        classes.entry(uf.find(i + b_ids.len())).or_default().1.push(n);
    }
    let mut names = FreshNames::default();
    let mut class_name: BTreeMap<usize, NodeId> = BTreeMap::new();
    for (root, (bs, _)) in &classes {
        if bs.len() == 1 {
            class_name.insert(*root, names.claim(bs[0].as_str()));
        }
    }
    for (root, (bs, cs)) in &classes {
        if class_name.contains_key(root) {
            continue;
        }
        let proposal = if cs.len() == 1 {
            cs[0].to_string()
        } else if !bs.is_empty() {
            join(bs)
        } else {
            join(cs)
        };
        class_name.insert(*root, names.claim(&proposal));
    }
    let mut to_q = |i: usize| class_name[&uf.find(i)].clone();
    let b_map: NodeMap = b_ids.iter().enumerate().map(|(i, n)| ((*n).clone(), to_q(i))).collect();
    let c_map: NodeMap = c_ids.iter().enumerate().map(|(i, n)| ((*n).clone(), to_q(i + b_ids.len()))).collect();
    let mut obj = Graph::new();
    for (src, map) in [(b, &b_map), (c, &c_map)] {
        for (n, a) in src.nodes() {
            obj.merge_node(map[n].clone(), a);
        }
        for (u, v, a) in src.edges() {
            obj.merge_edge(map[u].clone(), map[v].clone(), a);
        }
    }
    let obj = Arc::new(obj);
    Ok(Pushout {
        from_left: Homomorphism::from_parts(b.clone(), obj.clone(), b_map),
        from_right: Homomorphism::from_parts(c.clone(), obj.clone(), c_map),
        object: obj,
    })
}

fn join(ids: &[&NodeId]) -> String {
    let mut v: Vec<&str> = ids.iter().map(|n| n.as_str()).collect();
    v.sort();
    v.join("+")
}

impl Pushout {
    /// The unique `u: Q → Y` with `u ∘ from_left = y_b` and `u ∘ from_right = y_c`.
    pub fn mediate(&self, y_b: &Homomorphism, y_c: &Homomorphism) -> Result<Homomorphism> {
        same_object(y_b.target(), y_c.target(), "mediator arrows must share a target")?;
        let mut map = NodeMap::new();
        for (inj, y) in [(&self.from_left, y_b), (&self.from_right, y_c)] {
            for (n, q) in inj.map() {
                let t = y.get(n).ok_or_else(|| Error::NoMediator(format!("node {n} is unmapped")))?;
                if let Some(prev) = map.insert(q.clone(), t.clone()) {
                    if prev != *t {
                        return Err(Error::NoMediator(format!("class {q} would map to both {prev} and {t}")));
                    }
                }
            }
        }
        let u = Homomorphism::from_parts(self.object.clone(), y_b.target().clone(), map);
        u.check().map_err(|e| Error::NoMediator(e.to_string()))?;
        Ok(u)
    }
}

/// Final pullback complement of `K --f--> L ↣m G`.
#[derive(Clone, Debug)]
pub struct FinalPbc {
    pub object: Arc<Graph>,
    /// `k: K → D`.
    pub from_interface: Homomorphism,
    /// `d: D → G`.
    pub to_host: Homomorphism,
    /// For each node of `D`, the interface node it copies, if any.
    pub origin: BTreeMap<NodeId, Option<NodeId>>,
}

/// Final pullback complement of `f: K → L` along the monomorphism `m: L ↣ G`.
///
/// Unmatched nodes of `G` are kept with their ids. A matched node `g = m(l)`
/// becomes one copy per preimage `k` of `l`: the copy keeps `g` when `l` has
/// a single preimage and is named `g∥k` otherwise; it loses the attributes
/// of `l` that `k` lacks. An edge of `G` is copied between two copies
/// unless both endpoints are matched by an edge of `L` whose preimage in
/// `K` is missing.
pub fn final_pbc(f: &Homomorphism, m: &Homomorphism) -> Result<FinalPbc> {
    same_object(f.target(), m.source(), "interface arrow must land in the match domain")?;
    if !m.is_mono() {
        return Err(Error::NotMono("the match of a final pullback complement"));
    }
    let (k, l, g) = (f.source(), f.target(), m.target());
    let inv_m: BTreeMap<&NodeId, &NodeId> = m.map().iter().map(|(a, b)| (b, a)).collect();
    let mut names = FreshNames::default();
    for n in g.node_ids() {
        if !inv_m.contains_key(n) {
            names.reserve(n);
        }
    }
    let mut obj = Graph::new();
    let mut over: BTreeMap<&NodeId, Vec<(NodeId, Option<&NodeId>)>> = BTreeMap::new();
    let mut origin = BTreeMap::new();
    let mut k_map = NodeMap::new();
    for (gn, ga) in g.nodes() {
        match inv_m.get(gn) {
            None => {
                obj.add_node(gn.clone(), ga.clone())?;
                over.entry(gn).or_default().push((gn.clone(), None));
                origin.insert(gn.clone(), None);
            }
            Some(ln) => {
                let pre: Vec<&NodeId> = f.map().iter().filter(|(_, t)| t == ln).map(|(s, _)| s).collect();
                let removed_base = l.node_attrs(ln).expect("match source node");
                for kn in &pre {
                    let id = if pre.len() == 1 { names.claim(gn.as_str()) } else { names.claim(&format!("{gn}∥{kn}")) };
                    let removed = removed_base.difference(k.node_attrs(kn).expect("interface node"));
                    obj.add_node(id.clone(), ga.difference(&removed))?;
                    over.entry(gn).or_default().push((id.clone(), Some(*kn)));
                    origin.insert(id.clone(), Some((*kn).clone()));
                    k_map.insert((*kn).clone(), id);
                }
            }
        }
    }
    for (g1, g2, ge) in g.edges() {
        let (Some(us), Some(vs)) = (over.get(g1), over.get(g2)) else { continue };
        for (u, ku) in us {
            for (v, kv) in vs {
                let attrs = match (ku, kv) {
                    (Some(k1), Some(k2)) => match l.edge_attrs(f.apply(k1), f.apply(k2)) {
                        Some(le) => match k.edge_attrs(k1, k2) {
                            Some(ke) => ge.difference(&le.difference(ke)),
                            None => continue,
                        },
                        None => ge.clone(),
                    },
                    _ => ge.clone(),
                };
                obj.add_edge(u.clone(), v.clone(), attrs)?;
            }
        }
    }
    let d_map: NodeMap = over.iter().flat_map(|(gn, vs)| vs.iter().map(move |(id, _)| (id.clone(), (*gn).clone()))).collect();
    let obj = Arc::new(obj);
    Ok(FinalPbc {
        from_interface: Homomorphism::from_parts(k.clone(), obj.clone(), k_map),
        to_host: Homomorphism::from_parts(obj.clone(), g.clone(), d_map),
        object: obj,
        origin,
    })
}

impl FinalPbc {
    /// The unique `u: X → D` with `d ∘ u = x` and `u = k ∘ h` on the part
    /// of `X` that lies over the match, where `assign` gives `h` on those
    /// nodes. Nodes outside the match ignore `assign`.
    pub fn mediate(&self, x: &Homomorphism, assign: &NodeMap) -> Result<Homomorphism> {
        same_object(x.target(), self.to_host.target(), "mediator arrow must land in the host")?;
        let mut map = NodeMap::new();
        for (xn, gn) in x.map() {
            let copies: Vec<&NodeId> = self.to_host.map().iter().filter(|(_, t)| *t == gn).map(|(s, _)| s).collect();
            let unmatched = copies.len() == 1 && self.origin[copies[0]].is_none();
            let target = if unmatched {
                copies[0].clone()
            } else {
                let kn = assign.get(xn).ok_or_else(|| Error::NoMediator(format!("no interface node assigned to {xn}")))?;
                let d = self
                    .from_interface
                    .get(kn)
                    .ok_or_else(|| Error::NoMediator(format!("{kn} is not an interface node")))?;
                if self.to_host.apply(d) != gn {
                    return Err(Error::NoMediator(format!("{xn} is assigned {kn}, which does not lie over {gn}")));
                }
                d.clone()
            };
            map.insert(xn.clone(), target);
        }
        let u = Homomorphism::from_parts(x.source().clone(), self.object.clone(), map);
        u.check().map_err(|e| Error::NoMediator(e.to_string()))?;
        Ok(u)
    }
}

/// Epi-mono factorization `f = mono ∘ epi` through the image of `f`.
#[derive(Clone, Debug)]
pub struct ImageFactorization {
    pub image: Arc<Graph>,
    pub epi: Homomorphism,
    pub mono: Homomorphism,
}

/// Image of `f: A → B`: the nodes and edges of `B` hit by `f`, carrying
/// the union of the attributes mapped onto them. Image nodes keep `B` ids.
pub fn image_factorization(f: &Homomorphism) -> Result<ImageFactorization> {
    let (a, b) = (f.source(), f.target());
    let mut img = Graph::new();
    for (n, attrs) in a.nodes() {
        img.merge_node(f.apply(n).clone(), attrs);
    }
    for (u, v, attrs) in a.edges() {
        img.merge_edge(f.apply(u).clone(), f.apply(v).clone(), attrs);
    }
    let img = Arc::new(img);
    let mono_map = img.node_ids().map(|n| (n.clone(), n.clone())).collect();
    Ok(ImageFactorization {
        epi: Homomorphism::from_parts(a.clone(), img.clone(), f.map().clone()),
        mono: Homomorphism::from_parts(img.clone(), b.clone(), mono_map),
        image: img,
    })
}

/// Union of the attributes of `xs` in `g`.
pub(crate) fn union_attrs<'a>(g: &Graph, xs: impl IntoIterator<Item = &'a NodeId>) -> AttrSet {
    xs.into_iter().filter_map(|x| g.node_attrs(x)).fold(AttrSet::new(), |acc, a| acc.union(a))
}
