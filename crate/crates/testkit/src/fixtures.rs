//! The worked examples: forward merge-and-add on circles, backward
//! delete-and-refine on squares, the two-sink set example, the chain that
//! cannot be composed and the clone diamond.

use crate::{attrs, nm};
use hiergraph::propagation::{BackwardFactorization, ForwardFactorization, ForwardRelation, Relation};
use hiergraph::{AttrSet, Graph, Hierarchy, Homomorphism, NodeId, Rule};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// A hierarchy, a rule and a match of it in `origin`.
#[derive(Clone, Debug)]
pub struct Example {
    pub hierarchy: Hierarchy,
    pub origin: String,
    pub rule: Rule,
    /// Forward: a match of the interface. Backward: a match of the left-hand side.
    pub instance: Homomorphism,
}

impl Example {
    pub fn object(&self, name: &str) -> Arc<Graph> {
        self.hierarchy.object(name).unwrap().clone()
    }

    pub fn typing(&self, from: &str, to: &str) -> Homomorphism {
        self.hierarchy.typing(from, to).unwrap()
    }
}

fn circle(color: &str) -> AttrSet {
    attrs(&[("shape", &["circle"]), ("color", &[color])])
}

fn square() -> AttrSet {
    attrs(&[("shape", &["square"])])
}

/// Two white and two black circles typed by a white and a black circle
/// type, plus an untouched `square` type when `with_square` holds.
///
/// The rule merges one white with one black circle and adds two squares.
pub fn forward_example(with_square: bool) -> Example {
    let mut t = Graph::new().with_node("white", circle("white")).with_node("black", circle("black"));
    if with_square {
        t = t.with_node("square", square());
    }
    let g = Graph::new()
        .with_node("w1", circle("white"))
        .with_node("w2", circle("white"))
        .with_node("b1", circle("black"))
        .with_node("b2", circle("black"));
    let mut h = Hierarchy::new();
    h.add_object("T", t).unwrap();
    h.add_object("G", g).unwrap();
    h.add_typing("G", "T", nm(&[("w1", "white"), ("w2", "white"), ("b1", "black"), ("b2", "black")])).unwrap();
    let l = Arc::new(Graph::new().with_node("w", circle("white")).with_node("b", circle("black")));
    let lp = Graph::new()
        .with_node("wb", attrs(&[("shape", &["circle"]), ("color", &["white", "black"])]))
        .with_node("s1", square())
        .with_node("s2", square());
    let r = Homomorphism::new(l.clone(), lp, nm(&[("w", "wb"), ("b", "wb")])).unwrap();
    let instance = Homomorphism::new(l, h.object("G").unwrap().clone(), nm(&[("w", "w1"), ("b", "b1")])).unwrap();
    Example { hierarchy: h, origin: "G".into(), rule: Rule::expansive(r), instance }
}

/// Factorization of the forward rule adding `s1` strictly as a `square`.
pub fn forward_square_factorization(ex: &Example) -> ForwardFactorization {
    let r = ex.rule.right();
    let t = ex.object("T");
    let mid = Arc::new((**r.source()).clone().with_node("s1", square()));
    let pre = Homomorphism::new(r.source().clone(), mid.clone(), nm(&[("w", "w"), ("b", "b")])).unwrap();
    let post = Homomorphism::new(mid.clone(), r.target().clone(), nm(&[("w", "wb"), ("b", "wb"), ("s1", "s1")])).unwrap();
    let typing = Homomorphism::new(mid, t, nm(&[("w", "white"), ("b", "black"), ("s1", "square")])).unwrap();
    ForwardFactorization::new(pre, post, typing).unwrap()
}

/// Relation giving both added squares one type in `T`.
pub fn forward_square_relation(label: &str) -> Relation {
    let rel: ForwardRelation = [(label.to_string(), BTreeSet::from([NodeId::from("s1"), NodeId::from("s2")]))].into();
    Relation::Forward([("T".to_string(), rel)].into())
}

/// Circles and squares typed by a circle type and a two-coloured square
/// type; `partial` adds a third, colourless square.
///
/// The rule deletes the circle type and clones the square type into a
/// white and a black one.
pub fn backward_example(partial: bool) -> Example {
    let sq = attrs(&[("shape", &["square"]), ("color", &["white", "black"])]);
    let t = Graph::new().with_node("circle", attrs(&[("shape", &["circle"])])).with_node("square", sq.clone());
    let mut g = Graph::new()
        .with_node("c1", attrs(&[("shape", &["circle"])]))
        .with_node("c2", attrs(&[("shape", &["circle"])]))
        .with_node("q1", attrs(&[("shape", &["square"]), ("color", &["white"])]))
        .with_node("q2", attrs(&[("shape", &["square"]), ("color", &["black"])]));
    let mut typing = nm(&[("c1", "circle"), ("c2", "circle"), ("q1", "square"), ("q2", "square")]);
    if partial {
        g = g.with_node("q3", square());
        typing.insert("q3".into(), "square".into());
    }
    let mut h = Hierarchy::new();
    h.add_object("T", t).unwrap();
    h.add_object("G", g).unwrap();
    h.add_typing("G", "T", typing).unwrap();
    let l = Arc::new(Graph::new().with_node("circle", attrs(&[("shape", &["circle"])])).with_node("square", sq));
    let lm = Graph::new()
        .with_node("sw", attrs(&[("shape", &["square"]), ("color", &["white"])]))
        .with_node("sb", attrs(&[("shape", &["square"]), ("color", &["black"])]));
    let r = Homomorphism::new(lm, l.clone(), nm(&[("sw", "square"), ("sb", "square")])).unwrap();
    let instance = Homomorphism::new(l, h.object("T").unwrap().clone(), nm(&[("circle", "circle"), ("square", "square")])).unwrap();
    Example { hierarchy: h, origin: "T".into(), rule: Rule::restrictive(r), instance }
}

/// Strict refinement of the square type: `q1` becomes white, `q2` black;
/// the circle is left to the canonical phase.
pub fn backward_refinement(ex: &Example, retyping_source: Arc<Graph>) -> BackwardFactorization {
    let r = ex.rule.left();
    let mid = Arc::new(
        Graph::new()
            .with_node("circle", attrs(&[("shape", &["circle"])]))
            .with_node("sw", attrs(&[("shape", &["square"]), ("color", &["white"])]))
            .with_node("sb", attrs(&[("shape", &["square"]), ("color", &["black"])])),
    );
    let post = Homomorphism::new(mid.clone(), r.target().clone(), nm(&[("circle", "circle"), ("sw", "square"), ("sb", "square")])).unwrap();
    let pre = Homomorphism::new(r.source().clone(), mid.clone(), nm(&[("sw", "sw"), ("sb", "sb")])).unwrap();
    let retyping = Homomorphism::new(retyping_source, mid, nm(&[("c1", "circle"), ("c2", "circle"), ("q1", "sw"), ("q2", "sb")])).unwrap();
    BackwardFactorization::new(post, pre, retyping).unwrap()
}

/// Relation sending `q1` to the white copy and `q2` to the black one.
pub fn backward_refinement_relation() -> Relation {
    Relation::Backward([("G".to_string(), nm(&[("q1", "sw"), ("q2", "sb")]))].into())
}

/// `n1 ← n0 → n2` with `n0` empty, `n1 = {o}` and `n2 = {x}`; the rule
/// adds `o` and `x` to `n0`.
pub fn set_example() -> Example {
    let mut h = Hierarchy::new();
    h.add_object("n0", Graph::new()).unwrap();
    h.add_object("n1", Graph::discrete(["o"])).unwrap();
    h.add_object("n2", Graph::discrete(["x"])).unwrap();
    h.add_typing("n0", "n1", nm(&[])).unwrap();
    h.add_typing("n0", "n2", nm(&[])).unwrap();
    let r = Homomorphism::new(Graph::new(), Graph::discrete(["o", "x"]), nm(&[])).unwrap();
    let instance = Homomorphism::new(Graph::new(), h.object("n0").unwrap().clone(), nm(&[])).unwrap();
    Example { hierarchy: h, origin: "n0".into(), rule: Rule::expansive(r), instance }
}

/// Each sink adds its own element strictly and the other canonically.
pub fn set_relation() -> Relation {
    let one = |k: &str| -> ForwardRelation { [(k.to_string(), BTreeSet::from([NodeId::from(k)]))].into() };
    Relation::Forward([("n1".to_string(), one("o")), ("n2".to_string(), one("x"))].into())
}

/// `G0 → G1 → G2`, one node each; the rule adds a node `n`.
pub fn chain_example() -> Example {
    let mut h = Hierarchy::new();
    h.add_object("G0", Graph::discrete(["a"])).unwrap();
    h.add_object("G1", Graph::discrete(["t"])).unwrap();
    h.add_object("G2", Graph::discrete(["u"])).unwrap();
    h.add_typing("G0", "G1", nm(&[("a", "t")])).unwrap();
    h.add_typing("G1", "G2", nm(&[("t", "u")])).unwrap();
    let l = Arc::new(Graph::discrete(["a"]));
    let r = Homomorphism::new(l.clone(), Graph::discrete(["a", "n"]), nm(&[("a", "a")])).unwrap();
    let instance = Homomorphism::new(l, h.object("G0").unwrap().clone(), nm(&[("a", "a")])).unwrap();
    Example { hierarchy: h, origin: "G0".into(), rule: Rule::expansive(r), instance }
}

/// `G1` adds `n` strictly as `t` while `G2` leaves it to its canonical phase.
pub fn chain_factorizations(ex: &Example) -> BTreeMap<String, ForwardFactorization> {
    let r = ex.rule.right();
    let mid = Arc::new(Graph::discrete(["a", "n"]));
    let pre = Homomorphism::new(r.source().clone(), mid.clone(), nm(&[("a", "a")])).unwrap();
    let post = Homomorphism::new(mid.clone(), r.target().clone(), nm(&[("a", "a"), ("n", "n")])).unwrap();
    let typing = Homomorphism::new(mid, ex.object("G1"), nm(&[("a", "t"), ("n", "t")])).unwrap();
    let g1 = ForwardFactorization::new(pre, post, typing).unwrap();
    let g2 = ForwardFactorization::canonical(r, &ex.hierarchy.composed_typing("G0", "G2").unwrap().after(&ex.instance).unwrap());
    [("G1".to_string(), g1), ("G2".to_string(), g2)].into()
}

/// `G1 → G0 ← G2` where `G0 = {x → y}`, `G1 = {p → u}` and `G2 = {q}`;
/// the rule clones `x` into `x1` and `x2`.
pub fn diamond_example() -> Example {
    let mut h = Hierarchy::new();
    h.add_object("G0", Graph::discrete(["x", "y"]).with_edge("x", "y", AttrSet::new())).unwrap();
    h.add_object("G1", Graph::discrete(["p", "u"]).with_edge("p", "u", AttrSet::new())).unwrap();
    h.add_object("G2", Graph::discrete(["q"])).unwrap();
    h.add_typing("G1", "G0", nm(&[("p", "x"), ("u", "y")])).unwrap();
    h.add_typing("G2", "G0", nm(&[("q", "x")])).unwrap();
    let l = Arc::new(h.object("G0").unwrap().as_ref().clone());
    let lm = Graph::discrete(["x1", "x2", "y"]).with_edge("x1", "y", AttrSet::new()).with_edge("x2", "y", AttrSet::new());
    let r = Homomorphism::new(lm, l.clone(), nm(&[("x1", "x"), ("x2", "x"), ("y", "y")])).unwrap();
    let instance = Homomorphism::identity(l).with_target(h.object("G0").unwrap().clone());
    Example { hierarchy: h, origin: "G0".into(), rule: Rule::restrictive(r), instance }
}

/// `p` follows `x1` in `G1`, `q` follows `x2` in `G2`.
pub fn diamond_relation() -> Relation {
    Relation::Backward([("G1".to_string(), nm(&[("p", "x1")])), ("G2".to_string(), nm(&[("q", "x2")]))].into())
}
