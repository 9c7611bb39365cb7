//! Executable acceptance checks, shared by the integration tests (at
//! reduced sizes) and the acceptance runner (at full size).

use crate::fixtures::{self, Example};
use crate::random::{self, HierarchyShape};
use hiergraph::category::oracle::{verify_final_pbc, verify_image, verify_pullback, verify_pushout, OracleConfig, Verdict};
use hiergraph::category::{final_pbc, image_factorization, pullback, pushout};
use hiergraph::propagation::{
    apply_relation, backward_canonical, backward_cleanup, backward_strict, build_plan, check_composability, derive_backward_factorization,
    derive_forward_factorization, forward_canonical, forward_strict, forward_via_projection, lift_rule, propagate_with_relation,
    propagate_with_relation_observed, restriction_pullback, BackwardFactorization, ComposabilityViolation, Direction, Factorizations,
    PropagationPlan, Relation,
};
use hiergraph::attr_graph::for_each_hom;
use hiergraph::{Graph, Hierarchy, Homomorphism, NodeId, NodeMap};
use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::path::PathBuf;
use std::time::{Duration, Instant};

/// Result of one check.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Self {
        match failures.first() {
            None => Outcome { passed: true, detail: summary },
            Some(first) => Outcome { passed: false, detail: format!("{summary}; {} failure(s), first: {first}", failures.len()) },
        }
    }
}

/// Wall-clock budget for the oracle suite.
pub const ORACLE_BUDGET: Duration = Duration::from_secs(60);

/// Test-object bound of the oracle suite.
pub const ORACLE_NODE_BOUND: usize = 4;

/// Runs each universal-property checker on `per_construction` random instances.
pub fn up_oracles(per_construction: usize, seed: u64) -> Outcome {
    let cfg = OracleConfig { node_bound: ORACLE_NODE_BOUND, ..OracleConfig::default() };
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut record = |what: &str, i: usize, v: hiergraph::Result<Verdict>| match v {
        Ok(Verdict::Holds) => {}
        Ok(Verdict::Fails(why)) => failures.push(format!("{what} #{i}: {why}")),
        Err(e) => failures.push(format!("{what} #{i}: {e}")),
    };
    let mut rng = random::rng(seed);
    for i in 0..per_construction {
        let (f, g) = random::pullback_instance(&mut rng);
        record("pullback", i, pullback(&f, &g).and_then(|pb| verify_pullback(&pb, &f, &g, &cfg)));
        let (f, g) = random::pushout_instance(&mut rng);
        record("pushout", i, pushout(&f, &g).and_then(|po| verify_pushout(&po, &f, &g, &cfg)));
        let (f, m) = random::pbc_instance(&mut rng);
        record("final PBC", i, final_pbc(&f, &m).and_then(|pbc| verify_final_pbc(&pbc, &f, &m, &cfg)));
        let f = random::image_instance(&mut rng);
        record("image", i, image_factorization(&f).and_then(|imf| verify_image(&imf, &f, &cfg)));
    }
    let elapsed = start.elapsed();
    if elapsed > ORACLE_BUDGET {
        failures.push(format!("took {elapsed:.1?}, over the {ORACLE_BUDGET:?} budget"));
    }
    Outcome::new(&failures, format!("{per_construction} instances x 4 constructions, bound {ORACLE_NODE_BOUND}, {elapsed:.2?}"))
}

/// Directory of the committed expected outputs.
pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden")
}

/// Canonical JSON of a hierarchy, as stored in the golden files.
pub fn hierarchy_json(h: &Hierarchy) -> String {
    serde_json::to_string_pretty(h).unwrap() + "\n"
}

/// Compares with a committed fixture; with `HIERGRAPH_BLESS=1` set, the
/// fixture is rewritten instead.
fn check_golden(name: &str, h: &Hierarchy, failures: &mut Vec<String>) {
    let path = golden_dir().join(name);
    if std::env::var_os("HIERGRAPH_BLESS").is_some_and(|v| v == "1") {
        if let Err(e) = std::fs::create_dir_all(golden_dir()).and_then(|_| std::fs::write(&path, hierarchy_json(h))) {
            failures.push(format!("{}: {e}", path.display()));
        }
        return;
    }
    match std::fs::read_to_string(&path) {
        Ok(expected) if expected == hierarchy_json(h) => {}
        Ok(_) => failures.push(format!("{name} differs from the committed fixture")),
        Err(e) => failures.push(format!("{}: {e}", path.display())),
    }
}

/// Every isomorphism `a → b` that preserves attributes exactly.
fn isomorphisms(a: &Graph, b: &Graph, compatible: &dyn Fn(&NodeId, &NodeId) -> bool) -> Vec<NodeMap> {
    let mut out = Vec::new();
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() {
        return out;
    }
    for_each_hom(a, b, compatible, true, |m| {
        let nodes = a.nodes().all(|(n, x)| b.node_attrs(&m[n]) == Some(x));
        let edges = a.edges().all(|(u, v, x)| b.edge_attrs(&m[u], &m[v]) == Some(x));
        if nodes && edges {
            out.push(m.clone());
        }
        ControlFlow::Continue(())
    });
    out
}

/// Whether `ga -ha-> ta` and `gb -hb-> tb` are isomorphic as typed graphs.
pub fn typed_isomorphic(ha: &Homomorphism, hb: &Homomorphism) -> bool {
    isomorphisms(ha.target(), hb.target(), &|_, _| true).iter().any(|phi| {
        let compatible = |x: &NodeId, y: &NodeId| phi[ha.apply(x)] == *hb.apply(y);
        !isomorphisms(ha.source(), hb.source(), &compatible).is_empty()
    })
}

/// An isomorphism `a.target() → b.target()` making `iso ∘ a = b` for
/// every pair of arrows, if there is one.
pub fn iso_under(a: &Graph, b: &Graph, pairs: &[(&Homomorphism, &Homomorphism)]) -> Option<NodeMap> {
    isomorphisms(a, b, &|_, _| true)
        .into_iter()
        .find(|phi| pairs.iter().all(|(x, y)| x.map().iter().all(|(s, t)| y.get(s) == Some(&phi[t]))))
}

fn run(h: &mut Hierarchy, ex: &Example, dir: Direction, rel: Option<&Relation>) -> hiergraph::Result<hiergraph::propagation::ControlledRewrite> {
    let rp = build_plan(h, &ex.origin, &ex.rule, &ex.instance, dir, None, rel)?;
    propagate_with_relation(h, &rp)
}

fn forward_rel(label: &str) -> Relation {
    fixtures::forward_square_relation(label)
}

/// The merge-and-add example: canonical counts, clean-up merge, and the
/// strict variant against the direct route.
pub fn forward_golden() -> Outcome {
    let mut failures = Vec::new();
    let ex = fixtures::forward_example(false);

    let res = (|| -> hiergraph::Result<Vec<String>> {
        let mut fails = Vec::new();
        let h = ex.typing("G", "T");
        let fact = hiergraph::propagation::ForwardFactorization::canonical(ex.rule.right(), &h.after(&ex.instance)?);
        let strict = forward_strict(&h, &ex.instance, &fact)?;
        let canon = forward_canonical(&strict, &fact.post)?;
        if canon.typed_by.node_count() != 3 {
            fails.push(format!("phase functions: T+ has {} types", canon.typed_by.node_count()));
        }
        if canon.rewrite.object.node_count() != 5 {
            fails.push(format!("phase functions: G+ has {} nodes", canon.rewrite.object.node_count()));
        }
        Ok(fails)
    })();
    match res {
        Ok(f) => failures.extend(f),
        Err(e) => failures.push(format!("phase functions: {e}")),
    }

    let mut canonical = ex.hierarchy.clone();
    match run(&mut canonical, &ex, Direction::Forward, None) {
        Ok(_) => {
            let t = canonical.object("T").unwrap();
            let g = canonical.object("G").unwrap();
            failures_if(&mut failures, !(t.node_count() == 3), format!("canonical T+ has {} types, expected 3", t.node_count()));
            failures_if(&mut failures, !(g.node_count() == 5), format!("canonical G+ has {} nodes, expected 5", g.node_count()));
            let h = canonical.typing("G", "T").unwrap();
            failures_if(&mut failures, h.apply(&"s1".into()) == h.apply(&"s2".into()), "canonical phase gave the squares one type".into());
            check_golden("forward_canonical.json", &canonical, &mut failures);
        }
        Err(e) => failures.push(format!("canonical route: {e}")),
    }

    let mut cleaned = ex.hierarchy.clone();
    match run(&mut cleaned, &ex, Direction::Forward, Some(&forward_rel("square"))) {
        Ok(out) => {
            let t = cleaned.object("T").unwrap();
            failures_if(&mut failures, out.cleanups.len() != 1, format!("{} clean-ups ran, expected 1", out.cleanups.len()));
            failures_if(&mut failures, t.node_count() != 2, format!("T after clean-up has {} types, expected 2", t.node_count()));
            let h = cleaned.typing("G", "T").unwrap();
            failures_if(&mut failures, h.apply(&"s1".into()) != h.apply(&"s2".into()), "clean-up left the squares apart".into());
            check_golden("forward_cleanup.json", &cleaned, &mut failures);
        }
        Err(e) => failures.push(format!("clean-up route: {e}")),
    }

    let sq = fixtures::forward_example(true);
    let mut direct = sq.hierarchy.clone();
    let mut variant = sq.hierarchy.clone();
    let direct_run = run(&mut direct, &sq, Direction::Forward, Some(&forward_rel("square")));
    let variant_run = (|| {
        let mut plan = PropagationPlan::canonical(&variant, "G", sq.rule.right(), &sq.instance, Direction::Forward)?;
        plan.factorizations = Factorizations::Forward([("T".to_string(), fixtures::forward_square_factorization(&sq))].into());
        let rp = apply_relation(&variant, plan, &forward_rel("square"), &BTreeSet::from(["T".to_string()]))?;
        propagate_with_relation(&mut variant, &rp)
    })();
    match (direct_run, variant_run) {
        (Ok(d), Ok(v)) => {
            failures_if(&mut failures, !d.cleanups.is_empty(), "the all-strict route needed a clean-up".into());
            failures_if(&mut failures, v.cleanups.len() != 1, format!("strict variant ran {} clean-ups, expected 1", v.cleanups.len()));
            let (hd, hv) = (direct.typing("G", "T").unwrap(), variant.typing("G", "T").unwrap());
            failures_if(&mut failures, !typed_isomorphic(&hd, &hv), "strict variant and direct route differ".into());
            failures_if(&mut failures, direct.object("T").unwrap().node_count() != 2, "direct route T does not have 2 types".into());
            check_golden("forward_strict_direct.json", &direct, &mut failures);
            check_golden("forward_strict_variant.json", &variant, &mut failures);
        }
        (d, v) => {
            if let Err(e) = d {
                failures.push(format!("direct route: {e}"));
            }
            if let Err(e) = v {
                failures.push(format!("strict variant: {e}"));
            }
        }
    }
    Outcome::new(&failures, "canonical T+ = 3 types, G+ = 5 nodes, clean-up T = 2 types, strict variant ≅ direct".into())
}

fn failures_if(failures: &mut Vec<String>, bad: bool, what: String) {
    if bad {
        failures.push(what);
    }
}

/// The delete-and-refine example: strict refinement, canonical deletion,
/// and the partial refinement repaired by clean-up.
pub fn backward_golden() -> Outcome {
    let mut failures = Vec::new();
    let ex = fixtures::backward_example(false);
    let phases = (|| -> hiergraph::Result<Vec<String>> {
        let mut fails = Vec::new();
        let h = ex.typing("G", "T");
        let res = restriction_pullback(&h, &ex.instance)?;
        let fact = fixtures::backward_refinement(&ex, res.graph.clone());
        let strict = backward_strict(&h, &ex.instance, &res, &fact)?;
        let t1 = strict.graph();
        let colours: BTreeSet<String> = t1.nodes().map(|(_, a)| format!("{a:?}")).collect();
        if t1.node_count() != 3 || colours.len() != 3 {
            fails.push(format!("T' has {} types, expected circle, white square and black square", t1.node_count()));
        }
        let (q1, q2) = (strict.typing.apply(&"q1".into()), strict.typing.apply(&"q2".into()));
        if q1 == q2 || q1 != strict.instance().apply(&"sw".into()) || q2 != strict.instance().apply(&"sb".into()) {
            fails.push("the two squares of G are not retyped as white and black".into());
        }
        let canon = backward_canonical(&strict, &fact.pre)?;
        if canon.rewrite.object.node_count() != 2 {
            fails.push(format!("G- has {} nodes, expected 2", canon.rewrite.object.node_count()));
        }
        if canon.types.object.node_count() != 2 {
            fails.push(format!("T- has {} types, expected 2", canon.types.object.node_count()));
        }
        Ok(fails)
    })();
    match phases {
        Ok(f) => failures.extend(f),
        Err(e) => failures.push(format!("phase functions: {e}")),
    }

    let mut refined = ex.hierarchy.clone();
    match run(&mut refined, &ex, Direction::Backward, Some(&fixtures::backward_refinement_relation())) {
        Ok(out) => {
            failures_if(&mut failures, !out.cleanups.is_empty(), "full refinement needed a clean-up".into());
            failures_if(&mut failures, refined.object("G").unwrap().node_count() != 2, "refined G does not have 2 nodes".into());
            check_golden("backward_refinement.json", &refined, &mut failures);
        }
        Err(e) => failures.push(format!("refinement route: {e}")),
    }

    let partial = fixtures::backward_example(true);
    let explicit = (|| -> hiergraph::Result<Homomorphism> {
        let h = partial.typing("G", "T");
        let res = restriction_pullback(&h, &partial.instance)?;
        let fact = BackwardFactorization::canonical(partial.rule.left(), &res);
        let strict = backward_strict(&h, &partial.instance, &res, &fact)?;
        let canon = backward_canonical(&strict, &fact.pre)?;
        let lift = lift_rule(&res, &fact, &strict, &canon.types)?;
        let lg = lift.rule.object.clone();
        let drop: BTreeSet<NodeId> = ["q1⋈sb", "q2⋈sw"].into_iter().map(NodeId::from).collect();
        let kept: Vec<NodeId> = lg.node_ids().filter(|n| !drop.contains(*n)).cloned().collect();
        let keep = Homomorphism::inclusion(lg.induced(&kept), lg.clone())?;
        let cleanup = backward_cleanup(&lift.rewrite.from_interface, &keep, &lift.typing)?;
        Ok(cleanup.typing)
    })();
    let mut via_relation = partial.hierarchy.clone();
    let relation_run = run(&mut via_relation, &partial, Direction::Backward, Some(&fixtures::backward_refinement_relation()));
    match (explicit, relation_run) {
        (Ok(typing), Ok(out)) => {
            failures_if(&mut failures, out.cleanups.len() != 1, format!("partial refinement ran {} clean-ups, expected 1", out.cleanups.len()));
            let h = via_relation.typing("G", "T").unwrap();
            failures_if(&mut failures, h.source().node_count() != 4, format!("partial G has {} nodes, expected 4", h.source().node_count()));
            failures_if(&mut failures, !typed_isomorphic(&typing, &h), "relation route differs from the explicit clean-up".into());
            check_golden("backward_partial.json", &via_relation, &mut failures);
        }
        (e, r) => {
            if let Err(e) = e {
                failures.push(format!("explicit clean-up: {e}"));
            }
            if let Err(e) = r {
                failures.push(format!("relation route: {e}"));
            }
        }
    }
    Outcome::new(&failures, "T' = {circle, white square, black square}, G- = 2 nodes, partial refinement + clean-up matches".into())
}

/// Equivalence of the alternative constructions on random single arrows.
#[derive(Clone, Debug)]
pub struct Equivalences {
    pub projection: Outcome,
    pub lifting: Outcome,
    pub phased: Outcome,
}

pub fn equivalences(instances: usize, seed: u64) -> Equivalences {
    let mut rng = random::rng(seed);
    let (mut proj, mut lift, mut phased) = (Vec::new(), Vec::new(), Vec::new());
    let mut strict_nodes = 0;
    for i in 0..instances {
        let a = random::forward_arrow(&mut rng);
        let res = (|| -> hiergraph::Result<(bool, bool)> {
            let typing = a.typing.after(&a.instance)?;
            let fact = derive_forward_factorization(&a.rule, &typing, &a.forward)?;
            strict_nodes += fact.mid.node_count() - a.rule.source().node_count();
            let strict = forward_strict(&a.typing, &a.instance, &fact)?;
            let canon = forward_canonical(&strict, &fact.post)?;
            let via = forward_via_projection(&strict, &fact.post)?;
            let same_g = *canon.rewrite.object == *via.rewrite.object;
            let projection_ok = same_g
                && iso_under(
                    &canon.typed_by,
                    &via.types.typed_by,
                    &[(&canon.type_trace, &via.types.type_trace), (&canon.typing, &via.typing)],
                )
                .is_some();
            let direct = pushout(&a.instance, &a.rule)?;
            let trace = canon.rewrite.from_left.after(&strict.trace)?;
            let phased_ok = iso_under(&direct.object, &canon.rewrite.object, &[(&direct.from_left, &trace), (&direct.from_right, &canon.rewrite.from_right)]).is_some();
            Ok((projection_ok, phased_ok))
        })();
        match res {
            Ok((p, q)) => {
                if !p {
                    proj.push(format!("forward #{i}"));
                }
                if !q {
                    phased.push(format!("forward #{i}"));
                }
            }
            Err(e) => proj.push(format!("forward #{i}: {e}")),
        }

        let b = random::backward_arrow(&mut rng);
        let res = (|| -> hiergraph::Result<(bool, bool)> {
            let r = restriction_pullback(&b.typing, &b.instance)?;
            let fact = derive_backward_factorization(&b.rule, &r, &b.backward)?;
            let strict = backward_strict(&b.typing, &b.instance, &r, &fact)?;
            let canon = backward_canonical(&strict, &fact.pre)?;
            let lifted = lift_rule(&r, &fact, &strict, &canon.types)?;
            let direct = final_pbc(&b.rule, &b.instance)?;
            let trace = strict.trace().after(&canon.types.to_host)?;
            let phased_ok = iso_under(&direct.object, &canon.types.object, &[(&direct.from_interface, &canon.types.from_interface)])
                .is_some_and(|phi| direct.to_host.map().iter().all(|(d, t)| trace.get(&phi[d]) == Some(t)));
            Ok((same_typing(&canon.rewrite.to_left, &canon.rewrite.to_right, &lifted.rewrite.to_host, &lifted.typing), phased_ok))
        })();
        match res {
            Ok((l, q)) => {
                if !l {
                    lift.push(format!("backward #{i}"));
                }
                if !q {
                    phased.push(format!("backward #{i}"));
                }
            }
            Err(e) => lift.push(format!("backward #{i}: {e}")),
        }
    }
    Equivalences {
        projection: Outcome::new(&proj, format!("{instances} forward instances, {strict_nodes} strict additions")),
        lifting: Outcome::new(&lift, format!("{instances} backward instances")),
        phased: Outcome::new(&phased, format!("{instances} instances per direction")),
    }
}

/// Whether `(trace_a, typing_a)` and `(trace_b, typing_b)`, two arrows out
/// of objects with the same traces to `G` and typings to `T⁻`, agree up
/// to an isomorphism of their sources.
fn same_typing(trace_a: &Homomorphism, typing_a: &Homomorphism, trace_b: &Homomorphism, typing_b: &Homomorphism) -> bool {
    let compatible = |x: &NodeId, y: &NodeId| trace_a.apply(x) == trace_b.apply(y) && typing_a.apply(x) == typing_b.apply(y);
    !isomorphisms(trace_a.source(), trace_b.source(), &compatible).is_empty()
}

/// Statistics of the random hierarchy runs.
#[derive(Clone, Debug, Default)]
pub struct HierarchyRuns {
    pub hierarchies: usize,
    pub diamonds: usize,
    pub rewrites: usize,
    pub updates: usize,
    pub cleanups: usize,
    pub rejected: Vec<String>,
    pub invalid: Vec<String>,
}

fn has_diamond(h: &Hierarchy) -> bool {
    h.names().any(|a| h.names().any(|b| a != b && h.successors(a).iter().filter(|s| **s == *b || h.descendants(s).contains(b)).count() >= 2))
}

/// Propagates random consistent rewrites in both directions through
/// random valid hierarchies, checking validity after every update.
pub fn hierarchy_runs(hierarchies: usize, seed: u64) -> HierarchyRuns {
    let mut rng = random::rng(seed);
    let mut out = HierarchyRuns { hierarchies, ..HierarchyRuns::default() };
    for i in 0..hierarchies {
        let h0 = random::random_hierarchy(&mut rng, HierarchyShape::default());
        if has_diamond(&h0) {
            out.diamonds += 1;
        }
        for dir in [Direction::Forward, Direction::Backward] {
            let rw = match dir {
                Direction::Forward => random::random_forward_rewrite(&mut rng, &h0),
                Direction::Backward => random::random_backward_rewrite(&mut rng, &h0),
            };
            out.rewrites += 1;
            let tag = format!("hierarchy #{i} {dir} at {}", rw.origin);
            let rp = match build_plan(&h0, &rw.origin, &rw.rule, &rw.instance, dir, None, Some(&rw.relation)) {
                Ok(rp) => rp,
                Err(e) => {
                    out.rejected.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            match check_composability(&h0, &rp.plan) {
                Ok(v) if v.is_empty() => {}
                Ok(v) => {
                    out.rejected.push(format!("{tag}: {}", v[0]));
                    continue;
                }
                Err(e) => {
                    out.rejected.push(format!("{tag}: {e}"));
                    continue;
                }
            }
            let mut h = h0.clone();
            let mut invalid = Vec::new();
            let mut updates = 0;
            let mut observer = |h: &Hierarchy, n: &str| {
                updates += 1;
                if let Some(v) = h.validate().first() {
                    invalid.push(format!("{tag}, after updating {n}: {v}"));
                }
            };
            match propagate_with_relation_observed(&mut h, &rp, &mut observer) {
                Ok(r) => out.cleanups += r.cleanups.len(),
                Err(e) => invalid.push(format!("{tag}: {e}")),
            }
            out.updates += updates;
            if let Some(v) = h.validate().first() {
                invalid.push(format!("{tag}, at the end: {v}"));
            }
            out.invalid.extend(invalid);
        }
    }
    out
}

/// Validity on random hierarchies plus the set and diamond examples.
pub fn hierarchy_validity(runs: &HierarchyRuns) -> Outcome {
    let mut failures = runs.invalid.clone();
    if runs.diamonds == 0 {
        failures.push("no hierarchy had a diamond".into());
    }
    for (name, ex, rel, dir, waves) in [
        ("set_example.json", fixtures::set_example(), fixtures::set_relation(), Direction::Forward, vec![vec!["n1", "n2"], vec!["n0"]]),
        ("diamond_example.json", fixtures::diamond_example(), fixtures::diamond_relation(), Direction::Backward, vec![vec!["G1", "G2"], vec!["G0"]]),
    ] {
        let mut h = ex.hierarchy.clone();
        match run(&mut h, &ex, dir, Some(&rel)) {
            Ok(out) => {
                let got: Vec<Vec<&str>> = out.rewrite.waves.iter().map(|w| w.iter().map(String::as_str).collect()).collect();
                if got != waves {
                    failures.push(format!("{name}: waves {got:?}, expected {waves:?}"));
                }
                if !h.validate().is_empty() {
                    failures.push(format!("{name}: result is invalid"));
                }
                check_golden(name, &h, &mut failures);
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    Outcome::new(
        &failures,
        format!(
            "{} hierarchies ({} with diamonds), {} rewrites, {} object updates, {} clean-ups; set and diamond examples",
            runs.hierarchies, runs.diamonds, runs.rewrites, runs.updates, runs.cleanups
        ),
    )
}

/// The chain counterexample is rejected at its connector and
/// no consistent random plan is.
pub fn composability(runs: &HierarchyRuns) -> Outcome {
    let mut failures = runs.rejected.clone();
    let ex = fixtures::chain_example();
    let named = (|| -> hiergraph::Result<Vec<ComposabilityViolation>> {
        let mut plan = PropagationPlan::canonical(&ex.hierarchy, "G0", ex.rule.right(), &ex.instance, Direction::Forward)?;
        plan.factorizations = Factorizations::Forward(fixtures::chain_factorizations(&ex));
        check_composability(&ex.hierarchy, &plan)
    })();
    match named {
        Ok(v) => {
            let hit = v.iter().any(|x| matches!(x, ComposabilityViolation::Connector { from, to, .. } if from == "G1" && to == "G2"));
            if !hit {
                failures.push(format!("chain counterexample not rejected at G1 -> G2: {v:?}"));
            }
        }
        Err(e) => failures.push(format!("chain counterexample: {e}")),
    }
    Outcome::new(&failures, format!("chain rejected at CONNECTOR G1 -> G2; {} consistent plans accepted", runs.rewrites - runs.rejected.len()))
}
