use hiergraph::propagation::{build_plan, propagate, propagate_with_relation, Direction, PropagationPlan};
use hiergraph::Hierarchy;
use hiergraph_testkit::criteria::{equivalences, hierarchy_json};
use hiergraph_testkit::random::{random_backward_rewrite, random_forward_rewrite, random_hierarchy, rng, HierarchyShape, RandomRewrite};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn rewrite(seed: u64, dir: Direction) -> (Hierarchy, RandomRewrite) {
    let mut r = rng(seed);
    let h = random_hierarchy(&mut r, HierarchyShape::default());
    let rw = match dir {
        Direction::Forward => random_forward_rewrite(&mut r, &h),
        Direction::Backward => random_backward_rewrite(&mut r, &h),
    };
    (h, rw)
}

fn scope(h: &Hierarchy, origin: &str, dir: Direction) -> BTreeSet<String> {
    let mut s = match dir {
        Direction::Forward => h.descendants(origin),
        Direction::Backward => h.ancestors(origin),
    };
    s.insert(origin.to_string());
    s
}

fn dir_strategy() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Forward), Just(Direction::Backward)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn only_the_reached_objects_change(seed in any::<u64>(), dir in dir_strategy()) {
        let (h0, rw) = rewrite(seed, dir);
        let plan = PropagationPlan::canonical(&h0, &rw.origin, &hiergraph::propagation::rule_arrow(&rw.rule, dir).unwrap(), &rw.instance, dir).unwrap();
        let mut h = h0.clone();
        let report = propagate(&mut h, &plan).unwrap();
        let reached = scope(&h0, &rw.origin, dir);
        let replaced: BTreeSet<String> = report.waves.iter().flatten().cloned().collect();
        prop_assert_eq!(&replaced, &reached);
        prop_assert_eq!(report.waves.last().unwrap(), &vec![rw.origin.clone()]);
        for (name, g) in h0.objects() {
            if !reached.contains(name) {
                prop_assert_eq!(h.object(name).unwrap(), g);
            }
        }
        for (a, b) in h0.arrows() {
            if !reached.contains(a) && !reached.contains(b) {
                prop_assert_eq!(h.typing(a, b), h0.typing(a, b));
            } else {
                prop_assert!(report.typings.contains_key(&(a.clone(), b.clone())), "{} -> {} not reported", a, b);
            }
        }
        prop_assert!(h.validate().is_empty());
    }

    #[test]
    fn propagation_is_deterministic(seed in any::<u64>(), dir in dir_strategy()) {
        let (h0, rw) = rewrite(seed, dir);
        let run = || {
            let mut h = h0.clone();
            let rp = build_plan(&h, &rw.origin, &rw.rule, &rw.instance, dir, None, Some(&rw.relation)).unwrap();
            let out = propagate_with_relation(&mut h, &rp).unwrap();
            (hierarchy_json(&h), serde_json::to_string(&out.rewrite).unwrap())
        };
        prop_assert_eq!(run(), run());
    }
}

#[test]
fn phased_constructions_agree_with_their_shortcuts() {
    let eq = equivalences(40, 5);
    for o in [eq.projection, eq.lifting, eq.phased] {
        assert!(o.passed, "{}", o.detail);
    }
}
