use hiergraph::propagation::{
    build_plan, check_composability, derive_backward_factorization, derive_forward_factorization, propagate_with_relation,
    restriction_pullback, BackwardFactorization, BackwardRelation, Direction, ForwardFactorization, ForwardRelation,
    PlanFile, Relation,
};
use hiergraph::{Error, NodeId};
use hiergraph_testkit::criteria::{backward_golden, composability, forward_golden, hierarchy_runs, hierarchy_validity, typed_isomorphic};
use hiergraph_testkit::fixtures::*;
use hiergraph_testkit::nm;
use std::collections::BTreeSet;

#[test]
fn forward_merge_and_add() {
    let out = forward_golden();
    assert!(out.passed, "{}", out.detail);
}

#[test]
fn backward_delete_and_refine() {
    let out = backward_golden();
    assert!(out.passed, "{}", out.detail);
}

#[test]
fn set_and_diamond_orderings() {
    let out = hierarchy_validity(&hierarchy_runs(20, 11));
    assert!(out.passed, "{}", out.detail);
}

#[test]
fn chain_counterexample_is_rejected_at_its_connector() {
    let out = composability(&hierarchy_runs(0, 0));
    assert!(out.passed, "{}", out.detail);
    let ex = chain_example();
    let mut plan = hiergraph::propagation::PropagationPlan::canonical(&ex.hierarchy, "G0", ex.rule.right(), &ex.instance, Direction::Forward).unwrap();
    plan.factorizations = hiergraph::propagation::Factorizations::Forward(chain_factorizations(&ex));
    let v = check_composability(&ex.hierarchy, &plan).unwrap();
    assert_eq!(v.len(), 1);
    assert!(v[0].to_string().starts_with("CONNECTOR G1 -> G2"), "{}", v[0]);
    let mut h = ex.hierarchy.clone();
    assert!(matches!(hiergraph::propagation::propagate(&mut h, &plan), Err(Error::NotComposable(_))));
    assert_eq!(h, ex.hierarchy, "a rejected plan leaves the hierarchy untouched");
}

#[test]
fn postponing_everywhere_is_composable() {
    let ex = chain_example();
    let rel = Relation::Forward([("G1".to_string(), [("t".to_string(), BTreeSet::from([NodeId::from("n")]))].into())].into());
    let rp = build_plan(&ex.hierarchy, "G0", &ex.rule, &ex.instance, Direction::Forward, None, Some(&rel)).unwrap();
    assert!(check_composability(&ex.hierarchy, &rp.plan).unwrap().is_empty());
    let mut h = ex.hierarchy.clone();
    propagate_with_relation(&mut h, &rp).unwrap();
    assert_eq!(h.object("G1").unwrap().node_count(), 1);
    assert_eq!(h.object("G2").unwrap().node_count(), 1);
    assert_eq!(h.object("G0").unwrap().node_count(), 2);
}

#[test]
fn empty_relation_is_canonical() {
    let ex = forward_example(false);
    let typing = ex.typing("G", "T").after(&ex.instance).unwrap();
    let f = derive_forward_factorization(ex.rule.right(), &typing, &ForwardRelation::new()).unwrap();
    assert_eq!(f, ForwardFactorization::canonical(ex.rule.right(), &typing));
    let ex = backward_example(false);
    let res = restriction_pullback(&ex.typing("G", "T"), &ex.instance).unwrap();
    let f = derive_backward_factorization(ex.rule.left(), &res, &BackwardRelation::new()).unwrap();
    assert_eq!(f, BackwardFactorization::canonical(ex.rule.left(), &res));
}

#[test]
fn relating_to_an_existing_square_matches_the_strict_variant() {
    let ex = forward_example(true);
    let one = Relation::Forward([("T".to_string(), [("square".to_string(), BTreeSet::from([NodeId::from("s1")]))].into())].into());
    let mut via_relation = ex.hierarchy.clone();
    let rp = build_plan(&via_relation, "G", &ex.rule, &ex.instance, Direction::Forward, None, Some(&one)).unwrap();
    propagate_with_relation(&mut via_relation, &rp).unwrap();

    let f = forward_square_factorization(&ex);
    let file = PlanFile {
        factorizations: [(
            "T".to_string(),
            hiergraph::propagation::FactorizationFile {
                mid: (*f.mid).clone(),
                pre: f.pre.map().clone(),
                post: f.post.map().clone(),
                typing_or_retyping: f.typing.map().clone(),
            },
        )]
        .into(),
        ..PlanFile::default()
    };
    let mut explicit = ex.hierarchy.clone();
    let rp = build_plan(&explicit, "G", &ex.rule, &ex.instance, Direction::Forward, Some(&file), None).unwrap();
    propagate_with_relation(&mut explicit, &rp).unwrap();
    assert!(typed_isomorphic(&via_relation.typing("G", "T").unwrap(), &explicit.typing("G", "T").unwrap()));
    assert_eq!(explicit.object("T").unwrap().node_count(), 3);
}

#[test]
fn relating_an_instance_of_a_deleted_type_is_rejected() {
    let ex = backward_example(false);
    let rel = Relation::Backward([("G".to_string(), nm(&[("c1", "sw")]))].into());
    let err = build_plan(&ex.hierarchy, "T", &ex.rule, &ex.instance, Direction::Backward, None, Some(&rel)).unwrap_err();
    assert!(matches!(err, Error::InstanceOfDeletedElement { .. }), "{err}");
}
