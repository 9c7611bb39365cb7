use hiergraph::attr_graph::{apply_edit, apply_edits, compose, is_isomorphic, validate_graph};
use hiergraph::{Edit, Homomorphism};
use hiergraph_testkit::random::{random_edits, random_extension, random_graph, random_typed, rng};
use proptest::prelude::*;
use std::sync::Arc;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn edits_keep_graphs_valid(seed in any::<u64>(), len in 0usize..8) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 5, "v");
        let edits = random_edits(&mut r, &g, len);
        let mut current = g.clone();
        for e in &edits {
            current = apply_edit(&current, e).unwrap();
            prop_assert!(validate_graph(&current).is_empty());
        }
        prop_assert_eq!(apply_edits(&g, &edits).unwrap(), current);
    }

    #[test]
    fn clone_then_merge_is_identity_up_to_iso(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 6, "v");
        prop_assume!(g.node_count() > 0);
        let n = g.node_ids().next().unwrap().clone();
        let cloned = apply_edit(&g, &Edit::CloneNode { id: n.clone(), new_id: "copy".into() }).unwrap();
        let merged = apply_edit(&cloned, &Edit::MergeNodes { ids: vec![n.clone(), "copy".into()], new_id: n }).unwrap();
        prop_assert!(is_isomorphic(&merged, &g));
    }

    #[test]
    fn composition_is_associative_with_units(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Arc::new(random_graph(&mut r, 4, "a"));
        let f = random_extension(&mut r, &a, false, 1, "b");
        let g = random_extension(&mut r, f.target(), false, 1, "c");
        let h = random_extension(&mut r, g.target(), false, 1, "d");
        let left = compose(&h, &compose(&g, &f).unwrap()).unwrap();
        let right = compose(&compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert!(left.hom_equal(&right));
        prop_assert!(compose(&Homomorphism::identity(f.target().clone()), &f).unwrap().hom_equal(&f));
        prop_assert!(compose(&f, &Homomorphism::identity(a.clone())).unwrap().hom_equal(&f));
    }

    #[test]
    fn composites_of_homomorphisms_are_homomorphisms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = Arc::new(random_graph(&mut r, 4, "c"));
        prop_assume!(c.node_count() > 0);
        let g = random_typed(&mut r, &c, 3, "b");
        let f = random_typed(&mut r, g.source(), 3, "a");
        prop_assert!(f.is_homomorphism() && g.is_homomorphism());
        prop_assert!(compose(&g, &f).unwrap().is_homomorphism());
    }
}
