use hiergraph::attr_graph::compose;
use hiergraph::Hierarchy;
use hiergraph_testkit::random::{random_hierarchy, rng, HierarchyShape};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn sources(h: &Hierarchy) -> Vec<String> {
    h.names().filter(|n| h.predecessors(n).is_empty()).cloned().collect()
}

fn sinks(h: &Hierarchy) -> Vec<String> {
    h.names().filter(|n| h.successors(n).is_empty()).cloned().collect()
}

/// Objects of `h` with the arrows among them.
fn induced(h: &Hierarchy, keep: &BTreeSet<String>) -> Hierarchy {
    let mut out = Hierarchy::new();
    for n in keep {
        out.add_object(n, h.object(n).unwrap().clone()).unwrap();
    }
    for (a, b) in h.arrows() {
        if keep.contains(a) && keep.contains(b) {
            out.add_typing(a, b, h.typing(a, b).unwrap().into_map()).unwrap();
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn random_hierarchies_are_valid(seed in any::<u64>()) {
        let h = random_hierarchy(&mut rng(seed), HierarchyShape::default());
        prop_assert!(h.validate().is_empty());
        prop_assert!(h.arrows().count() <= 8 && h.names().count() <= 6);
    }

    #[test]
    fn subgraphs_have_one_source_or_sink_and_are_maximal(seed in any::<u64>()) {
        let h = random_hierarchy(&mut rng(seed), HierarchyShape::default());
        for s in h.names() {
            let fwd = h.forward_subgraph(s).unwrap();
            prop_assert_eq!(sources(&fwd), vec![s.clone()]);
            let bwd = h.backward_subgraph(s).unwrap();
            prop_assert_eq!(sinks(&bwd), vec![s.clone()]);
            let fwd_names: BTreeSet<String> = fwd.names().cloned().collect();
            let bwd_names: BTreeSet<String> = bwd.names().cloned().collect();
            for n in h.names().filter(|n| !fwd_names.contains(*n)) {
                let adjacent = h.successors(n).iter().chain(h.predecessors(n).iter()).any(|x| fwd_names.contains(x));
                if adjacent {
                    let mut bigger = fwd_names.clone();
                    bigger.insert(n.clone());
                    prop_assert!(sources(&induced(&h, &bigger)) != vec![s.clone()], "{} could join forward({})", n, s);
                }
            }
            for n in h.names().filter(|n| !bwd_names.contains(*n)) {
                let adjacent = h.successors(n).iter().chain(h.predecessors(n).iter()).any(|x| bwd_names.contains(x));
                if adjacent {
                    let mut bigger = bwd_names.clone();
                    bigger.insert(n.clone());
                    prop_assert!(sinks(&induced(&h, &bigger)) != vec![s.clone()], "{} could join backward({})", n, s);
                }
            }
        }
    }

    #[test]
    fn composed_typings_compose(seed in any::<u64>()) {
        let h = random_hierarchy(&mut rng(seed), HierarchyShape::default());
        for a in h.names() {
            for b in h.descendants(a) {
                for c in h.descendants(&b) {
                    let direct = h.composed_typing(a, &c).unwrap();
                    let via = compose(&h.composed_typing(&b, &c).unwrap(), &h.composed_typing(a, &b).unwrap()).unwrap();
                    prop_assert!(direct.hom_equal(&via));
                }
            }
            prop_assert!(h.composed_typing(a, a).unwrap().hom_equal(&hiergraph::Homomorphism::identity(h.object(a).unwrap().clone())));
        }
    }

    #[test]
    fn json_round_trip_is_byte_exact(seed in any::<u64>()) {
        let h = random_hierarchy(&mut rng(seed), HierarchyShape::default());
        let text = serde_json::to_string(&h).unwrap();
        let back: Hierarchy = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
