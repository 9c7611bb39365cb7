use hiergraph::attr_graph::{apply_edits, is_isomorphic, NodeMap};
use hiergraph::rules::{build_rule, find_matches, sqpo_rewrite};
use hiergraph::{Edit, Homomorphism, MatchKind, NodeId, Rule};
use hiergraph_testkit::random::{random_edits, random_graph, random_induced, rng};
use proptest::prelude::*;
use rand::Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

fn injective_maps(from: &[NodeId], to: &[NodeId]) -> Vec<NodeMap> {
    fn go(from: &[NodeId], to: &[NodeId], used: &mut Vec<bool>, cur: &mut NodeMap, out: &mut Vec<NodeMap>) {
        let Some((first, rest)) = from.split_first() else {
            out.push(cur.clone());
            return;
        };
        for (i, t) in to.iter().enumerate() {
            if !used[i] {
                used[i] = true;
                cur.insert(first.clone(), t.clone());
                go(rest, to, used, cur, out);
                cur.remove(first);
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(from, to, &mut vec![false; to.len()], &mut NodeMap::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn built_rules_replay_their_edits(seed in any::<u64>(), len in 0usize..=4) {
        let mut r = rng(seed);
        let pattern = Arc::new(random_graph(&mut r, 5, "v"));
        let edits = random_edits(&mut r, &pattern, len);
        let rule = build_rule(&pattern, &edits).unwrap();
        let out = sqpo_rewrite(&rule, &Homomorphism::identity(pattern.clone())).unwrap();
        let expected = apply_edits(&pattern, &edits).unwrap();
        prop_assert!(is_isomorphic(&out.output, &expected), "edits {:?}", edits);
    }

    #[test]
    fn matches_agree_with_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let host = Arc::new(random_graph(&mut r, 5, "h"));
        let pattern = if r.random_bool(0.5) {
            random_induced(&mut r, &host, 0.5).source().clone()
        } else {
            Arc::new(random_graph(&mut r, 3, "p"))
        };
        let rule = Rule::identity(pattern.clone());
        let found: Vec<NodeMap> = find_matches(&rule, &host, MatchKind::Restrictive, &NodeMap::new()).into_iter().map(|m| m.into_map()).collect();
        let unique: BTreeSet<&NodeMap> = found.iter().collect();
        prop_assert_eq!(unique.len(), found.len());
        let pn: Vec<NodeId> = pattern.node_ids().cloned().collect();
        let hn: Vec<NodeId> = host.node_ids().cloned().collect();
        let brute: BTreeSet<NodeMap> = injective_maps(&pn, &hn)
            .into_iter()
            .filter(|m| Homomorphism::new(pattern.clone(), host.clone(), m.clone()).is_ok())
            .collect();
        prop_assert_eq!(found.iter().cloned().collect::<BTreeSet<_>>(), brute);
    }

    #[test]
    fn mono_rules_have_no_side_effects(seed in any::<u64>(), len in 0usize..=4) {
        let mut r = rng(seed);
        let host = Arc::new(random_graph(&mut r, 5, "h"));
        let m = random_induced(&mut r, &host, 0.6);
        let edits: Vec<Edit> = random_edits(&mut r, m.source(), len)
            .into_iter()
            .take_while(|e| matches!(e, Edit::AddNode { .. } | Edit::AddEdge { .. } | Edit::DeleteEdge { .. } | Edit::AddAttrs { .. }))
            .collect();
        let rule = build_rule(m.source(), &edits).unwrap();
        prop_assert!(rule.left().is_mono() && rule.right().is_mono());
        let out = sqpo_rewrite(&rule, &m).unwrap();
        prop_assert_eq!(out.mid.node_count(), host.node_count());
        let lost = rule.lhs().edge_count() - rule.interface().edge_count();
        prop_assert_eq!(host.edge_count() - out.mid.edge_count(), lost);
    }
}
