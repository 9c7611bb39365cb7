//! Shared fixtures and random generators for the hiergraph test suites.

pub mod criteria;
pub mod fixtures;
pub mod random;

use hiergraph::{AttrSet, NodeId, NodeMap};

/// Node map from string pairs.
pub fn nm(pairs: &[(&str, &str)]) -> NodeMap {
    pairs.iter().map(|(a, b)| (NodeId::from(*a), NodeId::from(*b))).collect()
}

/// Attribute set from `(key, values)` pairs of strings.
pub fn attrs(pairs: &[(&str, &[&str])]) -> AttrSet {
    pairs.iter().fold(AttrSet::new(), |acc, (k, vs)| acc.with(k, vs.iter().copied()))
}
