//! Sesqui-pushout rewriting of attributed simple directed graphs, and
//! propagation of rewrites through hierarchies of typed graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`attr_graph`]: graphs with set-valued attributes, homomorphisms,
//!   primitive edits and isomorphism search.
//! - [`category`]: pullbacks, pushouts, final pullback complements and image
//!   factorizations, plus brute-force checkers for their universal properties.
//! - [`rules`]: span rules, matching and the sesqui-pushout rewrite step.
//! - [`hierarchy`]: DAGs of graphs connected by typing homomorphisms.
//! - [`propagation`]: forward (add/merge) and backward (clone/delete)
//!   propagation of a rewrite to the rest of a hierarchy.

pub mod attr_graph;
pub mod category;
mod error;
pub mod hierarchy;
pub mod propagation;
pub mod rules;

pub use attr_graph::{AttrSet, AttrValue, Edit, Element, Graph, Homomorphism, NodeId, NodeMap};
pub use error::{Error, Result};
pub use hierarchy::Hierarchy;
pub use rules::{MatchKind, Rule};
