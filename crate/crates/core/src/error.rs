use crate::attr_graph::NodeId;
use crate::hierarchy::CommutativityViolation;
use crate::propagation::ComposabilityViolation;
use thiserror::Error;

/// Errors raised by graph operations, constructions and propagation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("unknown edge `{0}` -> `{1}`")]
    UnknownEdge(NodeId, NodeId),
    #[error("node `{0}` already exists")]
    DuplicateNode(NodeId),
    #[error("edge `{0}` -> `{1}` already exists")]
    DuplicateEdge(NodeId, NodeId),
    #[error("invalid edit: {0}")]
    InvalidEdit(String),
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("arrows do not compose: {0}")]
    Mismatch(String),
    #[error("{0} must be a monomorphism")]
    NotMono(&'static str),
    #[error("{0} must be an epimorphism")]
    NotEpi(&'static str),
    #[error("no mediating morphism: {0}")]
    NoMediator(String),
    #[error("oracle exceeded its budget of {limit} test objects")]
    ResourceBound { limit: usize },
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("unknown graph `{0}` in hierarchy")]
    UnknownObject(String),
    #[error("graph `{0}` already exists in hierarchy")]
    DuplicateObject(String),
    #[error("typing `{0}` -> `{1}` already exists")]
    DuplicateTyping(String, String),
    #[error("typing `{0}` -> `{1}` would create a cycle")]
    Cycle(String, String),
    #[error("no path from `{0}` to `{1}`")]
    NoPath(String, String),
    #[error("hierarchy is not commutative: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    NotCommutative(Vec<CommutativityViolation>),
    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),
    #[error("factorization condition violated: {0}")]
    FactorizationViolated(String),
    #[error("`{instance}` is an instance of deleted element `{element}`")]
    InstanceOfDeletedElement { instance: NodeId, element: NodeId },
    #[error("plan is not composable: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    NotComposable(Vec<ComposabilityViolation>),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
