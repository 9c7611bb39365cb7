//! Propagation of rewrites through hierarchies.
//!
//! [`forward`] and [`backward`] hold the phases for a single typing arrow
//! `G → T`. [`plan`] describes a rewrite of one object together with a
//! factorization for every object it reaches, and checks that the
//! factorizations fit together; [`update`] then rewrites the hierarchy in
//! place. [`relation`] derives plans and clean-ups from relations.

pub mod backward;
pub mod forward;
pub mod plan;
pub mod relation;
pub mod update;

pub use backward::{
    backward_canonical, backward_cleanup, backward_strict, lift_rule, restriction_pullback, BackwardCanonical, BackwardCleanup,
    BackwardFactorization, BackwardStrict, Lifting, Restriction,
};
pub use forward::{
    forward_canonical, forward_cleanup, forward_strict, forward_via_projection, project_rule, ForwardCanonical, ForwardCleanup,
    ForwardFactorization, ForwardProjected, ForwardStrict, ProjectedRewrite, RuleProjection,
};
pub use plan::{
    check_composability, connector_arrows, rule_arrow, waves, ComposabilityViolation, Direction, FactorizationFile, Factorizations,
    PlanFile, PropagationPlan, resolve_connectors,
};
pub use relation::{
    apply_relation, backward_cleanup_rule, build_plan, derive_backward_factorization, derive_forward_factorization, forward_cleanup_rule,
    propagate_with_relation, propagate_with_relation_observed, BackwardRelation,
    CleanupRule, ControlledRewrite, ForwardRelation, Relation, RelationPlan,
};
pub use update::{
    propagate, propagate_backward, propagate_backward_observed, propagate_forward, propagate_forward_observed, propagate_observed, RewriteReport,
};
