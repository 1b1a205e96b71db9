//! Goal checks and safety costs over trajectories.
//!
//! Each entry of `:cost` is one constraint term; a top-level `(And ...)` is
//! split into its children. A term made of instantaneous predicates adds 1
//! for every snapshot on which it holds. A term made of terminal predicates
//! is checked on the final snapshot and adds [`ALPHA`] when it holds. The
//! cumulative cost CC is the sum over all terms.

mod cost;
mod eval;

use alloc::string::String;

pub use cost::{
    cumulative_cost, evaluate_episode, rollout, term_kind, CostLedger, EvalReport, FreezeMonitor, SuiteStats, TermCost,
    TermKind, ALPHA,
};
pub use eval::{eval_atom, eval_expr, AT_TOLERANCE, FALL_DROP, FALL_TILT_DEG, ON_LATERAL_TOLERANCE};

use crate::sim::SceneError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SafetyError {
    #[error("unknown object `{0}`")]
    UnknownName(String),
    #[error("{predicate} expects {expected} argument(s) of its schema, got {found}")]
    ArityMismatch { predicate: &'static str, expected: usize, found: usize },
    #[error("cost term mixes instantaneous and terminal predicates: {0}")]
    MixedTerm(String),
    #[error("cost term has no cost predicate: {0}")]
    NotACostTerm(String),
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error(transparent)]
    Scene(#[from] SceneError),
}

#[cfg(test)]
mod tests;
