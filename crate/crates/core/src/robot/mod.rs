//! The sorting robot: states, composite actions and rule-driven runs.

mod action;
mod encode;
mod explain;
mod run;
mod state;

pub use action::{apply_action, sortedness, CompositeAction};
pub use encode::{action_builtins, expr_to_term, register_action, state_to_term, term_to_expr, term_to_state};
pub use explain::{error_highlight, explain_feedback, explain_run, ExplanationStep, StepKind};
pub use run::{
    check_constraint, run_merge, run_predicate, run_program, run_sort, ActionRecord, Run, FLAT_SORTER_RULES,
    MERGER_RULES, SORTEDNESS_TOLERANCE, SORTER_RULES,
};
pub use state::{parse_lt_expr, LtExpr, WorldState};

use crate::logic::LogicError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RobotError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("expression not increasing: {0} is followed by {1}")]
    NotIncreasing(i64, i64),
    #[error("{action} not applicable: {reason}")]
    NotApplicable { action: CompositeAction, reason: String },
    #[error("unknown action {0}")]
    UnknownAction(String),
    #[error("sortedness needs at least two integers, state has {0}")]
    DegenerateState(usize),
    #[error("term does not encode a world state: {0}")]
    Encoding(String),
    #[error("sortedness dropped from {before} to {after} at step {step}")]
    ConstraintViolation { step: usize, before: f64, after: f64 },
    #[error("value {0} occurs twice; a sorted expression cannot hold it")]
    DuplicateValue(i64),
    #[error("no derivation for {0}")]
    NoDerivation(String),
    #[error("stack bound {0} reached before the run finished")]
    BoundReached(usize),
    #[error(transparent)]
    Logic(#[from] LogicError),
}
