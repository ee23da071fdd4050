use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::action::{sortedness, CompositeAction};
use super::encode::{action_builtins, state_to_term, term_to_state};
use super::explain::{explain_run, ExplanationStep};
use super::state::WorldState;
use super::RobotError;
use crate::logic::{evaluate, parse_program, Builtins, DatalogProgram, Outcome, Term, DEFAULT_STACK_LIMIT};

pub const MERGER_RULES: &str = "\
merger(A,B):-parse_exprs(A,C),merger_1(C,B).
merger_1(A,B):-compare_nums(A,C),merger_1(C,B).
merger_1(A,B):-compare_nums(A,C),drop_bag_remaining(C,B).
";

pub const SORTER_RULES: &str = "\
sorter(A,B):-merger(A,C),sorter(C,B).
sorter(A,B):-recycle_memory(A,C),sorter(C,B).
sorter(A,B):-single_expr(A,C),single_expr(C,B).
";

pub const FLAT_SORTER_RULES: &str = "\
sorter(A,B):-parse_exprs(A,C),sorter(C,B).
sorter(A,B):-compare_nums(A,C),sorter(C,B).
sorter(A,B):-drop_bag_remaining(A,C),sorter(C,B).
sorter(A,B):-recycle_memory(A,C),sorter(C,B).
sorter(A,B):-single_expr(A,C),single_expr(C,B).
";

/// Tolerance when checking that sortedness never drops.
pub const SORTEDNESS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub action: CompositeAction,
    pub before: WorldState,
    pub after: WorldState,
}

#[derive(Debug, Clone)]
pub struct Run {
    pub final_state: WorldState,
    pub log: Vec<ActionRecord>,
    pub explanation: Vec<ExplanationStep>,
}

impl Run {
    /// Pairs `(left, right)` compared by each `compare_nums`, in order.
    pub fn comparisons(&self) -> Vec<(i64, i64)> {
        self.log
            .iter()
            .filter(|r| r.action == CompositeAction::CompareNums)
            .map(|r| (r.before.left_bag[0], r.before.right_bag[0]))
            .collect()
    }
}

/// Checks that sortedness never decreases along consecutive logged states.
pub fn check_constraint(log: &[ActionRecord]) -> Result<(), RobotError> {
    for (step, rec) in log.iter().enumerate() {
        let (Ok(a), Ok(b)) = (sortedness(&rec.before), sortedness(&rec.after)) else {
            continue;
        };
        if b < a - SORTEDNESS_TOLERANCE {
            return Err(RobotError::ConstraintViolation {
                step,
                before: a,
                after: b,
            });
        }
    }
    Ok(())
}

/// Runs `predicate/2` of `program` from `start`, with the five composite
/// actions (plus `extra`) available as built-ins.
pub fn run_predicate(
    program: &DatalogProgram,
    predicate: &str,
    start: &WorldState,
    extra: Option<&Builtins>,
    limit: usize,
) -> Result<Run, RobotError> {
    let builtins = match extra {
        Some(b) => b.clone(),
        None => action_builtins(),
    };
    let query = Term::compound(predicate, vec![state_to_term(start), Term::var("Out")]);
    let ev = evaluate(program, &query, limit, &builtins)?;
    let out = match ev.outcome {
        Outcome::Answer(b) => b["Out"].clone(),
        Outcome::NoAnswer => return Err(RobotError::NoDerivation(query.to_string())),
        Outcome::BoundReached => return Err(RobotError::BoundReached(limit)),
    };
    let mut log = Vec::new();
    for call in &ev.derivation {
        let Some(action) = CompositeAction::from_name(&call.symbol) else {
            continue;
        };
        log.push(ActionRecord {
            action,
            before: term_to_state(&call.solved.args()[0])?,
            after: term_to_state(&call.solved.args()[1])?,
        });
    }
    check_constraint(&log)?;
    let final_state = term_to_state(&out)?;
    let explanation = explain_run(&log, &BTreeMap::new());
    Ok(Run {
        final_state,
        log,
        explanation,
    })
}

/// Parses `rules` and runs the predicate heading its first clause.
pub fn run_program(rules: &str, start: &WorldState) -> Result<Run, RobotError> {
    let program = parse_program(rules)?;
    let (pred, _) = program
        .clauses()
        .first()
        .and_then(|c| c.head.predicate())
        .ok_or_else(|| RobotError::NoDerivation("empty program".into()))?;
    let pred = pred.to_string();
    run_predicate(&program, &pred, start, None, DEFAULT_STACK_LIMIT)
}

/// Merges the two leftmost expressions with the standard merger.
pub fn run_merge(start: &WorldState) -> Result<Run, RobotError> {
    run_program(MERGER_RULES, start)
}

/// Sorts all expressions with the merger-based sorter.
pub fn run_sort(start: &WorldState) -> Result<Run, RobotError> {
    let mut values = start.flatten();
    values.sort_unstable();
    if let Some(w) = values.windows(2).find(|w| w[0] == w[1]) {
        return Err(RobotError::DuplicateValue(w[0]));
    }
    let program = parse_program(&format!("{SORTER_RULES}{MERGER_RULES}"))?;
    run_predicate(
        &program,
        "sorter",
        start,
        None,
        DEFAULT_STACK_LIMIT.max(start_limit(start)),
    )
}

fn start_limit(s: &WorldState) -> usize {
    let n = s.flatten().len();
    64 * (n + 1) * (n + 1)
}
