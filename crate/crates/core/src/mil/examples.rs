//! Example sets for learning the merger and the sorter.

use super::{Background, Example, MilError, MilProblem};
use crate::logic::parse_program;
use crate::robot::{
    run_merge, run_sort, ActionRecord, CompositeAction, LtExpr, RobotError, Run, WorldState, MERGER_RULES,
};

/// Inputs for merging examples, as state lines.
pub const MERGE_INPUTS: [&str; 3] = [
    "2, 1 | 0 | | |",
    "4 < 6, 2 < 5, 1 < 3 | 0 | | |",
    "1 < 3 < 8, 2 < 9 | 0 | | |",
];

/// Inputs for sorting examples. The one-number input forces a base case
/// that succeeds without any merging.
pub const SORT_INPUTS: [&str; 3] = ["5 | 0 | | |", "2, 1 | 0 | | |", "4, 6, 5, 2, 3, 1 | 0 | | |"];

fn rebuild(shape: &WorldState, values: &[i64]) -> WorldState {
    let mut it = values.iter().copied();
    let mut take = |n: usize| -> Vec<i64> { it.by_ref().take(n).collect() };
    let memory = shape
        .memory
        .iter()
        .map(|e| LtExpr::from_values_unchecked(take(e.len())))
        .collect();
    let left_bag = take(shape.left_bag.len());
    let right_bag = take(shape.right_bag.len());
    let exprs = shape
        .exprs
        .iter()
        .map(|e| LtExpr::from_values_unchecked(take(e.len())))
        .collect();
    WorldState {
        exprs,
        energy: shape.energy,
        left_bag,
        right_bag,
        memory,
    }
}

fn well_formed(s: &WorldState) -> bool {
    s.exprs
        .iter()
        .chain(&s.memory)
        .all(|e| e.values().windows(2).all(|w| w[0] < w[1]))
}

/// A near miss for a positive example: the output with two integers swapped
/// (first such swap that keeps every expression increasing), or failing
/// that, an intermediate state of the oracle run.
pub fn negative_for(example: &Example, oracle_log: &[ActionRecord]) -> Option<Example> {
    let flat = example.output.flatten();
    for i in 0..flat.len() {
        for j in i + 1..flat.len() {
            let mut swapped = flat.clone();
            swapped.swap(i, j);
            let candidate = rebuild(&example.output, &swapped);
            if swapped != flat && well_formed(&candidate) {
                return Some(Example {
                    input: example.input.clone(),
                    output: candidate,
                });
            }
        }
    }
    let differs = |s: &WorldState| !s.same_layout(&example.output) && !s.same_layout(&example.input);
    oracle_log
        .iter()
        .find(|r| r.action == CompositeAction::RecycleMemory && differs(&r.after))
        .or_else(|| oracle_log.iter().find(|r| differs(&r.after)))
        .map(|r| Example {
            input: example.input.clone(),
            output: r.after.clone(),
        })
}

fn build(
    target: &str,
    background: Vec<Background>,
    max_clauses: usize,
    inputs: &[&str],
    oracle: fn(&WorldState) -> Result<Run, RobotError>,
) -> Result<MilProblem, MilError> {
    let mut problem = MilProblem::new(target, background, max_clauses);
    for line in inputs {
        let input = WorldState::parse_line(line)?;
        let run = oracle(&input)?;
        let example = Example {
            input,
            output: run.final_state.clone(),
        };
        if let Some(neg) = negative_for(&example, &run.log) {
            problem.negatives.push(neg);
        }
        problem.positives.push(example);
    }
    Ok(problem)
}

/// Merging examples over the five composite actions.
pub fn merge_problem(max_clauses: usize) -> Result<MilProblem, MilError> {
    build("merger", Background::actions(), max_clauses, &MERGE_INPUTS, run_merge)
}

/// Sorting examples, optionally with the standard merger as background.
pub fn sort_problem(with_merger: bool, max_clauses: usize) -> Result<MilProblem, MilError> {
    let mut background = Vec::new();
    if with_merger {
        background.push(Background::Defined {
            name: "merger".into(),
            program: parse_program(MERGER_RULES)?,
        });
    }
    background.extend(Background::actions());
    build("sorter", background, max_clauses, &SORT_INPUTS, run_sort)
}
