use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::state::{LtExpr, WorldState};
use super::RobotError;
use crate::stats::{average_ranks, pearson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositeAction {
    ParseExprs,
    CompareNums,
    SingleExpr,
    DropBagRemaining,
    RecycleMemory,
}

impl CompositeAction {
    pub const ALL: [CompositeAction; 5] = [
        CompositeAction::ParseExprs,
        CompositeAction::CompareNums,
        CompositeAction::SingleExpr,
        CompositeAction::DropBagRemaining,
        CompositeAction::RecycleMemory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CompositeAction::ParseExprs => "parse_exprs",
            CompositeAction::CompareNums => "compare_nums",
            CompositeAction::SingleExpr => "single_expr",
            CompositeAction::DropBagRemaining => "drop_bag_remaining",
            CompositeAction::RecycleMemory => "recycle_memory",
        }
    }

    pub fn from_name(name: &str) -> Option<CompositeAction> {
        CompositeAction::ALL.into_iter().find(|a| a.name() == name)
    }
}

impl fmt::Display for CompositeAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompositeAction {
    type Err = RobotError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CompositeAction::from_name(s).ok_or_else(|| RobotError::UnknownAction(s.to_string()))
    }
}

fn not_applicable(action: CompositeAction, reason: &str) -> RobotError {
    RobotError::NotApplicable {
        action,
        reason: reason.to_string(),
    }
}

fn extend_memory(s: &mut WorldState, action: CompositeAction, values: &[i64]) -> Result<(), RobotError> {
    if s.memory.is_empty() {
        s.memory.push(LtExpr::open());
    }
    let last = s.memory.last_mut().expect("memory has a slot");
    let mut prev = last.values().last().copied();
    for &v in values {
        if prev.is_some_and(|p| p >= v) {
            return Err(not_applicable(action, "appending would break the increasing order"));
        }
        last.push(v);
        prev = Some(v);
    }
    Ok(())
}

/// Applies one composite action, returning the successor state.
pub fn apply_action(action: CompositeAction, s: &WorldState) -> Result<WorldState, RobotError> {
    let bags_empty = s.left_bag.is_empty() && s.right_bag.is_empty();
    let mut next = s.clone();
    match action {
        CompositeAction::ParseExprs => {
            if s.exprs.len() < 2 || !bags_empty {
                return Err(not_applicable(action, "needs two expressions and empty bags"));
            }
            let mut drained = next.exprs.drain(..2);
            next.left_bag = drained.next().expect("two exprs").values().to_vec();
            next.right_bag = drained.next().expect("two exprs").values().to_vec();
            drop(drained);
            next.memory.push(LtExpr::open());
        }
        CompositeAction::CompareNums => {
            if s.left_bag.is_empty() || s.right_bag.is_empty() {
                return Err(not_applicable(action, "needs both bags nonempty"));
            }
            let (l, r) = (s.left_bag[0], s.right_bag[0]);
            let smaller = if l <= r {
                next.left_bag.remove(0)
            } else {
                next.right_bag.remove(0)
            };
            extend_memory(&mut next, action, &[smaller])?;
            next.energy += 1;
        }
        CompositeAction::DropBagRemaining => {
            let rest = match (s.left_bag.is_empty(), s.right_bag.is_empty()) {
                (false, true) => std::mem::take(&mut next.left_bag),
                (true, false) => std::mem::take(&mut next.right_bag),
                _ => return Err(not_applicable(action, "needs exactly one empty bag")),
            };
            extend_memory(&mut next, action, &rest)?;
        }
        CompositeAction::RecycleMemory => {
            if !bags_empty || s.memory.is_empty() {
                return Err(not_applicable(action, "needs empty bags and nonempty memory"));
            }
            let mut exprs: Vec<LtExpr> = std::mem::take(&mut next.memory)
                .into_iter()
                .filter(|e| !e.is_empty())
                .collect();
            exprs.append(&mut next.exprs);
            next.exprs = exprs;
        }
        CompositeAction::SingleExpr => {
            if s.exprs.len() != 1 || !bags_empty || !s.memory.is_empty() {
                return Err(not_applicable(
                    action,
                    "needs exactly one expression and empty bags and memory",
                ));
            }
        }
    }
    Ok(next)
}

/// Spearman correlation between the flattened state and its ascending sort.
pub fn sortedness(s: &WorldState) -> Result<f64, RobotError> {
    let flat = s.flatten();
    if flat.len() < 2 {
        return Err(RobotError::DegenerateState(flat.len()));
    }
    let values: Vec<f64> = flat.iter().map(|&v| v as f64).collect();
    let positions: Vec<f64> = (1..=flat.len()).map(|i| i as f64).collect();
    Ok(pearson(&average_ranks(&values), &positions).unwrap_or(1.0))
}
