//! Text format for learning problems.
//!
//! ```text
//! target: merger
//! max_clauses: 3
//! background: parse_exprs, compare_nums, drop_bag_remaining
//! pos: 2, 1 | 0 | | | -> | 1 | | | 1 < 2
//! neg: 2, 1 | 0 | | | -> | 0 | | | 2
//! ```
//!
//! Optional keys: `invented`, `budget_seconds`, `budget_candidates`,
//! `meta_rules`. The background name `merger` stands for the standard
//! merger rules.

use std::time::Duration;

use super::{Background, Example, MetaRule, MilError, MilProblem};
use crate::logic::parse_program;
use crate::robot::{CompositeAction, WorldState, MERGER_RULES};

fn invalid(line: usize, msg: impl std::fmt::Display) -> MilError {
    MilError::InvalidProblem(format!("line {line}: {msg}"))
}

fn background(name: &str, line: usize) -> Result<Background, MilError> {
    if let Some(a) = CompositeAction::from_name(name) {
        return Ok(Background::Action(a));
    }
    if name == "merger" {
        return Ok(Background::Defined {
            name: name.into(),
            program: parse_program(MERGER_RULES)?,
        });
    }
    Err(invalid(line, format!("unknown background predicate {name}")))
}

fn example(text: &str, line: usize) -> Result<Example, MilError> {
    let (a, b) = text
        .split_once("->")
        .ok_or_else(|| invalid(line, "expected `input -> output`"))?;
    let state = |s: &str| WorldState::parse_line(s).map_err(|e| invalid(line, e));
    Ok(Example {
        input: state(a)?,
        output: state(b)?,
    })
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

pub fn parse_problem(text: &str) -> Result<MilProblem, MilError> {
    let mut target = None;
    let mut max_clauses = None;
    let mut bg = Vec::new();
    let mut invented = None;
    let mut rules = None;
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    let mut budget = super::Budget::default();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| invalid(n, "expected `key: value`"))?;
        let value = value.trim();
        let number = |v: &str| v.parse::<u64>().map_err(|_| invalid(n, format!("bad number {v:?}")));
        match key.trim() {
            "target" => target = Some(value.to_string()),
            "max_clauses" => max_clauses = Some(number(value)? as usize),
            "background" => {
                for name in list(value) {
                    bg.push(background(name, n)?);
                }
            }
            "invented" => invented = Some(list(value).map(String::from).collect::<Vec<_>>()),
            "meta_rules" => {
                rules = Some(
                    list(value)
                        .map(|r| match r {
                            "chain" | "Chain" => Ok(MetaRule::Chain),
                            "tailrec" | "Tailrec" => Ok(MetaRule::Tailrec),
                            other => Err(invalid(n, format!("unknown meta-rule {other}"))),
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
            "budget_seconds" => budget.time = Duration::from_secs(number(value)?),
            "budget_candidates" => budget.candidates = number(value)?,
            "pos" => positives.push(example(value, n)?),
            "neg" => negatives.push(example(value, n)?),
            other => return Err(invalid(n, format!("unknown key {other}"))),
        }
    }
    let target = target.ok_or_else(|| MilError::InvalidProblem("missing target".into()))?;
    let max_clauses = max_clauses.ok_or_else(|| MilError::InvalidProblem("missing max_clauses".into()))?;
    let mut problem = MilProblem::new(target, bg, max_clauses);
    if let Some(inv) = invented {
        problem.invented = inv;
    }
    if let Some(r) = rules {
        problem.meta_rules = r;
    }
    problem.positives = positives;
    problem.negatives = negatives;
    problem.budget = budget;
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "target: merger\nmax_clauses: 3 % bound\n\
                    background: parse_exprs, compare_nums\n\
                    budget_seconds: 5\nmeta_rules: chain\n\
                    pos: 2, 1 | 0 | | | -> | 1 | | | 1 < 2\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.target, "merger");
        assert_eq!(p.invented, vec!["merger_1".to_string()]);
        assert_eq!(p.background.len(), 2);
        assert_eq!(p.meta_rules, vec![MetaRule::Chain]);
        assert_eq!(p.budget.time, Duration::from_secs(5));
        assert_eq!(p.positives[0].output.memory[0].values(), &[1, 2]);
    }

    #[test]
    fn rejects_unknown_background() {
        let err = parse_problem("target: t\nmax_clauses: 1\nbackground: fly").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(parse_problem("max_clauses: 1").is_err());
    }
}
