use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::action::CompositeAction;
use super::run::ActionRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Comparison,
    Append,
    ErrorHighlight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationStep {
    pub kind: StepKind,
    pub subjects: Vec<String>,
    pub narration: String,
    pub visual: serde_json::Value,
}

fn label(labels: &BTreeMap<i64, String>, v: i64) -> String {
    labels.get(&v).cloned().unwrap_or_else(|| v.to_string())
}

fn join_names(names: &[String]) -> String {
    match names {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// One comparison step per `compare_nums` and one append step per
/// `drop_bag_remaining` in the log. `labels` maps item values to the names
/// shown to the participant; unmapped values are shown as numbers.
pub fn explain_run(log: &[ActionRecord], labels: &BTreeMap<i64, String>) -> Vec<ExplanationStep> {
    let mut steps = Vec::new();
    for rec in log {
        match rec.action {
            CompositeAction::CompareNums => {
                let (l, r) = (rec.before.left_bag[0], rec.before.right_bag[0]);
                let (small, large) = if l <= r { (l, r) } else { (r, l) };
                let (ln, rn) = (label(labels, l), label(labels, r));
                let (sn, gn) = (label(labels, small), label(labels, large));
                steps.push(ExplanationStep {
                    kind: StepKind::Comparison,
                    subjects: vec![ln.clone(), rn.clone()],
                    narration: format!("Compare {ln} and {rn}: {sn} is lighter, so {sn} is appended before {gn}"),
                    visual: json!({ "left": ln, "right": rn, "appended": sn, "kept": gn }),
                });
            }
            CompositeAction::DropBagRemaining => {
                let rest: Vec<i64> = if rec.before.right_bag.is_empty() {
                    rec.before.left_bag.clone()
                } else {
                    rec.before.right_bag.clone()
                };
                let names: Vec<String> = rest.iter().map(|&v| label(labels, v)).collect();
                let verb = if names.len() == 1 { "is" } else { "are" };
                steps.push(ExplanationStep {
                    kind: StepKind::Append,
                    narration: format!(
                        "No items are left on the other side, so {} {verb} appended in order",
                        join_names(&names)
                    ),
                    visual: json!({ "appended": names }),
                    subjects: names,
                });
            }
            _ => {}
        }
    }
    steps
}

/// Names the items whose positions differ between the submitted and the
/// expected order, or `None` when the answer is correct.
pub fn error_highlight(submitted: &[String], expected: &[String]) -> Option<ExplanationStep> {
    let mut subjects: Vec<String> = Vec::new();
    for (i, s) in submitted.iter().enumerate() {
        if expected.get(i) != Some(s) && !subjects.contains(s) {
            subjects.push(s.clone());
        }
    }
    for e in expected.iter().skip(submitted.len()) {
        if !subjects.contains(e) {
            subjects.push(e.clone());
        }
    }
    if subjects.is_empty() {
        return None;
    }
    Some(ExplanationStep {
        kind: StepKind::ErrorHighlight,
        narration: format!("{} are out of order", join_names(&subjects)),
        visual: json!({ "highlight": subjects, "expected": expected, "submitted": submitted }),
        subjects,
    })
}

/// Explanation of a run followed by an error highlight when the submitted
/// answer differs from `expected`.
pub fn explain_feedback(
    log: &[ActionRecord],
    labels: &BTreeMap<i64, String>,
    submitted: &[String],
    expected: &[String],
) -> Vec<ExplanationStep> {
    let mut steps = explain_run(log, labels);
    steps.extend(error_highlight(submitted, expected));
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::{run_merge, WorldState};

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn comparison_names_lighter_item_first() {
        let labels = BTreeMap::from([(9, "B".to_string()), (3, "C".to_string())]);
        let run = run_merge(&WorldState::from_values(&[9, 3])).unwrap();
        let steps = explain_run(&run.log, &labels);
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].kind, StepKind::Comparison);
        assert_eq!(steps[0].subjects, names(&["B", "C"]));
        assert!(steps[0].narration.contains("C is appended before B"));
        assert_eq!(steps[1].kind, StepKind::Append);
        assert_eq!(steps[1].subjects, names(&["B"]));
    }

    #[test]
    fn empty_log_has_no_steps() {
        assert!(explain_run(&[], &BTreeMap::new()).is_empty());
    }

    #[test]
    fn swapped_answer_is_highlighted() {
        let step = error_highlight(&names(&["A", "C", "B", "D"]), &names(&["A", "B", "C", "D"])).unwrap();
        assert_eq!(step.kind, StepKind::ErrorHighlight);
        assert_eq!(step.subjects, names(&["C", "B"]));
        assert!(error_highlight(&names(&["A"]), &names(&["A"])).is_none());
    }
}
