use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::event::AnswerRecord;
use super::{Group, Section, SCHEMA_VERSION};
use crate::robot::{explain_feedback, run_merge, run_sort, ExplanationStep};
use crate::scoring::{CurriculumBlock, CurriculumSpec};
use crate::zoo::{QuestionBank, QuestionSpec};

/// Learner id recorded on curriculum blocks that come with explanations.
pub const LEARNER_ID: &str = "mil-learner";

pub const BREAK_SECONDS: u32 = 60;

pub const SURVEY_QUESTIONS: [&str; 6] = [
    "Did you see a connection between the merging task and the sorting task?",
    "Did you use anything from one task while working on the other?",
    "How did you decide which fruits to put on the balance?",
    "What would have made the tasks easier to learn?",
    "Have you written computer programs before?",
    "Have you studied sorting algorithms before?",
];

/// The rank-ordered curriculum a group follows.
pub fn curriculum_for(group: Group) -> CurriculumSpec {
    let (merge_rank, sort_rank) = if group.merge_first() { (0, 1) } else { (1, 0) };
    CurriculumSpec::new(vec![
        CurriculumBlock {
            rank: merge_rank,
            concept: "merger".into(),
            examples: "E_merge".into(),
            learner: group.explanations().then(|| LEARNER_ID.to_string()),
        },
        CurriculumBlock {
            rank: sort_rank,
            concept: "sorter".into(),
            examples: "E_sort".into(),
            learner: None,
        },
    ])
    .expect("ranks are distinct")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "slot", rename_all = "snake_case")]
pub enum TaskSlot {
    Break,
    Question {
        section: Section,
        index: usize,
    },
    /// Feedback on merge-training question `index`.
    Feedback {
        index: usize,
    },
    Survey,
}

/// Full task sequence for a group. Every group ends with the sort test
/// followed by the survey.
pub fn build_plan(group: Group, bank: &QuestionBank) -> Vec<TaskSlot> {
    let questions = |section: Section| {
        let n = section_questions(bank, section).len();
        (0..n).flat_map(move |index| {
            let q = TaskSlot::Question { section, index };
            if section == Section::MergeTraining {
                vec![q, TaskSlot::Feedback { index }]
            } else {
                vec![q]
            }
        })
    };
    let mut plan = vec![TaskSlot::Break];
    let merge = [Section::MergeTraining, Section::MergeTest];
    if group.merge_first() {
        plan.extend(merge.into_iter().flat_map(questions));
        plan.extend(questions(Section::SortTraining));
    } else {
        plan.extend(questions(Section::SortTraining));
        plan.extend(merge.into_iter().flat_map(questions));
    }
    plan.push(TaskSlot::Break);
    plan.extend(questions(Section::SortTest));
    plan.push(TaskSlot::Survey);
    plan
}

pub(crate) fn section_questions(bank: &QuestionBank, section: Section) -> &[QuestionSpec] {
    match section {
        Section::MergeTraining => &bank.merge_training,
        Section::MergeTest => &bank.merge_test,
        Section::SortTraining => &bank.sort_training,
        Section::SortTest => &bank.sort_test,
    }
}

/// The two orders offered for a merge-training question: the correct one
/// and one with a single adjacent swap across the two input lists.
pub(crate) fn merge_choices(q: &QuestionSpec, seed: u64) -> Vec<Vec<String>> {
    let correct = q.expected_answer();
    let first: Vec<&String> = q.labels.first().map(|l| l.iter().collect()).unwrap_or_default();
    let mut wrong = correct.clone();
    if let Some(i) =
        (0..wrong.len().saturating_sub(1)).find(|&i| first.contains(&&wrong[i]) != first.contains(&&wrong[i + 1]))
    {
        wrong.swap(i, i + 1);
    }
    let mut choices = vec![correct, wrong];
    choices.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    choices
}

/// Comparisons the robot sorter needs for a question.
pub(crate) fn robot_comparisons(q: &QuestionSpec) -> u64 {
    run_sort(&q.start_state()).map_or(0, |r| r.final_state.energy)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Task {
    Break {
        seconds: u32,
    },
    Question {
        section: Section,
        /// Labels only; weights stay on the server.
        question: serde_json::Value,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        choices: Option<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        robot_comparisons: Option<u64>,
    },
    Feedback {
        question: String,
        correct: bool,
        submitted: Vec<String>,
        expected: Vec<String>,
        explanation: Vec<ExplanationStep>,
    },
    Survey {
        questions: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskEnvelope {
    pub v: u32,
    pub session: String,
    pub position: usize,
    pub total: usize,
    #[serde(flatten)]
    pub task: Task,
}

pub(crate) fn render(
    slot: TaskSlot,
    group: Group,
    bank: &QuestionBank,
    answers: &BTreeMap<String, AnswerRecord>,
) -> Task {
    match slot {
        TaskSlot::Break => Task::Break { seconds: BREAK_SECONDS },
        TaskSlot::Survey => Task::Survey {
            questions: SURVEY_QUESTIONS.iter().map(|s| s.to_string()).collect(),
        },
        TaskSlot::Question { section, index } => {
            let q = &section_questions(bank, section)[index];
            Task::Question {
                section,
                question: q.ui_payload(),
                choices: (section == Section::MergeTraining).then(|| merge_choices(q, bank.seed ^ index as u64)),
                robot_comparisons: (section == Section::SortTraining).then(|| robot_comparisons(q)),
            }
        }
        TaskSlot::Feedback { index } => {
            let q = &bank.merge_training[index];
            let expected = q.expected_answer();
            let submitted = answers.get(&q.id).map(|a| a.answer.clone()).unwrap_or_default();
            let explanation = if group.explanations() {
                run_merge(&q.start_state())
                    .map(|run| explain_feedback(&run.log, &q.label_map(), &submitted, &expected))
                    .unwrap_or_default()
            } else {
                Vec::new()
            };
            Task::Feedback {
                question: q.id.clone(),
                correct: submitted == expected,
                submitted,
                expected,
                explanation,
            }
        }
    }
}

pub(crate) fn envelope(session: &str, position: usize, total: usize, task: Task) -> TaskEnvelope {
    TaskEnvelope {
        v: SCHEMA_VERSION,
        session: session.to_string(),
        position,
        total,
        task,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::BankSizes;

    fn bank() -> QuestionBank {
        QuestionBank::generate(3, BankSizes::default()).unwrap()
    }

    #[test]
    fn curricula_follow_rank_functions() {
        for g in Group::ALL {
            let c = curriculum_for(g);
            let rank = |concept: &str| c.blocks().iter().find(|b| b.concept == concept).unwrap();
            let merger = rank("merger");
            let sorter = rank("sorter");
            assert_eq!(merger.rank, if g.merge_first() { 0 } else { 1 });
            assert_eq!(sorter.rank, 1 - merger.rank);
            assert_eq!(merger.learner.is_some(), g.explanations());
            assert!(sorter.learner.is_none());
            assert_eq!(merger.examples, "E_merge");
            assert_eq!(sorter.examples, "E_sort");
        }
    }

    #[test]
    fn plan_shapes() {
        let b = bank();
        for g in Group::ALL {
            let plan = build_plan(g, &b);
            let sections: Vec<Section> = plan
                .iter()
                .filter_map(|s| match s {
                    TaskSlot::Question { section, index: 0 } => Some(*section),
                    _ => None,
                })
                .collect();
            let expected = if g.merge_first() {
                vec![
                    Section::MergeTraining,
                    Section::MergeTest,
                    Section::SortTraining,
                    Section::SortTest,
                ]
            } else {
                vec![
                    Section::SortTraining,
                    Section::MergeTraining,
                    Section::MergeTest,
                    Section::SortTest,
                ]
            };
            assert_eq!(sections, expected);
            assert_eq!(plan.iter().filter(|s| matches!(s, TaskSlot::Break)).count(), 2);
            assert_eq!(
                plan.iter().filter(|s| matches!(s, TaskSlot::Feedback { .. })).count(),
                6
            );
            assert_eq!(plan[plan.len() - 1], TaskSlot::Survey);
            let brk = plan.iter().rposition(|s| matches!(s, TaskSlot::Break)).unwrap();
            assert_eq!(
                plan[brk + 1],
                TaskSlot::Question {
                    section: Section::SortTest,
                    index: 0
                }
            );
        }
    }

    #[test]
    fn merge_choices_differ_by_one_swap() {
        let b = bank();
        for q in &b.merge_training {
            let cs = merge_choices(q, 1);
            assert_eq!(cs.len(), 2);
            assert!(cs.contains(&q.expected_answer()));
            assert_ne!(cs[0], cs[1]);
            let diffs = cs[0].iter().zip(&cs[1]).filter(|(a, b)| a != b).count();
            assert_eq!(diffs, 2);
        }
    }
}
