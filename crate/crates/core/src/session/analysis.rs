use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::export::Bundle;
use super::plan::curriculum_for;
use super::{EventKind, Group, Section, SessionError};
use crate::matching::{classify_strategy, Classification, MatchConfig, ResponseRecord, StrategyCategory};
use crate::scoring::{
    blumer_bound, comprehension, curriculum_improvement, explanatory_effect, seq_effect, BlumerParams,
    ComprehensionMeasurement, CurriculumSpec, Effect, Improvement, ScoringError, TestResponse,
};
use crate::zoo::{QuestionBank, Trace};

/// Comparisons and answer of one participant on one question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseTrace {
    pub participant: String,
    pub group: Group,
    pub section: Section,
    pub question: String,
    /// Compared weights, in the order the balance was used.
    pub trace: Trace,
    pub answer: Vec<String>,
    pub correct: bool,
    pub score: f64,
}

fn bank(bundle: &Bundle) -> Result<&QuestionBank, SessionError> {
    bundle.manifest.bank.as_ref().ok_or(SessionError::NoBankLoaded)
}

/// One record per submitted answer, in session and event order.
pub fn response_traces(bundle: &Bundle) -> Result<Vec<ResponseTrace>, SessionError> {
    let bank = bank(bundle)?;
    let groups: BTreeMap<&str, Group> = bundle
        .manifest
        .sessions
        .iter()
        .map(|s| (s.id.as_str(), s.group))
        .collect();
    let mut pending: BTreeMap<(&str, String), Vec<(i64, i64)>> = BTreeMap::new();
    let mut out = Vec::new();
    let mut events: Vec<_> = bundle
        .events
        .iter()
        .filter(|e| groups.contains_key(e.session.as_str()))
        .collect();
    events.sort_by(|a, b| (&a.session, a.seq).cmp(&(&b.session, b.seq)));
    for e in events {
        let qid = e
            .payload
            .get("question")
            .and_then(|q| q.as_str())
            .unwrap_or_default()
            .to_string();
        match e.kind {
            EventKind::Comparison => {
                let q = bank
                    .find(&qid)
                    .ok_or_else(|| SessionError::InvalidEvent(format!("unknown question {qid}")))?;
                let value = |k: &str| {
                    e.payload
                        .get(k)
                        .and_then(|l| l.as_str())
                        .and_then(|l| q.value_of(l))
                        .ok_or_else(|| SessionError::InvalidEvent(format!("bad label in event {}", e.seq)))
                };
                let pair = (value("left")?, value("right")?);
                pending.entry((e.session.as_str(), qid)).or_default().push(pair);
            }
            EventKind::AnswerSubmitted => {
                let a = e
                    .answer()
                    .ok_or_else(|| SessionError::InvalidEvent(format!("bad answer in event {}", e.seq)))?;
                let pairs = pending.remove(&(e.session.as_str(), qid)).unwrap_or_default();
                out.push(ResponseTrace {
                    participant: e.session.clone(),
                    group: groups[e.session.as_str()],
                    section: a.section,
                    question: a.question,
                    trace: Trace::new(pairs),
                    answer: a.answer,
                    correct: a.correct,
                    score: a.score,
                });
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Strategy classification of every sorting answer. Answers given without
/// any comparison are reported as `Other`.
pub fn classify_bundle(bundle: &Bundle, config: &MatchConfig) -> Result<Vec<ResponseRecord>, SessionError> {
    let bank = bank(bundle)?;
    let mut out = Vec::new();
    for r in response_traces(bundle)? {
        if !matches!(r.section, Section::SortTraining | Section::SortTest) {
            continue;
        }
        let input = bank.find(&r.question).expect("validated above").values();
        let c = if r.trace.is_empty() {
            Classification {
                category: StrategyCategory::Other,
                best: None,
                results: Vec::new(),
            }
        } else {
            classify_strategy(&r.trace, &input, config).map_err(|e| SessionError::InvalidEvent(e.to_string()))?
        };
        out.push(ResponseRecord::new(&r.participant, &r.question, &c));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: Group,
    pub participants: Vec<String>,
    /// Mean test perf per concept; absent when nobody answered.
    pub tau: BTreeMap<String, f64>,
    pub comprehension: Vec<ComprehensionMeasurement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectRow {
    pub name: String,
    pub concept: String,
    pub effect: Effect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub name: String,
    pub params: BlumerParams,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub groups: Vec<GroupRow>,
    pub seq_effects: Vec<EffectRow>,
    pub explanatory_effects: Vec<EffectRow>,
    pub bounds: Vec<BoundRow>,
    pub improvement: Improvement,
}

fn measure(
    curriculum: &CurriculumSpec,
    responses: &[TestResponse],
) -> Result<Vec<ComprehensionMeasurement>, ScoringError> {
    let mut out = Vec::new();
    for block in curriculum.blocks() {
        let single = CurriculumSpec::new(vec![block.clone()]).expect("one block");
        let rs: Vec<TestResponse> = responses
            .iter()
            .filter(|r| r.concept == block.concept)
            .cloned()
            .collect();
        match comprehension(&single, &rs) {
            Ok(m) => out.extend(m),
            Err(ScoringError::EmptyGroup(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Per-group comprehension on the test sections, the effects between
/// groups, and hypothesis-space bounds.
pub fn group_report(bundle: &Bundle) -> Result<GroupReport, SessionError> {
    let traces = response_traces(bundle)?;
    let mut groups = Vec::new();
    for g in Group::ALL {
        let participants: Vec<String> = bundle
            .manifest
            .sessions
            .iter()
            .filter(|s| s.group == g)
            .map(|s| s.id.clone())
            .collect();
        let responses: Vec<TestResponse> = traces
            .iter()
            .filter(|r| r.group == g && r.section.is_test())
            .map(|r| TestResponse {
                participant: r.participant.clone(),
                concept: r.section.concept().to_string(),
                score: r.score,
            })
            .collect();
        let comprehension =
            measure(&curriculum_for(g), &responses).map_err(|e| SessionError::InvalidEvent(e.to_string()))?;
        let tau = comprehension.iter().map(|m| (m.concept.clone(), m.tau)).collect();
        groups.push(GroupRow {
            group: g,
            participants,
            tau,
            comprehension,
        });
    }
    let row = |g: Group| &groups.iter().find(|r| r.group == g).expect("all groups").comprehension;
    let mut seq_effects = Vec::new();
    for (a, b) in [(Group::MsWex, Group::SmWex), (Group::MsWoex, Group::SmWoex)] {
        for concept in ["merger", "sorter"] {
            if let Ok(effect) = seq_effect(row(a), row(b), concept) {
                seq_effects.push(EffectRow {
                    name: format!("{a} vs {b}"),
                    concept: concept.into(),
                    effect,
                });
            }
        }
    }
    let tau = |g: Group, c: &str| groups.iter().find(|r| r.group == g).and_then(|r| r.tau.get(c).copied());
    let mut explanatory_effects = Vec::new();
    for (ex, plain) in [(Group::MsWex, Group::MsWoex), (Group::SmWex, Group::SmWoex)] {
        for concept in ["merger", "sorter"] {
            if let (Some(a), Some(b)) = (tau(ex, concept), tau(plain, concept)) {
                explanatory_effects.push(EffectRow {
                    name: format!("{ex} vs {plain}"),
                    concept: concept.into(),
                    effect: explanatory_effect(a, b),
                });
            }
        }
    }
    let bound = |name: &str, params: BlumerParams| BoundRow {
        name: name.into(),
        params,
        value: blumer_bound(&params).to_string(),
    };
    let bounds = vec![
        bound("sorter with merger", BlumerParams { m: 2, n: 3, p: 8, j: 2 }),
        bound("sorter without merger", BlumerParams { m: 2, n: 5, p: 6, j: 2 }),
    ];
    let improvement = curriculum_improvement(3, 8, 2, -2).expect("valid constants");
    Ok(GroupReport {
        groups,
        seq_effects,
        explanatory_effects,
        bounds,
        improvement,
    })
}

fn fmt_tau(v: Option<&f64>) -> String {
    v.map_or_else(|| "-".to_string(), |t| format!("{t:.3}"))
}

impl fmt::Display for GroupReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<10}{:>14}{:>14}{:>14}",
            "group", "participants", "tau_merger", "tau_sorter"
        )?;
        for r in &self.groups {
            writeln!(
                f,
                "{:<10}{:>14}{:>14}{:>14}",
                r.group.as_str(),
                r.participants.len(),
                fmt_tau(r.tau.get("merger")),
                fmt_tau(r.tau.get("sorter"))
            )?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "{:<8}{:<22}{:<9}{:>9}  class",
            "effect", "groups", "concept", "value"
        )?;
        for (kind, rows) in [("E_seq", &self.seq_effects), ("E_ex", &self.explanatory_effects)] {
            for r in rows {
                writeln!(
                    f,
                    "{:<8}{:<22}{:<9}{:>9.3}  {}",
                    kind, r.name, r.concept, r.effect.value, r.effect.class
                )?;
            }
        }
        writeln!(f)?;
        for b in &self.bounds {
            let p = b.params;
            writeln!(
                f,
                "bound {} (m={}, n={}, p={}, j={}): {}",
                b.name, p.m, p.n, p.p, p.j, b.value
            )?;
        }
        writeln!(
            f,
            "curriculum improvement 3*ln(8) < 5*ln(6): {:.3} < {:.3} = {}",
            self.improvement.lhs, self.improvement.rhs, self.improvement.holds
        )
    }
}
