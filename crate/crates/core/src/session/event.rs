use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::plan::section_questions;
use super::{Section, SessionError, TaskSlot, SCHEMA_VERSION};
use crate::scoring::{perf, DEFAULT_DISCOUNT};
use crate::zoo::{QuestionBank, QuestionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Comparison,
    AnswerSubmitted,
    FeedbackShown,
    ExplanationShown,
    BreakStarted,
    SurveyResponse,
}

impl EventKind {
    /// Kinds that complete the current task.
    pub fn advances(self) -> bool {
        !matches!(self, EventKind::Comparison | EventKind::ExplanationShown)
    }
}

fn current_version() -> u32 {
    SCHEMA_VERSION
}

/// An event as submitted by a client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventInput {
    #[serde(default = "current_version")]
    pub v: u32,
    pub kind: EventKind,
    #[serde(default)]
    pub client_ts: Option<u64>,
    #[serde(default)]
    pub payload: Value,
}

/// An event as stored, after validation and enrichment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub v: u32,
    pub session: String,
    pub seq: u64,
    pub server_ts: u64,
    #[serde(default)]
    pub client_ts: Option<u64>,
    pub kind: EventKind,
    pub payload: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub question: String,
    pub section: Section,
    pub answer: Vec<String>,
    pub correct: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ack {
    pub v: u32,
    pub session: String,
    pub seq: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heavier: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correct: Option<bool>,
    pub position: usize,
    pub complete: bool,
}

fn invalid(msg: impl Into<String>) -> SessionError {
    SessionError::InvalidEvent(msg.into())
}

fn str_field<'a>(payload: &'a Value, key: &str) -> Result<&'a str, SessionError> {
    payload
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| invalid(format!("payload needs string field {key:?}")))
}

fn current_question<'a>(
    slot: Option<TaskSlot>,
    bank: &'a QuestionBank,
    payload: &Value,
) -> Result<(Section, &'a QuestionSpec), SessionError> {
    let Some(TaskSlot::Question { section, index }) = slot else {
        return Err(invalid("no question is open"));
    };
    let q = &section_questions(bank, section)[index];
    if let Some(id) = payload.get("question").and_then(Value::as_str) {
        if id != q.id {
            return Err(invalid(format!("question {id} is not the open question {}", q.id)));
        }
    }
    Ok((section, q))
}

/// Checks an event against the open task and returns the payload to store.
pub(crate) fn validate(
    kind: EventKind,
    payload: &Value,
    slot: Option<TaskSlot>,
    bank: &QuestionBank,
) -> Result<Value, SessionError> {
    match kind {
        EventKind::Comparison => {
            let (section, q) = current_question(slot, bank, payload)?;
            let (left, right) = (str_field(payload, "left")?, str_field(payload, "right")?);
            let weight = |l: &str| q.value_of(l).ok_or_else(|| invalid(format!("unknown label {l:?}")));
            let (wl, wr) = (weight(left)?, weight(right)?);
            if left == right {
                return Err(invalid("a comparison needs two different fruits"));
            }
            let heavier = if wl > wr { left } else { right };
            if let Some(claimed) = payload.get("heavier").and_then(Value::as_str) {
                if claimed != heavier {
                    return Err(invalid(format!("{claimed} is not the heavier fruit")));
                }
            }
            Ok(json!({ "question": q.id, "section": section, "left": left, "right": right, "heavier": heavier }))
        }
        EventKind::AnswerSubmitted => {
            let (section, q) = current_question(slot, bank, payload)?;
            let answer: Vec<String> = payload
                .get("answer")
                .and_then(|a| serde_json::from_value(a.clone()).ok())
                .ok_or_else(|| invalid("payload needs an \"answer\" list of labels"))?;
            let expected = q.expected_answer();
            let score = perf(&answer, &expected, DEFAULT_DISCOUNT)
                .map_err(|e| invalid(format!("answer must arrange every label once: {e}")))?;
            Ok(json!({
                "question": q.id,
                "section": section,
                "answer": answer,
                "correct": answer == expected,
                "score": score.value,
            }))
        }
        EventKind::FeedbackShown | EventKind::ExplanationShown => {
            let Some(TaskSlot::Feedback { index }) = slot else {
                return Err(invalid("no feedback is open"));
            };
            let mut stored = payload.as_object().cloned().unwrap_or_default();
            stored.insert("question".into(), json!(bank.merge_training[index].id));
            Ok(Value::Object(stored))
        }
        EventKind::BreakStarted => match slot {
            Some(TaskSlot::Break) => Ok(json!({})),
            _ => Err(invalid("no break is scheduled now")),
        },
        EventKind::SurveyResponse => match slot {
            Some(TaskSlot::Survey) if payload.is_object() => Ok(payload.clone()),
            Some(TaskSlot::Survey) => Err(invalid("survey answers must be an object")),
            _ => Err(invalid("the survey is not open")),
        },
    }
}

impl EventRecord {
    pub(crate) fn answer(&self) -> Option<AnswerRecord> {
        (self.kind == EventKind::AnswerSubmitted)
            .then(|| serde_json::from_value(self.payload.clone()).ok())
            .flatten()
    }
}
