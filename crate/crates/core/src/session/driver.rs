use serde_json::json;

use super::{EventInput, EventKind, SessionError, SessionService, Task, SCHEMA_VERSION};
use crate::matching::simulate_participant;
use crate::zoo::AlgorithmId;

fn send(svc: &SessionService, id: &str, kind: EventKind, payload: serde_json::Value) -> Result<(), SessionError> {
    svc.record_event(
        id,
        EventInput {
            v: SCHEMA_VERSION,
            kind,
            client_ts: None,
            payload,
        },
    )
    .map(|_| ())
}

/// Plays a session to the end as an artificial participant who sorts with
/// `alg`, flipping comparison outcomes with probability `noise`. Returns
/// the number of events sent.
pub fn drive_participant(
    svc: &SessionService,
    id: &str,
    alg: AlgorithmId,
    noise: f64,
    seed: u64,
) -> Result<usize, SessionError> {
    let bank = svc.bank().ok_or(SessionError::NoBankLoaded)?;
    let mut sent = 0;
    loop {
        let task = match svc.next_task(id) {
            Ok(env) => env.task,
            Err(SessionError::CurriculumComplete) => return Ok(sent),
            Err(e) => return Err(e),
        };
        match task {
            Task::Break { .. } => {
                send(svc, id, EventKind::BreakStarted, json!({}))?;
                sent += 1;
            }
            Task::Question { question, choices, .. } => {
                let qid = question["id"].as_str().unwrap_or_default();
                let q = bank
                    .find(qid)
                    .ok_or_else(|| SessionError::InvalidEvent(qid.to_string()))?;
                let sim = simulate_participant(alg, noise, q, seed ^ sent as u64)
                    .map_err(|e| SessionError::InvalidEvent(e.to_string()))?;
                let labels = q.label_map();
                for (x, y) in &sim.trace.pairs {
                    send(
                        svc,
                        id,
                        EventKind::Comparison,
                        json!({ "left": labels[x], "right": labels[y] }),
                    )?;
                    sent += 1;
                }
                let answer = match choices {
                    Some(cs) if !cs.contains(&sim.answer) => {
                        cs.into_iter().find(|c| *c != q.expected_answer()).unwrap_or(sim.answer)
                    }
                    _ => sim.answer,
                };
                send(
                    svc,
                    id,
                    EventKind::AnswerSubmitted,
                    json!({ "question": qid, "answer": answer }),
                )?;
                sent += 1;
            }
            Task::Feedback { explanation, .. } => {
                if !explanation.is_empty() {
                    send(
                        svc,
                        id,
                        EventKind::ExplanationShown,
                        json!({ "steps": explanation.len() }),
                    )?;
                    sent += 1;
                }
                send(svc, id, EventKind::FeedbackShown, json!({}))?;
                sent += 1;
            }
            Task::Survey { questions } => {
                let answers: serde_json::Map<_, _> = questions
                    .iter()
                    .enumerate()
                    .map(|(i, _)| (format!("q{}", i + 1), json!("no")))
                    .collect();
                send(svc, id, EventKind::SurveyResponse, json!({ "answers": answers }))?;
                sent += 1;
            }
        }
    }
}
