use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::event::{validate, Ack, AnswerRecord, EventInput, EventRecord};
use super::export::{Bundle, Manifest, SessionSummary};
use super::plan::{build_plan, curriculum_for, envelope, render, TaskEnvelope, TaskSlot};
use super::store::{FileStore, LogLine, SessionHeader};
use super::{Group, SessionError, SCHEMA_VERSION};
use crate::scoring::CurriculumSpec;
use crate::zoo::QuestionBank;

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

/// State of one participant, rebuilt entirely from its event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub v: u32,
    pub id: String,
    pub group: Group,
    pub curriculum: CurriculumSpec,
    /// Index of the open task in the group's plan.
    pub cursor: usize,
    pub created_at: u64,
    pub finalized_at: Option<u64>,
    pub last_seq: u64,
    pub answers: BTreeMap<String, AnswerRecord>,
}

impl Session {
    pub(crate) fn new(id: String, group: Group, created_at: u64) -> Session {
        Session {
            v: SCHEMA_VERSION,
            id,
            group,
            curriculum: curriculum_for(group),
            cursor: 0,
            created_at,
            finalized_at: None,
            last_seq: 0,
            answers: BTreeMap::new(),
        }
    }

    pub fn is_finalized(&self) -> bool {
        self.finalized_at.is_some()
    }

    pub(crate) fn apply(&mut self, rec: &EventRecord) {
        self.last_seq = rec.seq;
        if let Some(a) = rec.answer() {
            self.answers.insert(a.question.clone(), a);
        }
        if rec.kind.advances() {
            self.cursor += 1;
        }
    }
}

struct Loaded {
    bank: Arc<QuestionBank>,
    plans: HashMap<Group, Arc<Vec<TaskSlot>>>,
}

/// Session registry backed by a [`FileStore`]. Appends to one session are
/// serialized; different sessions proceed independently.
pub struct SessionService {
    store: FileStore,
    loaded: RwLock<Option<Loaded>>,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
    create_lock: Mutex<()>,
}

impl SessionService {
    /// Opens (or initializes) a store directory and replays every session
    /// log found there.
    pub fn open(root: &Path) -> Result<SessionService, SessionError> {
        let store = FileStore::open(root)?;
        let svc = SessionService {
            loaded: RwLock::new(None),
            sessions: RwLock::new(BTreeMap::new()),
            create_lock: Mutex::new(()),
            store,
        };
        if let Some(bank) = svc.store.read_bank()? {
            svc.install(bank);
        }
        let mut sessions = BTreeMap::new();
        for header in svc.store.read_index()? {
            let s = svc.replay_log(&header)?;
            sessions.insert(header.id.clone(), Arc::new(Mutex::new(s)));
        }
        *svc.sessions.write().expect("poisoned") = sessions;
        Ok(svc)
    }

    fn replay_log(&self, header: &SessionHeader) -> Result<Session, SessionError> {
        let mut s = Session::new(header.id.clone(), header.group, header.created_at);
        for line in self.store.read_session(&header.id)? {
            match line {
                LogLine::Session(_) => {}
                LogLine::Event(rec) => s.apply(&rec),
                LogLine::Finalized { at, .. } => s.finalized_at = Some(at),
            }
        }
        Ok(s)
    }

    fn install(&self, bank: QuestionBank) {
        let plans = Group::ALL
            .into_iter()
            .map(|g| (g, Arc::new(build_plan(g, &bank))))
            .collect();
        *self.loaded.write().expect("poisoned") = Some(Loaded {
            bank: Arc::new(bank),
            plans,
        });
    }

    /// Stores the question bank. Refused once sessions exist, since their
    /// logs refer to its questions.
    pub fn load_bank(&self, bank: QuestionBank) -> Result<(), SessionError> {
        let _guard = self.create_lock.lock().expect("poisoned");
        if !self.sessions.read().expect("poisoned").is_empty() {
            return Err(SessionError::InvalidEvent(
                "sessions already use the current bank".into(),
            ));
        }
        self.store.write_bank(&bank)?;
        self.install(bank);
        Ok(())
    }

    pub fn bank(&self) -> Option<Arc<QuestionBank>> {
        self.loaded.read().expect("poisoned").as_ref().map(|l| l.bank.clone())
    }

    fn context(&self, group: Group) -> Result<(Arc<QuestionBank>, Arc<Vec<TaskSlot>>), SessionError> {
        let loaded = self.loaded.read().expect("poisoned");
        let l = loaded.as_ref().ok_or(SessionError::NoBankLoaded)?;
        Ok((l.bank.clone(), l.plans[&group].clone()))
    }

    fn handle(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.sessions
            .read()
            .expect("poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    /// Creates a session in `group`, or in the group with the fewest
    /// sessions when `group` is `None`.
    pub fn create_session(&self, group: Option<Group>) -> Result<Session, SessionError> {
        let _guard = self.create_lock.lock().expect("poisoned");
        if self.bank().is_none() {
            return Err(SessionError::NoBankLoaded);
        }
        let mut counts: HashMap<Group, usize> = HashMap::new();
        let existing: Vec<_> = self.sessions.read().expect("poisoned").values().cloned().collect();
        for s in &existing {
            *counts.entry(s.lock().expect("poisoned").group).or_default() += 1;
        }
        let group = group.unwrap_or_else(|| {
            Group::ALL
                .into_iter()
                .min_by_key(|g| counts.get(g).copied().unwrap_or(0))
                .expect("four groups")
        });
        let id = format!("p{:05}", existing.len() + 1);
        let header = SessionHeader {
            v: SCHEMA_VERSION,
            id: id.clone(),
            group,
            created_at: now_ms(),
        };
        self.store.create_session(&header)?;
        let s = Session::new(id.clone(), group, header.created_at);
        self.sessions
            .write()
            .expect("poisoned")
            .insert(id, Arc::new(Mutex::new(s.clone())));
        Ok(s)
    }

    /// Validates, durably appends and applies one event.
    pub fn record_event(&self, id: &str, input: EventInput) -> Result<Ack, SessionError> {
        if input.v != SCHEMA_VERSION {
            return Err(SessionError::UnsupportedVersion(input.v));
        }
        let handle = self.handle(id)?;
        let mut s = handle.lock().expect("poisoned");
        if s.is_finalized() {
            return Err(SessionError::SessionFinalized(id.to_string()));
        }
        let (bank, plan) = self.context(s.group)?;
        let payload = validate(input.kind, &input.payload, plan.get(s.cursor).copied(), &bank)?;
        let rec = EventRecord {
            v: SCHEMA_VERSION,
            session: id.to_string(),
            seq: s.last_seq + 1,
            server_ts: now_ms(),
            client_ts: input.client_ts,
            kind: input.kind,
            payload,
        };
        self.store.append_line(id, &LogLine::Event(rec.clone()))?;
        s.apply(&rec);
        Ok(Ack {
            v: SCHEMA_VERSION,
            session: id.to_string(),
            seq: rec.seq,
            heavier: rec.payload.get("heavier").and_then(|h| h.as_str()).map(String::from),
            correct: rec.answer().map(|a| a.correct),
            position: s.cursor,
            complete: s.cursor >= plan.len(),
        })
    }

    /// The open task. Weights never appear in the payload.
    pub fn next_task(&self, id: &str) -> Result<TaskEnvelope, SessionError> {
        let snapshot = self.session(id)?;
        let (bank, plan) = self.context(snapshot.group)?;
        let slot = *plan.get(snapshot.cursor).ok_or(SessionError::CurriculumComplete)?;
        let task = render(slot, snapshot.group, &bank, &snapshot.answers);
        Ok(envelope(id, snapshot.cursor, plan.len(), task))
    }

    pub fn finalize(&self, id: &str) -> Result<Session, SessionError> {
        let handle = self.handle(id)?;
        let mut s = handle.lock().expect("poisoned");
        if s.is_finalized() {
            return Err(SessionError::SessionFinalized(id.to_string()));
        }
        let at = now_ms();
        self.store
            .append_line(id, &LogLine::Finalized { v: SCHEMA_VERSION, at })?;
        s.finalized_at = Some(at);
        Ok(s.clone())
    }

    pub fn session(&self, id: &str) -> Result<Session, SessionError> {
        Ok(self.handle(id)?.lock().expect("poisoned").clone())
    }

    pub fn sessions(&self) -> Vec<Session> {
        let handles: Vec<_> = self.sessions.read().expect("poisoned").values().cloned().collect();
        handles.iter().map(|h| h.lock().expect("poisoned").clone()).collect()
    }

    /// Manifest plus every stored event, optionally for one group only.
    pub fn export(&self, group: Option<Group>) -> Result<Bundle, SessionError> {
        let mut summaries = Vec::new();
        let mut events = Vec::new();
        for s in self.sessions() {
            if group.is_some_and(|g| g != s.group) {
                continue;
            }
            for line in self.store.read_session(&s.id)? {
                if let LogLine::Event(rec) = line {
                    if rec.seq <= s.last_seq {
                        events.push(rec);
                    }
                }
            }
            summaries.push(SessionSummary {
                id: s.id.clone(),
                group: s.group,
                created_at: s.created_at,
                finalized_at: s.finalized_at,
                events: s.last_seq,
            });
        }
        let bank = self.bank().map(|b| (*b).clone());
        Ok(Bundle {
            manifest: Manifest {
                v: SCHEMA_VERSION,
                group,
                bank,
                sessions: summaries,
            },
            events,
        })
    }
}
