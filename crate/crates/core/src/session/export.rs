use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::service::Session;
use super::{EventRecord, Group, SessionError};
use crate::zoo::QuestionBank;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub id: String,
    pub group: Group,
    pub created_at: u64,
    pub finalized_at: Option<u64>,
    /// Number of events exported for this session.
    pub events: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub v: u32,
    /// Group filter the bundle was exported with.
    pub group: Option<Group>,
    pub bank: Option<QuestionBank>,
    pub sessions: Vec<SessionSummary>,
}

/// Everything analysis needs: the manifest and the raw event stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub manifest: Manifest,
    pub events: Vec<EventRecord>,
}

fn corrupt(file: &str, line: usize, e: serde_json::Error) -> SessionError {
    SessionError::Corrupt {
        file: file.to_string(),
        line,
        message: e.to_string(),
    }
}

impl Bundle {
    /// Manifest on the first line, then one event per line.
    pub fn to_ndjson(&self) -> String {
        let mut out = serde_json::to_string(&self.manifest).expect("serializable");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("serializable"));
            out.push('\n');
        }
        out
    }

    pub fn from_ndjson(text: &str) -> Result<Bundle, SessionError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| SessionError::Corrupt {
            file: "<bundle>".into(),
            line: 1,
            message: "missing manifest".into(),
        })?;
        let manifest = serde_json::from_str(first).map_err(|e| corrupt("<bundle>", 1, e))?;
        let events = lines
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| corrupt("<bundle>", i + 1, e)))
            .collect::<Result<_, _>>()?;
        Ok(Bundle { manifest, events })
    }

    /// Writes `manifest.json` and `events.jsonl` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), SessionError> {
        fs::create_dir_all(dir)?;
        let manifest = serde_json::to_string_pretty(&self.manifest).map_err(io::Error::from)?;
        fs::write(dir.join("manifest.json"), manifest + "\n")?;
        let events: String = self
            .events
            .iter()
            .map(|e| serde_json::to_string(e).expect("serializable") + "\n")
            .collect();
        fs::write(dir.join("events.jsonl"), events)?;
        Ok(())
    }

    /// Reads a bundle directory, or a single JSON or NDJSON bundle file.
    pub fn read(path: &Path) -> Result<Bundle, SessionError> {
        if path.is_file() {
            let text = fs::read_to_string(path)?;
            if let Ok(bundle) = serde_json::from_str::<Bundle>(&text) {
                return Ok(bundle);
            }
            return Bundle::from_ndjson(&text);
        }
        let mpath = path.join("manifest.json");
        let manifest = serde_json::from_str(&fs::read_to_string(&mpath)?)
            .map_err(|e| corrupt(&mpath.display().to_string(), e.line(), e))?;
        let epath = path.join("events.jsonl");
        let events = fs::read_to_string(&epath)?
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| corrupt(&epath.display().to_string(), i + 1, e)))
            .collect::<Result<_, _>>()?;
        Ok(Bundle { manifest, events })
    }
}

/// Rebuilds session state from a bundle alone.
pub fn replay(bundle: &Bundle) -> Result<Vec<Session>, SessionError> {
    bundle
        .manifest
        .sessions
        .iter()
        .map(|summary| {
            let mut s = Session::new(summary.id.clone(), summary.group, summary.created_at);
            let mut events: Vec<&EventRecord> = bundle.events.iter().filter(|e| e.session == summary.id).collect();
            events.sort_by_key(|e| e.seq);
            for (i, e) in events.iter().enumerate() {
                if e.seq != i as u64 + 1 {
                    return Err(SessionError::Corrupt {
                        file: "<bundle>".into(),
                        line: 0,
                        message: format!("session {} has a gap before seq {}", summary.id, e.seq),
                    });
                }
                s.apply(e);
            }
            s.finalized_at = summary.finalized_at;
            Ok(s)
        })
        .collect()
}
