use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{EventRecord, Group, SessionError};
use crate::zoo::QuestionBank;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct SessionHeader {
    pub v: u32,
    pub id: String,
    pub group: Group,
    pub created_at: u64,
}

/// One line of a session log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub(crate) enum LogLine {
    Session(SessionHeader),
    Event(EventRecord),
    Finalized { v: u32, at: u64 },
}

/// Append-only files under one directory: `bank.json`, `index.jsonl` and
/// `sessions/<id>.jsonl`.
#[derive(Debug, Clone)]
pub(crate) struct FileStore {
    root: PathBuf,
}

impl FileStore {
    pub fn open(root: &Path) -> Result<FileStore, SessionError> {
        fs::create_dir_all(root.join("sessions"))?;
        Ok(FileStore {
            root: root.to_path_buf(),
        })
    }

    fn session_path(&self, id: &str) -> PathBuf {
        self.root.join("sessions").join(format!("{id}.jsonl"))
    }

    pub fn write_bank(&self, bank: &QuestionBank) -> Result<(), SessionError> {
        let tmp = self.root.join("bank.json.tmp");
        let mut f = File::create(&tmp)?;
        serde_json::to_writer_pretty(&mut f, bank).map_err(io::Error::from)?;
        f.sync_all()?;
        fs::rename(tmp, self.root.join("bank.json"))?;
        Ok(())
    }

    pub fn read_bank(&self) -> Result<Option<QuestionBank>, SessionError> {
        let path = self.root.join("bank.json");
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path)?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| SessionError::Corrupt {
                file: path.display().to_string(),
                line: e.line(),
                message: e.to_string(),
            })
    }

    fn append(path: &Path, line: &impl Serialize) -> Result<(), SessionError> {
        let mut text = serde_json::to_string(line).map_err(io::Error::from)?;
        text.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        f.write_all(text.as_bytes())?;
        f.sync_data()?;
        Ok(())
    }

    pub fn create_session(&self, header: &SessionHeader) -> Result<(), SessionError> {
        Self::append(&self.session_path(&header.id), &LogLine::Session(header.clone()))?;
        Self::append(&self.root.join("index.jsonl"), header)
    }

    pub fn append_line(&self, id: &str, line: &LogLine) -> Result<(), SessionError> {
        Self::append(&self.session_path(id), line)
    }

    pub fn read_index(&self) -> Result<Vec<SessionHeader>, SessionError> {
        read_lines(&self.root.join("index.jsonl"))
    }

    pub fn read_session(&self, id: &str) -> Result<Vec<LogLine>, SessionError> {
        read_lines(&self.session_path(id))
    }
}

/// Parses a JSON-lines file. A final line without its newline is a write
/// that was never acknowledged and is skipped.
fn read_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, SessionError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let complete = text.rfind('\n').map_or("", |i| &text[..i]);
    complete
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| SessionError::Corrupt {
                file: path.display().to_string(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}
