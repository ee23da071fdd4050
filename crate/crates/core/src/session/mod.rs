//! Experiment sessions: group assignment, task sequencing, durable event
//! logs and export for analysis.

mod analysis;
mod driver;
mod event;
mod export;
mod plan;
mod service;
mod store;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use analysis::{classify_bundle, group_report, response_traces, GroupReport, GroupRow, ResponseTrace};
pub use driver::drive_participant;
pub use event::{Ack, AnswerRecord, EventInput, EventKind, EventRecord};
pub use export::{replay, Bundle, Manifest, SessionSummary};
pub use plan::{build_plan, curriculum_for, Task, TaskEnvelope, TaskSlot, LEARNER_ID, SURVEY_QUESTIONS};
pub use service::{Session, SessionService};

/// Payload schema version carried by every record and response.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("no question bank is loaded")]
    NoBankLoaded,
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("session {0} is finalized")]
    SessionFinalized(String),
    #[error("curriculum complete")]
    CurriculumComplete,
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("unsupported schema version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("{file}:{line}: {message}")]
    Corrupt { file: String, line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "MS/WEX")]
    MsWex,
    #[serde(rename = "MS/WOEX")]
    MsWoex,
    #[serde(rename = "SM/WEX")]
    SmWex,
    #[serde(rename = "SM/WOEX")]
    SmWoex,
}

impl Group {
    /// Fixed order, also used to break balancing ties.
    pub const ALL: [Group; 4] = [Group::MsWex, Group::MsWoex, Group::SmWex, Group::SmWoex];

    pub fn merge_first(self) -> bool {
        matches!(self, Group::MsWex | Group::MsWoex)
    }

    pub fn explanations(self) -> bool {
        matches!(self, Group::MsWex | Group::SmWex)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Group::MsWex => "MS/WEX",
            Group::MsWoex => "MS/WOEX",
            Group::SmWex => "SM/WEX",
            Group::SmWoex => "SM/WOEX",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = SessionError;

    /// Accepts `MS/WEX` as well as `ms-wex` or `ms_wex`.
    fn from_str(s: &str) -> Result<Group, SessionError> {
        let norm = s.to_ascii_uppercase().replace(['-', '_'], "/");
        Group::ALL
            .into_iter()
            .find(|g| g.as_str() == norm)
            .ok_or_else(|| SessionError::UnknownGroup(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    MergeTraining,
    MergeTest,
    SortTraining,
    SortTest,
}

impl Section {
    pub const ALL: [Section; 4] = [
        Section::MergeTraining,
        Section::MergeTest,
        Section::SortTraining,
        Section::SortTest,
    ];

    /// Concept a section teaches or tests.
    pub fn concept(self) -> &'static str {
        match self {
            Section::MergeTraining | Section::MergeTest => "merger",
            Section::SortTraining | Section::SortTest => "sorter",
        }
    }

    pub fn is_test(self) -> bool {
        matches!(self, Section::MergeTest | Section::SortTest)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Section::MergeTraining => "merge_training",
            Section::MergeTest => "merge_test",
            Section::SortTraining => "sort_training",
            Section::SortTest => "sort_test",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
