use chrono::NaiveDate;
use thiserror::Error;

use crate::engine::Phase;

/// Invalid configuration, optionally tied to a dotted field path.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{message}", path.as_ref().map(|p| format!("{p}: ")).unwrap_or_default())]
pub struct ConfigError {
    path: Option<String>,
    message: String,
}

impl ConfigError {
    pub fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: Some(path.into()),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self {
            path: None,
            message: message.into(),
        }
    }

    pub fn path(&self) -> Option<&str> {
        self.path.as_deref()
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    /// Prefixes the field path with an enclosing section name.
    pub fn within(mut self, section: &str) -> Self {
        self.path = Some(match self.path {
            Some(p) => format!("{section}.{p}"),
            None => section.to_string(),
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("resident {id} has no expectation for the current day")]
    NoExpectation { id: u32 },
}

/// Data-file ingestion failure. `line` is 1-based and counts the header.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("empty document (no header)")]
    Empty,
    #[error("line {line}: bad header {found:?}, expected {expected:?}")]
    Header {
        line: usize,
        found: String,
        expected: &'static str,
    },
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
    #[error("line {line}: date {found} out of order (expected {expected})")]
    NonMonotone {
        line: usize,
        expected: NaiveDate,
        found: NaiveDate,
    },
    #[error("line {line}: missing day(s) before {found} (expected {expected})")]
    Gap {
        line: usize,
        expected: NaiveDate,
        found: NaiveDate,
    },
    #[error("no data rows")]
    NoRows,
    #[error("date range mismatch; vigilance dates outside rain series: {}", format_dates(.outside))]
    RangeMismatch { outside: Vec<NaiveDate> },
    #[error("io: {0}")]
    Io(String),
}

impl IngestError {
    pub fn line(&self) -> Option<usize> {
        match self {
            IngestError::Header { line, .. }
            | IngestError::Row { line, .. }
            | IngestError::NonMonotone { line, .. }
            | IngestError::Gap { line, .. } => Some(*line),
            _ => None,
        }
    }
}

fn format_dates(dates: &[NaiveDate]) -> String {
    const SHOWN: usize = 10;
    let mut s = dates
        .iter()
        .take(SHOWN)
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    if dates.len() > SHOWN {
        s.push_str(&format!(" ... ({} total)", dates.len()));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("scenario has no days")]
    Empty,
    #[error("day {index}: date {found} breaks the daily cadence (expected {expected})")]
    Cadence {
        index: usize,
        expected: NaiveDate,
        found: NaiveDate,
    },
    #[error("day {index}: {message}")]
    Day { index: usize, message: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("protocol: expected phase {expected:?}, session is in {actual:?}")]
    Protocol { expected: Phase, actual: Phase },
    #[error("session complete: no days left to play")]
    Completed,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Agent(#[from] AgentError),
}
