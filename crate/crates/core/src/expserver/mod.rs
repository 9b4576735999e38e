//! Experiment server: qualification, list assignment and response logging
//! over HTTP, backed by an append-only event log.

mod http;
mod ledger;
mod store;

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::labels::Answer;

pub use http::{router, AppState, Server, ServerConfig};
pub use ledger::{
    grade_qualification, AssignError, AssignPlan, Event, Ledger, Pending, Progress, RecordCheck,
    RecordError, RESPONSES_PER_ITEM,
};
pub use store::{read_events, EventLog};

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: corrupt log entry: {message}")]
    CorruptLog {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Listing(#[from] crate::listing::ListingError),
}

impl ServerError {
    fn io(path: &Path, source: std::io::Error) -> ServerError {
        ServerError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// One yes/no answer with reading and response times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub worker_id: String,
    pub item_id: String,
    pub list_id: String,
    pub response: Answer,
    pub rt_premise_ms: u64,
    pub rt_question_ms: u64,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualificationResult {
    pub worker_id: String,
    pub n_correct: u32,
    pub total: u32,
    pub passed: bool,
}

/// Response records from a server log, in log order.
pub fn read_responses(path: impl AsRef<Path>) -> Result<Vec<ResponseRecord>, ServerError> {
    Ok(read_events(path)?
        .into_iter()
        .filter_map(|e| match e {
            Event::Response { record, .. } => Some(record),
            _ => None,
        })
        .collect())
}

/// Default location of the log next to an items file.
pub fn default_log_path(items: &Path) -> PathBuf {
    items.with_file_name("gelp.log.jsonl")
}
