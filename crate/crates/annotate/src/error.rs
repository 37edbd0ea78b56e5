use std::path::PathBuf;

use thiserror::Error;

use crate::task::Status;

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("reading {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed { path: PathBuf, line: usize, message: String },
    #[error("parsing service config: {0}")]
    Config(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("duplicate task id {0:?}")]
    DuplicateTask(String),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("{annotator:?} already submitted a verdict for task {task:?}")]
    DuplicateVerdict { task: String, annotator: String },
    #[error("task {task:?} is {status} and accepts no more verdicts")]
    Closed { task: String, status: Status },
    #[error("task {task:?} is {status}; only tasks with disagreeing verdicts can be adjudicated")]
    NotAdjudicable { task: String, status: Status },
    #[error("{} task(s) unresolved: {}", .0.len(), .0.join(", "))]
    Unresolved(Vec<String>),
    #[error("agreement: {0}")]
    Metrics(#[from] groundfact_core::metrics::MetricsError),
}
