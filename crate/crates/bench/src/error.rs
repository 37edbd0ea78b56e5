use std::path::PathBuf;

use groundfact_annotate::AnnotateError;
use groundfact_checker::CheckerError;
use groundfact_core::metrics::MetricsError;
use groundfact_core::CoreError;
use groundfact_decomp::DecompError;
use groundfact_llm::config::ConfigError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_BACKEND: i32 = 3;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{0}")]
    Usage(String),
    #[error("reading {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Schema { path: PathBuf, line: usize, message: String },
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("dataset {dataset:?}: {source}")]
    Dataset {
        dataset: String,
        #[source]
        source: MetricsError,
    },
    #[error("record {id:?}: {source}")]
    Record {
        id: String,
        #[source]
        source: CheckerError,
    },
    #[error(transparent)]
    Checker(#[from] CheckerError),
    #[error(transparent)]
    Gateway(#[from] ConfigError),
    #[error(transparent)]
    Annotate(#[from] AnnotateError),
    #[error("{failed} of {total} synthesis input(s) failed; first: {first}")]
    Synth { failed: usize, total: usize, first: String },
}

fn checker_is_backend(e: &CheckerError) -> bool {
    matches!(
        e,
        CheckerError::Transport(_)
            | CheckerError::Status { .. }
            | CheckerError::Gateway(_)
            | CheckerError::Decomp(DecompError::Gateway(_))
    )
}

impl BenchError {
    /// 1 for usage errors, 3 for unreachable or failing backends, 2 for
    /// everything wrong with the data.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => EXIT_USAGE,
            BenchError::Gateway(ConfigError::Io { .. }) => EXIT_DATA,
            BenchError::Gateway(_) => EXIT_USAGE,
            BenchError::Checker(CheckerError::BadPlan(_) | CheckerError::BadPolicy(_) | CheckerError::BadSpec(_)) => {
                EXIT_USAGE
            }
            BenchError::Checker(e) | BenchError::Record { source: e, .. } if checker_is_backend(e) => EXIT_BACKEND,
            BenchError::Synth { .. } => EXIT_BACKEND,
            BenchError::Annotate(AnnotateError::Io(_)) => EXIT_BACKEND,
            BenchError::Annotate(AnnotateError::Config(_) | AnnotateError::InvalidConfig(_)) => EXIT_USAGE,
            _ => EXIT_DATA,
        }
    }
}
