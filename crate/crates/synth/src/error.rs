use std::fmt;

use groundfact_decomp::DecompError;
use groundfact_llm::GatewayError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The gated step at which a datapoint was given up on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    FactExpansion,
    SupportingDocument,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::FactExpansion => "fact expansion",
            Stage::SupportingDocument => "supporting document",
        })
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("{stage} gate not passed within {attempts} attempt(s); datapoint dropped")]
    Dropped { stage: Stage, attempts: u32 },
    #[error("malformed {what} ({reason}): {raw:?}")]
    Format {
        what: &'static str,
        reason: String,
        raw: String,
    },
    #[error("document has {sentences} sentence(s); at least 3 are needed")]
    TooShort { sentences: usize },
    #[error("summary is empty")]
    EmptySummary,
    #[error("summary has {words} words, more than the hard limit of {limit}")]
    SummaryTooLong { words: usize, limit: usize },
    #[error("summary spans {count} sentences: {raw:?}")]
    MultiSentenceSummary { count: usize, raw: String },
    #[error("attempts must be at least 1")]
    NoAttempts,
    #[error("no sentence pairs to write a document from")]
    NoPairs,
}

impl SynthError {
    /// True for gate exhaustion, which drops a datapoint rather than failing a run.
    pub fn is_drop(&self) -> bool {
        matches!(self, SynthError::Dropped { .. })
    }
}
