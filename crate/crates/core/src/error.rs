use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("unknown label {label:?} in dataset {dataset:?}")]
    UnknownLabel { label: String, dataset: String },
    #[error("claim text is empty (record {0:?})")]
    EmptyClaim(String),
    #[error("evidence document {0:?} has empty text")]
    EmptyEvidence(String),
    #[error("benchmark record {0:?} has no evidence documents")]
    NoEvidence(String),
    #[error("cannot split an empty record list")]
    EmptySplitInput,
    #[error("cannot split: {0}")]
    CannotSplit(String),
    #[error("split fraction must lie in (0, 1), got {0}")]
    BadFraction(f64),
    #[error("unknown split {0:?}")]
    UnknownSplit(String),
}
