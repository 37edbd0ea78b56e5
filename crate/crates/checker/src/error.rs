use groundfact_decomp::DecompError;
use groundfact_llm::GatewayError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CheckerError {
    #[error("claim is empty")]
    EmptyClaim,
    #[error("no evidence documents")]
    NoEvidence,
    #[error("no claims to check")]
    NoClaims,
    #[error("invalid score range ({min}, {max})")]
    InvalidRange { min: f64, max: f64 },
    #[error("score {score} outside declared range ({min}, {max})")]
    ScoreOutOfRange { score: f64, min: f64, max: f64 },
    #[error("checker changed its declared range from ({0}, {1}) to ({2}, {3})")]
    RangeMismatch(f64, f64, f64, f64),
    #[error("no tuned threshold stored for dataset {0:?}")]
    NoThreshold(String),
    #[error("invalid chunk plan {0:?}; expected whitespace:N or sentence:N with N > 0")]
    BadPlan(String),
    #[error("invalid threshold policy {0:?}; expected fixed:T, midpoint or tuned:DATASET")]
    BadPolicy(String),
    #[error("invalid checker {0:?}; expected remote:URL, llm:MODEL or stub")]
    BadSpec(String),
    #[error("remote checker unreachable: {0}")]
    Transport(String),
    #[error("remote checker returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("remote checker response malformed: {0}")]
    Protocol(String),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("cannot read model answer ({reason}): {raw:?}")]
    Answer { reason: String, raw: String },
    #[error("answer has no verdict for claim [{0}]")]
    MissingIndex(usize),
    #[error("answer has an unexpected key {0:?}")]
    ExtraIndex(String),
}
