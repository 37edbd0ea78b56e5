use groundfact_llm::GatewayError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("claim is empty")]
    EmptyClaim,
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("cannot parse fact list ({reason}): {raw:?}")]
    Unparseable { reason: String, raw: String },
    #[error("completion contains no facts: {raw:?}")]
    NoFacts { raw: String },
    #[error("{count} atomic facts exceed the cap of {cap}")]
    TooManyAtoms { count: usize, cap: usize },
    #[error("invalid fact subset: {0}")]
    InvalidSubset(String),
    #[error("merge produced no sentence")]
    EmptyMerge,
    #[error("merge produced {count} sentences: {raw:?}")]
    MultiSentence { count: usize, raw: String },
    #[error("malformed decontextualization answer ({reason}): {raw:?}")]
    BadDecontext { reason: String, raw: String },
    #[error("claim marked as needing context but no rewrite given: {raw:?}")]
    InconsistentVerdict { raw: String },
}
