//! Scoring claims against grounding documents.
//!
//! A [`Checker`] maps one (chunk, claim) pair to a score in a declared range.
//! Documents are cut into chunks by a [`ChunkPlan`]; the claim's score is the
//! maximum over every chunk of every document, and [`decide`] turns it into a
//! label with a [`ThresholdPolicy`].

mod chunk;
mod error;
mod llm;
mod output;
mod remote;
mod score;
mod spec;
mod stub;

pub use chunk::{chunk, ChunkPlan, ChunkStrategy};
pub use error::CheckerError;
pub use llm::{check_batch_llm, LlmChecker};
pub use output::{decide, Checker, CheckerOutput, ScoreRange, ThresholdPolicy};
pub use remote::RemoteChecker;
pub use score::{check_decomposed, check_facts, score_claim, DecomposedVerdict, FactVerdict};
pub use spec::CheckerSpec;
pub use stub::LexicalStub;
