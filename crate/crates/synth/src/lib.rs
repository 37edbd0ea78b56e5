//! Synthetic training data for grounded fact-checkers.
//!
//! [`c2d`] starts from human-written claims and writes documents around them,
//! deliberately leaving out one half of a fact's evidence to produce
//! non-supporting documents. [`d2c`] starts from real documents, summarizes
//! three chunks, and labels subclaims by ablating sentences and by checking
//! against the other chunks. [`simp`] holds the single-prompt baselines.

pub mod batch;
pub mod c2d;
pub mod d2c;
mod error;
pub mod export;
pub mod gate;
pub mod simp;
pub mod types;

pub use error::{Stage, SynthError};
pub use types::{
    EntailmentCheck, GateKind, GateRecord, GenDoc, Omission, Pipeline, Provenance, RejectionStats, SynthTuple,
};
