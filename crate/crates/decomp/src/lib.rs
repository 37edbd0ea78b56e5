//! Breaking claims into atomic facts and putting subsets of them back together.

mod error;
mod facts;
mod ops;

pub use error::DecompError;
pub use facts::{power_set, AtomicFact, FactSubset, DEFAULT_ATOM_CAP};
pub use ops::{decompose, decontextualize, merge, parse_bullets, Decontextualized};
