//! Shared building blocks for grounded fact-checking: the record types every
//! other crate passes around, source-label unification, query-grouped
//! validation/test splits, sentence segmentation, and the evaluation metrics
//! (balanced accuracy, threshold tuning, paired bootstrap, Fleiss' kappa).

pub mod error;
pub mod label;
pub mod metrics;
pub mod split;
pub mod text;
pub mod types;

pub use error::CoreError;
pub use label::unify_label;
pub use split::make_split;
pub use types::{
    BenchRecord, BenchRow, EvidenceDoc, GroundedClaim, IngestRow, Split, SupportLabel,
    UnsplitRecord,
};
