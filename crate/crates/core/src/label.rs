//! Mapping of source-dataset labels onto the binary supported/unsupported scheme.

use crate::error::CoreError;
use crate::types::SupportLabel;

const SUPPORTED: &[&str] = &[
    "supported",
    "fully attributable",
    "completely support",
    "completely supported",
    "complete",
    // binary sources
    "1",
    "true",
];

const UNSUPPORTED: &[&str] = &[
    "unsupported",
    "not supported",
    "non-supported",
    "non supported",
    "partially-supported",
    "partially supported",
    "partially support",
    "partially attributable",
    "contradictory",
    "partial",
    "refute",
    "refuted",
    "irrelevant",
    "incomplete",
    // binary sources
    "0",
    "false",
];

fn normalize(raw: &str) -> String {
    raw.trim()
        .replace('_', " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Unifies a raw source label. Unknown labels are rejected rather than folded
/// into `Unsupported`.
pub fn unify_label(raw: &str, dataset: &str) -> Result<SupportLabel, CoreError> {
    let key = normalize(raw);
    if SUPPORTED.contains(&key.as_str()) {
        Ok(SupportLabel::Supported)
    } else if UNSUPPORTED.contains(&key.as_str()) {
        Ok(SupportLabel::Unsupported)
    } else {
        Err(CoreError::UnknownLabel {
            label: raw.to_string(),
            dataset: dataset.to_string(),
        })
    }
}

/// Every label string `unify_label` accepts, after normalization.
pub fn known_labels() -> impl Iterator<Item = &'static str> {
    SUPPORTED.iter().chain(UNSUPPORTED.iter()).copied()
}
