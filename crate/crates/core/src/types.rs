use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::label::unify_label;

/// Binary verdict of a grounded fact-checker. Serialized as `0` / `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum SupportLabel {
    Unsupported = 0,
    Supported = 1,
}

impl SupportLabel {
    pub fn from_bool(supported: bool) -> Self {
        if supported {
            SupportLabel::Supported
        } else {
            SupportLabel::Unsupported
        }
    }

    pub fn is_supported(self) -> bool {
        self == SupportLabel::Supported
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

impl From<SupportLabel> for u8 {
    fn from(label: SupportLabel) -> u8 {
        label.as_u8()
    }
}

impl TryFrom<u8> for SupportLabel {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            0 => Ok(SupportLabel::Unsupported),
            1 => Ok(SupportLabel::Supported),
            other => Err(format!("support label must be 0 or 1, got {other}")),
        }
    }
}

impl fmt::Display for SupportLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupportLabel::Supported => f.write_str("supported"),
            SupportLabel::Unsupported => f.write_str("unsupported"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceDoc {
    pub id: String,
    pub text: String,
}

impl EvidenceDoc {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self, CoreError> {
        let id = id.into();
        let text = text.into();
        if text.trim().is_empty() {
            return Err(CoreError::EmptyEvidence(id));
        }
        Ok(Self { id, text })
    }
}

/// A claim sentence, the sentences that preceded it in its response, and the
/// documents it should be checked against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundedClaim {
    pub id: String,
    pub text: String,
    pub context: Vec<String>,
    pub evidence: Vec<EvidenceDoc>,
    pub query_group: String,
}

impl GroundedClaim {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        context: Vec<String>,
        evidence: Vec<EvidenceDoc>,
        query_group: impl Into<String>,
    ) -> Result<Self, CoreError> {
        let id = id.into();
        let text = text.into();
        if text.trim().is_empty() {
            return Err(CoreError::EmptyClaim(id));
        }
        Ok(Self {
            id,
            text,
            context,
            evidence,
            query_group: query_group.into(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Validation,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Validation => f.write_str("validation"),
            Split::Test => f.write_str("test"),
        }
    }
}

impl FromStr for Split {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "validation" | "dev" | "val" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            _ => Err(CoreError::UnknownSplit(s.to_string())),
        }
    }
}

/// A normalized benchmark item before split assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsplitRecord {
    pub dataset: String,
    pub grounded: GroundedClaim,
    pub gold: SupportLabel,
    pub raw_label: String,
}

impl UnsplitRecord {
    pub fn with_split(self, split: Split) -> BenchRecord {
        BenchRecord {
            dataset: self.dataset,
            split,
            grounded: self.grounded,
            gold: self.gold,
            raw_label: self.raw_label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub dataset: String,
    pub split: Split,
    pub grounded: GroundedClaim,
    pub gold: SupportLabel,
    pub raw_label: String,
}

impl BenchRecord {
    pub fn id(&self) -> &str {
        &self.grounded.id
    }
}

/// One line of the benchmark ingestion format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestRow {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    pub query_group: String,
    pub claim: String,
    #[serde(default)]
    pub context: Vec<String>,
    pub docs: Vec<String>,
    pub raw_label: String,
}

impl IngestRow {
    /// Validates the row and unifies its label. `dataset` is used when the row
    /// carries no dataset of its own.
    pub fn normalize(self, dataset: &str) -> Result<UnsplitRecord, CoreError> {
        let dataset = self.dataset.unwrap_or_else(|| dataset.to_string());
        let gold = unify_label(&self.raw_label, &dataset)?;
        let grounded = build_grounded(self.id, self.claim, self.context, self.docs, self.query_group)?;
        Ok(UnsplitRecord {
            dataset,
            grounded,
            gold,
            raw_label: self.raw_label,
        })
    }
}

/// Flat on-disk form of a [`BenchRecord`] (the normalized benchmark file).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub id: String,
    pub dataset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    pub query_group: String,
    pub claim: String,
    #[serde(default)]
    pub context: Vec<String>,
    pub docs: Vec<String>,
    pub raw_label: String,
    pub gold: SupportLabel,
}

impl BenchRow {
    pub fn from_unsplit(rec: &UnsplitRecord) -> Self {
        Self {
            id: rec.grounded.id.clone(),
            dataset: rec.dataset.clone(),
            split: None,
            query_group: rec.grounded.query_group.clone(),
            claim: rec.grounded.text.clone(),
            context: rec.grounded.context.clone(),
            docs: rec.grounded.evidence.iter().map(|d| d.text.clone()).collect(),
            raw_label: rec.raw_label.clone(),
            gold: rec.gold,
        }
    }

    pub fn from_record(rec: &BenchRecord) -> Self {
        Self {
            id: rec.grounded.id.clone(),
            dataset: rec.dataset.clone(),
            split: Some(rec.split),
            query_group: rec.grounded.query_group.clone(),
            claim: rec.grounded.text.clone(),
            context: rec.grounded.context.clone(),
            docs: rec.grounded.evidence.iter().map(|d| d.text.clone()).collect(),
            raw_label: rec.raw_label.clone(),
            gold: rec.gold,
        }
    }

    pub fn into_unsplit(self) -> Result<UnsplitRecord, CoreError> {
        let gold = unify_label(&self.raw_label, &self.dataset)?;
        if gold != self.gold {
            return Err(CoreError::UnknownLabel {
                label: format!("{} (stored gold {} disagrees)", self.raw_label, self.gold.as_u8()),
                dataset: self.dataset,
            });
        }
        let grounded = build_grounded(self.id, self.claim, self.context, self.docs, self.query_group)?;
        Ok(UnsplitRecord {
            dataset: self.dataset,
            grounded,
            gold,
            raw_label: self.raw_label,
        })
    }

    /// Fails when the row has not been assigned a split yet.
    pub fn into_record(self) -> Result<BenchRecord, CoreError> {
        let split = self
            .split
            .ok_or_else(|| CoreError::UnknownSplit(format!("record {:?} has no split", self.id)))?;
        Ok(self.into_unsplit()?.with_split(split))
    }
}

fn build_grounded(
    id: String,
    claim: String,
    context: Vec<String>,
    docs: Vec<String>,
    query_group: String,
) -> Result<GroundedClaim, CoreError> {
    if docs.is_empty() {
        return Err(CoreError::NoEvidence(id));
    }
    let evidence = docs
        .into_iter()
        .enumerate()
        .map(|(k, text)| EvidenceDoc::new(format!("{id}#d{k}"), text))
        .collect::<Result<Vec<_>, _>>()?;
    GroundedClaim::new(id, claim, context, evidence, query_group)
}
