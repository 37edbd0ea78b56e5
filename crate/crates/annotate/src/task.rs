//! Annotation tasks and their status machine.
//!
//! ```text
//! open -> complete -> resolved                 (unanimous verdicts)
//! open -> complete -> adjudicating -> resolved (disagreement)
//! ```

use std::collections::BTreeMap;
use std::fmt;

use groundfact_core::SupportLabel;
use serde::{Deserialize, Serialize};

use crate::AnnotateError;

/// One (document, claim) pair to annotate. `label` is the stored synthetic or
/// gold label and never leaves the server in an annotator-facing payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub id: String,
    /// Free-form group name used to split the report, e.g. `c2d` or `d2c`.
    pub pipeline: String,
    pub document: String,
    pub claim: String,
    pub label: SupportLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Supported,
    Unsupported,
}

impl From<Verdict> for SupportLabel {
    fn from(v: Verdict) -> Self {
        SupportLabel::from_bool(v == Verdict::Supported)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Open,
    Complete,
    Adjudicating,
    Resolved,
}

impl Status {
    fn may_become(self, next: Status) -> bool {
        use Status::*;
        matches!(
            (self, next),
            (Open, Complete) | (Complete, Adjudicating) | (Complete, Resolved) | (Adjudicating, Resolved)
        )
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Open => "open",
            Status::Complete => "complete",
            Status::Adjudicating => "adjudicating",
            Status::Resolved => "resolved",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictEntry {
    pub verdict: Verdict,
    /// Client-reported time spent on the task.
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub spec: TaskSpec,
    verdicts: BTreeMap<String, VerdictEntry>,
    adjudicated: Option<Verdict>,
    history: Vec<Status>,
}

impl Task {
    pub fn new(spec: TaskSpec) -> Self {
        Self {
            spec,
            verdicts: BTreeMap::new(),
            adjudicated: None,
            history: vec![Status::Open],
        }
    }

    pub fn id(&self) -> &str {
        &self.spec.id
    }

    pub fn status(&self) -> Status {
        *self.history.last().expect("history starts with open")
    }

    /// Every status the task has been in, oldest first.
    pub fn history(&self) -> &[Status] {
        &self.history
    }

    /// Pre-adjudication verdicts keyed by annotator name.
    pub fn verdicts(&self) -> &BTreeMap<String, VerdictEntry> {
        &self.verdicts
    }

    pub fn verdict_of(&self, annotator: &str) -> Option<Verdict> {
        self.verdicts.get(annotator).map(|e| e.verdict)
    }

    pub fn adjudicated(&self) -> Option<Verdict> {
        self.adjudicated
    }

    /// The adjudicated verdict, or the shared verdict of a unanimous task.
    pub fn resolved(&self) -> Option<Verdict> {
        if self.status() != Status::Resolved {
            return None;
        }
        self.adjudicated.or_else(|| self.verdicts.values().next().map(|e| e.verdict))
    }

    fn advance(&mut self, next: Status) {
        let current = self.status();
        assert!(current.may_become(next), "illegal transition {current} -> {next}");
        self.history.push(next);
    }

    /// Records a verdict. Once `required` distinct annotators have answered,
    /// the task moves to `complete` and straight on to `resolved` or
    /// `adjudicating`.
    pub fn submit(
        &mut self,
        annotator: &str,
        verdict: Verdict,
        elapsed_ms: Option<u64>,
        required: usize,
    ) -> Result<(), AnnotateError> {
        if self.verdicts.contains_key(annotator) {
            return Err(AnnotateError::DuplicateVerdict {
                task: self.spec.id.clone(),
                annotator: annotator.to_string(),
            });
        }
        if self.status() != Status::Open {
            return Err(AnnotateError::Closed {
                task: self.spec.id.clone(),
                status: self.status(),
            });
        }
        self.verdicts
            .insert(annotator.to_string(), VerdictEntry { verdict, elapsed_ms });
        if self.verdicts.len() >= required {
            self.advance(Status::Complete);
            let first = self.verdicts.values().next().map(|e| e.verdict);
            if self.verdicts.values().all(|e| Some(e.verdict) == first) {
                self.advance(Status::Resolved);
            } else {
                self.advance(Status::Adjudicating);
            }
        }
        Ok(())
    }

    pub fn adjudicate(&mut self, verdict: Verdict) -> Result<(), AnnotateError> {
        if self.status() != Status::Adjudicating {
            return Err(AnnotateError::NotAdjudicable {
                task: self.spec.id.clone(),
                status: self.status(),
            });
        }
        self.adjudicated = Some(verdict);
        self.advance(Status::Resolved);
        Ok(())
    }
}
