use groundfact_core::SupportLabel;
use groundfact_decomp::FactSubset;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    C2d,
    D2c,
    C2dSimp,
    D2cSimp,
}

/// Where a tuple came from. Fact indices are zero-based like [`FactSubset`];
/// chunk numbers run 1 to 3; pair sides are 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    C2dSupport {
        claim_id: String,
        subset: FactSubset,
    },
    C2dOmission {
        claim_id: String,
        omitted_fact: usize,
        omitted_side: u8,
        subset: FactSubset,
    },
    D2cSummary {
        doc_id: String,
        chunk: usize,
    },
    D2cAblation {
        doc_id: String,
        claim_chunk: usize,
        removed_sentence: usize,
        subset: FactSubset,
    },
    D2cCross {
        doc_id: String,
        claim_chunk: usize,
        doc_chunk: usize,
        subset: FactSubset,
    },
    C2dSimpSupport {
        claim_id: String,
    },
    C2dSimpRevision {
        claim_id: String,
        revision_type: String,
    },
    D2cSimpEdit {
        doc_id: String,
        chunk: usize,
        edit: usize,
    },
}

impl Provenance {
    /// The claim or document id the tuple was derived from.
    pub fn source_id(&self) -> &str {
        match self {
            Provenance::C2dSupport { claim_id, .. }
            | Provenance::C2dOmission { claim_id, .. }
            | Provenance::C2dSimpSupport { claim_id }
            | Provenance::C2dSimpRevision { claim_id, .. } => claim_id,
            Provenance::D2cSummary { doc_id, .. }
            | Provenance::D2cAblation { doc_id, .. }
            | Provenance::D2cCross { doc_id, .. }
            | Provenance::D2cSimpEdit { doc_id, .. } => doc_id,
        }
    }
}

/// One training example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthTuple {
    pub doc: String,
    pub claim: String,
    pub label: SupportLabel,
    pub pipeline: Pipeline,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntailmentCheck {
    pub source: String,
    pub claim: String,
    pub entailed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    /// Every pair sentence must be entailed by the generated document.
    Mention,
    /// The kept half of a pair plus the other facts must not entail the fact.
    Residual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateRecord {
    pub gate: GateKind,
    pub attempt: u32,
    pub checks: Vec<EntailmentCheck>,
}

impl GateRecord {
    pub fn all_entailed(&self) -> bool {
        self.checks.iter().all(|c| c.entailed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Omission {
    pub fact: usize,
    pub side: u8,
}

/// A generated passage. `omitted` is `None` for the supporting document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenDoc {
    pub text: String,
    pub omitted: Option<Omission>,
    pub gate_trace: Vec<GateRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounter {
    pub rejected: u64,
    pub checked: u64,
}

impl GateCounter {
    pub fn record(&mut self, rejected: bool) {
        self.checked += 1;
        if rejected {
            self.rejected += 1;
        }
    }

    pub fn rate(&self) -> Option<f64> {
        (self.checked > 0).then(|| self.rejected as f64 / self.checked as f64)
    }

    fn absorb(&mut self, other: &GateCounter) {
        self.rejected += other.rejected;
        self.checked += other.checked;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionStats {
    /// Sentence pairs failing the joint-only entailment condition.
    pub pair_gate: GateCounter,
    /// Supporting documents that left out a pair sentence.
    pub support_doc_gate: GateCounter,
    /// Non-supporting candidates discarded because the fact stayed supported.
    pub nonsupport_discard: GateCounter,
    /// Non-supporting candidates lost to backend failures.
    pub generation_failures: u64,
}

impl RejectionStats {
    pub fn absorb(&mut self, other: &RejectionStats) {
        self.pair_gate.absorb(&other.pair_gate);
        self.support_doc_gate.absorb(&other.support_doc_gate);
        self.nonsupport_discard.absorb(&other.nonsupport_discard);
        self.generation_failures += other.generation_failures;
    }
}
