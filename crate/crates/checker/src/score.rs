use groundfact_core::text::SentenceSplitter;
use groundfact_core::{EvidenceDoc, SupportLabel};
use groundfact_decomp::{decompose, AtomicFact};
use groundfact_llm::Gateway;
use serde::{Deserialize, Serialize};

use crate::{chunk, decide, Checker, CheckerError, CheckerOutput, ChunkPlan, ThresholdPolicy};

/// Highest chunk score over all documents. Any failed chunk call fails the
/// whole claim.
pub fn score_claim(
    checker: &dyn Checker,
    evidence: &[EvidenceDoc],
    claim: &str,
    plan: &ChunkPlan,
    splitter: &dyn SentenceSplitter,
) -> Result<CheckerOutput, CheckerError> {
    if claim.trim().is_empty() {
        return Err(CheckerError::EmptyClaim);
    }
    let mut best: Option<CheckerOutput> = None;
    for doc in evidence {
        for piece in chunk(&doc.text, plan, splitter) {
            let out = checker.score(&piece, claim)?;
            best = Some(match best {
                None => out,
                Some(b) => {
                    if b.range != out.range {
                        return Err(CheckerError::RangeMismatch(b.range.min, b.range.max, out.range.min, out.range.max));
                    }
                    if out.score > b.score {
                        out
                    } else {
                        b
                    }
                }
            });
        }
    }
    best.ok_or(CheckerError::NoEvidence)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactVerdict {
    pub fact: AtomicFact,
    pub output: CheckerOutput,
    pub label: SupportLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposedVerdict {
    pub label: SupportLabel,
    pub facts: Vec<FactVerdict>,
}

/// Supported iff every fact is supported on its own.
pub fn check_facts(
    checker: &dyn Checker,
    evidence: &[EvidenceDoc],
    facts: &[AtomicFact],
    plan: &ChunkPlan,
    policy: &ThresholdPolicy,
    splitter: &dyn SentenceSplitter,
) -> Result<DecomposedVerdict, CheckerError> {
    if facts.is_empty() {
        return Err(CheckerError::EmptyClaim);
    }
    let mut verdicts = Vec::with_capacity(facts.len());
    for fact in facts {
        let output = score_claim(checker, evidence, &fact.text, plan, splitter)?;
        let label = decide(&output, policy)?;
        verdicts.push(FactVerdict {
            fact: fact.clone(),
            output,
            label,
        });
    }
    let all = verdicts.iter().all(|v| v.label.is_supported());
    Ok(DecomposedVerdict {
        label: SupportLabel::from_bool(all),
        facts: verdicts,
    })
}

pub fn check_decomposed(
    gw: &Gateway,
    checker: &dyn Checker,
    evidence: &[EvidenceDoc],
    claim: &str,
    plan: &ChunkPlan,
    policy: &ThresholdPolicy,
    splitter: &dyn SentenceSplitter,
) -> Result<DecomposedVerdict, CheckerError> {
    let facts = decompose(gw, claim)?;
    check_facts(checker, evidence, &facts, plan, policy, splitter)
}
