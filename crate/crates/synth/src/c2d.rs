//! Claim-to-document synthesis.
//!
//! Each atomic fact of a claim is expanded into two sentences that support it
//! only together. A supporting document mentions every sentence; each
//! non-supporting document drops one sentence of one pair, so the fact it
//! belonged to loses its support while the rest of the claim keeps it.

use groundfact_core::SupportLabel;
use groundfact_decomp::{decompose, merge, power_set, AtomicFact, DecompError, FactSubset, DEFAULT_ATOM_CAP};
use groundfact_llm::template::dash_list;
use groundfact_llm::{Gateway, LlmRequest, TemplateName};
use serde::{Deserialize, Serialize};

use crate::gate::{entails, join_sentences};
use crate::{GateKind, GateRecord, GenDoc, Omission, Pipeline, Provenance, RejectionStats, Stage, SynthError, SynthTuple};

pub const DEFAULT_ATTEMPTS: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct C2dClaim {
    pub id: String,
    pub claim: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct C2dConfig {
    pub attempts: u32,
    pub atom_cap: usize,
}

impl Default for C2dConfig {
    fn default() -> Self {
        Self {
            attempts: DEFAULT_ATTEMPTS,
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub fact_index: usize,
    pub first: String,
    pub second: String,
}

impl SentencePair {
    pub fn side(&self, side: u8) -> &str {
        if side == 1 {
            &self.first
        } else {
            &self.second
        }
    }
}

fn parse_pair(raw: &str) -> Option<(String, String)> {
    let mut first = None;
    let mut second = None;
    for line in raw.lines().map(str::trim) {
        if let Some(rest) = line.strip_prefix("Sentence 1:") {
            first = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("Sentence 2:") {
            second = Some(rest.trim().to_string());
        }
    }
    match (first, second) {
        (Some(a), Some(b)) if !a.is_empty() && !b.is_empty() => Some((a, b)),
        _ => None,
    }
}

/// Generates a sentence pair that entails the fact jointly but not
/// individually. Unparseable completions count as rejected attempts.
pub fn expand_fact(
    gw: &Gateway,
    fact: &AtomicFact,
    attempts: u32,
    stats: &mut RejectionStats,
) -> Result<SentencePair, SynthError> {
    if attempts == 0 {
        return Err(SynthError::NoAttempts);
    }
    let req = LlmRequest::new(TemplateName::AtomicExpansion).bind("claim", &fact.text);
    for attempt in 1..=attempts {
        let raw = gw.complete(&req)?;
        let Some((first, second)) = parse_pair(&raw) else {
            tracing::warn!(fact = fact.index, attempt, "expansion output lacks two sentences");
            stats.pair_gate.record(true);
            continue;
        };
        let passed = entails(gw, &join_sentences(&[&first, &second]), &fact.text)?.entailed
            && !entails(gw, &first, &fact.text)?.entailed
            && !entails(gw, &second, &fact.text)?.entailed;
        stats.pair_gate.record(!passed);
        if passed {
            return Ok(SentencePair {
                fact_index: fact.index,
                first,
                second,
            });
        }
        tracing::debug!(fact = fact.index, attempt, "sentence pair rejected");
    }
    Err(SynthError::Dropped {
        stage: Stage::FactExpansion,
        attempts,
    })
}

fn all_sentences(pairs: &[SentencePair]) -> Vec<&str> {
    pairs.iter().flat_map(|p| [p.first.as_str(), p.second.as_str()]).collect()
}

fn write_passage(gw: &Gateway, sentences: &[&str]) -> Result<String, SynthError> {
    let text = gw.complete(&LlmRequest::new(TemplateName::PassageGen).bind("facts", dash_list(sentences)))?;
    Ok(text.trim().to_string())
}

/// Writes a document mentioning every pair sentence, regenerating until each
/// sentence is individually entailed by it.
pub fn gen_supporting_doc(
    gw: &Gateway,
    pairs: &[SentencePair],
    attempts: u32,
    stats: &mut RejectionStats,
) -> Result<GenDoc, SynthError> {
    if attempts == 0 {
        return Err(SynthError::NoAttempts);
    }
    if pairs.is_empty() {
        return Err(SynthError::NoPairs);
    }
    let sentences = all_sentences(pairs);
    let mut trace = Vec::new();
    for attempt in 1..=attempts {
        let text = write_passage(gw, &sentences)?;
        let mut record = GateRecord {
            gate: GateKind::Mention,
            attempt,
            checks: Vec::new(),
        };
        for s in &sentences {
            let check = entails(gw, &text, s)?;
            let ok = check.entailed;
            record.checks.push(check);
            if !ok {
                break;
            }
        }
        let passed = record.all_entailed();
        trace.push(record);
        stats.support_doc_gate.record(!passed);
        if passed {
            return Ok(GenDoc {
                text,
                omitted: None,
                gate_trace: trace,
            });
        }
    }
    Err(SynthError::Dropped {
        stage: Stage::SupportingDocument,
        attempts,
    })
}

/// The premise left once sentence `side` of fact `i`'s pair is removed: the
/// other half of the pair followed by every other atomic fact, in order.
pub fn residual_premise(pairs: &[SentencePair], facts: &[AtomicFact], i: usize, side: u8) -> String {
    let kept = pairs[i].side(3 - side);
    let mut parts = vec![kept];
    parts.extend(facts.iter().filter(|f| f.index != i).map(|f| f.text.as_str()));
    join_sentences(&parts)
}

/// One candidate per (fact, side). A candidate is kept only when the residual
/// premise fails to entail its fact; generation errors skip that candidate.
pub fn gen_nonsupporting_docs(
    gw: &Gateway,
    pairs: &[SentencePair],
    facts: &[AtomicFact],
    stats: &mut RejectionStats,
) -> Result<Vec<GenDoc>, SynthError> {
    if pairs.is_empty() {
        return Err(SynthError::NoPairs);
    }
    let mut kept = Vec::new();
    for i in 0..pairs.len() {
        for side in [1u8, 2] {
            let premise = residual_premise(pairs, facts, i, side);
            let check = match entails(gw, &premise, &facts[i].text) {
                Ok(c) => c,
                Err(SynthError::Gateway(e)) => {
                    tracing::warn!(fact = i, side, error = %e, "residual check failed; candidate skipped");
                    stats.generation_failures += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            stats.nonsupport_discard.record(check.entailed);
            if check.entailed {
                tracing::debug!(fact = i, side, "fact still supported without the omitted sentence");
                continue;
            }
            let skip = 2 * i + usize::from(side) - 1;
            let sentences: Vec<&str> = all_sentences(pairs)
                .into_iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, s)| s)
                .collect();
            match write_passage(gw, &sentences) {
                Ok(text) => kept.push(GenDoc {
                    text,
                    omitted: Some(Omission { fact: i, side }),
                    gate_trace: vec![GateRecord {
                        gate: GateKind::Residual,
                        attempt: 1,
                        checks: vec![check],
                    }],
                }),
                Err(SynthError::Gateway(e)) => {
                    tracing::warn!(fact = i, side, error = %e, "non-supporting document generation failed");
                    stats.generation_failures += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(kept)
}

/// Merges every subset into a subclaim. Failed merges drop only that subset.
pub fn build_subclaims(
    gw: &Gateway,
    facts: &[AtomicFact],
    subsets: &[FactSubset],
) -> Result<Vec<(FactSubset, String)>, SynthError> {
    let mut out = Vec::with_capacity(subsets.len());
    for subset in subsets {
        match merge(gw, subset, facts) {
            Ok(text) => out.push((subset.clone(), text)),
            Err(e @ (DecompError::MultiSentence { .. } | DecompError::EmptyMerge | DecompError::Gateway(_))) => {
                tracing::warn!(%subset, error = %e, "subclaim merge failed; subset skipped");
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

/// Pairs documents with subclaims. The supporting document supports all of
/// them; a document missing half of fact `i` supports exactly the subclaims
/// that do not contain `i`.
pub fn pair_subclaims(
    claim_id: &str,
    subclaims: &[(FactSubset, String)],
    supporting: &GenDoc,
    nonsupporting: &[GenDoc],
) -> Vec<SynthTuple> {
    let mut out = Vec::with_capacity(subclaims.len() * (nonsupporting.len() + 1));
    for (subset, text) in subclaims {
        out.push(SynthTuple {
            doc: supporting.text.clone(),
            claim: text.clone(),
            label: SupportLabel::Supported,
            pipeline: Pipeline::C2d,
            provenance: Provenance::C2dSupport {
                claim_id: claim_id.to_string(),
                subset: subset.clone(),
            },
        });
    }
    for doc in nonsupporting {
        let Some(om) = doc.omitted else { continue };
        for (subset, text) in subclaims {
            out.push(SynthTuple {
                doc: doc.text.clone(),
                claim: text.clone(),
                label: SupportLabel::from_bool(!subset.contains(om.fact)),
                pipeline: Pipeline::C2d,
                provenance: Provenance::C2dOmission {
                    claim_id: claim_id.to_string(),
                    omitted_fact: om.fact,
                    omitted_side: om.side,
                    subset: subset.clone(),
                },
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C2dOutcome {
    pub claim_id: String,
    pub facts: Vec<AtomicFact>,
    pub pairs: Vec<SentencePair>,
    pub supporting: Option<GenDoc>,
    pub nonsupporting: Vec<GenDoc>,
    pub tuples: Vec<SynthTuple>,
    pub stats: RejectionStats,
    /// Set when a gate or the atom cap removed the claim.
    pub dropped: Option<String>,
}

impl C2dOutcome {
    fn dropped(claim_id: &str, facts: Vec<AtomicFact>, stats: RejectionStats, reason: String) -> Self {
        tracing::info!(claim = claim_id, %reason, "claim dropped");
        Self {
            claim_id: claim_id.to_string(),
            facts,
            pairs: Vec::new(),
            supporting: None,
            nonsupporting: Vec::new(),
            tuples: Vec::new(),
            stats,
            dropped: Some(reason),
        }
    }
}

/// Runs every step for one claim. Gate exhaustion and oversize claims are
/// reported in the outcome; backend and format failures are errors.
pub fn run_c2d(gw: &Gateway, claim: &C2dClaim, cfg: &C2dConfig) -> Result<C2dOutcome, SynthError> {
    let mut stats = RejectionStats::default();
    let facts = decompose(gw, &claim.claim)?;
    let subsets = match power_set(&facts, cfg.atom_cap) {
        Ok(s) => s,
        Err(e @ DecompError::TooManyAtoms { .. }) => {
            return Ok(C2dOutcome::dropped(&claim.id, facts, stats, e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };

    let mut pairs = Vec::with_capacity(facts.len());
    for fact in &facts {
        match expand_fact(gw, fact, cfg.attempts, &mut stats) {
            Ok(p) => pairs.push(p),
            Err(e) if e.is_drop() => return Ok(C2dOutcome::dropped(&claim.id, facts, stats, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    let supporting = match gen_supporting_doc(gw, &pairs, cfg.attempts, &mut stats) {
        Ok(d) => d,
        Err(e) if e.is_drop() => return Ok(C2dOutcome::dropped(&claim.id, facts, stats, e.to_string())),
        Err(e) => return Err(e),
    };
    let nonsupporting = gen_nonsupporting_docs(gw, &pairs, &facts, &mut stats)?;
    let subclaims = build_subclaims(gw, &facts, &subsets)?;
    let tuples = pair_subclaims(&claim.id, &subclaims, &supporting, &nonsupporting);
    Ok(C2dOutcome {
        claim_id: claim.id.clone(),
        facts,
        pairs,
        supporting: Some(supporting),
        nonsupporting,
        tuples,
        stats,
        dropped: None,
    })
}
