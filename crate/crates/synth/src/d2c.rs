//! Document-to-claim synthesis.
//!
//! A source document is cut into three contiguous chunks and each chunk is
//! summarized into one claim. Subclaims of that claim are labeled against
//! the chunk with one sentence removed (once per sentence) and against the
//! two other chunks, using per-fact entailment verdicts.

use std::path::Path;

use groundfact_core::text::{word_count, RuleSplitter, SentenceSplitter};
use groundfact_core::SupportLabel;
use groundfact_decomp::{decompose, power_set, AtomicFact, FactSubset, DEFAULT_ATOM_CAP};
use groundfact_llm::{Gateway, LlmRequest, TemplateName};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::c2d::build_subclaims;
use crate::gate::{entails, join_sentences};
use crate::{Pipeline, Provenance, SynthError, SynthTuple};

pub const SUMMARY_TARGET_WORDS: usize = 15;
pub const SUMMARY_MAX_WORDS: usize = 20;

/// A source document, given either as raw text or already segmented.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentences: Option<Vec<String>>,
}

impl SourceDoc {
    pub fn from_text(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: Some(text.into()),
            sentences: None,
        }
    }

    pub fn from_sentences<S: Into<String>>(id: impl Into<String>, sentences: impl IntoIterator<Item = S>) -> Self {
        Self {
            id: id.into(),
            text: None,
            sentences: Some(sentences.into_iter().map(Into::into).collect()),
        }
    }

    /// Reads a plain-text file, using the file stem as id.
    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Self::from_text(id, text))
    }

    pub fn segment(&self, splitter: &dyn SentenceSplitter) -> Vec<String> {
        match (&self.sentences, &self.text) {
            (Some(s), _) => s.iter().map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect(),
            (None, Some(t)) => splitter.split(t),
            (None, None) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocChunk {
    pub parent_id: String,
    /// 1, 2 or 3.
    pub index: usize,
    pub sentences: Vec<String>,
}

impl DocChunk {
    pub fn text(&self) -> String {
        join_sentences(&self.sentences)
    }

    /// The chunk with sentence `j` left out.
    pub fn without(&self, j: usize) -> String {
        let kept: Vec<&str> = self
            .sentences
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .map(|(_, s)| s.as_str())
            .collect();
        join_sentences(&kept)
    }
}

/// Boundaries `(a, b)` splitting `words` into `[..a]`, `[a..b]`, `[b..]`,
/// minimizing the largest distance of a chunk's word count from a third of
/// the total. Ties go to the earliest boundaries.
pub fn chunk3_bounds(words: &[usize]) -> Result<(usize, usize), SynthError> {
    let n = words.len();
    if n < 3 {
        return Err(SynthError::TooShort { sentences: n });
    }
    let mut prefix = vec![0usize; n + 1];
    for (i, w) in words.iter().enumerate() {
        prefix[i + 1] = prefix[i] + w;
    }
    let total = prefix[n] as i128;
    let dev = |lo: usize, hi: usize| ((prefix[hi] - prefix[lo]) as i128 * 3 - total).abs();
    let mut best = (i128::MAX, 0, 0);
    for a in 1..n - 1 {
        for b in a + 1..n {
            let worst = dev(0, a).max(dev(a, b)).max(dev(b, n));
            if worst < best.0 {
                best = (worst, a, b);
            }
        }
    }
    Ok((best.1, best.2))
}

pub fn chunk3(doc_id: &str, sentences: &[String]) -> Result<Vec<DocChunk>, SynthError> {
    let words: Vec<usize> = sentences.iter().map(|s| word_count(s)).collect();
    let (a, b) = chunk3_bounds(&words)?;
    Ok([(0, a), (a, b), (b, sentences.len())]
        .into_iter()
        .enumerate()
        .map(|(k, (lo, hi))| DocChunk {
            parent_id: doc_id.to_string(),
            index: k + 1,
            sentences: sentences[lo..hi].to_vec(),
        })
        .collect())
}

/// One-sentence summary of a chunk. Summaries longer than the requested
/// length are accepted with a warning up to [`SUMMARY_MAX_WORDS`].
pub fn summarize_chunk(gw: &Gateway, chunk: &DocChunk) -> Result<String, SynthError> {
    let raw = gw.complete(&LlmRequest::new(TemplateName::ChunkSummarization).bind("document", chunk.text()))?;
    let trimmed = raw.trim();
    let body = trimmed.strip_prefix("Summary:").unwrap_or(trimmed).trim();
    if body.is_empty() {
        return Err(SynthError::EmptySummary);
    }
    let count = RuleSplitter
        .split(body)
        .len()
        .max(body.lines().filter(|l| !l.trim().is_empty()).count());
    if count > 1 {
        return Err(SynthError::MultiSentenceSummary { count, raw });
    }
    let words = word_count(body);
    if words > SUMMARY_MAX_WORDS {
        return Err(SynthError::SummaryTooLong {
            words,
            limit: SUMMARY_MAX_WORDS,
        });
    }
    if words > SUMMARY_TARGET_WORDS {
        tracing::warn!(chunk = chunk.index, doc = %chunk.parent_id, words, "summary longer than requested");
    }
    Ok(body.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VerdictTarget {
    /// The claim's own chunk minus one sentence (zero-based).
    Ablated { removed_sentence: usize },
    /// Another chunk, numbered 1 to 3.
    Chunk { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub target: VerdictTarget,
    /// One verdict per atomic fact, by fact index.
    pub verdicts: Vec<bool>,
}

/// Every per-fact verdict collected for one chunk's claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactVerdictMatrix {
    pub claim_chunk: usize,
    pub facts: Vec<AtomicFact>,
    pub rows: Vec<VerdictRow>,
}

impl FactVerdictMatrix {
    pub fn new(claim_chunk: usize, facts: Vec<AtomicFact>) -> Self {
        Self {
            claim_chunk,
            facts,
            rows: Vec::new(),
        }
    }

    pub fn row(&self, target: VerdictTarget) -> Option<&[bool]> {
        self.rows.iter().find(|r| r.target == target).map(|r| r.verdicts.as_slice())
    }

    /// Supported iff every member fact is entailed.
    pub fn label(&self, target: VerdictTarget, subset: &FactSubset) -> Option<SupportLabel> {
        let row = self.row(target)?;
        Some(SupportLabel::from_bool(subset.members().iter().all(|&k| row[k])))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkClaim {
    pub chunk: usize,
    pub summary: String,
    pub facts: Vec<AtomicFact>,
    pub subclaims: Vec<(FactSubset, String)>,
}

/// Verdicts for every fact against every premise, fanned out in parallel.
/// A premise whose checks fail in any way yields `None`.
fn verdict_rows(
    gw: &Gateway,
    facts: &[AtomicFact],
    premises: Vec<(VerdictTarget, String)>,
) -> Vec<(VerdictTarget, Option<Vec<bool>>)> {
    let jobs: Vec<(usize, usize)> = (0..premises.len())
        .flat_map(|p| (0..facts.len()).map(move |k| (p, k)))
        .collect();
    let results: Vec<Result<bool, SynthError>> = jobs
        .par_iter()
        .map(|&(p, k)| entails(gw, &premises[p].1, &facts[k].text).map(|c| c.entailed))
        .collect();
    let mut rows: Vec<(VerdictTarget, Option<Vec<bool>>)> = premises
        .iter()
        .map(|(t, _)| (*t, Some(Vec::with_capacity(facts.len()))))
        .collect();
    for ((p, _), result) in jobs.into_iter().zip(results) {
        let target = rows[p].0;
        match (result, &mut rows[p].1) {
            (Ok(v), Some(row)) => row.push(v),
            (Err(e), slot @ Some(_)) => {
                tracing::warn!(?target, error = %e, "entailment check failed; verdict row skipped");
                *slot = None;
            }
            (_, None) => {}
        }
    }
    rows
}

fn emit(
    claim: &ChunkClaim,
    matrix: &FactVerdictMatrix,
    target: VerdictTarget,
    doc: &str,
    provenance: impl Fn(FactSubset) -> Provenance,
) -> Vec<SynthTuple> {
    claim
        .subclaims
        .iter()
        .filter_map(|(subset, text)| {
            Some(SynthTuple {
                doc: doc.to_string(),
                claim: text.clone(),
                label: matrix.label(target, subset)?,
                pipeline: Pipeline::D2c,
                provenance: provenance(subset.clone()),
            })
        })
        .collect()
}

/// Labels the claim's subclaims against its own chunk with each sentence
/// removed in turn. Verdict rows are recorded in `matrix`.
pub fn doc_claim_aug(
    gw: &Gateway,
    chunk: &DocChunk,
    claim: &ChunkClaim,
    matrix: &mut FactVerdictMatrix,
) -> Vec<SynthTuple> {
    if chunk.sentences.len() < 2 {
        tracing::debug!(chunk = chunk.index, "single-sentence chunk has no ablations");
        return Vec::new();
    }
    let premises: Vec<(VerdictTarget, String)> = (0..chunk.sentences.len())
        .map(|j| (VerdictTarget::Ablated { removed_sentence: j }, chunk.without(j)))
        .collect();
    let docs: Vec<String> = premises.iter().map(|(_, d)| d.clone()).collect();
    let mut out = Vec::new();
    for ((target, verdicts), doc) in verdict_rows(gw, &claim.facts, premises).into_iter().zip(docs) {
        let Some(verdicts) = verdicts else { continue };
        matrix.rows.push(VerdictRow { target, verdicts });
        let VerdictTarget::Ablated { removed_sentence } = target else { unreachable!() };
        out.extend(emit(claim, matrix, target, &doc, |subset| Provenance::D2cAblation {
            doc_id: chunk.parent_id.clone(),
            claim_chunk: claim.chunk,
            removed_sentence,
            subset,
        }));
    }
    out
}

/// Labels the claim's subclaims against every other chunk.
pub fn cross_doc_aug(
    gw: &Gateway,
    chunks: &[DocChunk],
    claim: &ChunkClaim,
    matrix: &mut FactVerdictMatrix,
) -> Vec<SynthTuple> {
    let others: Vec<&DocChunk> = chunks.iter().filter(|c| c.index != claim.chunk).collect();
    let premises: Vec<(VerdictTarget, String)> = others
        .iter()
        .map(|c| (VerdictTarget::Chunk { index: c.index }, c.text()))
        .collect();
    let mut out = Vec::new();
    for ((target, verdicts), other) in verdict_rows(gw, &claim.facts, premises).into_iter().zip(others) {
        let Some(verdicts) = verdicts else { continue };
        matrix.rows.push(VerdictRow { target, verdicts });
        out.extend(emit(claim, matrix, target, &other.text(), |subset| Provenance::D2cCross {
            doc_id: other.parent_id.clone(),
            claim_chunk: claim.chunk,
            doc_chunk: other.index,
            subset,
        }));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct D2cConfig {
    pub atom_cap: usize,
}

impl Default for D2cConfig {
    fn default() -> Self {
        Self {
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D2cOutcome {
    pub doc_id: String,
    pub chunks: Vec<DocChunk>,
    pub claims: Vec<ChunkClaim>,
    pub matrices: Vec<FactVerdictMatrix>,
    pub tuples: Vec<SynthTuple>,
}

pub fn run_d2c(
    gw: &Gateway,
    doc: &SourceDoc,
    splitter: &dyn SentenceSplitter,
    cfg: &D2cConfig,
) -> Result<D2cOutcome, SynthError> {
    let sentences = doc.segment(splitter);
    let chunks = chunk3(&doc.id, &sentences)?;

    let mut claims = Vec::with_capacity(3);
    for chunk in &chunks {
        let summary = summarize_chunk(gw, chunk)?;
        let facts = decompose(gw, &summary)?;
        let subsets = power_set(&facts, cfg.atom_cap)?;
        let subclaims = build_subclaims(gw, &facts, &subsets)?;
        claims.push(ChunkClaim {
            chunk: chunk.index,
            summary,
            facts,
            subclaims,
        });
    }

    let mut tuples = Vec::new();
    let mut matrices = Vec::with_capacity(3);
    for (chunk, claim) in chunks.iter().zip(&claims) {
        tuples.push(SynthTuple {
            doc: chunk.text(),
            claim: claim.summary.clone(),
            label: SupportLabel::Supported,
            pipeline: Pipeline::D2c,
            provenance: Provenance::D2cSummary {
                doc_id: doc.id.clone(),
                chunk: chunk.index,
            },
        });
        let mut matrix = FactVerdictMatrix::new(claim.chunk, claim.facts.clone());
        tuples.extend(doc_claim_aug(gw, chunk, claim, &mut matrix));
        tuples.extend(cross_doc_aug(gw, &chunks, claim, &mut matrix));
        matrices.push(matrix);
    }
    Ok(D2cOutcome {
        doc_id: doc.id.clone(),
        chunks,
        claims,
        matrices,
        tuples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(words: &[usize]) -> (usize, usize) {
        let n = words.len();
        let total: usize = words.iter().sum();
        let target = total as f64 / 3.0;
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 1..n {
            for b in a + 1..n {
                let sums = [
                    words[..a].iter().sum::<usize>(),
                    words[a..b].iter().sum::<usize>(),
                    words[b..].iter().sum::<usize>(),
                ];
                let worst = sums.iter().map(|&s| (s as f64 - target).abs()).fold(0.0, f64::max);
                if best.is_none_or(|(w, _, _)| worst < w - 1e-9) {
                    best = Some((worst, a, b));
                }
            }
        }
        let (_, a, b) = best.unwrap();
        (a, b)
    }

    #[test]
    fn uneven_sentences() {
        assert_eq!(chunk3_bounds(&[100, 50, 50, 50, 50]).unwrap(), (1, 3));
        assert_eq!(brute_force(&[100, 50, 50, 50, 50]), (1, 3));
    }

    #[test]
    fn symmetric_and_forced() {
        assert_eq!(chunk3_bounds(&[10; 6]).unwrap(), (2, 4));
        assert_eq!(chunk3_bounds(&[7, 1, 30]).unwrap(), (1, 2));
        assert!(matches!(chunk3_bounds(&[1, 2]), Err(SynthError::TooShort { sentences: 2 })));
    }

    #[test]
    fn chunk_text_and_ablation() {
        let s: Vec<String> = ["A b.", "C d.", "E f.", "G h."].iter().map(|x| x.to_string()).collect();
        let chunks = chunk3("doc", &s).unwrap();
        assert_eq!(chunks.iter().map(|c| c.index).collect::<Vec<_>>(), [1, 2, 3]);
        assert_eq!(chunks[0].text(), "A b.");
        assert_eq!(chunks[2].text(), "E f. G h.");
        assert_eq!(chunks[2].without(0), "G h.");
    }

    #[test]
    fn matrix_all_rule() {
        let mut m = FactVerdictMatrix::new(1, AtomicFact::list(["a", "b"]));
        let t = VerdictTarget::Chunk { index: 2 };
        m.rows.push(VerdictRow {
            target: t,
            verdicts: vec![true, false],
        });
        let both = FactSubset::new(vec![0, 1], 2).unwrap();
        let first = FactSubset::new(vec![0], 2).unwrap();
        assert_eq!(m.label(t, &both), Some(SupportLabel::Unsupported));
        assert_eq!(m.label(t, &first), Some(SupportLabel::Supported));
        assert_eq!(m.label(VerdictTarget::Chunk { index: 3 }, &first), None);
    }

    proptest! {
        #[test]
        fn bounds_match_exhaustive_search(words in proptest::collection::vec(1usize..60, 3..14)) {
            let (a, b) = chunk3_bounds(&words).unwrap();
            prop_assert_eq!((a, b), brute_force(&words));
            prop_assert!(0 < a && a < b && b < words.len());
        }

        #[test]
        fn chunks_partition_in_order(words in proptest::collection::vec(1usize..9, 3..20)) {
            let sentences: Vec<String> = words
                .iter()
                .enumerate()
                .map(|(i, w)| (0..*w).map(|k| format!("w{i}_{k}")).collect::<Vec<_>>().join(" "))
                .collect();
            let chunks = chunk3("d", &sentences).unwrap();
            let rejoined: Vec<String> = chunks.into_iter().flat_map(|c| c.sentences).collect();
            prop_assert_eq!(rejoined, sentences);
        }
    }
}
