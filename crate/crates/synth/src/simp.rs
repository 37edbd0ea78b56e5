//! Single-prompt baselines: a supporting article plus one minimally revised
//! article per claim, and ten inconsistent edits per chunk summary.

use groundfact_core::text::SentenceSplitter;
use groundfact_core::SupportLabel;
use groundfact_llm::parse::extract_json_object;
use groundfact_llm::{Gateway, LlmRequest, TemplateName};
use serde::Deserialize;

use crate::c2d::C2dClaim;
use crate::d2c::{chunk3, summarize_chunk, SourceDoc};
use crate::{Pipeline, Provenance, SynthError, SynthTuple};

pub const MAX_EDITS: usize = 10;

#[derive(Deserialize)]
struct Revision {
    revision_type: String,
    revised_article: String,
}

#[derive(Deserialize)]
struct Edits {
    inconsistent_summaries: Vec<String>,
}

fn json<T: for<'de> Deserialize<'de>>(what: &'static str, raw: &str) -> Result<T, SynthError> {
    let format = |reason: String| SynthError::Format {
        what,
        reason,
        raw: raw.to_string(),
    };
    let value = extract_json_object(raw).map_err(format)?;
    serde_json::from_value(value).map_err(|e| format(e.to_string()))
}

/// Exactly two tuples: the supporting article (label 1) and its revision (label 0).
pub fn run_c2d_simp(gw: &Gateway, claim: &C2dClaim) -> Result<Vec<SynthTuple>, SynthError> {
    let raw = gw.complete(&LlmRequest::new(TemplateName::C2dSimpSupport).bind("claim", &claim.claim))?;
    let article = raw.trim();
    let article = article.strip_prefix("Article:").unwrap_or(article).trim().to_string();
    if article.is_empty() {
        return Err(SynthError::Format {
            what: "supporting article",
            reason: "empty".into(),
            raw,
        });
    }
    let raw = gw.complete(
        &LlmRequest::new(TemplateName::C2dSimpNonsupport)
            .bind("claim", &claim.claim)
            .bind("article", &article),
    )?;
    let revision: Revision = json("article revision", &raw)?;
    Ok(vec![
        SynthTuple {
            doc: article,
            claim: claim.claim.clone(),
            label: SupportLabel::Supported,
            pipeline: Pipeline::C2dSimp,
            provenance: Provenance::C2dSimpSupport {
                claim_id: claim.id.clone(),
            },
        },
        SynthTuple {
            doc: revision.revised_article.trim().to_string(),
            claim: claim.claim.clone(),
            label: SupportLabel::Unsupported,
            pipeline: Pipeline::C2dSimp,
            provenance: Provenance::C2dSimpRevision {
                claim_id: claim.id.clone(),
                revision_type: revision.revision_type.trim().to_string(),
            },
        },
    ])
}

/// Per chunk: the summary (label 1) and up to ten edits of it (label 0).
pub fn run_d2c_simp(
    gw: &Gateway,
    doc: &SourceDoc,
    splitter: &dyn SentenceSplitter,
) -> Result<Vec<SynthTuple>, SynthError> {
    let chunks = chunk3(&doc.id, &doc.segment(splitter))?;
    let mut out = Vec::new();
    for chunk in &chunks {
        let summary = summarize_chunk(gw, chunk)?;
        let text = chunk.text();
        let raw = gw.complete(
            &LlmRequest::new(TemplateName::D2cSimpEdit)
                .bind("document", &text)
                .bind("summary", &summary),
        )?;
        let edits: Edits = json("inconsistent summaries", &raw)?;
        out.push(SynthTuple {
            doc: text.clone(),
            claim: summary,
            label: SupportLabel::Supported,
            pipeline: Pipeline::D2cSimp,
            provenance: Provenance::D2cSummary {
                doc_id: doc.id.clone(),
                chunk: chunk.index,
            },
        });
        let edits: Vec<String> = edits
            .inconsistent_summaries
            .into_iter()
            .map(|e| e.trim().to_string())
            .filter(|e| !e.is_empty())
            .take(MAX_EDITS)
            .collect();
        for (edit, claim) in edits.into_iter().enumerate() {
            out.push(SynthTuple {
                doc: text.clone(),
                claim,
                label: SupportLabel::Unsupported,
                pipeline: Pipeline::D2cSimp,
                provenance: Provenance::D2cSimpEdit {
                    doc_id: doc.id.clone(),
                    chunk: chunk.index,
                    edit,
                },
            });
        }
    }
    Ok(out)
}
