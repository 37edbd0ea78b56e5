//! Entailment checks through the gateway.

use groundfact_llm::parse::parse_yes_no;
use groundfact_llm::{Gateway, LlmRequest, TemplateName};

use crate::{EntailmentCheck, SynthError};

pub fn entails(gw: &Gateway, source: &str, claim: &str) -> Result<EntailmentCheck, SynthError> {
    let req = LlmRequest::new(TemplateName::EntailmentCheck)
        .bind("source", source)
        .bind("claim", claim);
    let raw = gw.complete(&req)?;
    let entailed = parse_yes_no(&raw).map_err(|reason| SynthError::Format {
        what: "entailment verdict",
        reason,
        raw: raw.clone(),
    })?;
    Ok(EntailmentCheck {
        source: source.to_string(),
        claim: claim.to_string(),
        entailed,
    })
}

/// Joins sentences into one premise, separated by single spaces.
pub fn join_sentences<S: AsRef<str>>(parts: &[S]) -> String {
    parts
        .iter()
        .map(|p| p.as_ref().trim())
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}
