use groundfact_core::text::{RuleSplitter, SentenceSplitter};
use groundfact_llm::parse::extract_json_object;
use groundfact_llm::template::bullet_list;
use groundfact_llm::{Gateway, LlmRequest, TemplateName};
use serde::{Deserialize, Serialize};

use crate::{AtomicFact, DecompError, FactSubset};

const BULLETS: &[char] = &['-', '\u{2013}', '\u{2022}'];

/// Reads a bullet list, one fact per line. Blank lines are skipped; any other
/// line without a bullet is an error.
pub fn parse_bullets(raw: &str) -> Result<Vec<AtomicFact>, DecompError> {
    let mut texts = Vec::new();
    for line in raw.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let Some(rest) = line.strip_prefix(BULLETS) else {
            return Err(DecompError::Unparseable {
                reason: format!("line without a bullet: {line:?}"),
                raw: raw.to_string(),
            });
        };
        let text = rest.trim();
        if text.is_empty() {
            return Err(DecompError::Unparseable {
                reason: "empty bullet".into(),
                raw: raw.to_string(),
            });
        }
        texts.push(text.to_string());
    }
    if texts.is_empty() {
        return Err(DecompError::NoFacts { raw: raw.to_string() });
    }
    Ok(AtomicFact::list(texts))
}

pub fn decompose(gw: &Gateway, claim: &str) -> Result<Vec<AtomicFact>, DecompError> {
    let claim = claim.trim();
    if claim.is_empty() {
        return Err(DecompError::EmptyClaim);
    }
    let raw = gw.complete(&LlmRequest::new(TemplateName::SentenceDecomposition).bind("sentence", claim))?;
    parse_bullets(&raw)
}

/// Rewrites a fact subset as one sentence. Single facts are returned as is.
pub fn merge(gw: &Gateway, subset: &FactSubset, facts: &[AtomicFact]) -> Result<String, DecompError> {
    if let Some(&bad) = subset.members().iter().find(|&&i| i >= facts.len()) {
        return Err(DecompError::InvalidSubset(format!(
            "index {bad} out of range for {} facts",
            facts.len()
        )));
    }
    if subset.len() == 1 {
        return Ok(facts[subset.members()[0]].text.clone());
    }
    let listing = bullet_list(&subset.texts(facts));
    let raw = gw.complete(&LlmRequest::new(TemplateName::MergeFacts).bind("facts", listing))?;
    single_sentence(&raw)
}

fn single_sentence(raw: &str) -> Result<String, DecompError> {
    let trimmed = raw.trim();
    let body = trimmed.strip_prefix("Sentence:").unwrap_or(trimmed).trim();
    if body.is_empty() {
        return Err(DecompError::EmptyMerge);
    }
    let lines = body.lines().filter(|l| !l.trim().is_empty()).count();
    let sentences = RuleSplitter.split(body).len();
    let count = sentences.max(lines);
    if count > 1 {
        return Err(DecompError::MultiSentence {
            count,
            raw: raw.to_string(),
        });
    }
    Ok(body.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decontextualized {
    pub changed: bool,
    pub text: String,
}

#[derive(Deserialize)]
struct DecontextAnswer {
    label: String,
    decontext: String,
}

/// Makes a claim self-contained given the sentences that precede it.
pub fn decontextualize(gw: &Gateway, claim: &str, context: &[String]) -> Result<Decontextualized, DecompError> {
    let req = LlmRequest::new(TemplateName::Decontextualize)
        .bind("context", context.join(" "))
        .bind("claim", claim);
    let raw = gw.complete(&req)?;
    let bad = |reason: String| DecompError::BadDecontext {
        reason,
        raw: raw.clone(),
    };
    let value = extract_json_object(&raw).map_err(bad)?;
    let answer: DecontextAnswer = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
    match answer.label.trim().to_lowercase().as_str() {
        "yes" => Ok(Decontextualized {
            changed: false,
            text: claim.to_string(),
        }),
        "no" => {
            let text = answer.decontext.trim();
            if text.is_empty() || text.eq_ignore_ascii_case("na") {
                return Err(DecompError::InconsistentVerdict { raw });
            }
            Ok(Decontextualized {
                changed: true,
                text: text.to_string(),
            })
        }
        other => Err(bad(format!("label must be yes or no, got {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bullet_styles() {
        let facts = parse_bullets("- a.\n\u{2013} b.\n\n  \u{2022}c.  ").unwrap();
        let texts: Vec<_> = facts.iter().map(|f| f.text.as_str()).collect();
        assert_eq!(texts, ["a.", "b.", "c."]);
        assert_eq!(facts[2].index, 2);
    }

    #[test]
    fn bullet_failures() {
        assert!(matches!(parse_bullets("a.\nb."), Err(DecompError::Unparseable { .. })));
        assert!(matches!(parse_bullets("- a.\nSentence: x"), Err(DecompError::Unparseable { .. })));
        assert!(matches!(parse_bullets("-   "), Err(DecompError::Unparseable { .. })));
        assert!(matches!(parse_bullets("  \n"), Err(DecompError::NoFacts { .. })));
    }

    #[test]
    fn merge_output_shape() {
        assert_eq!(single_sentence("Sentence: One thing happened.").unwrap(), "One thing happened.");
        assert!(matches!(single_sentence("  "), Err(DecompError::EmptyMerge)));
        assert!(matches!(
            single_sentence("It opened. It closed."),
            Err(DecompError::MultiSentence { count: 2, .. })
        ));
        assert!(matches!(
            single_sentence("It opened\nand it closed"),
            Err(DecompError::MultiSentence { .. })
        ));
    }
}
