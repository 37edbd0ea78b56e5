use std::sync::Arc;

use groundfact_core::SupportLabel;
use groundfact_llm::parse::{extract_json_object, parse_yes_no};
use groundfact_llm::template::indexed_claims;
use groundfact_llm::{Gateway, LlmRequest, TemplateName};
use serde_json::Value;

use crate::{Checker, CheckerError, CheckerOutput, ScoreRange};

/// Zero-shot yes/no checker. "yes" scores 1 and "no" scores 0.
pub struct LlmChecker {
    gateway: Arc<Gateway>,
    model: String,
}

impl LlmChecker {
    pub fn new(gateway: Arc<Gateway>, model: impl Into<String>) -> Self {
        Self {
            gateway,
            model: model.into(),
        }
    }
}

impl Checker for LlmChecker {
    fn identity(&self) -> String {
        format!("llm:{}@{}", self.model, self.gateway.backend_identity())
    }

    fn score(&self, chunk: &str, claim: &str) -> Result<CheckerOutput, CheckerError> {
        let req = LlmRequest::new(TemplateName::ZeroShotEval)
            .bind("document", chunk)
            .bind("claim", claim)
            .model(&self.model);
        let raw = self.gateway.complete(&req)?;
        let yes = parse_yes_no(&raw).map_err(|reason| CheckerError::Answer { reason, raw })?;
        CheckerOutput::new(if yes { 1.0 } else { 0.0 }, ScoreRange::UNIT)
    }
}

fn verdict(value: &Value) -> Option<bool> {
    match value {
        Value::Bool(b) => Some(*b),
        Value::String(s) => parse_yes_no(s).ok(),
        _ => None,
    }
}

/// Checks several claims against one document in a single call.
pub fn check_batch_llm(gw: &Gateway, document: &str, claims: &[String]) -> Result<Vec<SupportLabel>, CheckerError> {
    if claims.is_empty() {
        return Err(CheckerError::NoClaims);
    }
    let req = LlmRequest::new(TemplateName::MultiClaimEval)
        .bind("document", document)
        .bind("claims", indexed_claims(claims));
    let raw = gw.complete(&req)?;
    let answer = extract_json_object(&raw).map_err(|reason| CheckerError::Answer {
        reason,
        raw: raw.clone(),
    })?;
    let map = answer.as_object().expect("extract_json_object returns objects");
    for key in map.keys() {
        let index = key
            .strip_prefix('[')
            .and_then(|k| k.strip_suffix(']'))
            .and_then(|k| k.parse::<usize>().ok());
        if !matches!(index, Some(i) if (1..=claims.len()).contains(&i)) {
            return Err(CheckerError::ExtraIndex(key.clone()));
        }
    }
    (1..=claims.len())
        .map(|i| {
            let v = map.get(&format!("[{i}]")).ok_or(CheckerError::MissingIndex(i))?;
            verdict(v).map(SupportLabel::from_bool).ok_or_else(|| CheckerError::Answer {
                reason: format!("verdict for [{i}] is not yes or no"),
                raw: raw.clone(),
            })
        })
        .collect()
}
