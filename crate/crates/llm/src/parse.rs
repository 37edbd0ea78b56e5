//! Parsers for the completion formats the prompts ask for.

use serde_json::Value;

/// Reads a yes/no answer, tolerating surrounding quotes, punctuation and an
/// `Answer:` prefix.
pub fn parse_yes_no(text: &str) -> Result<bool, String> {
    let lowered = text.trim().to_lowercase();
    let stripped = lowered.strip_prefix("answer:").unwrap_or(&lowered);
    let word: String = stripped
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .chars()
        .take_while(|c| c.is_alphanumeric())
        .collect();
    match word.as_str() {
        "yes" => Ok(true),
        "no" => Ok(false),
        _ => Err(format!("expected \"yes\" or \"no\", got {text:?}")),
    }
}

/// Extracts the outermost JSON object from a completion, ignoring code fences
/// or prose around it.
pub fn extract_json_object(text: &str) -> Result<Value, String> {
    let start = text.find('{').ok_or_else(|| format!("no JSON object in {text:?}"))?;
    let end = text.rfind('}').ok_or_else(|| format!("no JSON object in {text:?}"))?;
    if end < start {
        return Err(format!("no JSON object in {text:?}"));
    }
    let candidate = &text[start..=end];
    let value: Value = serde_json::from_str(candidate).map_err(|e| format!("invalid JSON ({e}) in {candidate:?}"))?;
    if value.is_object() {
        Ok(value)
    } else {
        Err(format!("expected a JSON object, got {candidate:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yes_no_variants() {
        assert_eq!(parse_yes_no("yes"), Ok(true));
        assert_eq!(parse_yes_no("  Yes."), Ok(true));
        assert_eq!(parse_yes_no("\"no\""), Ok(false));
        assert_eq!(parse_yes_no("Answer: No, the source says otherwise."), Ok(false));
        assert!(parse_yes_no("nope").is_err());
        assert!(parse_yes_no("maybe").is_err());
        assert!(parse_yes_no("").is_err());
    }

    #[test]
    fn json_extraction() {
        let v = extract_json_object("```json\n{\"label\": \"yes\", \"decontext\": \"NA\"}\n```").unwrap();
        assert_eq!(v["label"], "yes");
        assert!(extract_json_object("no json here").is_err());
        assert!(extract_json_object("{\"a\": }").is_err());
        assert!(extract_json_object("} {").is_err());
    }
}
