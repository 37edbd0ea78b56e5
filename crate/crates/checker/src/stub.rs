use std::collections::BTreeSet;

use crate::{Checker, CheckerError, CheckerOutput, ScoreRange};

const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "been", "but", "by", "for", "from", "had", "has", "have", "he", "her",
    "his", "in", "into", "is", "it", "its", "of", "on", "or", "she", "that", "the", "their", "them", "they", "this",
    "to", "was", "were", "which", "who", "will", "with",
];

fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

fn content_words(text: &str) -> BTreeSet<String> {
    tokens(text).filter(|t| !STOPWORDS.contains(&t.as_str())).collect()
}

/// Deterministic offline checker: the share of the claim's content words
/// that also occur in the chunk. Claims made only of stopwords fall back to
/// all of their words.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalStub;

impl LexicalStub {
    pub fn overlap(chunk: &str, claim: &str) -> Result<f64, CheckerError> {
        let mut wanted = content_words(claim);
        if wanted.is_empty() {
            wanted = tokens(claim).collect();
        }
        if wanted.is_empty() {
            return Err(CheckerError::EmptyClaim);
        }
        let have: BTreeSet<String> = tokens(chunk).collect();
        let hits = wanted.iter().filter(|w| have.contains(*w)).count();
        Ok(hits as f64 / wanted.len() as f64)
    }
}

impl Checker for LexicalStub {
    fn identity(&self) -> String {
        "stub:lexical-overlap".into()
    }

    fn score(&self, chunk: &str, claim: &str) -> Result<CheckerOutput, CheckerError> {
        CheckerOutput::new(Self::overlap(chunk, claim)?, ScoreRange::UNIT)
    }
}
