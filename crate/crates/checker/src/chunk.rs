use std::fmt;
use std::str::FromStr;

use groundfact_core::text::{word_count, SentenceSplitter};
use serde::{Deserialize, Serialize};

use crate::CheckerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChunkStrategy {
    Whitespace,
    Sentence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkPlan {
    pub strategy: ChunkStrategy,
    /// Whitespace tokens per chunk.
    pub size: usize,
}

impl Default for ChunkPlan {
    fn default() -> Self {
        Self {
            strategy: ChunkStrategy::Whitespace,
            size: 500,
        }
    }
}

impl ChunkPlan {
    pub fn new(strategy: ChunkStrategy, size: usize) -> Result<Self, CheckerError> {
        if size == 0 {
            return Err(CheckerError::BadPlan(format!("{strategy:?}:0")));
        }
        Ok(Self { strategy, size })
    }
}

impl FromStr for ChunkPlan {
    type Err = CheckerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CheckerError::BadPlan(s.to_string());
        let (kind, size) = s.split_once(':').ok_or_else(bad)?;
        let strategy = match kind {
            "whitespace" => ChunkStrategy::Whitespace,
            "sentence" => ChunkStrategy::Sentence,
            _ => return Err(bad()),
        };
        let size: usize = size.parse().map_err(|_| bad())?;
        ChunkPlan::new(strategy, size).map_err(|_| bad())
    }
}

impl fmt::Display for ChunkPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.strategy {
            ChunkStrategy::Whitespace => "whitespace",
            ChunkStrategy::Sentence => "sentence",
        };
        write!(f, "{kind}:{}", self.size)
    }
}

/// Splits a document into chunks. Tokens inside a chunk are rejoined with
/// single spaces. Sentence mode never splits a sentence: an overlong one
/// becomes a chunk of its own.
pub fn chunk(document: &str, plan: &ChunkPlan, splitter: &dyn SentenceSplitter) -> Vec<String> {
    match plan.strategy {
        ChunkStrategy::Whitespace => {
            let tokens: Vec<&str> = document.split_whitespace().collect();
            tokens.chunks(plan.size).map(|c| c.join(" ")).collect()
        }
        ChunkStrategy::Sentence => {
            let mut out = Vec::new();
            let mut current: Vec<String> = Vec::new();
            let mut filled = 0;
            for sentence in splitter.split(document) {
                let n = word_count(&sentence);
                if n == 0 {
                    continue;
                }
                if filled > 0 && filled + n > plan.size {
                    out.push(current.join(" "));
                    current.clear();
                    filled = 0;
                }
                current.push(sentence.split_whitespace().collect::<Vec<_>>().join(" "));
                filled += n;
            }
            if !current.is_empty() {
                out.push(current.join(" "));
            }
            out
        }
    }
}
