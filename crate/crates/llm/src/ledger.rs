//! Token and call metering.
//!
//! Tokens are estimated as whitespace-separated words of the rendered prompt
//! and of the completion; provider-side token counts are not consulted.

use std::collections::BTreeMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub calls: u64,
}

/// Per-model counters, keyed by model tag.
pub type LedgerSnapshot = BTreeMap<String, ModelUsage>;

#[derive(Debug, Default)]
pub struct CostLedger {
    usage: Mutex<LedgerSnapshot>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, model: &str, prompt: &str, completion: &str) {
        let mut usage = self.usage.lock().unwrap();
        let entry = usage.entry(model.to_string()).or_default();
        entry.prompt_tokens += estimate_tokens(prompt);
        entry.completion_tokens += estimate_tokens(completion);
        entry.calls += 1;
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        self.usage.lock().unwrap().clone()
    }
}

pub fn estimate_tokens(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

/// Price per 1,000 tokens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Price {
    pub prompt: f64,
    pub completion: f64,
}

pub type PriceTable = BTreeMap<String, Price>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub per_model: BTreeMap<String, f64>,
    pub total: f64,
}

#[derive(Debug, Error, PartialEq)]
#[error("no price entry for model {0:?}")]
pub struct MissingPrice(pub String);

pub fn estimate_cost(ledger: &LedgerSnapshot, prices: &PriceTable) -> Result<CostEstimate, MissingPrice> {
    let mut per_model = BTreeMap::new();
    let mut total = 0.0;
    for (model, usage) in ledger {
        let price = prices.get(model).ok_or_else(|| MissingPrice(model.clone()))?;
        let cost = usage.prompt_tokens as f64 / 1000.0 * price.prompt
            + usage.completion_tokens as f64 / 1000.0 * price.completion;
        per_model.insert(model.clone(), cost);
        total += cost;
    }
    Ok(CostEstimate { per_model, total })
}
