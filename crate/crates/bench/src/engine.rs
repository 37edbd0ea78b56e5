//! A checker bundled with what it needs to score benchmark records.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use groundfact_checker::{
    check_decomposed, decide, score_claim, Checker, CheckerError, CheckerSpec, ChunkPlan, ThresholdPolicy,
};
use groundfact_core::text::RuleSplitter;
use groundfact_core::{BenchRecord, SupportLabel};
use groundfact_decomp::decontextualize;
use groundfact_llm::{Gateway, PriceTable};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::tune::ThresholdFile;
use crate::BenchError;

pub struct Engine {
    pub checker: Arc<dyn Checker>,
    pub gateway: Option<Arc<Gateway>>,
    pub prices: PriceTable,
    pub plan: ChunkPlan,
    pub splitter: RuleSplitter,
}

impl Engine {
    pub fn new(checker: Arc<dyn Checker>, plan: ChunkPlan) -> Self {
        Self {
            checker,
            gateway: None,
            prices: PriceTable::new(),
            plan,
            splitter: RuleSplitter,
        }
    }

    pub fn with_gateway(mut self, gateway: Arc<Gateway>, prices: PriceTable) -> Self {
        self.gateway = Some(gateway);
        self.prices = prices;
        self
    }

    pub fn from_spec(
        spec: &CheckerSpec,
        gateway: Option<(Arc<Gateway>, PriceTable)>,
        plan: ChunkPlan,
        timeout: Duration,
    ) -> Result<Self, BenchError> {
        if spec.needs_gateway() && gateway.is_none() {
            return Err(BenchError::Usage(format!("checker {spec} needs --gateway")));
        }
        let checker = spec.build(gateway.as_ref().map(|(g, _)| g.clone()), timeout)?;
        let engine = Self::new(checker, plan);
        Ok(match gateway {
            Some((g, prices)) => engine.with_gateway(g, prices),
            None => engine,
        })
    }

    pub fn gateway(&self, why: &str) -> Result<&Gateway, BenchError> {
        self.gateway
            .as_deref()
            .ok_or_else(|| BenchError::Usage(format!("{why} needs --gateway")))
    }

    pub fn identity(&self) -> String {
        self.checker.identity()
    }

    /// Runs `f` over `records` on `workers` threads and returns the results
    /// in ascending id order. The first failure in that order is reported.
    pub fn map_records<R: Send>(
        &self,
        records: &[&BenchRecord],
        workers: usize,
        f: impl Fn(&BenchRecord) -> Result<R, CheckerError> + Sync,
    ) -> Result<Vec<R>, BenchError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| BenchError::Usage(format!("cannot start {workers} workers: {e}")))?;
        let mut results: Vec<(&str, Result<R, CheckerError>)> =
            pool.install(|| records.par_iter().map(|r| (r.id(), f(r))).collect());
        results.sort_by(|a, b| a.0.cmp(b.0));
        results
            .into_iter()
            .map(|(id, r)| {
                r.map_err(|source| BenchError::Record {
                    id: id.to_string(),
                    source,
                })
            })
            .collect()
    }
}

/// Threshold choice for a whole run. `tuned` without a dataset uses each
/// dataset's own stored threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum PolicyChoice {
    Fixed { value: f64 },
    Midpoint,
    Tuned { dataset: Option<String> },
}

impl FromStr for PolicyChoice {
    type Err = CheckerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "tuned" {
            return Ok(PolicyChoice::Tuned { dataset: None });
        }
        Ok(match s.parse::<ThresholdPolicy>()? {
            ThresholdPolicy::Fixed { value } => PolicyChoice::Fixed { value },
            ThresholdPolicy::Midpoint => PolicyChoice::Midpoint,
            ThresholdPolicy::Tuned { dataset, .. } => PolicyChoice::Tuned { dataset: Some(dataset) },
        })
    }
}

impl fmt::Display for PolicyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyChoice::Fixed { value } => write!(f, "fixed:{value}"),
            PolicyChoice::Midpoint => f.write_str("midpoint"),
            PolicyChoice::Tuned { dataset: None } => f.write_str("tuned"),
            PolicyChoice::Tuned { dataset: Some(d) } => write!(f, "tuned:{d}"),
        }
    }
}

impl PolicyChoice {
    /// Fails early when tuned thresholds are requested but unavailable or
    /// were tuned for a different checker or chunk plan.
    pub fn resolve<'a>(
        &self,
        datasets: impl IntoIterator<Item = &'a str>,
        thresholds: Option<&ThresholdFile>,
        engine: &Engine,
    ) -> Result<BTreeMap<String, ThresholdPolicy>, BenchError> {
        let mut out = BTreeMap::new();
        for ds in datasets {
            let policy = match self {
                PolicyChoice::Fixed { value } => ThresholdPolicy::Fixed { value: *value },
                PolicyChoice::Midpoint => ThresholdPolicy::Midpoint,
                PolicyChoice::Tuned { dataset } => {
                    let file = thresholds.ok_or_else(|| {
                        BenchError::Data("tuned policy needs --thresholds from a prior `tune` run".into())
                    })?;
                    file.check_compatible(engine)?;
                    let source = dataset.as_deref().unwrap_or(ds);
                    let entry = file.thresholds.get(source).ok_or_else(|| {
                        BenchError::Checker(CheckerError::NoThreshold(source.to_string()))
                    })?;
                    ThresholdPolicy::Tuned {
                        dataset: source.to_string(),
                        value: Some(entry.threshold),
                    }
                }
            };
            out.insert(ds.to_string(), policy);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactScore {
    pub fact: String,
    pub score: f64,
    pub label: SupportLabel,
}

/// Outcome for one benchmark record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordResult {
    pub id: String,
    pub dataset: String,
    pub gold: SupportLabel,
    pub score: f64,
    pub threshold: f64,
    pub pred: SupportLabel,
    /// Decision on the undecomposed claim when `pred` comes from decomposition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plain_pred: Option<SupportLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facts: Option<Vec<FactScore>>,
    /// The rewritten claim, present when decontextualization changed it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewritten: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecordOptions {
    pub decompose: bool,
    pub decontextualize: bool,
}

impl Engine {
    pub fn evaluate_record(
        &self,
        rec: &BenchRecord,
        policy: &ThresholdPolicy,
        opts: RecordOptions,
    ) -> Result<RecordResult, CheckerError> {
        let mut claim = rec.grounded.text.clone();
        let mut rewritten = None;
        if opts.decontextualize && !rec.grounded.context.is_empty() {
            let gw = self.gateway.as_deref().ok_or_else(|| CheckerError::BadSpec("decontextualize".into()))?;
            let d = decontextualize(gw, &claim, &rec.grounded.context)?;
            if d.changed {
                claim = d.text.clone();
                rewritten = Some(d.text);
            }
        }
        let evidence = &rec.grounded.evidence;
        let output = score_claim(self.checker.as_ref(), evidence, &claim, &self.plan, &self.splitter)?;
        let threshold = policy.threshold(output.range)?;
        let plain = decide(&output, policy)?;
        let (pred, plain_pred, facts) = if opts.decompose {
            let gw = self.gateway.as_deref().ok_or_else(|| CheckerError::BadSpec("decompose".into()))?;
            let v = check_decomposed(gw, self.checker.as_ref(), evidence, &claim, &self.plan, policy, &self.splitter)?;
            let facts = v
                .facts
                .into_iter()
                .map(|f| FactScore {
                    fact: f.fact.text,
                    score: f.output.score,
                    label: f.label,
                })
                .collect();
            (v.label, Some(plain), Some(facts))
        } else {
            (plain, None, None)
        };
        Ok(RecordResult {
            id: rec.id().to_string(),
            dataset: rec.dataset.clone(),
            gold: rec.gold,
            score: output.score,
            threshold,
            pred,
            plain_pred,
            facts,
            rewritten,
        })
    }
}
