//! Benchmark evaluation and its report.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use groundfact_core::metrics::{paired_bootstrap, BootstrapResult, ConfusionCounts, MetricsError};
use groundfact_core::{BenchRecord, Split, SupportLabel};
use groundfact_llm::{estimate_cost, CostEstimate, LedgerSnapshot};
use serde::{Deserialize, Serialize};

use crate::datasets::sort_datasets;
use crate::engine::{Engine, PolicyChoice, RecordOptions, RecordResult};
use crate::io::{read_to_string, write_file};
use crate::tune::ThresholdFile;
use crate::BenchError;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub split: Split,
    pub workers: usize,
    pub policy: PolicyChoice,
    pub record: RecordOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            split: Split::Test,
            workers: 1,
            policy: PolicyChoice::Fixed { value: 0.5 },
            record: RecordOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetResult {
    pub dataset: String,
    pub records: usize,
    pub negatives: usize,
    pub threshold: f64,
    pub counts: ConfusionCounts,
    pub bacc: f64,
    /// BAcc of the undecomposed decisions, when decomposition was on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plain_bacc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decompose_delta: Option<f64>,
    /// Share of claims that decontextualization rewrote.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewritten_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub checker: String,
    pub plan: String,
    pub policy: PolicyChoice,
    pub split: Split,
    pub decompose: bool,
    pub decontextualize: bool,
    pub datasets: Vec<DatasetResult>,
    pub average_bacc: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plain_average_bacc: Option<f64>,
    /// Checker identity of the run the bootstrap columns compare against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub champion: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<LedgerSnapshot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostEstimate>,
    pub records: Vec<RecordResult>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), BenchError> {
        write_file(path, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        serde_json::from_str(&read_to_string(path)?).map_err(|e| BenchError::Schema {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn dataset(&self, name: &str) -> Option<&DatasetResult> {
        self.datasets.iter().find(|d| d.dataset == name)
    }
}

fn bacc_of(results: &[&RecordResult], pick: impl Fn(&RecordResult) -> SupportLabel) -> Result<(ConfusionCounts, f64), MetricsError> {
    let mut c = ConfusionCounts::default();
    for r in results {
        c.record(pick(r), r.gold);
    }
    Ok((c, c.bacc()?))
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Scores every record of `opts.split` and aggregates balanced accuracy per
/// dataset. The report depends only on the inputs, never on `opts.workers`.
pub fn evaluate(
    engine: &Engine,
    records: &[BenchRecord],
    opts: &EvalOptions,
    thresholds: Option<&ThresholdFile>,
) -> Result<EvalReport, BenchError> {
    let selected: Vec<&BenchRecord> = records.iter().filter(|r| r.split == opts.split).collect();
    if selected.is_empty() {
        return Err(BenchError::Data(format!("no records in the {} split", opts.split)));
    }
    if opts.record.decompose {
        engine.gateway("--decompose")?;
    }
    if opts.record.decontextualize {
        engine.gateway("--decontextualize")?;
    }
    let names: BTreeSet<&str> = selected.iter().map(|r| r.dataset.as_str()).collect();
    let policies = opts.policy.resolve(names.iter().copied(), thresholds, engine)?;

    let results = engine.map_records(&selected, opts.workers, |r| {
        engine.evaluate_record(r, &policies[&r.dataset], opts.record)
    })?;

    let mut groups: BTreeMap<&str, Vec<&RecordResult>> = BTreeMap::new();
    for r in &results {
        groups.entry(r.dataset.as_str()).or_default().push(r);
    }
    let mut order: Vec<&str> = groups.keys().copied().collect();
    sort_datasets(&mut order);
    let mut datasets = Vec::new();
    for name in order {
        let g = &groups[name];
        let err = |source| BenchError::Dataset {
            dataset: name.to_string(),
            source,
        };
        let (counts, bacc) = bacc_of(g, |r| r.pred).map_err(err)?;
        let plain_bacc = if opts.record.decompose {
            Some(bacc_of(g, |r| r.plain_pred.unwrap_or(r.pred)).map_err(err)?.1)
        } else {
            None
        };
        let rewritten_fraction = opts
            .record
            .decontextualize
            .then(|| g.iter().filter(|r| r.rewritten.is_some()).count() as f64 / g.len() as f64);
        datasets.push(DatasetResult {
            dataset: name.to_string(),
            records: g.len(),
            negatives: g.iter().filter(|r| !r.gold.is_supported()).count(),
            threshold: g[0].threshold,
            counts,
            bacc,
            plain_bacc,
            decompose_delta: plain_bacc.map(|p| bacc - p),
            rewritten_fraction,
            bootstrap: None,
        });
    }
    let average_bacc = mean(datasets.iter().map(|d| d.bacc));
    let plain_average_bacc = opts
        .record
        .decompose
        .then(|| mean(datasets.iter().filter_map(|d| d.plain_bacc)));

    let (usage, cost) = match &engine.gateway {
        Some(gw) => {
            let snapshot = gw.ledger().snapshot();
            let cost = if engine.prices.is_empty() || snapshot.is_empty() {
                None
            } else {
                Some(estimate_cost(&snapshot, &engine.prices).map_err(|e| BenchError::Data(e.to_string()))?)
            };
            (Some(snapshot), cost)
        }
        None => (None, None),
    };

    Ok(EvalReport {
        checker: engine.identity(),
        plan: engine.plan.to_string(),
        policy: opts.policy.clone(),
        split: opts.split,
        decompose: opts.record.decompose,
        decontextualize: opts.record.decontextualize,
        datasets,
        average_bacc,
        plain_average_bacc,
        champion: None,
        usage,
        cost,
        records: results,
    })
}

/// Adds per-dataset paired bootstrap results of `report` (challenger)
/// against `champion`. Both runs must cover the same record ids.
pub fn attach_bootstrap(
    report: &mut EvalReport,
    champion: &EvalReport,
    runs: usize,
    seed: u64,
    alpha: f64,
) -> Result<(), BenchError> {
    let theirs: BTreeMap<&str, &RecordResult> = champion.records.iter().map(|r| (r.id.as_str(), r)).collect();
    let ours: BTreeSet<&str> = report.records.iter().map(|r| r.id.as_str()).collect();
    if ours != theirs.keys().copied().collect::<BTreeSet<_>>() {
        return Err(BenchError::Data("champion report covers different records".into()));
    }
    for ds in &mut report.datasets {
        let mine: Vec<&RecordResult> = report.records.iter().filter(|r| r.dataset == ds.dataset).collect();
        let gold: Vec<SupportLabel> = mine.iter().map(|r| r.gold).collect();
        let challenger: Vec<SupportLabel> = mine.iter().map(|r| r.pred).collect();
        let champ: Vec<SupportLabel> = mine.iter().map(|r| theirs[r.id.as_str()].pred).collect();
        let result = paired_bootstrap(&champ, &challenger, &gold, runs, seed)
            .map_err(|source| BenchError::Dataset {
                dataset: ds.dataset.clone(),
                source,
            })?
            .at_alpha(alpha);
        ds.bootstrap = Some(result);
    }
    report.champion = Some(champion.checker.clone());
    Ok(())
}
