//! Per-dataset threshold tuning on the validation split.

use std::collections::BTreeMap;
use std::path::Path;

use groundfact_checker::{score_claim, ChunkPlan, ScoreRange};
use groundfact_core::metrics::{tune_threshold, ConfusionCounts};
use groundfact_core::{BenchRecord, Split, SupportLabel};
use serde::{Deserialize, Serialize};

use crate::datasets::sort_datasets;
use crate::engine::Engine;
use crate::io::{read_to_string, write_file};
use crate::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunedEntry {
    pub threshold: f64,
    pub validation_bacc: f64,
    /// Validation BAcc of the range-midpoint threshold, for comparison.
    pub midpoint_bacc: f64,
    pub records: usize,
}

/// Stored thresholds, tied to the checker and chunk plan they were tuned for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFile {
    pub checker: String,
    pub plan: ChunkPlan,
    pub range: ScoreRange,
    pub thresholds: BTreeMap<String, TunedEntry>,
}

impl ThresholdFile {
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        serde_json::from_str(&read_to_string(path)?).map_err(|e| BenchError::Schema {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), BenchError> {
        let mut text = serde_json::to_string_pretty(self).expect("thresholds serialize");
        text.push('\n');
        write_file(path, text.as_bytes())
    }

    pub fn check_compatible(&self, engine: &Engine) -> Result<(), BenchError> {
        if self.checker != engine.identity() {
            return Err(BenchError::Data(format!(
                "thresholds were tuned for checker {:?}, not {:?}",
                self.checker,
                engine.identity()
            )));
        }
        if self.plan != engine.plan {
            return Err(BenchError::Data(format!(
                "thresholds were tuned with chunk plan {}, not {}",
                self.plan, engine.plan
            )));
        }
        Ok(())
    }
}

fn bacc_at(scored: &[(f64, SupportLabel)], t: f64) -> Result<f64, groundfact_core::metrics::MetricsError> {
    let mut c = ConfusionCounts::default();
    for &(s, g) in scored {
        c.record(SupportLabel::from_bool(s > t), g);
    }
    c.bacc()
}

/// Scores every validation record and picks, per dataset, the threshold
/// with the best balanced accuracy.
pub fn tune(engine: &Engine, records: &[BenchRecord], workers: usize) -> Result<ThresholdFile, BenchError> {
    let validation: Vec<&BenchRecord> = records.iter().filter(|r| r.split == Split::Validation).collect();
    if validation.is_empty() {
        return Err(BenchError::Data("validation split is empty".into()));
    }
    let outputs = engine.map_records(&validation, workers, |r| {
        score_claim(engine.checker.as_ref(), &r.grounded.evidence, &r.grounded.text, &engine.plan, &engine.splitter)
            .map(|o| (r.dataset.clone(), o, r.gold))
    })?;
    let range = outputs[0].1.range;
    if let Some((_, o, _)) = outputs.iter().find(|(_, o, _)| o.range != range) {
        return Err(BenchError::Data(format!(
            "checker declared ranges ({}, {}) and ({}, {})",
            range.min, range.max, o.range.min, o.range.max
        )));
    }
    let mut by_dataset: BTreeMap<String, Vec<(f64, SupportLabel)>> = BTreeMap::new();
    for (ds, o, gold) in outputs {
        by_dataset.entry(ds).or_default().push((o.score, gold));
    }
    let mut names: Vec<String> = by_dataset.keys().cloned().collect();
    sort_datasets(&mut names);
    let mut thresholds = BTreeMap::new();
    for ds in names {
        let scored = &by_dataset[&ds];
        let err = |source| BenchError::Dataset {
            dataset: ds.clone(),
            source,
        };
        let tuned = tune_threshold(scored, (range.min, range.max)).map_err(err)?;
        let midpoint_bacc = bacc_at(scored, range.midpoint()).map_err(err)?;
        tracing::info!(dataset = %ds, threshold = tuned.threshold, bacc = tuned.bacc, "tuned");
        thresholds.insert(
            ds.clone(),
            TunedEntry {
                threshold: tuned.threshold,
                validation_bacc: tuned.bacc,
                midpoint_bacc,
                records: scored.len(),
            },
        );
    }
    Ok(ThresholdFile {
        checker: engine.identity(),
        plan: engine.plan,
        range,
        thresholds,
    })
}
