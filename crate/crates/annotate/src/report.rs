//! Agreement and accuracy over resolved tasks.

use std::collections::BTreeMap;

use groundfact_core::metrics::fleiss_kappa;
use serde::{Deserialize, Serialize};

use crate::task::{Status, Task, Verdict};
use crate::AnnotateError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineAgreement {
    pub tasks: usize,
    /// Tasks that needed an adjudicated verdict.
    pub adjudicated: usize,
    /// Fleiss' kappa over the verdicts as submitted.
    pub kappa: f64,
    /// Fraction of stored labels equal to the resolved verdict.
    pub label_accuracy: f64,
    /// Mean over annotators of each annotator's agreement with the resolved
    /// verdict.
    pub annotator_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub overall: PipelineAgreement,
    pub pipelines: BTreeMap<String, PipelineAgreement>,
}

fn summarize(tasks: &[&Task]) -> Result<PipelineAgreement, AnnotateError> {
    let ratings: Vec<Vec<Verdict>> = tasks
        .iter()
        .map(|t| t.verdicts().values().map(|e| e.verdict).collect())
        .collect();
    let kappa = fleiss_kappa(&ratings)?;

    let mut label_hits = 0usize;
    let mut per_annotator: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for t in tasks {
        let resolved = t.resolved().expect("only resolved tasks are summarized");
        if t.spec.label == resolved.into() {
            label_hits += 1;
        }
        for (name, entry) in t.verdicts() {
            let slot = per_annotator.entry(name).or_default();
            slot.1 += 1;
            if entry.verdict == resolved {
                slot.0 += 1;
            }
        }
    }
    let annotator_accuracy =
        per_annotator.values().map(|(hit, n)| *hit as f64 / *n as f64).sum::<f64>() / per_annotator.len() as f64;
    Ok(PipelineAgreement {
        tasks: tasks.len(),
        adjudicated: tasks.iter().filter(|t| t.adjudicated().is_some()).count(),
        kappa,
        label_accuracy: label_hits as f64 / tasks.len() as f64,
        annotator_accuracy,
    })
}

/// Fails with the ids of every task that is not yet resolved.
pub fn agreement_report<'a>(tasks: impl IntoIterator<Item = &'a Task>) -> Result<AgreementReport, AnnotateError> {
    let tasks: Vec<&Task> = tasks.into_iter().collect();
    let open: Vec<String> = tasks
        .iter()
        .filter(|t| t.status() != Status::Resolved)
        .map(|t| t.id().to_string())
        .collect();
    if !open.is_empty() {
        return Err(AnnotateError::Unresolved(open));
    }
    let mut groups: BTreeMap<&str, Vec<&Task>> = BTreeMap::new();
    for t in &tasks {
        groups.entry(t.spec.pipeline.as_str()).or_default().push(t);
    }
    let mut pipelines = BTreeMap::new();
    for (name, group) in groups {
        pipelines.insert(name.to_string(), summarize(&group)?);
    }
    Ok(AgreementReport {
        overall: summarize(&tasks)?,
        pipelines,
    })
}
