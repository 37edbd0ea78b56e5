//! Running a pipeline over many inputs on a bounded worker pool.
//!
//! Results come back in ascending id order whatever the worker count, so
//! downstream files are reproducible.

use groundfact_core::text::SentenceSplitter;
use groundfact_llm::Gateway;
use rayon::prelude::*;

use crate::c2d::{run_c2d, C2dClaim, C2dConfig, C2dOutcome};
use crate::d2c::{run_d2c, D2cConfig, D2cOutcome, SourceDoc};
use crate::simp::{run_c2d_simp, run_d2c_simp};
use crate::{RejectionStats, SynthError, SynthTuple};

#[derive(Debug, Default)]
pub struct BatchReport {
    pub tuples: Vec<SynthTuple>,
    pub stats: RejectionStats,
    /// Inputs removed by a gate or the atom cap, with the reason.
    pub dropped: Vec<(String, String)>,
    /// Inputs that failed outright, with the error text.
    pub failed: Vec<(String, String)>,
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
}

fn sorted_by_id<T, R: Send>(items: &[T], id: impl Fn(&T) -> &str + Sync, workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<(String, R)>
where
    T: Sync,
{
    let mut out: Vec<(String, R)> = pool(workers).install(|| items.par_iter().map(|x| (id(x).to_string(), f(x))).collect());
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn c2d_batch(gw: &Gateway, claims: &[C2dClaim], cfg: &C2dConfig, workers: usize) -> BatchReport {
    let results = sorted_by_id(claims, |c| &c.id, workers, |c| run_c2d(gw, c, cfg));
    let mut report = BatchReport::default();
    for (id, result) in results {
        match result {
            Ok(C2dOutcome {
                tuples, stats, dropped, ..
            }) => {
                report.stats.absorb(&stats);
                report.tuples.extend(tuples);
                if let Some(reason) = dropped {
                    report.dropped.push((id, reason));
                }
            }
            Err(e) => {
                tracing::error!(claim = %id, error = %e, "claim failed");
                report.failed.push((id, e.to_string()));
            }
        }
    }
    report
}

pub fn d2c_batch(
    gw: &Gateway,
    docs: &[SourceDoc],
    splitter: &dyn SentenceSplitter,
    cfg: &D2cConfig,
    workers: usize,
) -> (BatchReport, Vec<D2cOutcome>) {
    let results = sorted_by_id(docs, |d| &d.id, workers, |d| run_d2c(gw, d, splitter, cfg));
    let mut report = BatchReport::default();
    let mut outcomes = Vec::new();
    for (id, result) in results {
        match result {
            Ok(outcome) => {
                report.tuples.extend(outcome.tuples.iter().cloned());
                outcomes.push(outcome);
            }
            Err(e) => {
                tracing::error!(doc = %id, error = %e, "document failed");
                report.failed.push((id, e.to_string()));
            }
        }
    }
    (report, outcomes)
}

fn collect(results: Vec<(String, Result<Vec<SynthTuple>, SynthError>)>) -> BatchReport {
    let mut report = BatchReport::default();
    for (id, result) in results {
        match result {
            Ok(t) => report.tuples.extend(t),
            Err(e) => {
                tracing::error!(input = %id, error = %e, "input failed");
                report.failed.push((id, e.to_string()));
            }
        }
    }
    report
}

pub fn c2d_simp_batch(gw: &Gateway, claims: &[C2dClaim], workers: usize) -> BatchReport {
    collect(sorted_by_id(claims, |c| &c.id, workers, |c| run_c2d_simp(gw, c)))
}

pub fn d2c_simp_batch(gw: &Gateway, docs: &[SourceDoc], splitter: &dyn SentenceSplitter, workers: usize) -> BatchReport {
    collect(sorted_by_id(docs, |d| &d.id, workers, |d| run_d2c_simp(gw, d, splitter)))
}
