//! Balanced accuracy, per-dataset threshold tuning, paired bootstrap
//! significance and Fleiss' kappa.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::SupportLabel;

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Upper bound on redraws of a single bootstrap resample that lacks a class.
const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("balanced accuracy is undefined: no gold {0} examples")]
    MissingClass(SupportLabel),
    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch { what: &'static str, got: usize, expected: usize },
    #[error("bootstrap needs at least one run")]
    NoRuns,
    #[error("could not draw a resample containing both classes after {0} tries")]
    DegenerateResample(usize),
    #[error("invalid score range ({0}, {1})")]
    BadRange(f64, f64),
    #[error("ratings matrix invalid: {0}")]
    BadRatings(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, fn_: usize, tn: usize, fp: usize) -> Self {
        Self { tp, fn_, tn, fp }
    }

    pub fn from_labels(preds: &[SupportLabel], gold: &[SupportLabel]) -> Result<Self, MetricsError> {
        if preds.len() != gold.len() {
            return Err(MetricsError::LengthMismatch {
                what: "predictions",
                got: preds.len(),
                expected: gold.len(),
            });
        }
        let mut c = Self::default();
        for (p, g) in preds.iter().zip(gold) {
            c.record(*p, *g);
        }
        Ok(c)
    }

    pub fn record(&mut self, pred: SupportLabel, gold: SupportLabel) {
        use SupportLabel::*;
        match (gold, pred) {
            (Supported, Supported) => self.tp += 1,
            (Supported, Unsupported) => self.fn_ += 1,
            (Unsupported, Unsupported) => self.tn += 1,
            (Unsupported, Supported) => self.fp += 1,
        }
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.tn + self.fp
    }

    /// ½ (TP / (TP + FN) + TN / (TN + FP)).
    pub fn bacc(&self) -> Result<f64, MetricsError> {
        if self.positives() == 0 {
            return Err(MetricsError::MissingClass(SupportLabel::Supported));
        }
        if self.negatives() == 0 {
            return Err(MetricsError::MissingClass(SupportLabel::Unsupported));
        }
        let tpr = self.tp as f64 / self.positives() as f64;
        let tnr = self.tn as f64 / self.negatives() as f64;
        Ok(0.5 * (tpr + tnr))
    }
}

pub fn bacc(counts: &ConfusionCounts) -> Result<f64, MetricsError> {
    counts.bacc()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunedThreshold {
    pub threshold: f64,
    pub bacc: f64,
}

/// Picks the threshold maximizing balanced accuracy under the strict `score > t`
/// rule. Candidates are the range endpoints and the midpoints between
/// consecutive distinct scores; ties go to the smallest threshold.
pub fn tune_threshold(scored: &[(f64, SupportLabel)], range: (f64, f64)) -> Result<TunedThreshold, MetricsError> {
    let (lo, hi) = range;
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(MetricsError::BadRange(lo, hi));
    }
    let mut pos: Vec<f64> = Vec::new();
    let mut neg: Vec<f64> = Vec::new();
    for &(s, g) in scored {
        match g {
            SupportLabel::Supported => pos.push(s),
            SupportLabel::Unsupported => neg.push(s),
        }
    }
    if pos.is_empty() {
        return Err(MetricsError::MissingClass(SupportLabel::Supported));
    }
    if neg.is_empty() {
        return Err(MetricsError::MissingClass(SupportLabel::Unsupported));
    }
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);

    let mut distinct: Vec<f64> = scored.iter().map(|(s, _)| *s).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let mut candidates = vec![lo, hi];
    candidates.extend(distinct.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let above = |sorted: &[f64], t: f64| sorted.len() - sorted.partition_point(|&s| s <= t);
    let mut best: Option<TunedThreshold> = None;
    for t in candidates {
        let tp = above(&pos, t);
        let fp = above(&neg, t);
        let counts = ConfusionCounts::new(tp, pos.len() - tp, neg.len() - fp, fp);
        let value = counts.bacc()?;
        if best.is_none_or(|b| value > b.bacc) {
            best = Some(TunedThreshold { threshold: t, bacc: value });
        }
    }
    Ok(best.expect("candidate list is never empty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub runs: usize,
    pub p_value: f64,
    pub alpha: f64,
    /// `p_value < alpha`: the champion beats the challenger on significantly
    /// many resamples.
    pub significant: bool,
}

impl BootstrapResult {
    pub fn at_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self.significant = self.p_value < alpha;
        self
    }
}

/// Draws the bootstrap index stream: `runs` resamples of `gold.len()` indices
/// with replacement, generated sequentially from `seed`. A resample lacking
/// either gold class is redrawn from the same stream.
pub fn resample_indices(gold: &[SupportLabel], runs: usize, seed: u64) -> Result<Vec<Vec<usize>>, MetricsError> {
    if runs == 0 {
        return Err(MetricsError::NoRuns);
    }
    let n = gold.len();
    if !gold.contains(&SupportLabel::Supported) {
        return Err(MetricsError::MissingClass(SupportLabel::Supported));
    }
    if !gold.contains(&SupportLabel::Unsupported) {
        return Err(MetricsError::MissingClass(SupportLabel::Unsupported));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stream = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut tries = 0;
        loop {
            let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let has_pos = sample.iter().any(|&i| gold[i].is_supported());
            let has_neg = sample.iter().any(|&i| !gold[i].is_supported());
            if has_pos && has_neg {
                stream.push(sample);
                break;
            }
            tries += 1;
            if tries >= MAX_REDRAWS {
                return Err(MetricsError::DegenerateResample(tries));
            }
        }
    }
    Ok(stream)
}

/// Fraction of resamples on which `challenger` reaches at least the
/// champion's balanced accuracy.
pub fn p_value_on_stream(
    champion: &[SupportLabel],
    challenger: &[SupportLabel],
    gold: &[SupportLabel],
    stream: &[Vec<usize>],
) -> Result<f64, MetricsError> {
    check_len("champion", champion, gold)?;
    check_len("challenger", challenger, gold)?;
    if stream.is_empty() {
        return Err(MetricsError::NoRuns);
    }
    let mut wins = 0usize;
    for sample in stream {
        let mut a = ConfusionCounts::default();
        let mut b = ConfusionCounts::default();
        for &i in sample {
            a.record(champion[i], gold[i]);
            b.record(challenger[i], gold[i]);
        }
        if b.bacc()? >= a.bacc()? {
            wins += 1;
        }
    }
    Ok(wins as f64 / stream.len() as f64)
}

/// Paired bootstrap test of `preds_b` (challenger) against `preds_a`
/// (champion). Ties count for the challenger.
pub fn paired_bootstrap(
    preds_a: &[SupportLabel],
    preds_b: &[SupportLabel],
    gold: &[SupportLabel],
    runs: usize,
    seed: u64,
) -> Result<BootstrapResult, MetricsError> {
    check_len("preds_a", preds_a, gold)?;
    check_len("preds_b", preds_b, gold)?;
    let stream = resample_indices(gold, runs, seed)?;
    let p_value = p_value_on_stream(preds_a, preds_b, gold, &stream)?;
    Ok(BootstrapResult {
        runs,
        p_value,
        alpha: DEFAULT_ALPHA,
        significant: p_value < DEFAULT_ALPHA,
    })
}

fn check_len<T>(what: &'static str, v: &[T], gold: &[SupportLabel]) -> Result<(), MetricsError> {
    if v.len() != gold.len() {
        return Err(MetricsError::LengthMismatch {
            what,
            got: v.len(),
            expected: gold.len(),
        });
    }
    Ok(())
}

/// Fleiss' kappa for a complete items × raters matrix.
///
/// When expected agreement is 1 (every rating is the same single category)
/// kappa is undefined; 1.0 is returned with a warning.
pub fn fleiss_kappa<T: Ord + Clone>(ratings: &[Vec<T>]) -> Result<f64, MetricsError> {
    let items = ratings.len();
    if items == 0 {
        return Err(MetricsError::BadRatings("no items".into()));
    }
    let raters = ratings[0].len();
    if raters < 2 {
        return Err(MetricsError::BadRatings(format!("need at least 2 raters, got {raters}")));
    }
    if let Some((i, row)) = ratings.iter().enumerate().find(|(_, r)| r.len() != raters) {
        return Err(MetricsError::BadRatings(format!(
            "item {i} has {} ratings, expected {raters}",
            row.len()
        )));
    }

    let n = raters as f64;
    let mut category_totals: BTreeMap<T, usize> = BTreeMap::new();
    let mut p_bar = 0.0;
    for row in ratings {
        let mut counts: BTreeMap<&T, usize> = BTreeMap::new();
        for r in row {
            *counts.entry(r).or_default() += 1;
            *category_totals.entry(r.clone()).or_default() += 1;
        }
        let sq: f64 = counts.values().map(|&c| (c * c) as f64).sum();
        p_bar += (sq - n) / (n * (n - 1.0));
    }
    p_bar /= items as f64;

    let total = (items * raters) as f64;
    let p_e: f64 = category_totals.values().map(|&c| (c as f64 / total).powi(2)).sum();
    if (1.0 - p_e).abs() < 1e-12 {
        tracing::warn!("Fleiss' kappa undefined (all ratings in one category); returning 1.0");
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}
