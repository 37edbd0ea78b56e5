use std::fmt;
use std::str::FromStr;

use groundfact_core::SupportLabel;
use serde::{Deserialize, Serialize};

use crate::CheckerError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreRange {
    pub min: f64,
    pub max: f64,
}

impl ScoreRange {
    pub fn new(min: f64, max: f64) -> Result<Self, CheckerError> {
        if min.is_finite() && max.is_finite() && min < max {
            Ok(Self { min, max })
        } else {
            Err(CheckerError::InvalidRange { min, max })
        }
    }

    pub const UNIT: ScoreRange = ScoreRange { min: 0.0, max: 1.0 };

    pub fn midpoint(&self) -> f64 {
        (self.min + self.max) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckerOutput {
    pub score: f64,
    pub range: ScoreRange,
}

impl CheckerOutput {
    pub fn new(score: f64, range: ScoreRange) -> Result<Self, CheckerError> {
        if !(range.min..=range.max).contains(&score) {
            return Err(CheckerError::ScoreOutOfRange {
                score,
                min: range.min,
                max: range.max,
            });
        }
        Ok(Self { score, range })
    }
}

/// Scores one (chunk, claim) pair.
pub trait Checker: Send + Sync {
    /// Recorded in run manifests and reports.
    fn identity(&self) -> String;

    fn score(&self, chunk: &str, claim: &str) -> Result<CheckerOutput, CheckerError>;
}

impl<C: Checker + ?Sized> Checker for std::sync::Arc<C> {
    fn identity(&self) -> String {
        (**self).identity()
    }

    fn score(&self, chunk: &str, claim: &str) -> Result<CheckerOutput, CheckerError> {
        (**self).score(chunk, claim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ThresholdPolicy {
    Fixed { value: f64 },
    Midpoint,
    /// A threshold chosen on validation data; `value` is filled in from the
    /// stored thresholds before use.
    Tuned { dataset: String, value: Option<f64> },
}

impl ThresholdPolicy {
    pub fn threshold(&self, range: ScoreRange) -> Result<f64, CheckerError> {
        match self {
            ThresholdPolicy::Fixed { value } => Ok(*value),
            ThresholdPolicy::Midpoint => Ok(range.midpoint()),
            ThresholdPolicy::Tuned { value: Some(v), .. } => Ok(*v),
            ThresholdPolicy::Tuned { dataset, value: None } => Err(CheckerError::NoThreshold(dataset.clone())),
        }
    }
}

impl FromStr for ThresholdPolicy {
    type Err = CheckerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CheckerError::BadPolicy(s.to_string());
        match s.split_once(':') {
            None if s == "midpoint" => Ok(ThresholdPolicy::Midpoint),
            Some(("fixed", v)) => {
                let value: f64 = v.parse().map_err(|_| bad())?;
                if value.is_finite() {
                    Ok(ThresholdPolicy::Fixed { value })
                } else {
                    Err(bad())
                }
            }
            Some(("tuned", d)) if !d.is_empty() => Ok(ThresholdPolicy::Tuned {
                dataset: d.to_string(),
                value: None,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ThresholdPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdPolicy::Fixed { value } => write!(f, "fixed:{value}"),
            ThresholdPolicy::Midpoint => f.write_str("midpoint"),
            ThresholdPolicy::Tuned { dataset, .. } => write!(f, "tuned:{dataset}"),
        }
    }
}

/// Supported iff the score is strictly above the policy's threshold.
pub fn decide(output: &CheckerOutput, policy: &ThresholdPolicy) -> Result<SupportLabel, CheckerError> {
    let t = policy.threshold(output.range)?;
    Ok(SupportLabel::from_bool(output.score > t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn out(score: f64, min: f64, max: f64) -> CheckerOutput {
        CheckerOutput::new(score, ScoreRange::new(min, max).unwrap()).unwrap()
    }

    #[test]
    fn fixed_and_midpoint() {
        let fixed = ThresholdPolicy::Fixed { value: 0.5 };
        assert_eq!(decide(&out(0.6, 0.0, 1.0), &fixed).unwrap(), SupportLabel::Supported);
        assert_eq!(decide(&out(0.5, 0.0, 1.0), &fixed).unwrap(), SupportLabel::Unsupported);
        assert_eq!(ThresholdPolicy::Midpoint.threshold(ScoreRange::new(-1.0, 1.0).unwrap()).unwrap(), 0.0);
        assert_eq!(ThresholdPolicy::Midpoint.threshold(ScoreRange::UNIT).unwrap(), 0.5);
        assert_eq!(decide(&out(0.0, -1.0, 1.0), &ThresholdPolicy::Midpoint).unwrap(), SupportLabel::Unsupported);
    }

    #[test]
    fn tuned_needs_a_value() {
        let p: ThresholdPolicy = "tuned:Wice".parse().unwrap();
        assert!(matches!(decide(&out(0.9, 0.0, 1.0), &p), Err(CheckerError::NoThreshold(d)) if d == "Wice"));
        let filled = ThresholdPolicy::Tuned {
            dataset: "Wice".into(),
            value: Some(0.95),
        };
        assert_eq!(decide(&out(0.9, 0.0, 1.0), &filled).unwrap(), SupportLabel::Unsupported);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("fixed:0.25".parse::<ThresholdPolicy>().unwrap(), ThresholdPolicy::Fixed { value: 0.25 });
        assert_eq!("midpoint".parse::<ThresholdPolicy>().unwrap(), ThresholdPolicy::Midpoint);
        for bad in ["fixed:x", "fixed:NaN", "tuned:", "median", "midpoint:1"] {
            assert!(bad.parse::<ThresholdPolicy>().is_err(), "{bad}");
        }
        assert_eq!(ThresholdPolicy::Fixed { value: 0.5 }.to_string(), "fixed:0.5");
    }

    #[test]
    fn range_validation() {
        assert!(ScoreRange::new(1.0, 1.0).is_err());
        assert!(ScoreRange::new(0.0, f64::NAN).is_err());
        assert!(CheckerOutput::new(1.5, ScoreRange::UNIT).is_err());
    }

    proptest! {
        #[test]
        fn decide_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0, t in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let p = ThresholdPolicy::Fixed { value: t };
            let dl = decide(&out(lo, 0.0, 1.0), &p).unwrap();
            let dh = decide(&out(hi, 0.0, 1.0), &p).unwrap();
            prop_assert!(!(dl.is_supported() && !dh.is_supported()));
        }

        #[test]
        fn increasing_transform_preserves_decision(s in -1.0f64..1.0, t in -1.0f64..1.0, k in 0.1f64..10.0, c in -5.0f64..5.0) {
            let f = |x: f64| (k * x + c).exp();
            let before = decide(&out(s, -1.0, 1.0), &ThresholdPolicy::Fixed { value: t }).unwrap();
            let range = ScoreRange::new(f(-1.0), f(1.0)).unwrap();
            let after = decide(&CheckerOutput { score: f(s), range }, &ThresholdPolicy::Fixed { value: f(t) }).unwrap();
            prop_assert_eq!(before, after);
        }
    }
}
