//! Check records and the closed-form versus oracle comparison.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;
use crate::verify::mc::MCEstimate;

pub const DEFAULT_K_SIGMA: f64 = 5.0;

/// An MC comparison is inconclusive when the largest standard error is at
/// least this fraction of the signal scale.
pub const INCONCLUSIVE_RATIO: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// What `statistic` measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// Largest entrywise `|closed − oracle| / std_err`.
    MaxZ,
    /// Largest entrywise relative error against a deterministic oracle.
    RelErr,
    /// Largest entrywise absolute error against a deterministic oracle.
    AbsErr,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    /// Registry entry that produced the record.
    pub check_id: String,
    pub name: String,
    pub anchor: String,
    pub family: String,
    pub closed: String,
    pub oracle: String,
    pub tolerance: f64,
    pub statistic_kind: Statistic,
    pub statistic: f64,
    /// Mean `|z|` over compared entries, for MC checks.
    pub mean_abs_z: Option<f64>,
    pub entries: usize,
    pub outcome: Outcome,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn with_family(mut self, family: &str) -> Self {
        self.family = family.to_string();
        self
    }
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.statistic_kind {
            Statistic::MaxZ => "max|z|",
            Statistic::RelErr => "rel-err",
            Statistic::AbsErr => "abs-err",
        };
        write!(
            f,
            "{:<12} {:<40} {}={:.3e} (tol {:.1e})  [{}]",
            self.outcome.to_string(),
            self.name,
            kind,
            self.statistic,
            self.tolerance,
            self.anchor
        )
    }
}

fn summarize(t: &DenseTensor<f64>) -> String {
    let max = t.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    format!("{} tensor, max|entry| {:.4e}", t.shape(), max)
}

/// `|closed − oracle| ≤ k_sigma·std_err` entrywise, with the signal scale
/// taken from the closed form itself.
pub fn compare(
    name: &str,
    anchor: &str,
    closed: &DenseTensor<f64>,
    oracle: &MCEstimate,
    k_sigma: f64,
) -> Result<CheckRecord> {
    compare_scaled(name, anchor, closed, oracle, k_sigma, None)
}

/// As [`compare`], but with an explicit signal scale for closed forms that
/// are identically zero (odd moments, means).
pub fn compare_scaled(
    name: &str,
    anchor: &str,
    closed: &DenseTensor<f64>,
    oracle: &MCEstimate,
    k_sigma: f64,
    scale: Option<f64>,
) -> Result<CheckRecord> {
    if closed.shape() != oracle.value.shape() {
        return Err(Error::shape(format!(
            "closed form is {}, oracle is {}",
            closed.shape(),
            oracle.value.shape()
        )));
    }
    if !(k_sigma > 0.0) {
        return Err(Error::InvalidArgument("k_sigma must be positive".into()));
    }
    let mut max_z = 0.0f64;
    let mut sum_z = 0.0;
    for ((&c, &o), &se) in closed.data().iter().zip(oracle.value.data()).zip(oracle.std_err.data()) {
        let d = (c - o).abs();
        let z = if d == 0.0 {
            0.0
        } else if se > 0.0 {
            d / se
        } else {
            f64::INFINITY
        };
        max_z = max_z.max(z);
        sum_z += z;
    }
    let entries = closed.len();
    let signal = scale.unwrap_or_else(|| closed.data().iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let max_se = oracle.std_err.data().iter().fold(0.0f64, |m, &v| m.max(v));
    let outcome = if !(max_z <= k_sigma) {
        Outcome::Fail
    } else if max_se >= INCONCLUSIVE_RATIO * signal && max_se > 0.0 {
        Outcome::Inconclusive
    } else {
        Outcome::Pass
    };
    Ok(CheckRecord {
        check_id: String::new(),
        name: name.to_string(),
        anchor: anchor.to_string(),
        family: String::new(),
        closed: summarize(closed),
        oracle: format!("MC n={} seed={:#x}, max std-err {:.3e}", oracle.n_samples, oracle.seed, max_se),
        tolerance: k_sigma,
        statistic_kind: Statistic::MaxZ,
        statistic: max_z,
        mean_abs_z: Some(sum_z / entries as f64),
        entries,
        outcome,
    })
}

/// Record for a deterministic comparison (finite differences, exact identities).
pub fn deterministic(
    name: &str,
    anchor: &str,
    kind: Statistic,
    error: f64,
    tolerance: f64,
    entries: usize,
    oracle: &str,
) -> CheckRecord {
    CheckRecord {
        check_id: String::new(),
        name: name.to_string(),
        anchor: anchor.to_string(),
        family: String::new(),
        closed: "closed form".to_string(),
        oracle: oracle.to_string(),
        tolerance,
        statistic_kind: kind,
        statistic: error,
        mean_abs_z: None,
        entries,
        outcome: if error <= tolerance { Outcome::Pass } else { Outcome::Fail },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(value: Vec<f64>, se: Vec<f64>) -> MCEstimate {
        MCEstimate {
            value: DenseTensor::vector(value).unwrap(),
            std_err: DenseTensor::vector(se).unwrap(),
            n_samples: 100,
            seed: 0,
        }
    }

    #[test]
    fn exact_match_passes_with_zero_z() {
        let c = DenseTensor::vector(vec![1.0, 2.0]).unwrap();
        let r = compare("x", "a", &c, &est(vec![1.0, 2.0], vec![0.01, 0.01]), 5.0).unwrap();
        assert_eq!(r.outcome, Outcome::Pass);
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn ten_sigma_off_fails() {
        let c = DenseTensor::vector(vec![1.0, 2.0]).unwrap();
        let r = compare("x", "a", &c, &est(vec![1.1, 2.0], vec![0.01, 0.01]), 5.0).unwrap();
        assert_eq!(r.outcome, Outcome::Fail);
        assert!((r.statistic - 10.0).abs() < 1e-9);
    }

    #[test]
    fn large_std_err_is_inconclusive() {
        let c = DenseTensor::vector(vec![1.0]).unwrap();
        let r = compare("x", "a", &c, &est(vec![1.2], vec![0.5]), 5.0).unwrap();
        assert_eq!(r.outcome, Outcome::Inconclusive);
        let z = DenseTensor::vector(vec![0.0]).unwrap();
        let r = compare_scaled("x", "a", &z, &est(vec![0.001], vec![0.001]), 5.0, Some(1.0)).unwrap();
        assert_eq!(r.outcome, Outcome::Pass);
    }

    #[test]
    fn shape_mismatch_is_error() {
        let c = DenseTensor::vector(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(compare("x", "a", &c, &est(vec![1.0, 2.0], vec![0.1, 0.1]), 5.0).is_err());
    }

    #[test]
    fn deterministic_records() {
        assert!(deterministic("d", "a", Statistic::RelErr, 1e-7, 1e-5, 4, "fd").passed());
        assert!(!deterministic("d", "a", Statistic::RelErr, f64::NAN, 1e-5, 4, "fd").passed());
    }
}
