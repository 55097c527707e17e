//! Moment-based test that a scalar statistic is standard normal.
//!
//! Under N(0,1) the sample mean, variance, skewness and excess kurtosis have
//! asymptotic standard errors `√(1/N)`, `√(2/N)`, `√(6/N)` and `√(24/N)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::GaussianSampleStream;
use crate::verify::check::{CheckRecord, Outcome, Statistic, INCONCLUSIVE_RATIO};
use crate::verify::mc::CHUNKS;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormalityStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl NormalityStats {
    fn from_power_sums(n: usize, s: [f64; 4]) -> Self {
        let nf = n as f64;
        let mu = s[0] / nf;
        let (r2, r3, r4) = (s[1] / nf, s[2] / nf, s[3] / nf);
        let m2 = r2 - mu * mu;
        let m3 = r3 - 3.0 * mu * r2 + 2.0 * mu.powi(3);
        let m4 = r4 - 4.0 * mu * r3 + 6.0 * mu * mu * r2 - 3.0 * mu.powi(4);
        NormalityStats {
            n,
            mean: mu,
            variance: m2 * nf / (nf - 1.0),
            skewness: m3 / m2.powf(1.5),
            excess_kurtosis: m4 / (m2 * m2) - 3.0,
        }
    }

    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::InvalidArgument("normality needs at least 2 samples".into()));
        }
        let mut s = [0.0; 4];
        for &x in xs {
            add_powers(&mut s, x);
        }
        Ok(Self::from_power_sums(xs.len(), s))
    }

    /// Standard errors of (mean, variance, skewness, excess kurtosis).
    pub fn std_errs(&self) -> [f64; 4] {
        let n = self.n as f64;
        [(1.0 / n).sqrt(), (2.0 / n).sqrt(), (6.0 / n).sqrt(), (24.0 / n).sqrt()]
    }

    /// z-scores against N(0,1).
    pub fn z_scores(&self) -> [f64; 4] {
        let se = self.std_errs();
        [
            self.mean / se[0],
            (self.variance - 1.0) / se[1],
            self.skewness / se[2],
            self.excess_kurtosis / se[3],
        ]
    }

    pub fn to_record(&self, name: &str, anchor: &str, k_sigma: f64) -> CheckRecord {
        let z = self.z_scores();
        let max_z = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mean_abs_z = z.iter().map(|v| v.abs()).sum::<f64>() / 4.0;
        let max_se = self.std_errs()[3];
        let outcome = if !(max_z <= k_sigma) {
            Outcome::Fail
        } else if max_se >= INCONCLUSIVE_RATIO {
            Outcome::Inconclusive
        } else {
            Outcome::Pass
        };
        CheckRecord {
            check_id: String::new(),
            name: name.to_string(),
            anchor: anchor.to_string(),
            family: String::new(),
            closed: "N(0,1): mean 0, variance 1, skewness 0, excess kurtosis 0".to_string(),
            oracle: format!(
                "n={} mean {:.2e} var {:.4} skew {:.2e} exkurt {:.2e}",
                self.n, self.mean, self.variance, self.skewness, self.excess_kurtosis
            ),
            tolerance: k_sigma,
            statistic_kind: Statistic::MaxZ,
            statistic: max_z,
            mean_abs_z: Some(mean_abs_z),
            entries: 4,
            outcome,
        }
    }
}

fn add_powers(s: &mut [f64; 4], x: f64) {
    let x2 = x * x;
    s[0] += x;
    s[1] += x2;
    s[2] += x2 * x;
    s[3] += x2 * x2;
}

/// Normality statistics of `statistic` over `n` draws, chunked like
/// [`crate::verify::mc_mean`].
pub fn mc_normality<F>(seed: u64, n: usize, statistic: F) -> Result<NormalityStats>
where
    F: Fn(&mut GaussianSampleStream) -> f64 + Sync,
{
    if n < 2 {
        return Err(Error::InvalidArgument("normality needs at least 2 samples".into()));
    }
    let root = GaussianSampleStream::new(seed);
    let sums: Vec<[f64; 4]> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = root.substream(c + 1);
            let len = n / CHUNKS as usize + usize::from((c as usize) < n % CHUNKS as usize);
            let mut s = [0.0; 4];
            for _ in 0..len {
                add_powers(&mut s, statistic(&mut rng));
            }
            s
        })
        .collect();
    let mut total = [0.0; 4];
    for s in &sums {
        for i in 0..4 {
            total[i] += s[i];
        }
    }
    Ok(NormalityStats::from_power_sums(n, total))
}
