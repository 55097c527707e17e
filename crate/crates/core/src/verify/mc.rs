//! Monte-Carlo estimation with per-entry standard errors.
//!
//! Every estimate is split into [`CHUNKS`] fixed substreams of one seed that
//! are run in parallel and merged in order, so results do not depend on the
//! number of worker threads.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::products::outer_power;
use crate::rng::GaussianSampleStream;
use crate::tensor::DenseTensor;

pub const CHUNKS: u64 = 32;

/// Sample mean of some tensor-valued statistic, with standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct MCEstimate {
    pub value: DenseTensor<f64>,
    /// Sample standard deviation over `√n`, entrywise.
    pub std_err: DenseTensor<f64>,
    pub n_samples: usize,
    pub seed: u64,
}

/// Running mean and sum of squared deviations (Welford), mergeable.
#[derive(Clone, Debug)]
struct Running {
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Running {
    fn new(len: usize) -> Self {
        Running { n: 0, mean: vec![0.0; len], m2: vec![0.0; len] }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1;
        let inv = 1.0 / self.n as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d * inv;
            *s += d * (v - *m);
        }
    }

    fn merge(&mut self, other: &Running) {
        if other.n == 0 {
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * nb / n;
            self.m2[i] += other.m2[i] + d * d * na * nb / n;
        }
        self.n += other.n;
    }
}

fn chunk_len(n: usize, c: u64) -> usize {
    let base = n / CHUNKS as usize;
    let extra = n % CHUNKS as usize;
    base + usize::from((c as usize) < extra)
}

/// Mean of `statistic` over `n` independent draws. Draw `c` of the `CHUNKS`
/// substreams of `seed` feeds chunk `c`.
pub fn mc_mean<F>(seed: u64, n: usize, statistic: F) -> Result<MCEstimate>
where
    F: Fn(&mut GaussianSampleStream) -> DenseTensor<f64> + Sync,
{
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {n}")));
    }
    let root = GaussianSampleStream::new(seed);
    let parts: Vec<(Running, Option<DenseTensor<f64>>)> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = root.substream(c + 1);
            let mut acc: Option<Running> = None;
            let mut template = None;
            for _ in 0..chunk_len(n, c) {
                let s = statistic(&mut rng);
                let r = acc.get_or_insert_with(|| Running::new(s.len()));
                r.push(s.data());
                if template.is_none() {
                    template = Some(s);
                }
            }
            (acc.unwrap_or_else(|| Running::new(0)), template)
        })
        .collect();
    let template = parts
        .iter()
        .find_map(|(_, t)| t.clone())
        .expect("n >= 2 gives a nonempty chunk");
    let mut total = Running::new(template.len());
    for (r, t) in &parts {
        if let Some(t) = t {
            if t.shape() != template.shape() {
                return Err(Error::shape("statistic changed shape between draws"));
            }
        }
        total.merge(r);
    }
    let nf = total.n as f64;
    let se: Vec<f64> = total.m2.iter().map(|s| (s / (nf - 1.0) / nf).sqrt()).collect();
    Ok(MCEstimate {
        value: DenseTensor::new(template.shape().clone(), total.mean)?,
        std_err: DenseTensor::new(template.shape().clone(), se)?,
        n_samples: n,
        seed,
    })
}

/// Raw k-th moment `E[X × X × … × X]` (order `k·order(X)`, factor-major).
pub fn mc_moment<F>(sampler: F, k: usize, n: usize, seed: u64) -> Result<MCEstimate>
where
    F: Fn(&mut GaussianSampleStream) -> DenseTensor<f64> + Sync,
{
    if k == 0 {
        return Err(Error::InvalidArgument("moment order must be at least 1".into()));
    }
    mc_mean(seed, n, |rng| outer_power(&sampler(rng), k))
}

/// Empirical characteristic function of a finite sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfEstimate {
    pub value: Complex<f64>,
    pub std_err_re: f64,
    pub std_err_im: f64,
    pub n_samples: usize,
}

impl CfEstimate {
    /// `[re, im]` as a length-2 estimate for [`crate::verify::compare`].
    pub fn as_estimate(&self, seed: u64) -> MCEstimate {
        MCEstimate {
            value: DenseTensor::vector(vec![self.value.re, self.value.im]).unwrap(),
            std_err: DenseTensor::vector(vec![self.std_err_re, self.std_err_im]).unwrap(),
            n_samples: self.n_samples,
            seed,
        }
    }
}

/// `(1/N) Σ exp(i⟨T, X_s⟩)`.
pub fn empirical_cf(samples: &[DenseTensor<f64>], t: &DenseTensor<f64>) -> Result<CfEstimate> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empirical CF of an empty sample".into()));
    }
    let mut acc = Running::new(2);
    for x in samples {
        let a = t.inner(x)?;
        acc.push(&[a.cos(), a.sin()]);
    }
    let nf = acc.n as f64;
    let se = |i: usize| if acc.n < 2 { f64::NAN } else { (acc.m2[i] / (nf - 1.0) / nf).sqrt() };
    Ok(CfEstimate {
        value: Complex::new(acc.mean[0], acc.mean[1]),
        std_err_re: se(0),
        std_err_im: se(1),
        n_samples: samples.len(),
    })
}

/// Empirical CF at several arguments from one stream of draws; the result is
/// a `2×len(ts)` estimate with rows `(re, im)`.
pub fn mc_cf<F>(sampler: F, ts: &[DenseTensor<f64>], n: usize, seed: u64) -> Result<MCEstimate>
where
    F: Fn(&mut GaussianSampleStream) -> DenseTensor<f64> + Sync,
{
    if ts.is_empty() {
        return Err(Error::InvalidArgument("no CF arguments".into()));
    }
    mc_mean(seed, n, |rng| {
        let x = sampler(rng);
        let mut data = Vec::with_capacity(2 * ts.len());
        for t in ts {
            let a = t.inner(&x).expect("argument shape matches sample");
            data.push(a.cos());
            data.push(a.sin());
        }
        DenseTensor::from_dims(vec![2, ts.len()], data).unwrap()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::Shape;

    #[test]
    fn running_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 - 3.0).collect();
        let mut all = Running::new(1);
        xs.iter().for_each(|x| all.push(&[*x]));
        let mut a = Running::new(1);
        let mut b = Running::new(1);
        xs[..17].iter().for_each(|x| a.push(&[*x]));
        xs[17..].iter().for_each(|x| b.push(&[*x]));
        a.merge(&b);
        assert!((a.mean[0] - all.mean[0]).abs() < 1e-12);
        assert!((a.m2[0] - all.m2[0]).abs() < 1e-9);
    }

    #[test]
    fn chunks_cover_n() {
        for n in [2, 31, 32, 33, 1000] {
            assert_eq!((0..CHUNKS).map(|c| chunk_len(n, c)).sum::<usize>(), n);
        }
    }

    #[test]
    fn constant_statistic_has_zero_error() {
        let e = mc_mean(1, 10, |_| DenseTensor::vector(vec![2.0, -1.0]).unwrap()).unwrap();
        assert_eq!(e.value.data(), &[2.0, -1.0]);
        assert!(e.std_err.is_zero());
        assert!(mc_mean(1, 1, |_| DenseTensor::scalar(0.0)).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let f = |r: &mut GaussianSampleStream| r.normal_tensor(&Shape::matrix(2, 2).unwrap());
        let a = mc_moment(f, 2, 500, 11).unwrap();
        let b = mc_moment(f, 2, 500, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.value.dims(), &[2, 2, 2, 2]);
        assert_ne!(a, mc_moment(f, 2, 500, 12).unwrap());
    }

    #[test]
    fn scaled_scalar_variance() {
        let e = mc_moment(|r| DenseTensor::scalar(2.0 * r.normal::<f64>()), 2, 20_000, 5).unwrap();
        let (v, se) = (e.value.data()[0], e.std_err.data()[0]);
        assert!((v - 4.0).abs() < 5.0 * se, "{v} ± {se}");
    }

    #[test]
    fn empirical_cf_at_zero_is_exact() {
        let xs: Vec<_> = (0..10).map(|i| DenseTensor::scalar(i as f64)).collect();
        let e = empirical_cf(&xs, &DenseTensor::scalar(0.0)).unwrap();
        assert_eq!(e.value, Complex::new(1.0, 0.0));
        assert_eq!((e.std_err_re, e.std_err_im), (0.0, 0.0));
        assert!(empirical_cf(&[], &DenseTensor::scalar(0.0)).is_err());
    }
}
