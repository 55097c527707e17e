//! Tensor normal distribution `N(μ, Σ₁, …, Σ_m)`.
//!
//! `X = μ + Z ×₁ U₁ ×₂ U₂ … ×_m U_m` with `Z` a standard normal tensor and
//! `U_k·U_kᵀ = Σ_k`. The factors are symmetric, so `U_kᵀ·U_k = Σ_k` as well.
//!
//! The mode-k unfolding of `X` is matrix normal with row covariance `Σ_k` and
//! column covariance `Ω_k = Σ_m ⊗ … ⊗ Σ_{k+1} ⊗ Σ_{k−1} ⊗ … ⊗ Σ₁`: the
//! remaining modes enumerate the columns with the lowest mode fastest, so the
//! Kronecker factors appear from the highest mode down.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::covariance::Covariance;
use crate::error::{Error, Result};
use crate::io::TensorText;
use crate::linalg::kron;
use crate::matrix_normal::MatrixNormalParams;
use crate::products::{separable_tensor, tucker_apply};
use crate::rng::GaussianSampleStream;
use crate::scalar::Real;
use crate::shape::Shape;
use crate::tensor::DenseTensor;

#[derive(Clone, Debug)]
pub struct TensorNormalParams<T> {
    mean: DenseTensor<T>,
    covs: Vec<Covariance<T>>,
}

impl<T: Real> TensorNormalParams<T> {
    pub fn new(mean: DenseTensor<T>, sigmas: &[DenseTensor<T>]) -> Result<Self> {
        if mean.order() == 0 {
            return Err(Error::shape("tensor normal needs order at least 1"));
        }
        if sigmas.len() != mean.order() {
            return Err(Error::shape(format!(
                "mu has order {} but {} covariance factors were given",
                mean.order(),
                sigmas.len()
            )));
        }
        let covs = sigmas
            .iter()
            .enumerate()
            .map(|(k, s)| Covariance::new(s, &format!("Sigma{}", k + 1)))
            .collect::<Result<Vec<_>>>()?;
        for (k, c) in covs.iter().enumerate() {
            if c.dim() != mean.dims()[k] {
                return Err(Error::shape(format!(
                    "Sigma{} is {}x{} but mode {} of mu has size {}",
                    k + 1,
                    c.dim(),
                    c.dim(),
                    k + 1,
                    mean.dims()[k]
                )));
            }
        }
        Ok(TensorNormalParams { mean, covs })
    }

    /// Zero mean, identity covariances.
    pub fn standard(shape: &Shape) -> Result<Self> {
        let sigmas: Vec<DenseTensor<T>> = shape.dims().iter().map(|&n| crate::linalg::identity(n)).collect();
        Self::new(DenseTensor::zeros(shape.clone()), &sigmas)
    }

    pub fn order(&self) -> usize {
        self.mean.order()
    }

    pub fn shape(&self) -> &Shape {
        self.mean.shape()
    }

    pub fn mean(&self) -> &DenseTensor<T> {
        &self.mean
    }

    /// `Σ_k` for 0-based mode `k`.
    pub fn sigma(&self, k: usize) -> &DenseTensor<T> {
        self.covs[k].sigma()
    }

    pub fn sigmas(&self) -> Vec<DenseTensor<T>> {
        self.covs.iter().map(|c| c.sigma().clone()).collect()
    }

    /// Symmetric square roots `U_k`.
    pub fn factors(&self) -> Vec<DenseTensor<T>> {
        self.covs.iter().map(|c| c.factor().clone()).collect()
    }

    fn check_argument(&self, t: &DenseTensor<T>) -> Result<()> {
        if t.shape() != self.mean.shape() {
            return Err(Error::shape(format!("T is {}, parameters are {}", t.shape(), self.mean.shape())));
        }
        Ok(())
    }
}

pub fn make_tensor_params<T: Real>(mean: DenseTensor<T>, sigmas: &[DenseTensor<T>]) -> Result<TensorNormalParams<T>> {
    TensorNormalParams::new(mean, sigmas)
}

/// Tensor of i.i.d. standard normal entries.
pub fn snd_tensor<T: Real>(rng: &mut GaussianSampleStream, shape: &Shape) -> DenseTensor<T> {
    rng.normal_tensor(shape)
}

/// `μ + Z·[U₁, …, U_m]`.
pub fn sample_tensor<T: Real>(params: &TensorNormalParams<T>, rng: &mut GaussianSampleStream) -> DenseTensor<T> {
    let z = snd_tensor(rng, params.shape());
    let x = tucker_apply(&z, &params.factors()).expect("factors conform");
    &x + params.mean()
}

/// `Ω_k` for 0-based mode `k`.
pub fn omega<T: Real>(params: &TensorNormalParams<T>, k: usize) -> Result<DenseTensor<T>> {
    params.shape().check_mode(k)?;
    let mut acc = DenseTensor::from_dims(vec![1, 1], vec![T::one()])?;
    for l in (0..params.order()).rev().filter(|&l| l != k) {
        acc = kron(&acc, params.sigma(l))?;
    }
    Ok(acc)
}

/// Parameters of the mode-k unfolding (0-based `k`): `(unfold(μ,k), Σ_k, Ω_k)`.
pub fn unfold_params<T: Real>(params: &TensorNormalParams<T>, k: usize) -> Result<MatrixNormalParams<T>> {
    let om = omega(params, k)?;
    MatrixNormalParams::new(params.mean().unfold(k)?, params.sigma(k), &om)
}

/// Standard normal log density: `−(d/2)·log 2π − ½⟨T,T⟩`.
pub fn snd_log_density<T: Real>(shape: &Shape, t: &DenseTensor<T>) -> Result<T> {
    if t.shape() != shape {
        return Err(Error::shape(format!("T is {}, expected {shape}", t.shape())));
    }
    let d = T::from_usize_lossy(shape.size());
    let half = T::lit(0.5);
    Ok(-half * d * (T::PI() + T::PI()).ln() - half * t.inner(t)?)
}

/// `Σ = Σ₁ × … × Σ_m` with entry `(j₁…j_m ; k₁…k_m) = ∏ σ⁽ˢ⁾[j_s, k_s]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BigSigma<T> {
    tensor: DenseTensor<T>,
}

impl<T: Real> BigSigma<T> {
    pub fn tensor(&self) -> &DenseTensor<T> {
        &self.tensor
    }

    pub fn into_tensor(self) -> DenseTensor<T> {
        self.tensor
    }

    /// `cov(X_a, X_b)`.
    pub fn entry(&self, a: &[usize], b: &[usize]) -> T {
        let ix: Vec<usize> = a.iter().chain(b).copied().collect();
        self.tensor.get(&ix)
    }
}

pub fn big_sigma<T: Real>(params: &TensorNormalParams<T>) -> BigSigma<T> {
    BigSigma { tensor: separable_tensor(&params.sigmas()).expect("square factors") }
}

/// Second central moment: `cov(X_a, X_b)` stored at `(a, b)`, the layout of
/// `X × X`. For order 2 this is the interleaved matrix moment `Σ₁ ×_c Σ₂`.
pub fn moment2_tensor<T: Real>(params: &TensorNormalParams<T>) -> Result<DenseTensor<T>> {
    if !params.mean().is_zero() {
        return Err(Error::NonZeroMean);
    }
    Ok(big_sigma(params).into_tensor())
}

/// `⟨T^[2], Σ⟩`, computed as `⟨T, T·[Σ₁,…,Σ_m]⟩` without forming `Σ`.
pub fn quadratic_term<T: Real>(params: &TensorNormalParams<T>, t: &DenseTensor<T>) -> Result<T> {
    params.check_argument(t)?;
    t.inner(&tucker_apply(t, &params.sigmas())?)
}

/// `φ(T) = exp{i⟨T,μ⟩ − ½⟨T^[2],Σ⟩}`.
pub fn tensor_cf<T: Real>(params: &TensorNormalParams<T>, t: &DenseTensor<T>) -> Result<Complex<T>> {
    let quad = quadratic_term(params, t)?;
    let phase = t.inner(params.mean())?;
    Ok(Complex::new(-T::lit(0.5) * quad, phase).exp())
}

/// JSON form `{"mu": …, "Sigmas": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorNormalJson {
    pub mu: TensorText,
    #[serde(rename = "Sigmas")]
    pub sigmas: Vec<TensorText>,
}

impl TensorNormalParams<f64> {
    pub fn to_json(&self) -> TensorNormalJson {
        TensorNormalJson {
            mu: self.mean().into(),
            sigmas: self.covs.iter().map(|c| c.sigma().into()).collect(),
        }
    }

    pub fn from_json(j: TensorNormalJson) -> Result<Self> {
        let mean = DenseTensor::try_from(j.mu).map_err(|e| Error::Format(format!("field mu: {e}")))?;
        let sigmas = j
            .sigmas
            .into_iter()
            .enumerate()
            .map(|(k, s)| DenseTensor::try_from(s).map_err(|e| Error::Format(format!("field Sigmas[{k}]: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(mean, &sigmas)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, identity, transpose};
    use crate::matrix_normal::{cf, moment2};

    fn m(rows: &[&[f64]]) -> DenseTensor<f64> {
        DenseTensor::from_rows(rows).unwrap()
    }

    fn s2() -> DenseTensor<f64> {
        m(&[&[1.5, 0.4], &[0.4, 0.9]])
    }

    fn s3() -> DenseTensor<f64> {
        m(&[&[1.0, 0.2, -0.1], &[0.2, 2.0, 0.3], &[-0.1, 0.3, 0.7]])
    }

    fn zero(dims: &[usize]) -> DenseTensor<f64> {
        DenseTensor::zeros(Shape::new(dims.to_vec()).unwrap())
    }

    fn order3() -> TensorNormalParams<f64> {
        make_tensor_params(zero(&[2, 3, 2]), &[s2(), s3(), diag(&[1.0, 0.5])]).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(make_tensor_params(zero(&[2, 3]), &[s2()]).is_err());
        assert!(make_tensor_params(zero(&[2, 2]), &[s2(), s3()]).is_err());
        let e = make_tensor_params(zero(&[2]), &[diag(&[1.0, -1.0])]).unwrap_err();
        assert!(e.to_string().starts_with("Sigma1 not positive semidefinite"));
    }

    #[test]
    fn identity_unfold_params() {
        let mu = DenseTensor::from_dims(vec![2, 2, 2], (0..8).map(f64::from).collect()).unwrap();
        let p = make_tensor_params(mu.clone(), &[identity(2), identity(2), identity(2)]).unwrap();
        for k in 0..3 {
            let u = unfold_params(&p, k).unwrap();
            assert_eq!(u.mean(), &mu.unfold(k).unwrap());
            assert_eq!(u.sigma1(), &identity(2));
            assert_eq!(u.sigma2(), &identity(4));
        }
        assert!(unfold_params(&p, 3).is_err());
    }

    #[test]
    fn omega_order() {
        let p = order3();
        let o = omega(&p, 1).unwrap();
        assert_eq!(o, kron(&diag(&[1.0, 0.5]), &s2()).unwrap());
        let o = omega(&p, 0).unwrap();
        assert_eq!(o, kron(&diag(&[1.0, 0.5]), &s3()).unwrap());
    }

    #[test]
    fn order2_mode2_is_transpose_law() {
        let p = make_tensor_params(zero(&[2, 3]), &[s2(), s3()]).unwrap();
        let u = unfold_params(&p, 1).unwrap();
        assert_eq!(u.sigma1(), &s3());
        assert_eq!(u.sigma2(), &s2());
        let u0 = unfold_params(&p, 0).unwrap();
        assert_eq!(u0.sigma1(), &s2());
        assert_eq!(u0.sigma2(), &s3());
    }

    #[test]
    fn snd_log_density_examples() {
        let half_log_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
        let v = snd_log_density(&Shape::scalar(), &DenseTensor::scalar(0.0)).unwrap();
        assert!((v + half_log_2pi).abs() < 1e-15);
        let sh = Shape::new(vec![2, 2, 2]).unwrap();
        let v = snd_log_density(&sh, &zero(&[2, 2, 2])).unwrap();
        assert!((v + 8.0 * half_log_2pi).abs() < 1e-14);
        let t = DenseTensor::from_dims(vec![2, 2, 2], (0..8).map(|v| v as f64 * 0.3 - 1.0).collect()).unwrap();
        let per_entry: f64 = t.data().iter().map(|x| -half_log_2pi - 0.5 * x * x).sum();
        assert!((snd_log_density(&sh, &t).unwrap() - per_entry).abs() < 1e-13);
        assert!(snd_log_density(&sh, &zero(&[2, 2])).is_err());
    }

    #[test]
    fn cf_examples() {
        let p = order3();
        assert_eq!(tensor_cf(&p, &zero(&[2, 3, 2])).unwrap(), Complex::new(1.0, 0.0));
        let s = TensorNormalParams::<f64>::standard(&Shape::new(vec![2, 2, 2]).unwrap()).unwrap();
        let mut t = zero(&[2, 2, 2]);
        t.set(&[1, 0, 1], 1.0);
        assert!((tensor_cf(&s, &t).unwrap().re - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn quadratic_term_matches_big_sigma_contraction() {
        let p = order3();
        let t = DenseTensor::from_dims(vec![2, 3, 2], (0..12).map(|v| (v as f64 * 0.7).sin()).collect()).unwrap();
        let direct = t.outer(&t).inner(big_sigma(&p).tensor()).unwrap();
        assert!((quadratic_term(&p, &t).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn order2_agrees_with_matrix_normal() {
        let mu = m(&[&[0.3, -1.0, 0.5], &[2.0, 0.1, -0.4]]);
        let tp = make_tensor_params(mu.clone(), &[s2(), s3()]).unwrap();
        let mp = MatrixNormalParams::new(mu, &s2(), &s3()).unwrap();
        let t = m(&[&[0.2, -0.1, 0.4], &[0.0, 0.3, -0.6]]);
        assert!((tensor_cf(&tp, &t).unwrap() - cf(&mp, &t).unwrap()).norm() < 1e-12);
        let z = make_tensor_params(zero(&[2, 3]), &[s2(), s3()]).unwrap();
        let zm = MatrixNormalParams::new(zero(&[2, 3]), &s2(), &s3()).unwrap();
        assert!(moment2_tensor(&z).unwrap().max_abs_diff(&moment2(&zm).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn big_sigma_entries() {
        let p = order3();
        let b = big_sigma(&p);
        assert_eq!(b.tensor().dims(), &[2, 3, 2, 2, 3, 2]);
        let want = s2().at(0, 1) * s3().at(2, 1) * 0.5;
        assert!((b.entry(&[0, 2, 1], &[1, 1, 1]) - want).abs() < 1e-15);
        let s = TensorNormalParams::<f64>::standard(&Shape::new(vec![2, 2]).unwrap()).unwrap();
        let bs = big_sigma(&s);
        assert_eq!(bs.entry(&[0, 1], &[0, 1]), 1.0);
        assert_eq!(bs.entry(&[0, 1], &[1, 1]), 0.0);
        assert!(moment2_tensor(&make_tensor_params(DenseTensor::vector(vec![1.0]).unwrap(), &[diag(&[1.0])]).unwrap()).is_err());
    }

    #[test]
    fn factors_are_symmetric() {
        for u in order3().factors() {
            assert_eq!(u, transpose(&u));
        }
    }

    #[test]
    fn json_round_trip() {
        let p = order3();
        let s = serde_json::to_string(&p.to_json()).unwrap();
        let q = TensorNormalParams::from_json(serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(q.sigmas(), p.sigmas());
        assert_eq!(q.mean(), p.mean());
    }
}
