//! Validated covariance factors.

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, matmul, symmetric_eigen, symmetrize, transpose};
use crate::scalar::Real;
use crate::tensor::DenseTensor;

/// Tolerance for asymmetry and for clamping small negative eigenvalues:
/// `1e-10`, widened to `100·ε` for types coarser than `f64`.
pub fn psd_tolerance<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(100.0))
}

/// A symmetric positive semidefinite matrix with its eigendecomposition and
/// symmetric square root `A = V·diag(√λ)·Vᵀ`, so `A·Aᵀ = A² = Σ`.
#[derive(Clone, Debug)]
pub struct Covariance<T> {
    name: String,
    sigma: DenseTensor<T>,
    factor: DenseTensor<T>,
    values: Vec<T>,
    vectors: DenseTensor<T>,
}

impl<T: Real> Covariance<T> {
    /// Validate and factor `sigma`. `name` is used in error messages.
    pub fn new(sigma: &DenseTensor<T>, name: &str) -> Result<Self> {
        let n = sigma
            .expect_square(name)
            .map_err(|_| Error::shape(format!("{name} must be square, got {}", sigma.shape())))?;
        if sigma.data().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name} has non-finite entries")));
        }
        let tol = psd_tolerance::<T>();
        let asym = asymmetry(sigma)?;
        if asym > tol {
            return Err(Error::NotSymmetric {
                name: name.to_string(),
                asymmetry: asym.to_f64().unwrap_or(f64::NAN),
            });
        }
        let sigma = symmetrize(sigma);
        let eig = symmetric_eigen(&sigma)?;
        let spectral = eig.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let min = eig.values.iter().fold(T::infinity(), |m, &v| m.min(v));
        if min < -tol * spectral {
            return Err(Error::NotPsd {
                name: name.to_string(),
                min_eigenvalue: min.to_f64().unwrap_or(f64::NAN),
            });
        }
        let values: Vec<T> = eig.values.iter().map(|&v| v.max(T::zero())).collect();
        let v = &eig.vectors;
        let scaled = DenseTensor::from_fn(v.shape().clone(), |ix| v.get(ix) * values[ix[1]].sqrt());
        let factor = symmetrize(&matmul(&scaled, &transpose(v)));
        debug_assert_eq!(factor.rows(), n);
        Ok(Covariance { name: name.to_string(), sigma, factor, values, vectors: eig.vectors })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.sigma.rows()
    }

    pub fn sigma(&self) -> &DenseTensor<T> {
        &self.sigma
    }

    /// Symmetric square root.
    pub fn factor(&self) -> &DenseTensor<T> {
        &self.factor
    }

    /// Eigenvalues after clamping at zero.
    pub fn eigenvalues(&self) -> &[T] {
        &self.values
    }

    fn check_definite(&self) -> Result<()> {
        let max = self.values.iter().fold(T::zero(), |m, &v| m.max(v));
        let min = self.values.iter().fold(T::infinity(), |m, &v| m.min(v));
        if !(max > T::zero()) || min <= T::lit(1e-12) * max {
            return Err(Error::Singular {
                name: self.name.clone(),
                detail: format!("smallest eigenvalue {min:e} relative to largest {max:e}"),
            });
        }
        Ok(())
    }

    /// `log det Σ`; refuses singular Σ.
    pub fn log_det(&self) -> Result<T> {
        self.check_definite()?;
        Ok(self.values.iter().map(|v| v.ln()).sum())
    }

    /// `Σ⁻¹ = V·diag(1/λ)·Vᵀ`; refuses singular Σ.
    pub fn inverse(&self) -> Result<DenseTensor<T>> {
        self.check_definite()?;
        let v = &self.vectors;
        let scaled = DenseTensor::from_fn(v.shape().clone(), |ix| v.get(ix) / self.values[ix[1]]);
        Ok(symmetrize(&matmul(&scaled, &transpose(v))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, identity};

    fn m(rows: &[&[f64]]) -> DenseTensor<f64> {
        DenseTensor::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_factor() {
        let c = Covariance::new(&identity::<f64>(3), "S").unwrap();
        assert!(c.factor().max_abs_diff(&identity(3)).unwrap() < 1e-15);
    }

    #[test]
    fn scalar_square_root() {
        let c = Covariance::new(&diag(&[4.0]), "S").unwrap();
        assert_eq!(c.factor().at(0, 0), 2.0);
    }

    #[test]
    fn reconstructs_sigma() {
        let s = m(&[&[2.0, 0.6, -0.3], &[0.6, 1.5, 0.2], &[-0.3, 0.2, 0.8]]);
        let c = Covariance::new(&s, "S").unwrap();
        let a = c.factor();
        let back = matmul(a, &transpose(a));
        assert!(back.rel_diff(&s, 0.0).unwrap() < 1e-10);
        let inv = c.inverse().unwrap();
        assert!(matmul(&inv, &s).max_abs_diff(&identity(3)).unwrap() < 1e-12);
        let ld = c.log_det().unwrap();
        assert!((ld - crate::linalg::det(&s).unwrap().ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let s = diag(&[1.0, -0.5]);
        match Covariance::new(&s, "Sigma1") {
            Err(e @ Error::NotPsd { .. }) => {
                assert!(e.to_string().starts_with("Sigma1 not positive semidefinite"))
            }
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }

    #[test]
    fn rejects_asymmetry() {
        let s = m(&[&[1.0, 0.5], &[0.4, 1.0]]);
        assert!(matches!(Covariance::new(&s, "S"), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn singular_is_factored_but_not_inverted() {
        let s = m(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let c = Covariance::new(&s, "S").unwrap();
        let a = c.factor();
        assert!(matmul(a, a).max_abs_diff(&s).unwrap() < 1e-12);
        assert!(matches!(c.inverse(), Err(Error::Singular { .. })));
        assert!(c.log_det().is_err());
    }
}
