//! Matrix normal distribution `N_{n₁,n₂}(M, Σ₁, Σ₂)`.
//!
//! `X = A₁·Z·A₂ᵀ + M` with `Z` a standard normal matrix and `A_k·A_kᵀ = Σ_k`,
//! so `vec(X) ∼ N(vec(M), Σ₂ ⊗ Σ₁)`. Entry `x_ij` is normal with variance
//! `σ¹_ii·σ²_jj` (not its square).
//!
//! Moments are stored in the interleaved layout by default: the order-2k
//! tensor `m_k` has axes `(i₁, j₁, i₂, j₂, …)`, one `(row, column)` pair per
//! factor, so `m₂[i₁,j₁,i₂,j₂] = cov(X[i₁,j₁], X[i₂,j₂]) = (Σ₁ ×_c Σ₂)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::covariance::Covariance;
use crate::error::{Error, Result};
use crate::io::TensorText;
use crate::linalg::{kron, matmul, selector, transpose};
use crate::products::{cross, interleaved_to_grouped, grouped_to_interleaved};
use crate::rng::GaussianSampleStream;
use crate::scalar::Real;
use crate::shape::Shape;
use crate::tensor::DenseTensor;

/// Validated parameters with cached symmetric square-root factors.
#[derive(Clone, Debug)]
pub struct MatrixNormalParams<T> {
    mean: DenseTensor<T>,
    sigma1: Covariance<T>,
    sigma2: Covariance<T>,
}

impl<T: Real> MatrixNormalParams<T> {
    pub fn new(mean: DenseTensor<T>, sigma1: &DenseTensor<T>, sigma2: &DenseTensor<T>) -> Result<Self> {
        let (n1, n2) = mean
            .expect_matrix("M")
            .map_err(|_| Error::shape(format!("M must be a matrix, got {}", mean.shape())))?;
        let sigma1 = Covariance::new(sigma1, "Sigma1")?;
        let sigma2 = Covariance::new(sigma2, "Sigma2")?;
        if sigma1.dim() != n1 || sigma2.dim() != n2 {
            return Err(Error::shape(format!(
                "M is {n1}x{n2} but Sigma1 is {}x{0} and Sigma2 is {}x{1}",
                sigma1.dim(),
                sigma2.dim()
            )));
        }
        Ok(MatrixNormalParams { mean, sigma1, sigma2 })
    }

    /// Zero mean, identity covariances.
    pub fn standard(n1: usize, n2: usize) -> Result<Self> {
        let mean = DenseTensor::zeros(Shape::matrix(n1, n2)?);
        Self::new(mean, &crate::linalg::identity(n1), &crate::linalg::identity(n2))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.mean.rows(), self.mean.cols())
    }

    pub fn mean(&self) -> &DenseTensor<T> {
        &self.mean
    }

    pub fn sigma1(&self) -> &DenseTensor<T> {
        self.sigma1.sigma()
    }

    pub fn sigma2(&self) -> &DenseTensor<T> {
        self.sigma2.sigma()
    }

    pub fn a1(&self) -> &DenseTensor<T> {
        self.sigma1.factor()
    }

    pub fn a2(&self) -> &DenseTensor<T> {
        self.sigma2.factor()
    }

    pub fn row_covariance(&self) -> &Covariance<T> {
        &self.sigma1
    }

    pub fn column_covariance(&self) -> &Covariance<T> {
        &self.sigma2
    }

    /// Covariance of `vec(X)`: `Σ₂ ⊗ Σ₁`.
    pub fn vec_covariance(&self) -> DenseTensor<T> {
        kron(self.sigma2(), self.sigma1()).expect("square factors")
    }

    fn require_zero_mean(&self) -> Result<()> {
        if self.mean.is_zero() {
            Ok(())
        } else {
            Err(Error::NonZeroMean)
        }
    }

    fn check_argument(&self, t: &DenseTensor<T>, what: &str) -> Result<()> {
        if t.shape() != self.mean.shape() {
            return Err(Error::shape(format!("{what} is {}, parameters are {}", t.shape(), self.mean.shape())));
        }
        Ok(())
    }
}

pub fn make_params<T: Real>(
    mean: DenseTensor<T>,
    sigma1: &DenseTensor<T>,
    sigma2: &DenseTensor<T>,
) -> Result<MatrixNormalParams<T>> {
    MatrixNormalParams::new(mean, sigma1, sigma2)
}

/// `m×n` matrix of i.i.d. standard normal draws.
pub fn snd_matrix<T: Real>(rng: &mut GaussianSampleStream, m: usize, n: usize) -> Result<DenseTensor<T>> {
    Ok(rng.normal_tensor(&Shape::matrix(m, n)?))
}

/// `A₁·Z·A₂ᵀ + M`.
pub fn sample<T: Real>(params: &MatrixNormalParams<T>, rng: &mut GaussianSampleStream) -> DenseTensor<T> {
    let (n1, n2) = params.dims();
    let z = snd_matrix(rng, n1, n2).expect("valid dims");
    let x = matmul(&matmul(params.a1(), &z), &transpose(params.a2()));
    &x + params.mean()
}

/// `ω_T = Tr[(T−M)ᵀ Σ₁⁻¹ (T−M) Σ₂⁻¹]`.
pub fn quadratic_form<T: Real>(params: &MatrixNormalParams<T>, t: &DenseTensor<T>) -> Result<T> {
    params.check_argument(t, "T")?;
    let d = t.try_sub(params.mean())?;
    let s1 = params.sigma1.inverse()?;
    let s2 = params.sigma2.inverse()?;
    d.inner(&matmul(&matmul(&s1, &d), &s2))
}

/// Log density, evaluated in log space from the eigenvalues of Σ₁ and Σ₂.
pub fn log_density<T: Real>(params: &MatrixNormalParams<T>, t: &DenseTensor<T>) -> Result<T> {
    let omega = quadratic_form(params, t)?;
    let (n1, n2) = params.dims();
    let (n1f, n2f) = (T::from_usize_lossy(n1), T::from_usize_lossy(n2));
    let half = T::lit(0.5);
    let log_2pi = (T::PI() + T::PI()).ln();
    Ok(-half * n1f * n2f * log_2pi
        - half * n2f * params.sigma1.log_det()?
        - half * n1f * params.sigma2.log_det()?
        - half * omega)
}

/// `φ(T) = exp{i·Tr(TᵀM) − ½·Tr(TᵀΣ₁TΣ₂)}`.
pub fn cf<T: Real>(params: &MatrixNormalParams<T>, t: &DenseTensor<T>) -> Result<Complex<T>> {
    params.check_argument(t, "T")?;
    let phase = t.inner(params.mean())?;
    let quad = t.inner(&matmul(&matmul(params.sigma1(), t), params.sigma2()))?;
    Ok(Complex::new(-T::lit(0.5) * quad, phase).exp())
}

/// `A(T) = iM − Σ₁TΣ₂`.
fn cf_a<T: Real>(params: &MatrixNormalParams<T>, t: &DenseTensor<T>) -> DenseTensor<Complex<T>> {
    let s = matmul(&matmul(params.sigma1(), t), params.sigma2());
    let mu = params.mean();
    DenseTensor::from_fn(s.shape().clone(), |ix| Complex::new(-s.get(ix), mu.get(ix)))
}

/// `∂φ/∂T = φ(T)·A(T)`.
pub fn cf_grad<T: Real>(params: &MatrixNormalParams<T>, t: &DenseTensor<T>) -> Result<DenseTensor<Complex<T>>> {
    let phi = cf(params, t)?;
    Ok(cf_a(params, t).map(|a| phi * a))
}

/// `∂²φ/∂T[i₁,i₂]∂T[i₃,i₄] = φ·(A[i₁,i₂]·A[i₃,i₄] − Σ₁[i₁,i₃]·Σ₂[i₂,i₄])`.
pub fn cf_hess<T: Real>(params: &MatrixNormalParams<T>, t: &DenseTensor<T>) -> Result<DenseTensor<Complex<T>>> {
    let phi = cf(params, t)?;
    let a = cf_a(params, t);
    let (n1, n2) = params.dims();
    let (s1, s2) = (params.sigma1(), params.sigma2());
    let shape = Shape::new(vec![n1, n2, n1, n2])?;
    Ok(DenseTensor::from_fn(shape, |ix| {
        let aa = a.at(ix[0], ix[1]) * a.at(ix[2], ix[3]);
        phi * (aa - Complex::from(s1.at(ix[0], ix[2]) * s2.at(ix[1], ix[3])))
    }))
}

/// Index arrangement of an order-2k moment tensor of a matrix variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentLayout {
    /// `(i₁, j₁, i₂, j₂, …, i_k, j_k)`
    #[default]
    Interleaved,
    /// `(i₁, …, i_k, j₁, …, j_k)`
    Grouped,
}

/// Rearrange a moment tensor of an order-`var_order` variable between layouts.
/// The order of `t` must be `var_order·k` for some k.
pub fn reorder<T: Real>(
    t: &DenseTensor<T>,
    var_order: usize,
    from: MomentLayout,
    to: MomentLayout,
) -> Result<DenseTensor<T>> {
    if var_order == 0 || t.order() % var_order != 0 {
        return Err(Error::shape(format!(
            "order-{} tensor is not a moment of an order-{var_order} variable",
            t.order()
        )));
    }
    let k = t.order() / var_order;
    match (from, to) {
        (a, b) if a == b => Ok(t.clone()),
        (MomentLayout::Interleaved, MomentLayout::Grouped) => t.permute_axes(&interleaved_to_grouped(var_order, k)),
        _ => t.permute_axes(&grouped_to_interleaved(var_order, k)),
    }
}

/// `m₂ = Σ₁ ×_c Σ₂` (interleaved), for zero mean.
pub fn moment2<T: Real>(params: &MatrixNormalParams<T>) -> Result<DenseTensor<T>> {
    params.require_zero_mean()?;
    cross(params.sigma1(), params.sigma2())
}

/// Fourth moment via the three Wick pairings, shape `(n₁,n₂)×4` interleaved.
pub fn moment4<T: Real>(params: &MatrixNormalParams<T>) -> Result<DenseTensor<T>> {
    params.require_zero_mean()?;
    let (n1, n2) = params.dims();
    let (s1, s2) = (params.sigma1(), params.sigma2());
    let shape = Shape::new(vec![n1, n2, n1, n2, n1, n2, n1, n2])?;
    let c = |ix: &[usize], a: usize, b: usize| s1.at(ix[2 * a], ix[2 * b]) * s2.at(ix[2 * a + 1], ix[2 * b + 1]);
    Ok(DenseTensor::from_fn(shape, |ix| {
        c(ix, 0, 1) * c(ix, 2, 3) + c(ix, 0, 2) * c(ix, 1, 3) + c(ix, 0, 3) * c(ix, 1, 2)
    }))
}

/// Odd central moments vanish: the zero tensor of shape `(n₁,n₂)×k`.
pub fn odd_moment<T: Real>(params: &MatrixNormalParams<T>, k: usize) -> Result<DenseTensor<T>> {
    params.require_zero_mean()?;
    if k % 2 == 0 {
        return Err(Error::InvalidArgument(format!("moment order {k} is not odd")));
    }
    let (n1, n2) = params.dims();
    let dims: Vec<usize> = (0..k).flat_map(|_| [n1, n2]).collect();
    Ok(DenseTensor::zeros(Shape::new(dims)?))
}

/// Law of `B₁·X·B₂ᵀ + C`: `N(C + B₁MB₂ᵀ, B₁Σ₁B₁ᵀ, B₂Σ₂B₂ᵀ)`.
pub fn affine<T: Real>(
    params: &MatrixNormalParams<T>,
    b1: &DenseTensor<T>,
    b2: &DenseTensor<T>,
    c: &DenseTensor<T>,
) -> Result<MatrixNormalParams<T>> {
    let (n1, n2) = params.dims();
    let (r1, c1) = b1.expect_matrix("B1")?;
    let (r2, c2) = b2.expect_matrix("B2")?;
    if c1 != n1 || c2 != n2 || c.dims() != [r1, r2] {
        return Err(Error::shape(format!(
            "affine map needs B1 with {n1} columns, B2 with {n2} columns and C of shape {r1}x{r2}; got {}, {}, {}",
            b1.shape(),
            b2.shape(),
            c.shape()
        )));
    }
    let mean = c.try_add(&matmul(&matmul(b1, params.mean()), &transpose(b2)))?;
    let s1 = matmul(&matmul(b1, params.sigma1()), &transpose(b1));
    let s2 = matmul(&matmul(b2, params.sigma2()), &transpose(b2));
    MatrixNormalParams::new(mean, &s1, &s2)
}

/// Law of the submatrix with rows `rows` and columns `cols` (0-based).
pub fn marginal<T: Real>(
    params: &MatrixNormalParams<T>,
    rows: &[usize],
    cols: &[usize],
) -> Result<MatrixNormalParams<T>> {
    let (n1, n2) = params.dims();
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::InvalidArgument("marginal index sets must be nonempty".into()));
    }
    let b1 = selector(rows, n1)?;
    let b2 = selector(cols, n2)?;
    let c = DenseTensor::zeros(Shape::matrix(rows.len(), cols.len())?);
    affine(params, &b1, &b2, &c)
}

/// JSON form `{"M": …, "Sigma1": …, "Sigma2": …}` with tensors as `{"dims","data"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixNormalJson {
    #[serde(rename = "M")]
    pub mean: TensorText,
    #[serde(rename = "Sigma1")]
    pub sigma1: TensorText,
    #[serde(rename = "Sigma2")]
    pub sigma2: TensorText,
}

impl MatrixNormalParams<f64> {
    pub fn to_json(&self) -> MatrixNormalJson {
        MatrixNormalJson {
            mean: self.mean().into(),
            sigma1: self.sigma1().into(),
            sigma2: self.sigma2().into(),
        }
    }

    pub fn from_json(j: MatrixNormalJson) -> Result<Self> {
        let field = |name: &str, t: TensorText| {
            DenseTensor::try_from(t).map_err(|e| Error::Format(format!("field {name}: {e}")))
        };
        let mean = field("M", j.mean)?;
        let s1 = field("Sigma1", j.sigma1)?;
        let s2 = field("Sigma2", j.sigma2)?;
        Self::new(mean, &s1, &s2)
    }
}
