//! Matrix derivatives as order-4 tensors.
//!
//! For `Y = Y(X)` with `X ∈ ℝ^{m×n}` and `Y ∈ ℝ^{p×q}`, `dY/dX` is the
//! `m×n×p×q` tensor with entry `(i₁,i₂,i₃,i₄) = ∂Y[i₃,i₄] / ∂X[i₁,i₂]`.
//! Under that convention the closed forms below are all pair products with
//! the cross arrangement `×_c`, and composition is [`contract44`].
//!
//! The inverse rule is `dX⁻¹/dX = −(X⁻ᵀ ×_c X⁻¹)`, i.e.
//! `∂(X⁻¹)[k,l] / ∂X[i,j] = −(X⁻¹)[k,i]·(X⁻¹)[j,l]`. That is the only
//! arrangement of the two factors that agrees with central differences.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, identity, transpose};
use crate::products::{contract44, cross, identity_tensor, commutation_tensor, mode3_product, mode4_product};
use crate::scalar::Real;
use crate::shape::Shape;
use crate::tensor::DenseTensor;

/// `dY/dX` for `X ∈ ℝ^{m×n}`, `Y ∈ ℝ^{p×q}`: an `m×n×p×q` tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTensor<T> {
    value: DenseTensor<T>,
}

impl<T: Real> DerivativeTensor<T> {
    pub fn new(value: DenseTensor<T>) -> Result<Self> {
        if value.order() != 4 {
            return Err(Error::shape(format!("derivative tensor must have order 4, got {}", value.shape())));
        }
        Ok(DerivativeTensor { value })
    }

    pub fn value(&self) -> &DenseTensor<T> {
        &self.value
    }

    pub fn into_value(self) -> DenseTensor<T> {
        self.value
    }

    pub fn input_dims(&self) -> (usize, usize) {
        (self.value.dims()[0], self.value.dims()[1])
    }

    pub fn output_dims(&self) -> (usize, usize) {
        (self.value.dims()[2], self.value.dims()[3])
    }

    /// Gradient matrix of a scalar (1×1-valued) function.
    pub fn as_gradient(&self) -> Result<DenseTensor<T>> {
        if self.output_dims() != (1, 1) {
            return Err(Error::shape("gradient needs a 1x1 output"));
        }
        let (m, n) = self.input_dims();
        self.value.clone().reshape(Shape::matrix(m, n)?)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        self.value.max_abs_diff(&other.value)
    }
}

type EvalFn<T> = dyn Fn(&DenseTensor<T>) -> Result<DenseTensor<T>> + Send + Sync;

/// An effect-free matrix-to-matrix map with fixed input and output shapes.
pub struct MatrixFunction<T> {
    input: (usize, usize),
    output: (usize, usize),
    f: Box<EvalFn<T>>,
}

impl<T: Real> MatrixFunction<T> {
    pub fn new<F>(input: (usize, usize), output: (usize, usize), f: F) -> Self
    where
        F: Fn(&DenseTensor<T>) -> Result<DenseTensor<T>> + Send + Sync + 'static,
    {
        MatrixFunction { input, output, f: Box::new(f) }
    }

    /// Wrap an infallible map.
    pub fn from_fn<F>(input: (usize, usize), output: (usize, usize), f: F) -> Self
    where
        F: Fn(&DenseTensor<T>) -> DenseTensor<T> + Send + Sync + 'static,
    {
        Self::new(input, output, move |x| Ok(f(x)))
    }

    /// A scalar-valued map, seen as 1×1 output.
    pub fn scalar<F>(input: (usize, usize), f: F) -> Self
    where
        F: Fn(&DenseTensor<T>) -> Result<T> + Send + Sync + 'static,
    {
        Self::new(input, (1, 1), move |x| {
            let v = f(x)?;
            DenseTensor::from_dims(vec![1, 1], vec![v])
        })
    }

    pub fn input_dims(&self) -> (usize, usize) {
        self.input
    }

    pub fn output_dims(&self) -> (usize, usize) {
        self.output
    }

    pub fn eval(&self, x: &DenseTensor<T>) -> Result<DenseTensor<T>> {
        if x.dims() != [self.input.0, self.input.1] {
            return Err(Error::shape(format!(
                "function expects {}x{} input, got {}",
                self.input.0,
                self.input.1,
                x.shape()
            )));
        }
        let y = (self.f)(x)?;
        if y.dims() != [self.output.0, self.output.1] {
            return Err(Error::shape(format!(
                "function declared {}x{} output, produced {}",
                self.output.0,
                self.output.1,
                y.shape()
            )));
        }
        Ok(y)
    }
}

impl<T> fmt::Debug for MatrixFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixFunction")
            .field("input", &self.input)
            .field("output", &self.output)
            .finish_non_exhaustive()
    }
}

/// Default central-difference step for inputs of unit Frobenius norm.
pub const FD_STEP: f64 = 1e-5;

/// Central differences `(f(x₀+hE_ij) − f(x₀−hE_ij)) / 2h` for every input
/// coordinate. Coordinates are evaluated in parallel.
pub fn fd_derivative<T: Real>(
    f: &MatrixFunction<T>,
    x0: &DenseTensor<T>,
    h: T,
) -> Result<DerivativeTensor<T>> {
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    let (m, n) = f.input_dims();
    let (p, q) = f.output_dims();
    if x0.dims() != [m, n] {
        return Err(Error::shape(format!("base point {} does not match {m}x{n} input", x0.shape())));
    }
    let two_h = h + h;
    let columns: Vec<Vec<T>> = (0..m * n)
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c % m, c / m);
            let at = |delta: T| {
                let mut x = x0.clone();
                x.data_mut()[c] += delta;
                f.eval(&x).map_err(|e| Error::Evaluation {
                    coordinate: (i + 1, j + 1),
                    message: e.to_string(),
                })
            };
            let plus = at(h)?;
            let minus = at(-h)?;
            Ok(plus.data().iter().zip(minus.data()).map(|(&a, &b)| (a - b) / two_h).collect())
        })
        .collect::<Result<_>>()?;
    // column c holds ∂Y/∂X[c]; storage of (i₁,i₂,i₃,i₄) puts X's index fastest
    let mut data = vec![T::zero(); m * n * p * q];
    for (c, col) in columns.iter().enumerate() {
        for (o, &v) in col.iter().enumerate() {
            data[c + m * n * o] = v;
        }
    }
    DerivativeTensor::new(DenseTensor::from_dims(vec![m, n, p, q], data)?)
}

/// `dX/dX = I_m ×_c I_n`.
pub fn d_identity<T: Real>(m: usize, n: usize) -> Result<DerivativeTensor<T>> {
    DerivativeTensor::new(identity_tensor(m, n)?)
}

/// `dXᵀ/dX = I_m ×_(2,3) I_n = K_{m,n}`.
pub fn d_transpose<T: Real>(m: usize, n: usize) -> Result<DerivativeTensor<T>> {
    DerivativeTensor::new(commutation_tensor(m, n)?)
}

/// `dX^k/dX = Σ_{p=0}^{k−1} (Xᵀ)^p ×_c X^{k−1−p}`.
pub fn d_power<T: Real>(x: &DenseTensor<T>, k: usize) -> Result<DerivativeTensor<T>> {
    let n = x.expect_square("power base")?;
    if k == 0 {
        return Err(Error::InvalidArgument("power must be at least 1".into()));
    }
    let xt = transpose(x);
    let mut left_powers = vec![identity::<T>(n)];
    let mut right_powers = vec![identity::<T>(n)];
    for p in 1..k {
        left_powers.push(linalg::matmul(&left_powers[p - 1], &xt));
        right_powers.push(linalg::matmul(&right_powers[p - 1], x));
    }
    let mut acc = DenseTensor::zeros(Shape::new(vec![n, n, n, n])?);
    for p in 0..k {
        acc = acc.try_add(&cross(&left_powers[p], &right_powers[k - 1 - p])?)?;
    }
    DerivativeTensor::new(acc)
}

/// `d(AXB)/dX = Aᵀ ×_c B` for `A ∈ ℝ^{p×m}`, `B ∈ ℝ^{n×q}`, `X ∈ ℝ^{m×n}`.
pub fn d_axb<T: Real>(
    a: &DenseTensor<T>,
    b: &DenseTensor<T>,
    m: usize,
    n: usize,
) -> Result<DerivativeTensor<T>> {
    let (_, am) = a.expect_matrix("left constant")?;
    let (bn, _) = b.expect_matrix("right constant")?;
    if am != m || bn != n {
        return Err(Error::shape(format!(
            "A must have {m} columns and B {n} rows; got {} and {}",
            a.shape(),
            b.shape()
        )));
    }
    DerivativeTensor::new(cross(&transpose(a), b)?)
}

/// `d det(X)/dX = det(X)·X⁻ᵀ`; refuses near-singular `X`.
pub fn d_det<T: Real>(x: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    x.expect_square("determinant argument")?;
    let det = linalg::check_nonsingular(x, "X")?;
    Ok(transpose(&linalg::inverse(x)?).scale(det))
}

/// `d Tr(X)/dX = I_n`.
pub fn d_trace<T: Real>(n: usize) -> Result<DenseTensor<T>> {
    if n == 0 {
        return Err(Error::InvalidShape("dimension must be positive".into()));
    }
    Ok(identity(n))
}

/// `dX⁻¹/dX = −(X⁻ᵀ ×_c X⁻¹)`.
pub fn d_inverse<T: Real>(x: &DenseTensor<T>) -> Result<DerivativeTensor<T>> {
    x.expect_square("inverse argument")?;
    let inv = linalg::inverse(x)?;
    let value = cross(&transpose(&inv), &inv)?;
    DerivativeTensor::new(value.map(|v| -v))
}

/// Chain rule `dZ/dX = dY/dX × dZ/dY`.
pub fn chain<T: Real>(dydx: &DerivativeTensor<T>, dzdy: &DerivativeTensor<T>) -> Result<DerivativeTensor<T>> {
    if dydx.output_dims() != dzdy.input_dims() {
        return Err(Error::shape(format!(
            "chain: dY/dX has output {:?}, dZ/dY expects input {:?}",
            dydx.output_dims(),
            dzdy.input_dims()
        )));
    }
    DerivativeTensor::new(contract44(&dydx.value, &dzdy.value)?)
}

/// Product rule `d(YZ)/dX = dY/dX ×₄ Z + dZ/dX ×₃ Yᵀ`, evaluated at `Y = y0`, `Z = z0`.
pub fn d_product<T: Real>(
    dydx: &DerivativeTensor<T>,
    dzdx: &DerivativeTensor<T>,
    y0: &DenseTensor<T>,
    z0: &DenseTensor<T>,
) -> Result<DerivativeTensor<T>> {
    let (p, r) = y0.expect_matrix("Y")?;
    let (r2, q) = z0.expect_matrix("Z")?;
    if r != r2 {
        return Err(Error::shape(format!("Y is {p}x{r} but Z is {r2}x{q}")));
    }
    if dydx.output_dims() != (p, r) || dzdx.output_dims() != (r, q) || dydx.input_dims() != dzdx.input_dims() {
        return Err(Error::shape("derivative shapes do not match Y, Z and a common X"));
    }
    let first = mode4_product(&dydx.value, z0)?;
    let second = mode3_product(&dzdx.value, &transpose(y0))?;
    DerivativeTensor::new(first.try_add(&second)?)
}

/// Sum of derivative tensors of equal shape (multi-argument chain rule).
pub fn sum<T: Real>(terms: &[DerivativeTensor<T>]) -> Result<DerivativeTensor<T>> {
    let (first, rest) = terms
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty sum".into()))?;
    let acc = rest.iter().try_fold(first.value.clone(), |acc, t| acc.try_add(&t.value))?;
    DerivativeTensor::new(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag;

    fn m(rows: &[&[f64]]) -> DenseTensor<f64> {
        DenseTensor::from_rows(rows).unwrap()
    }

    fn x33() -> DenseTensor<f64> {
        m(&[&[0.9, 0.2, -0.3], &[0.1, 1.1, 0.4], &[-0.2, 0.3, 0.8]])
    }

    #[test]
    fn identity_entries() {
        let d = d_identity::<f64>(2, 3).unwrap();
        assert_eq!(d.value().get(&[0, 1, 0, 1]), 1.0);
        assert_eq!(d.value().get(&[0, 1, 0, 2]), 0.0);
    }

    #[test]
    fn transpose_shape() {
        assert_eq!(d_transpose::<f64>(2, 3).unwrap().value().dims(), &[2, 3, 3, 2]);
    }

    #[test]
    fn constant_function_has_zero_derivative() {
        let c = m(&[&[1.0, 2.0]]);
        let f = MatrixFunction::from_fn((2, 2), (1, 2), move |_| c.clone());
        let d = fd_derivative(&f, &identity(2), 1e-5).unwrap();
        assert!(d.value().is_zero());
    }

    #[test]
    fn fd_reports_failing_coordinate() {
        let f = MatrixFunction::<f64>::new((2, 2), (1, 1), |x| {
            if x.at(1, 0) > 0.5 {
                Err(Error::InvalidArgument("boom".into()))
            } else {
                DenseTensor::from_dims(vec![1, 1], vec![0.0])
            }
        });
        let x0 = m(&[&[0.0, 0.0], &[0.5, 0.0]]);
        match fd_derivative(&f, &x0, 1e-3) {
            Err(Error::Evaluation { coordinate, .. }) => assert_eq!(coordinate, (2, 1)),
            other => panic!("expected evaluation error, got {other:?}"),
        }
    }

    #[test]
    fn fd_rejects_bad_step() {
        let f = MatrixFunction::from_fn((1, 1), (1, 1), |x: &DenseTensor<f64>| x.clone());
        assert!(fd_derivative(&f, &identity(1), 0.0).is_err());
    }

    #[test]
    fn power_one_and_two() {
        let x = x33();
        assert_eq!(d_power(&x, 1).unwrap(), d_identity(3, 3).unwrap());
        let i2 = identity::<f64>(2);
        assert_eq!(d_power(&i2, 2).unwrap().into_value(), identity_tensor::<f64>(2, 2).unwrap().scale(2.0));
        assert!(d_power(&m(&[&[1.0, 2.0]]), 2).is_err());
    }

    #[test]
    fn axb_identity_and_selector() {
        assert_eq!(
            d_axb(&identity::<f64>(2), &identity(3), 2, 3).unwrap(),
            d_identity(2, 3).unwrap()
        );
        // A = e₁e₂ᵀ (2x2), B = I: (AXB)[0, l] = X[1, l], so ∂Y[0,l]/∂X[1,l] = 1
        let a = m(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let d = d_axb(&a, &identity(3), 2, 3).unwrap();
        assert_eq!(d.value().get(&[1, 2, 0, 2]), 1.0);
        assert_eq!(d.value().get(&[0, 2, 0, 2]), 0.0);
        assert_eq!(d.value().get(&[1, 2, 1, 2]), 0.0);
        assert!(d_axb(&a, &identity(3), 3, 3).is_err());
    }

    #[test]
    fn det_examples() {
        assert_eq!(d_det(&identity::<f64>(3)).unwrap(), identity(3));
        let d = d_det(&diag(&[2.0, 3.0])).unwrap();
        assert!(d.max_abs_diff(&diag(&[3.0, 2.0])).unwrap() < 1e-15);
        assert!(matches!(d_det(&m(&[&[1.0, 2.0], &[2.0, 4.0]])), Err(Error::Singular { .. })));
    }

    #[test]
    fn trace_is_identity() {
        let d = d_trace::<f64>(2).unwrap();
        assert_eq!(d, identity(2));
        assert_eq!(transpose(&d), d);
    }

    #[test]
    fn inverse_examples() {
        let d = d_inverse(&identity::<f64>(2)).unwrap();
        // −(I ×_c I): −δ(i1,i3)δ(i2,i4)
        assert_eq!(d.value().get(&[0, 1, 0, 1]), -1.0);
        assert_eq!(d.value().get(&[0, 1, 1, 0]), 0.0);
        let d = d_inverse(&diag(&[2.0, 4.0])).unwrap();
        assert_eq!(d.value().get(&[0, 0, 0, 0]), -0.25);
    }

    #[test]
    fn chain_with_identity_is_neutral() {
        let d = d_power(&x33(), 2).unwrap();
        let id = d_identity(3, 3).unwrap();
        assert!(chain(&id, &d).unwrap().max_abs_diff(&d).unwrap() < 1e-15);
        assert!(chain(&d_identity(2, 2).unwrap(), &d).is_err());
    }

    #[test]
    fn product_rule_with_constant_left_factor() {
        let a = m(&[&[1.0, 2.0, 0.0], &[0.0, -1.0, 3.0]]);
        let x = x33();
        let dydx = DerivativeTensor::new(DenseTensor::zeros(Shape::new(vec![3, 3, 2, 3]).unwrap())).unwrap();
        let dzdx = d_identity(3, 3).unwrap();
        let got = d_product(&dydx, &dzdx, &a, &x).unwrap();
        let want = d_axb(&a, &identity(3), 3, 3).unwrap();
        assert!(got.max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn scalar_gradient_view() {
        let f = MatrixFunction::scalar((2, 2), |x: &DenseTensor<f64>| linalg::trace(x));
        let g = fd_derivative(&f, &identity(2), 1e-5)
            .unwrap()
            .as_gradient()
            .unwrap();
        assert!(g.max_abs_diff(&identity(2)).unwrap() < 1e-9);
    }
}
