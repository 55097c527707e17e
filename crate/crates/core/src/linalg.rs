//! Small dense matrix kernels on order-2 [`DenseTensor`]s.
//!
//! Sizes here are desk scale (covariances of a few dozen rows at most), so
//! the decompositions are the textbook ones: partial-pivot LU and cyclic
//! Jacobi for symmetric eigenproblems.

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::shape::Shape;
use crate::tensor::DenseTensor;

pub fn identity<T: Scalar>(n: usize) -> DenseTensor<T> {
    let shape = Shape::matrix(n, n).expect("n >= 1");
    DenseTensor::from_fn(shape, |ix| if ix[0] == ix[1] { T::one() } else { T::zero() })
}

pub fn diag<T: Scalar>(values: &[T]) -> DenseTensor<T> {
    let n = values.len();
    let shape = Shape::matrix(n, n).expect("n >= 1");
    DenseTensor::from_fn(shape, |ix| if ix[0] == ix[1] { values[ix[0]] } else { T::zero() })
}

pub fn transpose<T: Scalar>(a: &DenseTensor<T>) -> DenseTensor<T> {
    a.permute_axes(&[1, 0]).expect("matrix")
}

pub fn try_matmul<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    let (m, k) = a.expect_matrix("left factor")?;
    let (k2, n) = b.expect_matrix("right factor")?;
    if k != k2 {
        return Err(Error::shape(format!("matmul of {m}x{k} and {k2}x{n}")));
    }
    let mut out = vec![T::zero(); m * n];
    let (ad, bd) = (a.data(), b.data());
    for j in 0..n {
        let col = &mut out[j * m..(j + 1) * m];
        for p in 0..k {
            let bpj = bd[p + j * k];
            if bpj == T::zero() {
                continue;
            }
            let acol = &ad[p * m..(p + 1) * m];
            for (o, &aip) in col.iter_mut().zip(acol) {
                *o += aip * bpj;
            }
        }
    }
    DenseTensor::new(Shape::matrix(m, n)?, out)
}

/// Matrix product; panics on mismatched inner dimensions.
pub fn matmul<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> DenseTensor<T> {
    try_matmul(a, b).expect("conformable matrices")
}

/// Matrix-vector product `A·x` with `x` of order 1.
pub fn matvec<T: Scalar>(a: &DenseTensor<T>, x: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    let col = x.clone().reshape(Shape::matrix(x.len(), 1)?)?;
    let y = try_matmul(a, &col)?;
    let n = y.len();
    y.reshape(Shape::new(vec![n])?)
}

pub fn matrix_power<T: Scalar>(a: &DenseTensor<T>, k: usize) -> Result<DenseTensor<T>> {
    let n = a.expect_square("matrix power base")?;
    let mut acc = identity(n);
    for _ in 0..k {
        acc = try_matmul(&acc, a)?;
    }
    Ok(acc)
}

pub fn trace<T: Scalar>(a: &DenseTensor<T>) -> Result<T> {
    let n = a.expect_square("trace argument")?;
    Ok((0..n).map(|i| a.at(i, i)).sum())
}

/// Select rows/columns: `P` with `P[r, idx[r]] = 1`, shape `idx.len() × n`.
pub fn selector<T: Scalar>(indices: &[usize], n: usize) -> Result<DenseTensor<T>> {
    if indices.is_empty() {
        return Err(Error::InvalidArgument("empty index subset".into()));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange(format!("index {} exceeds dimension {n}", bad + 1)));
    }
    let shape = Shape::matrix(indices.len(), n)?;
    Ok(DenseTensor::from_fn(shape, |ix| if indices[ix[0]] == ix[1] { T::one() } else { T::zero() }))
}

/// Kronecker product `A ⊗ B` with `(A⊗B)[i·p+k, j·q+l] = A[i,j]·B[k,l]`.
pub fn kron<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    let (m, n) = a.expect_matrix("kron left")?;
    let (p, q) = b.expect_matrix("kron right")?;
    let shape = Shape::matrix(m * p, n * q)?;
    Ok(DenseTensor::from_fn(shape, |ix| {
        let (r, c) = (ix[0], ix[1]);
        a.at(r / p, c / q) * b.at(r % p, c % q)
    }))
}

/// LU factors with partial pivoting, packed in one matrix.
struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Real> Lu<T> {
    fn new(a: &DenseTensor<T>) -> Result<Self> {
        let n = a.expect_square("LU input")?;
        // row-major copy for the elimination
        let mut lu: Vec<T> = (0..n * n).map(|r| a.at(r / n, r % n)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| lu[x * n + col].abs().partial_cmp(&lu[y * n + col].abs()).unwrap())
                .unwrap();
            if lu[pivot * n + col] == T::zero() {
                singular = true;
                continue;
            }
            if pivot != col {
                for c in 0..n {
                    lu.swap(pivot * n + c, col * n + c);
                }
                perm.swap(pivot, col);
                sign = -sign;
            }
            let d = lu[col * n + col];
            for r in col + 1..n {
                let f = lu[r * n + col] / d;
                lu[r * n + col] = f;
                for c in col + 1..n {
                    let v = lu[col * n + c];
                    lu[r * n + c] -= f * v;
                }
            }
        }
        Ok(Lu { n, lu, perm, sign, singular })
    }

    fn det(&self) -> T {
        if self.singular {
            return T::zero();
        }
        (0..self.n).fold(self.sign, |acc, i| acc * self.lu[i * self.n + i])
    }

    fn solve_into(&self, rhs: &[T], out: &mut [T]) {
        let n = self.n;
        for i in 0..n {
            let mut s = rhs[self.perm[i]];
            for j in 0..i {
                s -= self.lu[i * n + j] * out[j];
            }
            out[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = out[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * out[j];
            }
            out[i] = s / self.lu[i * n + i];
        }
    }
}

pub fn det<T: Real>(a: &DenseTensor<T>) -> Result<T> {
    Ok(Lu::new(a)?.det())
}

/// Largest absolute entry, used as the scale in singularity thresholds.
fn scale_of<T: Real>(a: &DenseTensor<T>) -> T {
    a.max_abs()
}

/// `|det| < 1e-12 · scaleⁿ` counts as singular.
pub fn check_nonsingular<T: Real>(a: &DenseTensor<T>, name: &str) -> Result<T> {
    let n = a.expect_square(name)?;
    let d = det(a)?;
    let scale = scale_of(a);
    let threshold = T::lit(1e-12) * scale.powi(n as i32);
    if !(d.abs() >= threshold) || scale == T::zero() {
        return Err(Error::Singular {
            name: name.to_string(),
            detail: format!("|det| = {:e} below threshold {:e}", d.abs(), threshold),
        });
    }
    Ok(d)
}

pub fn inverse<T: Real>(a: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    check_nonsingular(a, "matrix")?;
    let lu = Lu::new(a)?;
    let n = lu.n;
    let mut data = vec![T::zero(); n * n];
    let mut e = vec![T::zero(); n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = T::zero());
        e[j] = T::one();
        lu.solve_into(&e, &mut data[j * n..(j + 1) * n]);
    }
    DenseTensor::new(Shape::matrix(n, n)?, data)
}

/// Relative asymmetry `‖A − Aᵀ‖_F / ‖A‖_F` (0 for the zero matrix).
pub fn asymmetry<T: Real>(a: &DenseTensor<T>) -> Result<T> {
    a.expect_square("symmetry check")?;
    let norm = a.frobenius_norm();
    if norm == T::zero() {
        return Ok(T::zero());
    }
    Ok((a - &transpose(a)).frobenius_norm() / norm)
}

pub fn symmetrize<T: Real>(a: &DenseTensor<T>) -> DenseTensor<T> {
    (a + &transpose(a)).scale(T::lit(0.5))
}

/// Eigenpairs of a symmetric matrix: `A = V·diag(λ)·Vᵀ` with orthonormal `V`.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: DenseTensor<T>,
}

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
pub fn symmetric_eigen<T: Real>(a: &DenseTensor<T>) -> Result<SymmetricEigen<T>> {
    let n = a.expect_square("eigen input")?;
    let mut m: Vec<T> = symmetrize(a).into_data();
    let mut v: Vec<T> = identity::<T>(n).into_data();
    let idx = |i: usize, j: usize| i + j * n;
    let total: T = m.iter().map(|&x| x * x).sum();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for j in 0..n {
            for i in 0..j {
                off += m[idx(i, j)] * m[idx(i, j)];
            }
        }
        if off <= eps * eps * total || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[idx(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[idx(p, p)];
                let aqq = m[idx(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[idx(k, p)];
                    let mkq = m[idx(k, q)];
                    m[idx(k, p)] = c * mkp - s * mkq;
                    m[idx(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[idx(p, k)];
                    let mqk = m[idx(q, k)];
                    m[idx(p, k)] = c * mpk - s * mqk;
                    m[idx(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = c * vkp - s * vkq;
                    v[idx(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| m[idx(i, i)]).collect();
    Ok(SymmetricEigen { values, vectors: DenseTensor::new(Shape::matrix(n, n)?, v)? })
}
