//! Dense tensor container and the structural operations on it.
//!
//! Storage is generalized column-major: element `(i₁,…,i_m)` lives at
//! `Σ_k i_k · ∏_{l<k} d_l`. For a matrix this makes [`DenseTensor::vectorize`]
//! the usual column-stacking `vec`.
//!
//! Every index and mode in this API is 0-based. The CLI and the text
//! formats speak 1-based modes.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::shape::Shape;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    shape: Shape,
    data: Vec<T>,
}

impl<T: Scalar> DenseTensor<T> {
    /// Wrap `data` (in storage order) under `shape`.
    pub fn new(shape: Shape, data: Vec<T>) -> Result<Self> {
        if data.len() != shape.size() {
            return Err(Error::LengthMismatch { expected: shape.size(), actual: data.len() });
        }
        Ok(DenseTensor { shape, data })
    }

    pub fn from_dims(dims: impl Into<Vec<usize>>, data: Vec<T>) -> Result<Self> {
        DenseTensor::new(Shape::new(dims)?, data)
    }

    pub fn zeros(shape: Shape) -> Self {
        let data = vec![T::zero(); shape.size()];
        DenseTensor { shape, data }
    }

    pub fn scalar(v: T) -> Self {
        DenseTensor { shape: Shape::scalar(), data: vec![v] }
    }

    /// Build from a function of the 0-based multi-index.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let data = shape.indices().map(|idx| f(&idx)).collect();
        DenseTensor { shape, data }
    }

    /// Matrix from row slices, the way matrices are usually written down.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.iter().any(|r| r.as_ref().len() != n) {
            return Err(Error::shape("ragged rows"));
        }
        let shape = Shape::matrix(m, n)?;
        Ok(DenseTensor::from_fn(shape, |ix| rows[ix[0]].as_ref()[ix[1]]))
    }

    pub fn vector(data: Vec<T>) -> Result<Self> {
        DenseTensor::new(Shape::new(vec![data.len()])?, data)
    }

    #[inline]
    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.shape.order()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Element at a 0-based multi-index. Panics when out of range.
    #[inline]
    pub fn get(&self, index: &[usize]) -> T {
        match self.shape.offset(index) {
            Some(off) => self.data[off],
            None => panic!("index {index:?} out of range for shape {}", self.shape),
        }
    }

    pub fn try_get(&self, index: &[usize]) -> Result<T> {
        self.shape
            .offset(index)
            .map(|off| self.data[off])
            .ok_or_else(|| Error::IndexOutOfRange(format!("{index:?} for shape {}", self.shape)))
    }

    pub fn set(&mut self, index: &[usize], v: T) {
        let off = self
            .shape
            .offset(index)
            .unwrap_or_else(|| panic!("index {index:?} out of range for shape {}", self.shape));
        self.data[off] = v;
    }

    /// Entry `(i, j)` of a matrix.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        debug_assert_eq!(self.order(), 2);
        self.data[i + j * self.shape.dim(0)]
    }

    pub fn rows(&self) -> usize {
        self.shape.dim(0)
    }

    pub fn cols(&self) -> usize {
        self.shape.dim(1)
    }

    pub fn is_matrix(&self) -> bool {
        self.order() == 2
    }

    pub fn is_square(&self) -> bool {
        self.order() == 2 && self.rows() == self.cols()
    }

    pub(crate) fn expect_matrix(&self, what: &str) -> Result<(usize, usize)> {
        if self.order() != 2 {
            return Err(Error::shape(format!("{what} must be a matrix, got shape {}", self.shape)));
        }
        Ok((self.rows(), self.cols()))
    }

    pub(crate) fn expect_square(&self, what: &str) -> Result<usize> {
        let (m, n) = self.expect_matrix(what)?;
        if m != n {
            return Err(Error::shape(format!("{what} must be square, got {m}x{n}")));
        }
        Ok(n)
    }

    /// Same data under a different shape of equal size.
    pub fn reshape(self, shape: Shape) -> Result<Self> {
        DenseTensor::new(shape, self.data)
    }

    /// Order-1 tensor holding the entries in storage order (`vec`).
    pub fn vectorize(&self) -> Self {
        DenseTensor {
            shape: Shape::new(vec![self.len()]).expect("nonzero size"),
            data: self.data.clone(),
        }
    }

    /// Reorder axes: axis `r` of the result is axis `perm[r]` of `self`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<Self> {
        let m = self.order();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of {m} axes")));
        }
        let src_strides = self.shape.strides();
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims()[p]).collect();
        let strides: Vec<usize> = perm.iter().map(|&p| src_strides[p]).collect();
        let shape = Shape::new(dims)?;
        let mut data = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; m];
        let mut off = 0usize;
        for _ in 0..self.len() {
            data.push(self.data[off]);
            for r in 0..m {
                idx[r] += 1;
                off += strides[r];
                if idx[r] < shape.dim(r) {
                    break;
                }
                off -= strides[r] * idx[r];
                idx[r] = 0;
            }
        }
        Ok(DenseTensor { shape, data })
    }

    fn unfold_perm(order: usize, mode: usize) -> Vec<usize> {
        std::iter::once(mode).chain((0..order).filter(|&l| l != mode)).collect()
    }

    /// Mode-`mode` unfolding: a `d_k × ∏_{l≠k} d_l` matrix whose columns are
    /// the mode-k fibers, enumerated column-major over the remaining modes
    /// in ascending order.
    pub fn unfold(&self, mode: usize) -> Result<Self> {
        self.shape.check_mode(mode)?;
        let permuted = self.permute_axes(&Self::unfold_perm(self.order(), mode))?;
        let rows = self.shape.dim(mode);
        let cols = self.len() / rows;
        permuted.reshape(Shape::matrix(rows, cols)?)
    }

    /// Inverse of [`DenseTensor::unfold`].
    pub fn fold(matrix: &Self, mode: usize, target: &Shape) -> Result<Self> {
        target.check_mode(mode)?;
        let rows = target.dim(mode);
        let cols = target.size() / rows;
        if matrix.dims() != [rows, cols] {
            return Err(Error::shape(format!(
                "cannot fold {} into {target} along mode {}: expected {rows}x{cols}",
                matrix.shape,
                mode + 1
            )));
        }
        let perm = Self::unfold_perm(target.order(), mode);
        let permuted_dims: Vec<usize> = perm.iter().map(|&p| target.dim(p)).collect();
        let permuted = DenseTensor::new(Shape::new(permuted_dims)?, matrix.data.clone())?;
        let mut inverse = vec![0; perm.len()];
        for (r, &p) in perm.iter().enumerate() {
            inverse[p] = r;
        }
        permuted.permute_axes(&inverse)
    }

    /// Mode-`mode` fiber through the fixed indices of the remaining modes
    /// (given in ascending mode order).
    pub fn fiber(&self, mode: usize, fixed: &[usize]) -> Result<Self> {
        self.shape.check_mode(mode)?;
        if fixed.len() + 1 != self.order() {
            return Err(Error::IndexOutOfRange(format!(
                "fiber of an order-{} tensor needs {} fixed indices, got {}",
                self.order(),
                self.order() - 1,
                fixed.len()
            )));
        }
        let mut full: Vec<usize> = Vec::with_capacity(self.order());
        full.extend_from_slice(&fixed[..mode]);
        full.push(0);
        full.extend_from_slice(&fixed[mode..]);
        let d = self.shape.dim(mode);
        let mut out = Vec::with_capacity(d);
        for i in 0..d {
            full[mode] = i;
            out.push(self.try_get(&full)?);
        }
        DenseTensor::vector(out)
    }

    /// Order-(m−1) slice with index `mode` fixed to `j`.
    pub fn slice(&self, mode: usize, j: usize) -> Result<Self> {
        self.shape.check_mode(mode)?;
        if j >= self.shape.dim(mode) {
            return Err(Error::IndexOutOfRange(format!(
                "slice index {} exceeds dimension {} of mode {}",
                j + 1,
                self.shape.dim(mode),
                mode + 1
            )));
        }
        let dims: Vec<usize> = (0..self.order())
            .filter(|&l| l != mode)
            .map(|l| self.shape.dim(l))
            .collect();
        let shape = Shape::new(dims)?;
        let mut full = vec![0; self.order()];
        let data = shape
            .indices()
            .map(|rest| {
                let mut it = rest.iter();
                for (l, slot) in full.iter_mut().enumerate() {
                    *slot = if l == mode { j } else { *it.next().unwrap() };
                }
                self.get(&full)
            })
            .collect();
        Ok(DenseTensor { shape, data })
    }

    /// Sum of elementwise products of two same-shaped tensors.
    pub fn inner(&self, other: &Self) -> Result<T> {
        if self.shape != other.shape {
            return Err(Error::shape(format!("inner product of {} and {}", self.shape, other.shape)));
        }
        Ok(self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum())
    }

    /// Outer (tensor) product: order p+q with `C[i…, j…] = a[i…]·b[j…]`.
    pub fn outer(&self, other: &Self) -> Self {
        let mut dims = self.dims().to_vec();
        dims.extend_from_slice(other.dims());
        let shape = Shape::new(dims).expect("product of valid shapes");
        let mut data = Vec::with_capacity(self.len() * other.len());
        for &b in &other.data {
            data.extend(self.data.iter().map(|&a| a * b));
        }
        DenseTensor { shape, data }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> DenseTensor<U> {
        DenseTensor { shape: self.shape.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::shape(format!("elementwise op on {} and {}", self.shape, other.shape)));
        }
        Ok(DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == T::zero())
    }
}

impl<T: Real> DenseTensor<T> {
    /// Largest absolute entrywise difference; `None` when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        if self.shape != other.shape {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs())),
        )
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Relative error `max|a−b| / max(max|b|, floor)`.
    pub fn rel_diff(&self, reference: &Self, floor: T) -> Option<T> {
        let d = self.max_abs_diff(reference)?;
        Some(d / reference.max_abs().max(floor))
    }
}

impl<'a, T: Scalar> Add for &'a DenseTensor<T> {
    type Output = DenseTensor<T>;

    fn add(self, rhs: Self) -> DenseTensor<T> {
        self.try_add(rhs).expect("shape mismatch in +")
    }
}

impl<'a, T: Scalar> Sub for &'a DenseTensor<T> {
    type Output = DenseTensor<T>;

    fn sub(self, rhs: Self) -> DenseTensor<T> {
        self.try_sub(rhs).expect("shape mismatch in -")
    }
}

impl<'a, T: Scalar> Mul<T> for &'a DenseTensor<T> {
    type Output = DenseTensor<T>;

    fn mul(self, rhs: T) -> DenseTensor<T> {
        self.scale(rhs)
    }
}

impl<'a, T: Scalar + Neg<Output = T>> Neg for &'a DenseTensor<T> {
    type Output = DenseTensor<T>;

    fn neg(self) -> DenseTensor<T> {
        self.map(|v| -v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(dims: &[usize]) -> DenseTensor<f64> {
        let n: usize = dims.iter().product();
        DenseTensor::from_dims(dims.to_vec(), (1..=n).map(|v| v as f64).collect()).unwrap()
    }

    #[test]
    fn make_identity_matrix() {
        let i2 = DenseTensor::from_dims(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(i2.at(0, 0), 1.0);
        assert_eq!(i2.at(0, 1), 0.0);
        assert_eq!(i2.at(1, 1), 1.0);
    }

    #[test]
    fn make_rejects_wrong_length() {
        let err = DenseTensor::from_dims(vec![2, 3], vec![0.0; 5]).unwrap_err();
        assert!(err.to_string().contains("length mismatch"), "{err}");
        assert!(err.to_string().contains('6') && err.to_string().contains('5'));
    }

    #[test]
    fn make_scalar() {
        let s = DenseTensor::new(Shape::scalar(), vec![3.5]).unwrap();
        assert_eq!(s.order(), 0);
        assert_eq!(s.get(&[]), 3.5);
    }

    #[test]
    fn offset_formula_examples() {
        let t = seq(&[2, 2, 2]);
        // 1-based (2,1,1) -> 2 and (1,1,2) -> 5
        assert_eq!(t.get(&[1, 0, 0]), 2.0);
        assert_eq!(t.get(&[0, 0, 1]), 5.0);
    }

    #[test]
    fn vectorize_stacks_columns() {
        let a = DenseTensor::from_rows(&[[1.0, 3.0], [2.0, 4.0]]).unwrap();
        assert_eq!(a.vectorize().data(), &[1.0, 2.0, 3.0, 4.0]);
        let v = DenseTensor::vector(vec![1.0, 2.0]).unwrap();
        assert_eq!(v.vectorize(), v);
        assert_eq!(seq(&[2, 2, 2]).vectorize().data(), seq(&[8]).data());
    }

    #[test]
    fn unfold_matrix_modes() {
        let a = seq(&[2, 3]);
        assert_eq!(a.unfold(0).unwrap(), a);
        let t = a.unfold(1).unwrap();
        assert_eq!(t.dims(), &[3, 2]);
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(t.at(j, i), a.at(i, j));
            }
        }
    }

    #[test]
    fn unfold_mode3_of_cube() {
        let u = seq(&[2, 2, 2]).unfold(2).unwrap();
        assert_eq!(u.dims(), &[2, 4]);
        let row = |i: usize| (0..4).map(|j| u.at(i, j)).collect::<Vec<_>>();
        assert_eq!(row(0), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(row(1), vec![5.0, 6.0, 7.0, 8.0]);
    }

    #[test]
    fn unfold_rejects_bad_mode() {
        assert!(matches!(seq(&[2, 2]).unfold(2), Err(Error::ModeOutOfRange { .. })));
    }

    #[test]
    fn fold_round_trips() {
        let t = seq(&[3, 4, 2]);
        for k in 0..3 {
            let back = DenseTensor::fold(&t.unfold(k).unwrap(), k, t.shape()).unwrap();
            assert_eq!(back, t);
        }
        let m = seq(&[2, 4]);
        let target = Shape::new(vec![2, 2, 2]).unwrap();
        let folded = DenseTensor::fold(&m, 0, &target).unwrap();
        assert_eq!(folded.unfold(0).unwrap(), m);
    }

    #[test]
    fn fold_rejects_wrong_columns() {
        let target = Shape::new(vec![2, 2, 2]).unwrap();
        assert!(DenseTensor::fold(&seq(&[2, 3]), 0, &target).is_err());
    }

    #[test]
    fn fibers() {
        let t = seq(&[2, 2, 2]);
        assert_eq!(t.fiber(0, &[0, 0]).unwrap().data(), &[1.0, 2.0]);
        assert_eq!(t.fiber(1, &[0, 0]).unwrap().data(), &[1.0, 3.0]);
        let a = seq(&[2, 3]);
        assert_eq!(a.fiber(0, &[2]).unwrap().data(), &[5.0, 6.0]);
        assert!(t.fiber(0, &[0, 2]).is_err());
    }

    #[test]
    fn slices() {
        let i2 = DenseTensor::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(i2.slice(0, 0).unwrap().data(), &[1.0, 0.0]);
        let s = seq(&[2, 2, 2]).slice(2, 1).unwrap();
        assert_eq!(s, DenseTensor::from_rows(&[[5.0, 7.0], [6.0, 8.0]]).unwrap());
        assert!(seq(&[2, 2, 2]).slice(2, 2).is_err());
    }

    #[test]
    fn slice_of_slice_is_fiber() {
        let t = seq(&[2, 3, 4]);
        // fix mode 3 to 2, then mode 2 to 1 -> mode-1 fiber at (1, 2)
        let twice = t.slice(2, 2).unwrap().slice(1, 1).unwrap();
        assert_eq!(twice, t.fiber(0, &[1, 2]).unwrap());
    }

    #[test]
    fn inner_products() {
        let i2 = DenseTensor::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(i2.inner(&i2).unwrap(), 2.0);
        assert_eq!(i2.inner(&DenseTensor::zeros(i2.shape().clone())).unwrap(), 0.0);
        let t = seq(&[2, 2, 2]);
        assert_eq!(t.inner(&t).unwrap(), 204.0);
        assert!(t.inner(&i2).is_err());
    }

    #[test]
    fn outer_products() {
        let t = seq(&[2, 3]);
        assert_eq!(DenseTensor::scalar(2.0).outer(&t), t.scale(2.0));
        let e1 = DenseTensor::vector(vec![1.0, 0.0]).unwrap();
        let e2 = DenseTensor::vector(vec![0.0, 1.0]).unwrap();
        let p = e1.outer(&e2);
        assert_eq!(p, DenseTensor::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap());
        let a = DenseTensor::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let b = DenseTensor::from_rows(&[[5.0, 6.0], [7.0, 8.0]]).unwrap();
        let c = a.outer(&b);
        assert_eq!(c.get(&[0, 1, 1, 0]), 2.0 * 7.0);
        assert_eq!(c.get(&[1, 1, 0, 1]), 4.0 * 6.0);
        assert_eq!(c.get(&[1, 0, 1, 1]), 3.0 * 8.0);
    }

    #[test]
    fn permute_axes_matches_definition() {
        let t = seq(&[2, 3, 4]);
        let p = t.permute_axes(&[2, 0, 1]).unwrap();
        assert_eq!(p.dims(), &[4, 2, 3]);
        for idx in t.shape().indices() {
            assert_eq!(p.get(&[idx[2], idx[0], idx[1]]), t.get(&idx));
        }
        assert!(t.permute_axes(&[0, 0, 1]).is_err());
    }
}
