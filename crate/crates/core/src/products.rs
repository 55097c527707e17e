//! Multilinear products: pairwise products `×_(s,t)`, pair contractions,
//! the commutation and identity tensors, outer powers, mode-k products and
//! the Tucker transform.
//!
//! Conventions, all on the 0-based storage indices:
//!
//! * `A ×_(s,t) B` is order 4 with `B` on positions `s,t` and `A` on the
//!   ascending complement `p,q`. `×_c` is `×_(2,4)`, plain `×` is `×_(3,4)`.
//! * Contractions sum the trailing index pair of the left factor against the
//!   leading index pair of the right factor.
//! * `mode_product(t, U, k)` left-multiplies the mode-k unfolding:
//!   `unfold(t ×_k U, k) = U · unfold(t, k)`.

use crate::error::{Error, Result};
use crate::linalg::{self, identity};
use crate::scalar::Scalar;
use crate::shape::Shape;
use crate::tensor::DenseTensor;

/// Position pair `{s, t} ⊂ {1,2,3,4}`, `s < t`, written 1-based as in the
/// `×_(s,t)` notation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairSpec {
    s: u8,
    t: u8,
}

impl PairSpec {
    /// `×_(3,4)`: the plain outer product of two matrices.
    pub const OUTER: PairSpec = PairSpec { s: 3, t: 4 };
    /// `×_c = ×_(2,4)`.
    pub const CROSS: PairSpec = PairSpec { s: 2, t: 4 };
    /// `×_(2,3)`, the arrangement of the commutation tensor.
    pub const SWAP: PairSpec = PairSpec { s: 2, t: 3 };

    pub fn new(s: u8, t: u8) -> Result<Self> {
        if !(1..=4).contains(&s) || !(1..=4).contains(&t) || s >= t {
            return Err(Error::InvalidArgument(format!("({s},{t}) is not a pair s<t in 1..=4")));
        }
        Ok(PairSpec { s, t })
    }

    pub fn all() -> impl Iterator<Item = PairSpec> {
        (1..=4u8).flat_map(|s| (s + 1..=4).map(move |t| PairSpec { s, t }))
    }

    pub fn s(self) -> u8 {
        self.s
    }

    pub fn t(self) -> u8 {
        self.t
    }

    /// Ascending complement `(p, q)`.
    pub fn complement(self) -> (u8, u8) {
        let mut rest = (1..=4u8).filter(|&x| x != self.s && x != self.t);
        (rest.next().unwrap(), rest.next().unwrap())
    }

    /// 0-based axis positions `[p, q, s, t]`.
    fn axes(self) -> [usize; 4] {
        let (p, q) = self.complement();
        [p as usize - 1, q as usize - 1, self.s as usize - 1, self.t as usize - 1]
    }
}

/// `(A ×_(s,t) B)[i₁i₂i₃i₄] = A[i_p, i_q] · B[i_s, i_t]`.
pub fn pair_product<T: Scalar>(
    a: &DenseTensor<T>,
    b: &DenseTensor<T>,
    spec: PairSpec,
) -> Result<DenseTensor<T>> {
    a.expect_matrix("left factor of pair product")?;
    b.expect_matrix("right factor of pair product")?;
    // a ⊗ b has axes (p, q, s, t) in that order; move them to their slots.
    let outer = a.outer(b);
    let axes = spec.axes();
    let mut perm = [0usize; 4];
    for (src, &dst) in axes.iter().enumerate() {
        perm[dst] = src;
    }
    outer.permute_axes(&perm)
}

pub fn cross<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    pair_product(a, b, PairSpec::CROSS)
}

/// Contract the last `pairs` axes of `a` against the first `pairs` axes of `b`.
pub fn contract<T: Scalar>(
    a: &DenseTensor<T>,
    b: &DenseTensor<T>,
    pairs: usize,
) -> Result<DenseTensor<T>> {
    if pairs > a.order() || pairs > b.order() {
        return Err(Error::shape(format!(
            "cannot contract {pairs} axes of {} with {}",
            a.shape(),
            b.shape()
        )));
    }
    let lead = a.order() - pairs;
    let (a_keep, a_sum) = a.dims().split_at(lead);
    let (b_sum, b_keep) = b.dims().split_at(pairs);
    if a_sum != b_sum {
        return Err(Error::shape(format!(
            "contracted dimensions differ: {a_sum:?} vs {b_sum:?}"
        )));
    }
    let m: usize = a_keep.iter().product();
    let k: usize = a_sum.iter().product();
    let n: usize = b_keep.iter().product();
    // column-major storage makes this a plain (m×k)·(k×n) product
    let am = DenseTensor::new(Shape::matrix(m, k)?, a.data().to_vec())?;
    let bm = DenseTensor::new(Shape::matrix(k, n)?, b.data().to_vec())?;
    let prod = linalg::try_matmul(&am, &bm)?;
    let dims: Vec<usize> = a_keep.iter().chain(b_keep).copied().collect();
    prod.reshape(Shape::new(dims)?)
}

fn expect_order<T: Scalar>(t: &DenseTensor<T>, order: usize, what: &str) -> Result<()> {
    if t.order() != order {
        return Err(Error::shape(format!("{what} must have order {order}, got {}", t.shape())));
    }
    Ok(())
}

/// `(AB)[i₁i₂j₁j₂] = Σ A[i₁i₂k₁k₂] B[k₁k₂j₁j₂]`.
pub fn contract44<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    expect_order(a, 4, "left factor")?;
    expect_order(b, 4, "right factor")?;
    contract(a, b, 2)
}

/// `(AP)[i j] = Σ A[i j i′ j′] P[i′ j′]`.
pub fn contract42<T: Scalar>(a: &DenseTensor<T>, p: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    expect_order(a, 4, "tensor factor")?;
    expect_order(p, 2, "matrix factor")?;
    contract(a, p, 2)
}

/// `(PA)[i j] = Σ P[i′ j′] A[i′ j′ i j]`.
pub fn contract24<T: Scalar>(p: &DenseTensor<T>, a: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    expect_order(p, 2, "matrix factor")?;
    expect_order(a, 4, "tensor factor")?;
    contract(p, a, 2)
}

/// Contract positions `(s,t)` of an order-4 tensor against a matrix,
/// leaving a matrix indexed by `(p,q)`: `(A ×_(s,t) B) ×_(s,t) C = ⟨B,C⟩·A`.
pub fn contract_at<T: Scalar>(
    a: &DenseTensor<T>,
    c: &DenseTensor<T>,
    spec: PairSpec,
) -> Result<DenseTensor<T>> {
    expect_order(a, 4, "tensor factor")?;
    let moved = a.permute_axes(&spec.axes())?;
    contract42(&moved, c)
}

/// `(A ×₄ B)[i₁i₂i₃i₄] = Σ_k A[i₁i₂i₃k] B[k i₄]`.
pub fn mode4_product<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    expect_order(a, 4, "tensor factor")?;
    contract(a, b, 1)
}

/// `(A ×₃ B)[i₁i₂i₃i₄] = Σ_k A[i₁i₂k i₄] B[k i₃]`.
pub fn mode3_product<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    expect_order(a, 4, "tensor factor")?;
    // move axis 3 last, contract, then restore (i₁,i₂,i₃,i₄)
    let moved = a.permute_axes(&[0, 1, 3, 2])?;
    contract(&moved, b, 1)?.permute_axes(&[0, 1, 3, 2])
}

/// `K_{m,n} = I_m ×_(2,3) I_n`, shape `m×n×n×m`; `K_{m,n} Aᵀ = A`.
pub fn commutation_tensor<T: Scalar>(m: usize, n: usize) -> Result<DenseTensor<T>> {
    check_dims(m, n)?;
    pair_product(&identity(m), &identity(n), PairSpec::SWAP)
}

/// `I_m ×_c I_n`, shape `m×n×m×n`; the identity for `contract42`/`contract24`.
pub fn identity_tensor<T: Scalar>(m: usize, n: usize) -> Result<DenseTensor<T>> {
    check_dims(m, n)?;
    pair_product(&identity(m), &identity(n), PairSpec::CROSS)
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidShape(format!("dimensions must be positive, got {m},{n}")));
    }
    Ok(())
}

/// `A^[k]`: k-fold outer power, shape `(m×n)^[k]`, entry `∏_r A[i_{2r-1}, i_{2r}]`.
pub fn bracket_power<T: Scalar>(a: &DenseTensor<T>, k: usize) -> Result<DenseTensor<T>> {
    a.expect_matrix("bracket power base")?;
    if k == 0 {
        return Err(Error::InvalidArgument("power must be at least 1".into()));
    }
    Ok(outer_power(a, k))
}

/// `A^(k)`: shape `m^[k]×n^[k]`, entry `A^(k)[i₁…i_k j₁…j_k] = ∏_r A[i_r, j_r]`.
pub fn paren_power<T: Scalar>(a: &DenseTensor<T>, k: usize) -> Result<DenseTensor<T>> {
    let b = bracket_power(a, k)?;
    b.permute_axes(&interleaved_to_grouped(2, k))
}

/// k-fold outer power of any tensor.
pub fn outer_power<T: Scalar>(t: &DenseTensor<T>, k: usize) -> DenseTensor<T> {
    let mut acc = t.clone();
    for _ in 1..k {
        acc = acc.outer(t);
    }
    acc
}

/// Permutation taking a k-factor outer power of an order-`m` variable from
/// factor-major layout `(a¹…, a²…, …)` to mode-major layout
/// `(a¹₁ … a^k₁, a¹₂ … a^k₂, …)`.
pub fn interleaved_to_grouped(m: usize, k: usize) -> Vec<usize> {
    (0..m).flat_map(|mode| (0..k).map(move |f| f * m + mode)).collect()
}

/// Inverse of [`interleaved_to_grouped`].
pub fn grouped_to_interleaved(m: usize, k: usize) -> Vec<usize> {
    let fwd = interleaved_to_grouped(m, k);
    let mut inv = vec![0; fwd.len()];
    for (r, &src) in fwd.iter().enumerate() {
        inv[src] = r;
    }
    inv
}

pub fn kron<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<DenseTensor<T>> {
    linalg::kron(a, b)
}

/// Tensor product of matrices in split layout: order 2m, entry
/// `(i₁…i_m ; j₁…j_m) ↦ ∏_k U_k[i_k, j_k]`.
pub fn separable_tensor<T: Scalar>(mats: &[DenseTensor<T>]) -> Result<DenseTensor<T>> {
    if mats.is_empty() {
        return Err(Error::InvalidArgument("need at least one factor".into()));
    }
    for u in mats {
        u.expect_matrix("factor")?;
    }
    let m = mats.len();
    let mut acc = mats[0].clone();
    for u in &mats[1..] {
        acc = acc.outer(u);
    }
    // acc axes are (i₁ j₁ i₂ j₂ …); gather rows first, then columns
    let perm: Vec<usize> = (0..m).map(|k| 2 * k).chain((0..m).map(|k| 2 * k + 1)).collect();
    acc.permute_axes(&perm)
}

/// `t ×_k U`: `unfold(result, k) = U · unfold(t, k)`.
pub fn mode_product<T: Scalar>(
    t: &DenseTensor<T>,
    u: &DenseTensor<T>,
    mode: usize,
) -> Result<DenseTensor<T>> {
    t.shape().check_mode(mode)?;
    let (rows, cols) = u.expect_matrix("mode-product factor")?;
    if cols != t.dims()[mode] {
        return Err(Error::shape(format!(
            "mode-{} product needs {} columns, factor is {rows}x{cols}",
            mode + 1,
            t.dims()[mode]
        )));
    }
    let unfolded = linalg::try_matmul(u, &t.unfold(mode)?)?;
    let mut dims = t.dims().to_vec();
    dims[mode] = rows;
    DenseTensor::fold(&unfolded, mode, &Shape::new(dims)?)
}

/// `t ×₁ U₁ ×₂ U₂ … ×_m U_m`.
pub fn tucker_apply<T: Scalar>(t: &DenseTensor<T>, mats: &[DenseTensor<T>]) -> Result<DenseTensor<T>> {
    if mats.len() != t.order() {
        return Err(Error::shape(format!(
            "Tucker transform of an order-{} tensor needs {} factors, got {}",
            t.order(),
            t.order(),
            mats.len()
        )));
    }
    mats.iter()
        .enumerate()
        .try_fold(t.clone(), |acc, (k, u)| mode_product(&acc, u, k))
}
