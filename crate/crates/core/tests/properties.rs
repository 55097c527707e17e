//! Property tests. Entries are small integers stored as f64, so every sum of
//! products below is exact and identities are compared with `==`.

use num_rational::Ratio;
use proptest::prelude::*;
use tensor_gauss::calculus::{chain, d_axb, d_identity, d_transpose};
use tensor_gauss::covariance::Covariance;
use tensor_gauss::io;
use tensor_gauss::linalg::{identity, kron, matmul, transpose};
use tensor_gauss::matrix_normal::{reorder, MomentLayout};
use tensor_gauss::products::{
    commutation_tensor, contract, contract42, contract44, contract_at, cross, mode_product, pair_product,
    separable_tensor, tucker_apply, PairSpec,
};
use tensor_gauss::{DenseTensor, Shape};

type Q = Ratio<i64>;

fn ints(dims: Vec<usize>) -> impl Strategy<Value = DenseTensor<f64>> {
    let size: usize = dims.iter().product();
    prop::collection::vec(-5i32..=5, size)
        .prop_map(move |v| DenseTensor::from_dims(dims.clone(), v.into_iter().map(f64::from).collect()).unwrap())
}

fn rationals(r: usize, c: usize) -> impl Strategy<Value = DenseTensor<Q>> {
    prop::collection::vec((-6i64..=6, 1i64..=4), r * c).prop_map(move |v| {
        DenseTensor::from_dims(vec![r, c], v.into_iter().map(|(n, d)| Q::new(n, d)).collect()).unwrap()
    })
}

fn dims(max_order: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=max_order)
}

fn tensor(max_order: usize) -> impl Strategy<Value = DenseTensor<f64>> {
    dims(max_order).prop_flat_map(ints)
}

fn matrix(max: usize) -> impl Strategy<Value = DenseTensor<f64>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| ints(vec![r, c]))
}

proptest! {
    #[test]
    fn fold_inverts_unfold(t in tensor(4)) {
        for k in 0..t.order() {
            let u = t.unfold(k).unwrap();
            prop_assert_eq!(u.dims(), &[t.dims()[k], t.len() / t.dims()[k]][..]);
            prop_assert_eq!(DenseTensor::fold(&u, k, t.shape()).unwrap(), t.clone());
        }
    }

    #[test]
    fn permutation_round_trip(t in tensor(4), seed in any::<u64>()) {
        let n = t.order();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let back = t.permute_axes(&perm).unwrap().permute_axes(&inv).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn unfolding_of_mode_product(t in tensor(3), rows in 1usize..=3, seed in any::<u64>()) {
        let k = (seed % t.order() as u64) as usize;
        let u = DenseTensor::from_fn(Shape::matrix(rows, t.dims()[k]).unwrap(), |ix| ((ix[0] * 7 + ix[1] * 3 + seed as usize) % 5) as f64 - 2.0);
        let y = mode_product(&t, &u, k).unwrap();
        prop_assert_eq!(y.unfold(k).unwrap(), matmul(&u, &t.unfold(k).unwrap()));
    }

    #[test]
    fn tucker_is_order_independent(t in (1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(a, b, c)| ints(vec![a, b, c]))) {
        let mats: Vec<_> = t.dims().iter().enumerate()
            .map(|(k, &d)| DenseTensor::from_fn(Shape::matrix(2, d).unwrap(), |ix| (ix[0] + 2 * ix[1] + k) as f64 - 1.0))
            .collect();
        let all = tucker_apply(&t, &mats).unwrap();
        let mut rev = t.clone();
        for k in (0..3).rev() {
            rev = mode_product(&rev, &mats[k], k).unwrap();
        }
        prop_assert_eq!(all, rev);
    }

    #[test]
    fn same_pair_contraction(a in matrix(3), b in matrix(3), spec_ix in 0usize..6, c_seed in any::<u64>()) {
        let spec = PairSpec::all().nth(spec_ix).unwrap();
        let c = DenseTensor::from_fn(b.shape().clone(), |ix| ((ix[0] * 5 + ix[1] + c_seed as usize) % 7) as f64 - 3.0);
        let got = contract_at(&pair_product(&a, &b, spec).unwrap(), &c, spec).unwrap();
        prop_assert_eq!(got, a.scale(b.inner(&c).unwrap()));
    }

    #[test]
    fn cross_mixed_product_exact((a1, b1) in (1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(m, n, p)| (rationals(m, n), rationals(n, p))),
                                 (a2, b2) in (1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(m, n, p)| (rationals(m, n), rationals(n, p)))) {
        let lhs = contract44(&cross(&a1, &a2).unwrap(), &cross(&b1, &b2).unwrap()).unwrap();
        prop_assert_eq!(lhs, cross(&matmul(&a1, &b1), &matmul(&a2, &b2)).unwrap());
    }

    #[test]
    fn commutation_maps_transpose_exact(a in (1usize..=4, 1usize..=4).prop_flat_map(|(m, n)| rationals(m, n))) {
        let (m, n) = (a.rows(), a.cols());
        prop_assert_eq!(contract42(&commutation_tensor::<Q>(m, n).unwrap(), &transpose(&a)).unwrap(), a);
    }

    #[test]
    fn contraction_is_associative(a in (1usize..=2, 1usize..=2).prop_flat_map(|(m, n)| ints(vec![m, n, 2, 2])),
                                  b in ints(vec![2, 2, 2, 1]), c in ints(vec![2, 1, 1, 2])) {
        let left = contract44(&contract44(&a, &b).unwrap(), &c).unwrap();
        let right = contract44(&a, &contract44(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn contraction_adjoint(d in dims(2), seed in any::<u64>()) {
        let shape = Shape::new(d.clone()).unwrap();
        let ushape = Shape::new([d.clone(), d.clone()].concat()).unwrap();
        let f = |s: &Shape, salt: usize| DenseTensor::from_fn(s.clone(), |ix| {
            (ix.iter().enumerate().map(|(i, v)| (i + 3) * v).sum::<usize>() + salt + seed as usize % 11) as f64 % 5.0 - 2.0
        });
        let (a, b, u) = (f(&shape, 1), f(&shape, 2), f(&ushape, 3));
        let m = d.len();
        let lhs = a.inner(&contract(&b, &u, m).unwrap()).unwrap();
        let rhs = contract(&u, &a, m).unwrap().inner(&b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn vec_kron(a in ints(vec![2, 3]), x in ints(vec![3, 2]), b in ints(vec![2, 3])) {
        let lhs = matmul(&matmul(&a, &x), &b).vectorize();
        let rhs = matmul(&kron(&transpose(&b), &a).unwrap(), &x.vectorize().reshape(Shape::matrix(6, 1).unwrap()).unwrap()).vectorize();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn separable_tensor_is_kron_of_vectorization(a in matrix(3), b in matrix(3)) {
        // (i1,i2; j1,j2) of A×B reshaped to a matrix is B ⊗ A
        let s = separable_tensor(&[a.clone(), b.clone()]).unwrap();
        let (r, c) = (a.rows() * b.rows(), a.cols() * b.cols());
        prop_assert_eq!(s.reshape(Shape::matrix(r, c).unwrap()).unwrap(), kron(&b, &a).unwrap());
    }

    #[test]
    fn linear_derivatives_compose(a in ints(vec![2, 3]), b in ints(vec![2, 2]), c in ints(vec![1, 2]), d in ints(vec![2, 3])) {
        // Y = A X B with X 3x2, Z = C Y D
        let dy = d_axb(&a, &b, 3, 2).unwrap();
        let dz = d_axb(&c, &d, 2, 2).unwrap();
        let direct = d_axb(&matmul(&c, &a), &matmul(&b, &d), 3, 2).unwrap();
        prop_assert_eq!(chain(&dy, &dz).unwrap().into_value(), direct.into_value());
    }

    #[test]
    fn transpose_derivative_is_an_involution(m in 1usize..=4, n in 1usize..=4) {
        let twice = chain(&d_transpose::<f64>(m, n).unwrap(), &d_transpose(n, m).unwrap()).unwrap();
        prop_assert_eq!(twice.into_value(), d_identity::<f64>(m, n).unwrap().into_value());
    }

    #[test]
    fn moment_layouts_round_trip(t in (1usize..=2, 1usize..=3).prop_flat_map(|(a, b)| ints(vec![a, b, a, b, a, b]))) {
        let g = reorder(&t, 2, MomentLayout::Interleaved, MomentLayout::Grouped).unwrap();
        prop_assert_eq!(reorder(&g, 2, MomentLayout::Grouped, MomentLayout::Interleaved).unwrap(), t);
    }

    #[test]
    fn binary_and_text_round_trip_losslessly(d in dims(3), raw in prop::collection::vec(any::<f64>(), 27)) {
        let shape = Shape::new(d).unwrap();
        let data: Vec<f64> = raw.into_iter().filter(|v| v.is_finite()).chain(std::iter::repeat(0.1)).take(shape.size()).collect();
        let t = DenseTensor::new(shape, data).unwrap();
        let mut bin = Vec::new();
        io::write_ten(&mut bin, &t).unwrap();
        let from_bin = io::decode_tensor(&bin).unwrap();
        let from_text = io::decode_tensor(io::to_text(&from_bin).as_bytes()).unwrap();
        prop_assert_eq!(from_bin.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), t.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(from_text, t);
    }

    #[test]
    fn covariance_factor_squares_to_sigma(g in (1usize..=4).prop_flat_map(|n| ints(vec![n, n]))) {
        let n = g.rows();
        let s = &matmul(&g, &transpose(&g)) + &identity(n);
        let c = Covariance::new(&s, "S").unwrap();
        let a = c.factor();
        prop_assert!(matmul(a, a).rel_diff(&s, 1.0).unwrap() < 1e-10);
        prop_assert!(a.max_abs_diff(&transpose(a)).unwrap() == 0.0);
        prop_assert!(matmul(&c.inverse().unwrap(), &s).max_abs_diff(&identity(n)).unwrap() < 1e-8);
    }
}
