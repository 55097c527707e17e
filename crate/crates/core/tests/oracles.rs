use num_complex::Complex;
use tensor_gauss::linalg::{identity, transpose};
use tensor_gauss::matrix_normal::{self as mn, MatrixNormalParams};
use tensor_gauss::products::{identity_tensor, tucker_apply};
use tensor_gauss::rng::GaussianSampleStream;
use tensor_gauss::verify::check::{compare, compare_scaled, Outcome};
use tensor_gauss::verify::claims::{random_matrix_params, random_spd};
use tensor_gauss::verify::mc::{empirical_cf, mc_mean, mc_moment};
use tensor_gauss::{DenseTensor, Shape, Tensor};

/// `Â[i₁i₂i₃] = Σ A[j₁j₂j₃]·u¹[j₁i₁]·u²[j₂i₂]·u³[j₃i₃]`, written as loops.
fn tucker_by_sum(a: &Tensor, us: &[Tensor]) -> Tensor {
    let out = Shape::new(us.iter().map(|u| u.cols()).collect::<Vec<_>>()).unwrap();
    DenseTensor::from_fn(out, |i| {
        let mut s = 0.0;
        for j in a.shape().indices() {
            s += a.get(&j) * us[0].at(j[0], i[0]) * us[1].at(j[1], i[1]) * us[2].at(j[2], i[2]);
        }
        s
    })
}

#[test]
fn tucker_transform_matches_explicit_sum() {
    let mut rng = GaussianSampleStream::new(1);
    let a: Tensor = rng.normal_tensor(&Shape::new(vec![2, 2, 2]).unwrap());
    let us: Vec<Tensor> = [3, 2, 1].iter().map(|&c| rng.normal_tensor(&Shape::matrix(2, c).unwrap())).collect();
    let uts: Vec<Tensor> = us.iter().map(transpose).collect();
    let got = tucker_apply(&a, &uts).unwrap();
    assert!(got.max_abs_diff(&tucker_by_sum(&a, &us)).unwrap() < 1e-12);
}

#[test]
fn first_moment_of_snd_is_zero() {
    let est = mc_moment(|r| mn::snd_matrix::<f64>(r, 2, 2).unwrap(), 1, 1_000_000, 3).unwrap();
    assert!(est.value.max_abs() < 5e-3);
    let rec = compare_scaled("m1", "", &Tensor::zeros(Shape::matrix(2, 2).unwrap()), &est, 5.0, Some(1.0)).unwrap();
    assert_eq!(rec.outcome, Outcome::Pass);
}

#[test]
fn second_moment_of_snd_is_identity_tensor() {
    let est = mc_moment(|r| mn::snd_matrix::<f64>(r, 2, 3).unwrap(), 2, 200_000, 4).unwrap();
    let rec = compare("m2", "", &identity_tensor(2, 3).unwrap(), &est, 5.0).unwrap();
    assert_eq!(rec.outcome, Outcome::Pass, "{rec}");
}

#[test]
fn scalar_cf_at_one() {
    let mut rng = GaussianSampleStream::new(5);
    let samples: Vec<Tensor> = (0..100_000).map(|_| mn::snd_matrix::<f64>(&mut rng, 1, 1).unwrap()).collect();
    let t = DenseTensor::from_dims(vec![1, 1], vec![1.0]).unwrap();
    let e = empirical_cf(&samples, &t).unwrap();
    let want = (-0.5f64).exp();
    assert!((e.value.re - want).abs() <= 3.0 * e.std_err_re);
    assert!(e.value.im.abs() <= 3.0 * e.std_err_im);
    assert_eq!(empirical_cf(&samples, &Tensor::zeros(Shape::matrix(1, 1).unwrap())).unwrap().value, Complex::new(1.0, 0.0));
}

#[test]
fn vec_covariance_by_monte_carlo() {
    let mut rng = GaussianSampleStream::new(6);
    let p = random_matrix_params(&mut rng, 2, 3, true).unwrap();
    let v = p.vec_covariance();
    let mean = p.mean().clone();
    let est = mc_mean(7, 200_000, |r| {
        let d = (&mn::sample(&p, r) - &mean).vectorize();
        d.outer(&d).reshape(Shape::matrix(6, 6).unwrap()).unwrap()
    })
    .unwrap();
    let rec = compare("cov vec X", "", &v, &est, 5.0).unwrap();
    assert_eq!(rec.outcome, Outcome::Pass, "{rec}");
}

#[test]
fn row_marginal_by_monte_carlo() {
    // row i of X is N(M_i·, σ⁽¹⁾_ii Σ₂)
    let mut rng = GaussianSampleStream::new(8);
    let s1 = random_spd(&mut rng, 3);
    let s2 = random_spd(&mut rng, 2);
    let p = MatrixNormalParams::new(Tensor::zeros(Shape::matrix(3, 2).unwrap()), &s1, &s2).unwrap();
    let est = mc_mean(9, 200_000, |r| {
        let x = mn::sample(&p, r);
        let row = DenseTensor::vector(vec![x.at(1, 0), x.at(1, 1)]).unwrap();
        row.outer(&row)
    })
    .unwrap();
    let rec = compare("row marginal", "", &s2.scale(s1.at(1, 1)), &est, 5.0).unwrap();
    assert_eq!(rec.outcome, Outcome::Pass, "{rec}");
}

#[test]
fn monte_carlo_is_independent_of_thread_count() {
    let p = MatrixNormalParams::<f64>::new(Tensor::zeros(Shape::matrix(2, 2).unwrap()), &identity(2), &identity(2).scale(2.0)).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_moment(|r| mn::sample(&p, r), 2, 10_001, 11).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.value, b.value);
    assert_eq!(a.std_err, b.std_err);
}
