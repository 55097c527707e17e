//! The verification suite: every claim bound to a named anchor and a check.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{identity, transpose};
use crate::matrix_normal::{self as mn, MatrixNormalParams};
use crate::products::{identity_tensor, separable_tensor, tucker_apply};
use crate::rng::GaussianSampleStream;
use crate::shape::Shape;
use crate::tensor::DenseTensor;
use crate::tensor_normal::{self as tn, TensorNormalParams};
use crate::verify::check::{compare, deterministic, CheckRecord, Outcome, Statistic, DEFAULT_K_SIGMA};
use crate::verify::claims::{self, derive_seed, AlgebraIdentity, DerivativeIdentity};
use crate::verify::mc::mc_moment;

/// Tolerance for finite-difference derivative checks (relative).
pub const FD_TOLERANCE: f64 = 1e-5;
/// Tolerance for exact algebraic identities (absolute).
pub const ALGEBRA_TOLERANCE: f64 = 1e-12;
/// Mean `|z|` above which a family of MC checks is flagged as biased.
pub const CALIBRATION_LIMIT: f64 = 2.0;

pub const MATRIX_DIMS: (usize, usize) = (2, 3);
pub const TENSOR_DIMS: [usize; 3] = [2, 3, 2];

/// Claims covered by the suite. Each names what is asserted.
pub const ANCHORS: &[&str] = &[
    "moment tensors: E[x^k] equals the k-th CF derivative at zero",
    "pairwise product algebra",
    "identity and commutation tensor laws",
    "matrix derivatives of X, Xᵀ, products and powers",
    "matrix derivative chain rule",
    "matrix derivatives of AXB, det, trace and inverse",
    "standard normal matrix equivalences",
    "matrix normal density and characteristic function",
    "matrix normal factorization A₁ZA₂ᵀ + M",
    "affine closure of the matrix normal",
    "submatrix marginals of the matrix normal",
    "characteristic function derivatives of the matrix normal",
    "matrix normal moments m₂, m₄ and vanishing odd moments",
    "standard normal tensor equivalences",
    "tensor normal via Tucker transform",
    "unfolding law of the tensor normal",
    "characteristic function of the standard normal tensor",
    "characteristic function of the tensor normal",
    "adjoint identities for tensor contraction",
];

fn anchor(i: usize) -> &'static str {
    ANCHORS[i]
}

/// Suite configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Monte-Carlo sample count per check.
    pub n: usize,
    pub k_sigma: f64,
    /// Random points per derivative identity.
    pub fd_points: usize,
    /// Random instances per algebraic identity.
    pub algebra_trials: usize,
    /// Fault injection: multiply Σ₁ of every closed form compared against
    /// Monte Carlo by this factor. `None` in normal runs.
    pub sigma_scale: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            n: 100_000,
            k_sigma: DEFAULT_K_SIGMA,
            fd_points: 20,
            algebra_trials: 20,
            sigma_scale: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.k_sigma > 0.0 && self.k_sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("k_sigma must be positive, got {}", self.k_sigma)));
        }
        if self.fd_points == 0 || self.algebra_trials == 0 {
            return Err(Error::InvalidArgument("fd_points and algebra_trials must be positive".into()));
        }
        if let Some(s) = self.sigma_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidArgument(format!("sigma scale must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

/// Per-check context handed to each registry entry.
pub struct Ctx<'a> {
    pub config: &'a SuiteConfig,
    /// Seed derived from the master seed and the check index.
    pub seed: u64,
}

impl Ctx<'_> {
    fn fault(&self) -> f64 {
        self.config.sigma_scale.unwrap_or(1.0)
    }

    /// Stream for drawing random parameters, distinct from the MC streams.
    fn param_rng(&self) -> GaussianSampleStream {
        GaussianSampleStream::new(derive_seed(self.seed, 0xA11CE))
    }

    fn mc_seed(&self, label: u64) -> u64 {
        derive_seed(self.seed, label)
    }

    fn matrix_params(&self, with_mean: bool) -> Result<(MatrixNormalParams<f64>, MatrixNormalParams<f64>)> {
        let (n1, n2) = MATRIX_DIMS;
        let truth = claims::random_matrix_params(&mut self.param_rng(), n1, n2, with_mean)?;
        let closed = claims::scale_sigma1(&truth, self.fault())?;
        Ok((truth, closed))
    }

    fn tensor_params(&self, with_mean: bool) -> Result<(TensorNormalParams<f64>, TensorNormalParams<f64>)> {
        let truth = claims::random_tensor_params(&mut self.param_rng(), &TENSOR_DIMS, with_mean)?;
        let closed = claims::scale_tensor_sigma1(&truth, self.fault())?;
        Ok((truth, closed))
    }
}

type CheckFn = fn(&Ctx) -> Result<Vec<CheckRecord>>;

/// One registry entry.
pub struct CheckSpec {
    pub id: &'static str,
    pub anchor: &'static str,
    pub family: &'static str,
    /// Whether the closed form depends on Σ₁, so fault injection must flip it.
    pub sigma_dependent: bool,
    pub run: CheckFn,
}

fn derivative_records(ctx: &Ctx, ids: &[DerivativeIdentity]) -> Result<Vec<CheckRecord>> {
    ids.iter()
        .enumerate()
        .map(|(i, id)| {
            let e = id.max_error(derive_seed(ctx.seed, i as u64), ctx.config.fd_points)?;
            Ok(deterministic(
                id.name(),
                "",
                Statistic::RelErr,
                e,
                FD_TOLERANCE,
                ctx.config.fd_points,
                &format!("central differences, h=1e-5, {} points", ctx.config.fd_points),
            ))
        })
        .collect()
}

fn algebra_records(ctx: &Ctx, ids: &[AlgebraIdentity]) -> Result<Vec<CheckRecord>> {
    ids.iter()
        .enumerate()
        .map(|(i, id)| {
            let e = id.max_error(derive_seed(ctx.seed, i as u64), ctx.config.algebra_trials)?;
            Ok(deterministic(
                id.name(),
                "",
                Statistic::AbsErr,
                e,
                ALGEBRA_TOLERANCE,
                ctx.config.algebra_trials,
                &format!("direct evaluation, {} random instances", ctx.config.algebra_trials),
            ))
        })
        .collect()
}

fn one(r: CheckRecord) -> Result<Vec<CheckRecord>> {
    Ok(vec![r])
}

fn check_moment_definitions(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, _) = ctx.matrix_params(true)?;
    let e = claims::cf_moment_error(&truth)?;
    let mut out = vec![deterministic(
        "∂φ(0) = iM, −∂²φ(0) = E[X×X]",
        "",
        Statistic::AbsErr,
        e,
        ALGEBRA_TOLERANCE,
        1,
        "CF derivatives against closed moments",
    )];
    // scalar case: E[x²] by MC against the CF curvature
    let p = MatrixNormalParams::new(DenseTensor::zeros(Shape::matrix(1, 1)?), &identity(1).scale(2.0), &identity(1))?;
    let closed = mn::cf_hess(&p, &DenseTensor::zeros(Shape::matrix(1, 1)?))?.map(|c| -c.re);
    let est = mc_moment(|r| mn::sample(&p, r), 2, ctx.config.n, ctx.mc_seed(1))?;
    out.push(compare("E[x²] = −φ''(0), σ²=2", "", &closed, &est, ctx.config.k_sigma)?);
    Ok(out)
}

fn check_product_algebra(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    use AlgebraIdentity::*;
    algebra_records(ctx, &[ContractSamePair, ContractComplement, OuterModeFour, CrossMixedProduct, VecKron])
}

fn check_identity_tensors(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    use AlgebraIdentity::*;
    algebra_records(
        ctx,
        &[IdentityTrace, OuterIdentityTrace, IdentityTensorNeutral, CommutationTranspose, CommutationInvolution],
    )
}

fn check_basic_derivatives(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    use DerivativeIdentity::*;
    derivative_records(ctx, &[Identity, Transpose, ProductRule, Square, Power])
}

fn check_chain_rule(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    derivative_records(ctx, &[DerivativeIdentity::ChainRule])
}

fn check_special_derivatives(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    use DerivativeIdentity::*;
    derivative_records(ctx, &[LinearForm, Determinant, Trace, Inverse])
}

fn check_snd_matrix(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (m, n) = MATRIX_DIMS;
    let k = ctx.config.k_sigma;
    let proj = claims::matrix_projection_check(m, n, ctx.config.n, ctx.mc_seed(1), k)?;
    let est = mc_moment(|r| mn::snd_matrix::<f64>(r, m, n).unwrap(), 2, ctx.config.n, ctx.mc_seed(2))?;
    let m2 = compare(&format!("SND m2 = I ×_c I ({m}x{n})"), "", &identity_tensor(m, n)?, &est, k)?;
    Ok(vec![proj, m2])
}

fn check_matrix_density(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, _) = ctx.matrix_params(true)?;
    let mut rng = ctx.param_rng().substream(1);
    let e = claims::density_vs_vec_error(&truth, &mut rng, 10)?;
    let scalar = claims::random_matrix_params(&mut rng, 1, 1, true)?;
    let e1 = claims::scalar_density_cf_error(&scalar)?;
    Ok(vec![
        deterministic("log density = vec-normal log density", "", Statistic::RelErr, e, 1e-10, 10, "N(vec M, Σ₂⊗Σ₁) via det and inverse"),
        deterministic("1x1 density integrates to the CF", "", Statistic::AbsErr, e1, 1e-9, 5, "trapezoid quadrature over ±14σ"),
    ])
}

fn check_matrix_cf(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, closed) = ctx.matrix_params(true)?;
    let ts = claims::matrix_cf_arguments(&mut ctx.param_rng().substream(1), &truth, 5)?;
    one(claims::matrix_cf_check(&truth, &closed, &ts, ctx.config.n, ctx.mc_seed(1), ctx.config.k_sigma)?)
}

fn check_factorization(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, closed) = ctx.matrix_params(true)?;
    let (n1, n2) = MATRIX_DIMS;
    one(claims::affine_check(
        &truth,
        &closed,
        &identity(n1),
        &identity(n2),
        &DenseTensor::zeros(Shape::matrix(n1, n2)?),
        ctx.config.n,
        ctx.mc_seed(1),
        ctx.config.k_sigma,
        "A₁ZA₂ᵀ + M mean and second moment",
        "",
    )?)
}

fn check_affine(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, closed) = ctx.matrix_params(true)?;
    let (n1, n2) = MATRIX_DIMS;
    let mut rng = ctx.param_rng().substream(1);
    let b1 = claims::random_matrix(&mut rng, 2, n1);
    let b2 = claims::random_matrix(&mut rng, 2, n2);
    let c = claims::random_matrix(&mut rng, 2, 2);
    one(claims::affine_check(&truth, &closed, &b1, &b2, &c, ctx.config.n, ctx.mc_seed(1), ctx.config.k_sigma, "B₁XB₂ᵀ + C law", "")?)
}

fn check_marginal(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, closed) = ctx.matrix_params(true)?;
    let (n1, n2) = MATRIX_DIMS;
    let (rows, cols) = ([0usize], [0usize, 2]);
    let b1 = crate::linalg::selector(&rows, n1)?;
    let b2 = crate::linalg::selector(&cols, n2)?;
    let c = DenseTensor::zeros(Shape::matrix(rows.len(), cols.len())?);
    let mut records = vec![claims::affine_check(
        &truth,
        &closed,
        &b1,
        &b2,
        &c,
        ctx.config.n,
        ctx.mc_seed(1),
        ctx.config.k_sigma,
        "submatrix rows {1}, cols {1,3}",
        "",
    )?];
    // the marginal law equals the selector image
    let direct = mn::marginal(&truth, &rows, &cols)?;
    let via = mn::affine(&truth, &b1, &b2, &c)?;
    let e = direct
        .sigma1()
        .max_abs_diff(via.sigma1())
        .zip(direct.sigma2().max_abs_diff(via.sigma2()))
        .zip(direct.mean().max_abs_diff(via.mean()))
        .map(|((a, b), c)| a.max(b).max(c))
        .unwrap_or(f64::INFINITY);
    records.push(deterministic("marginal = selector image", "", Statistic::AbsErr, e, ALGEBRA_TOLERANCE, 1, "affine map with selector matrices"));
    Ok(records)
}

fn check_cf_derivatives(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, _) = ctx.matrix_params(true)?;
    let ts = claims::matrix_cf_arguments(&mut ctx.param_rng().substream(1), &truth, 3)?;
    let mut worst = 0.0f64;
    for t in &ts {
        worst = worst.max(claims::cf_derivative_error(&truth, t)?);
    }
    one(deterministic("∂φ/∂T and ∂²φ/∂T² closed forms", "", Statistic::RelErr, worst, 1e-6, ts.len(), "central differences of φ and ∂φ"))
}

fn check_matrix_moments(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, closed) = ctx.matrix_params(false)?;
    claims::matrix_moment_checks(&truth, &closed, ctx.config.n, ctx.mc_seed(1), ctx.config.k_sigma)
}

fn check_snd_tensor(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let k = ctx.config.k_sigma;
    let n = ctx.config.n;
    let shape = Shape::new(TENSOR_DIMS.to_vec())?;
    let proj = claims::tensor_projection_check(TENSOR_DIMS, n, ctx.mc_seed(1), k)?;
    // orthogonal Tucker transforms keep the SND law
    let mut rng = ctx.param_rng();
    let qs = TENSOR_DIMS.iter().map(|&d| claims::random_orthogonal(&mut rng, d)).collect::<Result<Vec<_>>>()?;
    let ids: Vec<_> = TENSOR_DIMS.iter().map(|&d| identity(d)).collect();
    let est = mc_moment(|r| tucker_apply(&tn::snd_tensor::<f64>(r, &shape), &qs).unwrap(), 2, n, ctx.mc_seed(2))?;
    let inv = compare("Z·[Q₁,Q₂,Q₃] covariance = I", "", &separable_tensor(&ids)?, &est, k)?;
    // unfolding projections of an SND tensor are N(0,1)
    let alpha = claims::unit_vector(&mut rng, TENSOR_DIMS[1]);
    let beta = claims::unit_vector(&mut rng, TENSOR_DIMS[0] * TENSOR_DIMS[2]);
    let at = transpose(&alpha);
    let unf = claims::projection_normality_check("αᵀZ[2]β normality", "", n, ctx.mc_seed(3), k, |r| {
        let z = tn::snd_tensor::<f64>(r, &shape).unfold(1).unwrap();
        crate::linalg::matmul(&crate::linalg::matmul(&at, &z), &beta).data()[0]
    })?;
    let x = rng.normal_tensor::<f64>(&shape);
    let d = shape.size() as f64;
    let want = -0.5 * d * (2.0 * std::f64::consts::PI).ln() - 0.5 * x.inner(&x)?;
    let e = (tn::snd_log_density(&shape, &x)? - want).abs();
    let dens = deterministic("SND tensor log density", "", Statistic::AbsErr, e, ALGEBRA_TOLERANCE, 1, "product of scalar N(0,1) densities");
    Ok(vec![proj, inv, unf, dens])
}

fn check_tucker_normal(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, closed) = ctx.tensor_params(false)?;
    let mut out = vec![claims::tensor_moment2_check(&truth, &closed, ctx.config.n, ctx.mc_seed(1), ctx.config.k_sigma)?];
    // order-1 case is the multivariate normal N(μ, Σ)
    let mut rng = ctx.param_rng().substream(1);
    let v = claims::random_tensor_params(&mut rng, &[3], false)?;
    let vc = claims::scale_tensor_sigma1(&v, ctx.fault())?;
    let est = mc_moment(|r| tn::sample_tensor(&v, r), 2, ctx.config.n, ctx.mc_seed(2))?;
    out.push(compare("order-1 tensor normal covariance Σ₁", "", vc.sigma(0), &est, ctx.config.k_sigma)?);
    Ok(out)
}

fn check_unfolding(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, closed) = ctx.tensor_params(false)?;
    let mut out = (0..TENSOR_DIMS.len())
        .map(|k| claims::unfolding_law_check(&truth, &closed, k, ctx.config.n, ctx.mc_seed(k as u64 + 1), ctx.config.k_sigma))
        .collect::<Result<Vec<_>>>()?;
    // order 2: the sampler reproduces the matrix-normal closed moment
    let (mt, mc) = ctx.matrix_params(false)?;
    let tp = TensorNormalParams::new(mt.mean().clone(), &[mt.sigma1().clone(), mt.sigma2().clone()])?;
    let est = mc_moment(|r| tn::sample_tensor(&tp, r), 2, ctx.config.n, ctx.mc_seed(9))?;
    out.push(compare("order-2 tensor sampler vs Σ₁ ×_c Σ₂", "", &mn::moment2(&mc)?, &est, ctx.config.k_sigma)?);
    Ok(out)
}

fn check_snd_tensor_cf(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let shape = Shape::new(TENSOR_DIMS.to_vec())?;
    let std = TensorNormalParams::standard(&shape)?;
    let ts = claims::tensor_cf_arguments(&mut ctx.param_rng(), &std, 5)?;
    let mut rec = claims::tensor_cf_check(&std, &std, &ts, ctx.config.n, ctx.mc_seed(1), ctx.config.k_sigma)?;
    rec.name = "SND tensor CF exp(−½⟨T,T⟩)".into();
    one(rec)
}

fn check_tensor_cf(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    let (truth, closed) = ctx.tensor_params(true)?;
    let ts = claims::tensor_cf_arguments(&mut ctx.param_rng().substream(1), &truth, 5)?;
    let mc = claims::tensor_cf_check(&truth, &closed, &ts, ctx.config.n, ctx.mc_seed(1), ctx.config.k_sigma)?;
    let (mt, _) = ctx.matrix_params(true)?;
    let mts = claims::matrix_cf_arguments(&mut ctx.param_rng().substream(2), &mt, 5)?;
    let e = claims::order_two_agreement_error(&mt, &mts)?;
    let agree = deterministic("order-2 tensor CF = matrix CF", "", Statistic::AbsErr, e, ALGEBRA_TOLERANCE, mts.len(), "matrix normal closed forms");
    Ok(vec![mc, agree])
}

fn check_adjoint(ctx: &Ctx) -> Result<Vec<CheckRecord>> {
    use AlgebraIdentity::*;
    algebra_records(ctx, &[InnerAdjoint, TuckerAsContraction, QuadraticCfTerm])
}

macro_rules! spec {
    ($id:expr, $a:expr, $fam:expr, $sd:expr, $f:ident) => {
        CheckSpec { id: $id, anchor: anchor($a), family: $fam, sigma_dependent: $sd, run: $f }
    };
}

/// The registry, in report order.
pub fn registry() -> Vec<CheckSpec> {
    vec![
        spec!("moment-definitions", 0, "moments", false, check_moment_definitions),
        spec!("product-algebra", 1, "algebra", false, check_product_algebra),
        spec!("identity-tensors", 2, "algebra", false, check_identity_tensors),
        spec!("basic-derivatives", 3, "derivatives", false, check_basic_derivatives),
        spec!("chain-rule", 4, "derivatives", false, check_chain_rule),
        spec!("special-derivatives", 5, "derivatives", false, check_special_derivatives),
        spec!("snd-matrix", 6, "snd", false, check_snd_matrix),
        spec!("matrix-density", 7, "matrix-normal", false, check_matrix_density),
        spec!("matrix-cf", 7, "matrix-normal", true, check_matrix_cf),
        spec!("factorization", 8, "matrix-normal", true, check_factorization),
        spec!("affine", 9, "matrix-normal", true, check_affine),
        spec!("marginal", 10, "matrix-normal", true, check_marginal),
        spec!("cf-derivatives", 11, "matrix-normal", false, check_cf_derivatives),
        spec!("matrix-moments", 12, "moments", true, check_matrix_moments),
        spec!("snd-tensor", 13, "snd", false, check_snd_tensor),
        spec!("tucker-normal", 14, "tensor-normal", true, check_tucker_normal),
        spec!("unfolding", 15, "tensor-normal", true, check_unfolding),
        spec!("snd-tensor-cf", 16, "snd", false, check_snd_tensor_cf),
        spec!("tensor-cf", 17, "tensor-normal", true, check_tensor_cf),
        spec!("adjoint", 18, "algebra", false, check_adjoint),
    ]
}

/// Run every registered check. Individual failures are recorded; only
/// configuration errors and internal evaluation errors are returned.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    config.validate()?;
    let specs = registry();
    let groups = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let ctx = Ctx { config, seed: derive_seed(config.seed, i as u64) };
            let records = (spec.run)(&ctx)?;
            Ok(records
                .into_iter()
                .map(|mut r| {
                    r.anchor = spec.anchor.to_string();
                    r.family = spec.family.to_string();
                    r.check_id = spec.id.to_string();
                    r
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<CheckRecord> = groups.into_iter().flatten().collect();
    let calibration = calibration_records(&records);
    records.extend(calibration);
    Ok(VerificationReport { config: config.clone(), records })
}

/// One record per family of MC checks: entry-weighted mean `|z|` must stay
/// below [`CALIBRATION_LIMIT`].
fn calibration_records(records: &[CheckRecord]) -> Vec<CheckRecord> {
    let mut families: Vec<&str> = Vec::new();
    for r in records {
        if r.mean_abs_z.is_some() && !families.contains(&r.family.as_str()) {
            families.push(&r.family);
        }
    }
    families
        .into_iter()
        .map(|fam| {
            let (mut sum, mut count) = (0.0, 0usize);
            for r in records.iter().filter(|r| r.family == fam) {
                if let Some(z) = r.mean_abs_z {
                    sum += z * r.entries as f64;
                    count += r.entries;
                }
            }
            let mean = sum / count as f64;
            let mut rec = deterministic(
                &format!("calibration: mean |z| of {fam}"),
                "z-scores of a correct implementation are roughly standard normal",
                Statistic::MaxZ,
                mean,
                CALIBRATION_LIMIT,
                count,
                "entry-weighted mean of |z| over the family",
            );
            if !(mean <= CALIBRATION_LIMIT) {
                rec.outcome = Outcome::Fail;
            }
            rec.family = fam.to_string();
            rec.check_id = "calibration".into();
            rec
        })
        .collect()
}

/// All check records of one suite run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub config: SuiteConfig,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn count(&self, outcome: Outcome) -> usize {
        self.records.iter().filter(|r| r.outcome == outcome).count()
    }

    pub fn has_failures(&self) -> bool {
        self.count(Outcome::Fail) > 0
    }

    pub fn has_inconclusive(&self) -> bool {
        self.count(Outcome::Inconclusive) > 0
    }

    /// True when every check passed.
    pub fn passed(&self) -> bool {
        self.records.iter().all(CheckRecord::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.outcome == Outcome::Fail)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "verification suite: seed={} n={} k_sigma={}", c.seed, c.n, c.k_sigma);
        if let Some(f) = c.sigma_scale {
            let _ = writeln!(s, "fault injection: sigma-scale={f}");
        }
        let mut current = "";
        for r in &self.records {
            if r.anchor != current {
                current = &r.anchor;
                let _ = writeln!(s, "\n[{current}]");
            }
            let _ = writeln!(s, "  {r}");
            let _ = writeln!(s, "      closed: {}; oracle: {}", r.closed, r.oracle);
        }
        let _ = writeln!(
            s,
            "\n{} checks: {} pass, {} fail, {} inconclusive",
            self.records.len(),
            self.count(Outcome::Pass),
            self.count(Outcome::Fail),
            self.count(Outcome::Inconclusive)
        );
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
