use std::collections::hash_map::RandomState;
use std::hash::{BuildHasher, Hasher};
use std::path::{Path, PathBuf};

use tensor_gauss::io;
use tensor_gauss::matrix_normal::{self as mn, MatrixNormalParams, MomentLayout};
use tensor_gauss::rng::GaussianSampleStream;
use tensor_gauss::tensor_normal::{self as tn, TensorNormalParams};
use tensor_gauss::verify::check::{deterministic, Outcome, Statistic};
use tensor_gauss::verify::claims::{derive_seed, DerivativeIdentity};
use tensor_gauss::verify::mc::mc_moment;
use tensor_gauss::verify::suite::{run_suite, SuiteConfig, FD_TOLERANCE};
use tensor_gauss::{Shape, Tensor};

use crate::params::{read_params, read_tensor, write_bytes, CliError, CliResult, Params};
use crate::{DerivCheckArgs, EvalArgs, Format, GenArgs, Layout, MomentArgs, UnfoldArgs, VerifyArgs, EXIT_FAIL};

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| RandomState::new().build_hasher().finish())
}

fn encode(t: &Tensor, format: Format) -> CliResult<Vec<u8>> {
    Ok(match format {
        Format::Text => io::to_text(t).into_bytes(),
        Format::Binary => {
            let mut buf = Vec::new();
            io::write_ten(&mut buf, t)?;
            buf
        }
    })
}

fn emit(t: &Tensor, out: Option<&Path>, format: Format) -> CliResult<()> {
    match out {
        Some(path) => write_bytes(path, &encode(t, format)?),
        None => {
            println!("{}", io::to_text(t));
            Ok(())
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn gen(a: GenArgs) -> CliResult<u8> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let params = read_params(&a.params)?;
    let seed = resolve_seed(a.seed.seed);
    let mut rng = GaussianSampleStream::new(seed);
    let samples: Vec<Tensor> = (0..a.n)
        .map(|_| match &params {
            Params::Matrix(p) => mn::sample(p, &mut rng),
            Params::Tensor(p) => tn::sample_tensor(p, &mut rng),
        })
        .collect();
    let bytes = match a.format {
        Format::Binary => io::write_stream(Vec::new(), &samples)?,
        Format::Text => {
            let items: Vec<io::TensorText> = samples.iter().map(io::TensorText::from).collect();
            serde_json::to_vec(&items).map_err(tensor_gauss::Error::from)?
        }
    };
    write_bytes(&a.out, &bytes)?;
    println!("seed: {seed}");
    println!("wrote {} samples of shape {} to {}", a.n, samples[0].shape(), a.out.display());
    Ok(0)
}

/// Tensor normal density through its mode-1 unfolding, which is matrix normal
/// with the same vectorized law.
fn as_matrix(params: &Params) -> CliResult<MatrixNormalParams<f64>> {
    Ok(match params {
        Params::Matrix(p) => p.clone(),
        Params::Tensor(p) => tn::unfold_params(p, 0)?,
    })
}

pub fn density(a: EvalArgs) -> CliResult<u8> {
    let params = read_params(&a.params)?;
    let x = read_tensor(&a.input)?;
    check_shape(&params, &x, "--in")?;
    let (p, x) = match &params {
        Params::Matrix(_) => (as_matrix(&params)?, x),
        Params::Tensor(_) => (as_matrix(&params)?, x.unfold(0)?),
    };
    let ld = mn::log_density(&p, &x)?;
    println!("log_density {ld:e}");
    println!("density {:e}", ld.exp());
    Ok(0)
}

fn check_shape(params: &Params, t: &Tensor, what: &str) -> CliResult<()> {
    let dims = params.dims();
    if t.dims() != dims.as_slice() {
        return Err(usage(format!("{what} tensor is {}, parameters expect {}", t.shape(), Shape::new(dims)?)));
    }
    Ok(())
}

pub fn cf(a: EvalArgs) -> CliResult<u8> {
    let params = read_params(&a.params)?;
    let t = read_tensor(&a.input)?;
    check_shape(&params, &t, "--in")?;
    let phi = match &params {
        Params::Matrix(p) => mn::cf(p, &t)?,
        Params::Tensor(p) => tn::tensor_cf(p, &t)?,
    };
    println!("re {:e}", phi.re);
    println!("im {:e}", phi.im);
    Ok(0)
}

fn layout(l: Layout) -> MomentLayout {
    match l {
        Layout::Interleaved => MomentLayout::Interleaved,
        Layout::Grouped => MomentLayout::Grouped,
    }
}

/// Closed-form central moment, stored sample-major (interleaved).
fn closed_moment(params: &Params, k: usize) -> CliResult<(Tensor, Option<&'static str>)> {
    let dims = params.dims();
    if k % 2 == 1 {
        let shape = Shape::new(dims.repeat(k))?;
        return Ok((Tensor::zeros(shape), Some("odd central moments of a Gaussian vanish; exact zero tensor")));
    }
    let t = match (params, k) {
        (Params::Matrix(p), 2) => mn::moment2(&centered_matrix(p)?)?,
        (Params::Matrix(p), 4) => mn::moment4(&centered_matrix(p)?)?,
        (Params::Tensor(p), 2) => tn::moment2_tensor(&centered_tensor(p)?)?,
        _ => {
            return Err(usage(format!(
                "no closed form for k={k} with these parameters; use --mc (closed forms: k=2 and k=4 for matrices, k=2 for tensors, odd k)"
            )))
        }
    };
    Ok((t, None))
}

fn centered_matrix(p: &MatrixNormalParams<f64>) -> CliResult<MatrixNormalParams<f64>> {
    let (a, b) = p.dims();
    Ok(MatrixNormalParams::new(Tensor::zeros(Shape::matrix(a, b)?), p.sigma1(), p.sigma2())?)
}

fn centered_tensor(p: &TensorNormalParams<f64>) -> CliResult<TensorNormalParams<f64>> {
    Ok(TensorNormalParams::new(Tensor::zeros(p.shape().clone()), &p.sigmas())?)
}

fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".se");
    PathBuf::from(s)
}

pub fn moment(a: MomentArgs) -> CliResult<u8> {
    if a.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let params = read_params(&a.params)?;
    let var_order = params.dims().len();
    let to = layout(a.layout);
    let reorder = |t: &Tensor| mn::reorder(t, var_order, MomentLayout::Interleaved, to);
    if a.mc {
        if a.n < 2 {
            return Err(usage("--n must be at least 2 with --mc"));
        }
        let seed = resolve_seed(a.seed.seed);
        let est = match &params {
            Params::Matrix(p) => mc_moment(|r| &mn::sample(p, r) - p.mean(), a.k, a.n, seed)?,
            Params::Tensor(p) => mc_moment(|r| &tn::sample_tensor(p, r) - p.mean(), a.k, a.n, seed)?,
        };
        let value = reorder(&est.value)?;
        let se = reorder(&est.std_err)?;
        println!("seed: {seed}");
        println!("Monte-Carlo central moment k={} from n={} draws, max std-err {:e}", a.k, a.n, se.max_abs());
        emit(&value, a.out.as_deref(), a.format)?;
        match &a.out {
            Some(out) => {
                let path = sidecar(out);
                write_bytes(&path, &encode(&se, a.format)?)?;
                println!("standard errors written to {}", path.display());
            }
            None => println!("{}", io::to_text(&se)),
        }
    } else {
        let (t, note) = closed_moment(&params, a.k)?;
        let t = reorder(&t)?;
        if let Some(note) = note {
            println!("note: {note}");
        }
        println!("closed-form central moment k={}, shape {}", a.k, t.shape());
        emit(&t, a.out.as_deref(), a.format)?;
    }
    Ok(0)
}

pub fn unfold(a: UnfoldArgs) -> CliResult<u8> {
    let t = read_tensor(&a.input)?;
    if a.mode == 0 || a.mode > t.order() {
        return Err(usage(format!("--mode must be between 1 and {}, got {}", t.order(), a.mode)));
    }
    let m = t.unfold(a.mode - 1)?;
    emit(&m, a.out.as_deref(), a.format)?;
    Ok(0)
}

pub fn deriv_check(a: DerivCheckArgs) -> CliResult<u8> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let seed = resolve_seed(a.seed.seed);
    println!("seed: {seed}");
    let mut failed = false;
    for (i, id) in DerivativeIdentity::ALL.iter().enumerate() {
        let e = id.max_error(derive_seed(seed, i as u64), a.n)?;
        let rec = deterministic(id.name(), "", Statistic::RelErr, e, FD_TOLERANCE, a.n, "central differences");
        failed |= rec.outcome == Outcome::Fail;
        println!("{:<12} {:<40} max rel-err {:.3e} over {} points", rec.outcome.to_string(), rec.name, e, a.n);
    }
    Ok(if failed { EXIT_FAIL } else { 0 })
}

fn parse_fault(specs: &[String]) -> CliResult<Option<f64>> {
    let mut scale = None;
    for s in specs {
        let (key, val) = s.split_once('=').ok_or_else(|| usage(format!("--fault-inject expects KEY=VAL, got {s:?}")))?;
        match key {
            "sigma-scale" => {
                let v: f64 = val.parse().map_err(|_| usage(format!("sigma-scale must be a number, got {val:?}")))?;
                scale = Some(v);
            }
            _ => return Err(usage(format!("unknown fault key {key:?}; known: sigma-scale"))),
        }
    }
    Ok(scale)
}

pub fn verify(a: VerifyArgs) -> CliResult<u8> {
    let config = SuiteConfig {
        seed: a.seed,
        n: a.n,
        k_sigma: a.k_sigma,
        sigma_scale: parse_fault(&a.fault_inject)?,
        ..SuiteConfig::default()
    };
    let report = run_suite(&config)?;
    print!("{}", report.to_text());
    if let Some(out) = &a.out {
        write_bytes(out, report.to_json()?.as_bytes())?;
    }
    let fail = report.has_failures() || (a.fail_on_inconclusive && report.has_inconclusive());
    Ok(if fail { EXIT_FAIL } else { 0 })
}
