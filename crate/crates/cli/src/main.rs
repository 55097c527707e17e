use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod params;

/// Matrix and tensor normal distributions, tensor-form matrix calculus and
/// their verification suite.
#[derive(Parser, Debug)]
#[command(name = "tensor-gauss", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw samples and write them as a sample stream.
    Gen(GenArgs),
    /// Log density of a matrix or tensor under the given parameters.
    Density(EvalArgs),
    /// Characteristic function at T.
    Cf(EvalArgs),
    /// Central moment tensor, closed form or Monte Carlo.
    Moment(MomentArgs),
    /// Mode-k unfolding of a tensor.
    Unfold(UnfoldArgs),
    /// Check the matrix derivative identities against finite differences.
    DerivCheck(DerivCheckArgs),
    /// Run the full verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Binary,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    Interleaved,
    Grouped,
}

#[derive(Args, Debug)]
pub struct SeedArg {
    /// RNG seed; falls back to TENSOR_GAUSS_SEED, then to a random seed.
    #[arg(long, env = "TENSOR_GAUSS_SEED")]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Parameter file (JSON).
    #[arg(long)]
    pub params: PathBuf,
    /// Number of samples.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Binary)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Tensor file with the evaluation point.
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct MomentArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Moment order.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Estimate by Monte Carlo instead of the closed form.
    #[arg(long)]
    pub mc: bool,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Output file; the tensor is printed as text when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Binary)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = Layout::Interleaved)]
    pub layout: Layout,
}

#[derive(Args, Debug)]
pub struct UnfoldArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Mode, counted from 1.
    #[arg(long)]
    pub mode: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Binary)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct DerivCheckArgs {
    #[command(flatten)]
    pub seed: SeedArg,
    /// Random points per identity.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, env = "TENSOR_GAUSS_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Monte-Carlo samples per check.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 5.0)]
    pub k_sigma: f64,
    /// Test hook, e.g. `sigma-scale=1.1`.
    #[arg(long, value_name = "KEY=VAL")]
    pub fault_inject: Vec<String>,
    /// Exit with status 1 when any check is inconclusive.
    #[arg(long)]
    pub fail_on_inconclusive: bool,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Density(a) => commands::density(a),
        Command::Cf(a) => commands::cf(a),
        Command::Moment(a) => commands::moment(a),
        Command::Unfold(a) => commands::unfold(a),
        Command::DerivCheck(a) => commands::deriv_check(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
