mod report;
mod verbs;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Invariants, projections and spectra of generalized rotation algebras.
#[derive(Parser, Debug, Serialize)]
#[command(name = "rotalg", version)]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every sampler.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Verb {
    /// Simplicity, trace space and K-theory of one algebra.
    Analyze(AlgebraArgs),
    /// Isomorphism or Morita equivalence of two algebras.
    Classify(ClassifyArgs),
    /// Build and verify a projection of trace frac(kθ).
    Rieffel(RieffelArgs),
    /// Power norms of u+λv along a list of exponents.
    Norms(NormsArgs),
    /// Spectral radius estimate of u+λv.
    Radius(RadiusArgs),
    /// Spectrum of u+λv.
    Spectrum(LambdaArgs),
    /// Brown-measure sampling of u+λv.
    Brown(BrownArgs),
    /// Bloch bands of the almost Mathieu operator for all p/q with q ≤ qmax.
    Butterfly(ButterflyArgs),
    /// Truncated almost Mathieu spectra and their phase dependence.
    Amo(AmoArgs),
    /// Commutant coefficient identities.
    Commutant(CommutantArgs),
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Analyze(_) => "analyze",
            Verb::Classify(_) => "classify",
            Verb::Rieffel(_) => "rieffel",
            Verb::Norms(_) => "norms",
            Verb::Radius(_) => "radius",
            Verb::Spectrum(_) => "spectrum",
            Verb::Brown(_) => "brown",
            Verb::Butterfly(_) => "butterfly",
            Verb::Amo(_) => "amo",
            Verb::Commutant(_) => "commutant",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct AlgebraArgs {
    /// golden, silver, quad:(p,q,d,r) or dec:<digits>[:depth=N].
    #[arg(long, default_value = "golden")]
    pub theta: String,
    /// one, one_plus_z_sq, shifted:(a,b), zeros:<items> or trig:<coeffs>|<items>.
    #[arg(long, default_value = "one")]
    pub gamma: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationArg {
    Iso,
    Morita,
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    /// First algebra as <theta>@<gamma>.
    #[arg(long)]
    pub first: String,
    /// Second algebra as <theta>@<gamma>.
    #[arg(long)]
    pub second: String,
    #[arg(long, value_enum, default_value_t = RelationArg::Morita)]
    pub relation: RelationArg,
    /// Continued-fraction depth for decimal angles.
    #[arg(long, default_value_t = 30)]
    pub cf_depth: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct RieffelArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Ramp width; chosen automatically when absent.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Residual grid size.
    #[arg(long, default_value_t = 10_000)]
    pub grid: usize,
    /// Clock/shift dimensions for the matrix check (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<i64>,
    /// Sample count of (t, f, g, h) for CSV output.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct LambdaArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub theta: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionArg {
    Forward,
    Inverse,
}

#[derive(Args, Debug, Serialize)]
pub struct NormsArgs {
    #[command(flatten)]
    pub base: LambdaArgs,
    /// Exponents (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
    pub direction: DirectionArg,
}

#[derive(Args, Debug, Serialize)]
pub struct RadiusArgs {
    #[command(flatten)]
    pub base: LambdaArgs,
    /// Increasing exponents (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "1024,2048,4096,8192,16384,32768,65536")]
    pub schedule: Vec<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct BrownArgs {
    #[command(flatten)]
    pub base: LambdaArgs,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ButterflyArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long)]
    pub qmax: i64,
}

#[derive(Args, Debug, Serialize)]
pub struct AmoArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Angle spec, or a reduced fraction p/q.
    #[arg(long, default_value = "golden")]
    pub theta: String,
    /// Truncation half-width: sites −N..N.
    #[arg(long = "N", default_value_t = 200)]
    pub n: usize,
    /// Phases (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0,0.37")]
    pub beta: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckArg {
    Recurrence,
    Reconstruction,
    Collapse,
    Idempotent,
    Fsrk,
}

#[derive(Args, Debug, Serialize)]
pub struct CommutantArgs {
    #[arg(long, value_enum)]
    pub check: CheckArg,
    /// Index window half-width, or series length for the idempotent check.
    #[arg(long, default_value_t = 50)]
    pub window: i64,
    #[arg(long, default_value = "golden")]
    pub theta: String,
    /// Antidiagonal offset, or the exponent of v in u+v^k.
    #[arg(long, default_value_t = 1)]
    pub k: i64,
    /// Product length for the fsrk check.
    #[arg(long, default_value_t = 50)]
    pub s: i64,
    /// Exponent shift for the fsrk check.
    #[arg(long, default_value_t = 1)]
    pub r: i64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match verbs::run(&cli).and_then(|out| report::emit(&cli, out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
