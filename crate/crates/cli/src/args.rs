use std::path::PathBuf;

use betaorder::marginals::{EnsembleSpec, Family, Ordering};
use betaorder::scalar::{parse_q, Q};
use clap::{Args, Parser, Subcommand, ValueEnum};

fn rational(s: &str) -> Result<Q, String> {
    parse_q(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "betaorder", version, about = "Exact distributions of ordered eigenvalues of beta ensembles")]
pub struct Cli {
    /// Directory for cached table cells (default: $BETAORDER_CACHE_DIR, then the user cache directory).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Do not read or write the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Marginal densities and distributions of every ordered eigenvalue.
    Marginal(MarginalArgs),
    /// Distributions of ordered eigenvalues under the unit-trace constraint (Laguerre only).
    FixedTrace(FixedTraceArgs),
    /// Density of the Landauer conductance of a chaotic cavity.
    Conductance(ConductanceArgs),
    /// Zeros of the gap-probability generating function.
    GfZeros(GfZerosArgs),
    /// Monte Carlo eigenvalue samples from the matching matrix model.
    Sample(SampleArgs),
    /// Run built-in verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Laguerre,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    RowMajor,
    Antidiagonal,
    Wavefront,
}

impl From<OrderArg> for Ordering {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::RowMajor => Ordering::RowMajor,
            OrderArg::Antidiagonal => Ordering::Antidiagonal,
            OrderArg::Wavefront => Ordering::Wavefront,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    CsvGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub beta: u32,
    /// Exponent of x in the weight, as an integer or p/q.
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub lambda1: Q,
    /// Exponent of 1 − x in the Jacobi weight.
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub lambda2: Option<Q>,
}

impl EnsembleArgs {
    pub fn spec(&self) -> betaorder::Result<EnsembleSpec> {
        match self.family {
            FamilyArg::Laguerre => {
                if self.lambda2.is_some() {
                    return Err(betaorder::Error::Invalid("--lambda2 only applies to the Jacobi family".into()));
                }
                EnsembleSpec::laguerre(self.beta, self.lambda1)
            }
            FamilyArg::Jacobi => {
                let l2 = self
                    .lambda2
                    .ok_or_else(|| betaorder::Error::Invalid("the Jacobi family needs --lambda2".into()))?;
                EnsembleSpec::jacobi(self.beta, self.lambda1, l2)
            }
        }
    }

    pub fn family(&self) -> Family {
        match self.family {
            FamilyArg::Laguerre => Family::Laguerre,
            FamilyArg::Jacobi => Family::Jacobi,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Number of evenly spaced points for csv-grid output.
    #[arg(long, default_value_t = 200)]
    pub grid_points: u32,
    /// Significant digits of evaluated values.
    #[arg(long, default_value_t = 20)]
    pub precision: u32,
}

#[derive(Debug, Clone, Args)]
pub struct MarginalArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Largest matrix size; every N ≤ nmax is computed.
    #[arg(long)]
    pub nmax: u32,
    /// Only report the n-th largest eigenvalue.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, value_enum, default_value = "row-major")]
    pub order: OrderArg,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FixedTraceArgs {
    #[arg(long)]
    pub beta: u32,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub lambda1: Q,
    /// Matrix size N.
    #[arg(long)]
    pub nmax: u32,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConductanceArgs {
    /// Channels in the first lead.
    #[arg(long)]
    pub n1: u32,
    /// Channels in the second lead.
    #[arg(long)]
    pub n2: u32,
    #[arg(long)]
    pub beta: u32,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GfZerosArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Matrix size N.
    #[arg(long)]
    pub nmax: u32,
    /// Evaluation points, comma separated or repeated.
    #[arg(long, value_parser = rational, value_delimiter = ',', required = true)]
    pub x: Vec<Q>,
    /// Significant digits; roots are found at twice this.
    #[arg(long, default_value_t = 50)]
    pub precision: u32,
    /// Use the unit-trace ensemble (Laguerre only).
    #[arg(long)]
    pub fixed_trace: bool,
    #[arg(long, value_enum, default_value = "human")]
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Matrix size.
    #[arg(long = "N", alias = "big-n")]
    pub big_n: u32,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    HalfIntegerLargestThree,
    HalfIntegerLargestFour,
    Conductance,
    FixedTrace,
    GfZeros,
    Pfaffian,
    OddEven,
    BruteForce,
    Properties,
    MonteCarlo,
    NegativityScan,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long, value_enum, default_value = "human")]
    pub format: ReportFormat,
}
