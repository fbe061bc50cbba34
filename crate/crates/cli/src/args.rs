use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "takagi", version, about = "Takagi curves, baker dynamics and their SBR and occupation measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample x -> (T(x), H(xi,x), S(xi)) on a uniform grid.
    Curve(CurveArgs),
    /// Run an identity suite and report residuals against certified bounds.
    Verify(VerifyArgs),
    /// Recompute the positivity case thresholds and gamma_0.
    Thresholds(ThresholdArgs),
    /// Exhaustive separation minima of S and H differences.
    Transversality(TransversalityArgs),
    /// Histogram of the SBR marginal with its characteristic function.
    Sbr(SampleArgs),
    /// Histograms of rho and of its restriction to |xi - eta| > 1/2.
    Rho(SampleArgs),
    /// Histograms of chi and of its restriction to |y - x| > 1/2.
    Chi(SampleArgs),
    /// Occupation measure of x -> H(xi,x) on a dyadic grid.
    Localtime(LocaltimeArgs),
    /// Telescoping identities for rho and chi over sixteen intervals.
    Telescope(TelescopeArgs),
}

#[derive(Clone, Debug, Args)]
pub struct ParamArgs {
    /// Roughness parameter in (1/2, 1).
    #[arg(long, conflicts_with = "kappa")]
    pub gamma: Option<f64>,
    /// Contraction 1/(2 gamma) in (1/2, 1), as an alternative to --gamma.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Register depth in binary digits.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Number of series terms; defaults to 48, or the depth if smaller.
    #[arg(long)]
    pub truncation: Option<u32>,
}

#[derive(Clone, Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 4096)]
    pub points: usize,
    /// Digits of xi, e.g. 0110; zero-padded to the register depth.
    #[arg(long)]
    pub xi: Option<String>,
    #[arg(long, default_value = "curve.csv")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// attractor, scaling, representations, macroscopic, telescoping or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Random trials per check (samples for the telescoping suite).
    #[arg(long, visible_alias = "trials", default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 30)]
    pub terms: u32,
    /// Extra point xi to check, as digits.
    #[arg(long)]
    pub xi: Option<String>,
    /// Extra point x to check, as a number in [0, 1].
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long, default_value = "verify.json")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value = "thresholds.json")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct TransversalityArgs {
    #[arg(long, conflicts_with = "kappa")]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Enumeration depth, at most 16.
    #[arg(long, default_value_t = 14)]
    pub depth: u32,
    #[arg(long, default_value_t = 48)]
    pub truncation: u32,
    #[arg(long, default_value = "transversality.json")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, visible_alias = "trials", default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 512)]
    pub bins: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct LocaltimeArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Digits of xi; drawn from --seed when absent.
    #[arg(long)]
    pub xi: Option<String>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of grid points in [0, 1).
    #[arg(long, default_value_t = 1 << 20)]
    pub grid: u64,
    /// Coarse bin count; the refinement uses twice as many.
    #[arg(long, default_value_t = 256)]
    pub bins: usize,
    #[arg(long, default_value = "localtime.csv")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct TelescopeArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, visible_alias = "trials", default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 30)]
    pub terms: u32,
    #[arg(long, default_value = "telescope.json")]
    pub out: PathBuf,
}
