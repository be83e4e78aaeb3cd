use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::output::VERSION;

/// Numerical experiments on shear flows near Couette flow.
#[derive(Debug, Parser)]
#[command(name = "couette", version = VERSION)]
pub struct Cli {
    /// Output directory (default `results`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Seed for every randomized generator in the run.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Worker threads for the global pool.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// TOML file with run parameters; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenpair of the Rayleigh operator for the erf profile.
    Eigen(EigenArgs),
    /// Root of the limit equation 2a = β coth β.
    Beta(BetaArgs),
    /// Log-log scaling of the Gaussian bump in H^s.
    GaussianScaling(GaussianArgs),
    /// Steady branch near the bifurcation point, or a period-matched state.
    Bifurcate(BifurcateArgs),
    /// Velocity decay of the linearized flow around Couette.
    Damp(DampArgs),
    /// Stability verdict for a shear profile at a given period.
    Classify(ClassifyArgs),
    /// Window of unstable periods for the erf profile.
    Window(WindowArgs),
    /// Sobolev norm of a sampled field.
    HsNorm(HsNormArgs),
    /// Grid of independent runs written to one CSV.
    Sweep(SweepArgs),
    /// Markdown summary of acceptance results.
    Report(ReportArgs),
    /// Run the acceptance criteria.
    Suite(SuiteArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eigen(_) => "eigen",
            Command::Beta(_) => "beta",
            Command::GaussianScaling(_) => "gaussian-scaling",
            Command::Bifurcate(_) => "bifurcate",
            Command::Damp(_) => "damp",
            Command::Classify(_) => "classify",
            Command::Window(_) => "window",
            Command::HsNorm(_) => "hs-norm",
            Command::Sweep(_) => "sweep",
            Command::Report(_) => "report",
            Command::Suite(_) => "suite",
        }
    }
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Interior grid points (default: spacing γ/16, at least 255).
    #[arg(long)]
    pub n: Option<usize>,
    /// Also write the eigenvector to `eigen_phi.csv`.
    #[arg(long)]
    pub write_phi: bool,
}

#[derive(Debug, Args)]
pub struct BetaArgs {
    #[arg(long)]
    pub a: Option<f64>,
    /// Mollifier constant; the erf family has b0 = 4.
    #[arg(long)]
    pub b0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub gammas: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct BifurcateArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Continuation steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Amplitude increment per step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Solve for `a` so that the state has this period instead.
    #[arg(long, value_name = "T")]
    pub match_period: Option<f64>,
    /// Amplitude of the period-matched state.
    #[arg(long, value_name = "R")]
    pub amplitude: Option<f64>,
    /// Orders of ‖ω - 1‖_{H^s} added to the branch table.
    #[arg(long = "s", value_delimiter = ',')]
    pub orders: Vec<f64>,
    /// Cosine modes in ξ.
    #[arg(long)]
    pub modes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DampArgs {
    /// JSON list of `{"k": 1, "profile": "cosine" | "step" | "file.csv"}`.
    #[arg(long, value_name = "FILE")]
    pub modes: Option<PathBuf>,
    /// Log-spaced times as `t0:t1:n`.
    #[arg(long)]
    pub times: Option<String>,
    /// `u`, `v` or `both`.
    #[arg(long)]
    pub fit: Option<String>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// `couette`, `erf:GAMMA:A`, `sine:AMP` or `random:H2NORM` (seeded).
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub period: Option<f64>,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HsNormArgs {
    /// CSV with a `u` column (1-D) or `x`, `y`, `value` columns (2-D).
    #[arg(long, value_name = "FILE")]
    pub field: Option<PathBuf>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub sx: Option<f64>,
    #[arg(long)]
    pub sy: Option<f64>,
    /// x-period of a 2-D field (default: inferred from the x spacing).
    #[arg(long)]
    pub period: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `eigen`, `window`, `classify`, `beta` or `convergence`.
    #[arg(long)]
    pub experiment: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub gammas: Vec<f64>,
    #[arg(long = "a", value_delimiter = ',')]
    pub a_values: Vec<f64>,
    /// Period for `classify` sweeps.
    #[arg(long)]
    pub period: Option<f64>,
    /// Points solved concurrently.
    #[arg(long)]
    pub parallelism: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directories holding `acceptance.json` (default: the output directory).
    pub dirs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
}
