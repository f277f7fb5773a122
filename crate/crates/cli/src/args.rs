use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "pcacal", version, about = "Closed-form calibration of multi-sensor systems")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default, Clone)]
pub struct GlobalArgs {
    /// Master seed for all random draws.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory receiving output files (created if missing).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,

    /// TOML file with default values for any flag; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Proceed even if the design violates the position/sensor bounds.
    #[arg(long, global = true)]
    pub force: bool,

    /// Clamp Gram eigenvalues at FLOOR x lambda_max instead of failing.
    #[arg(long, global = true, value_name = "FLOOR")]
    pub clamp_gram: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Calibrate sensors from a CSV readings file (rows = sensors, columns = positions).
    Calibrate(CalibrateArgs),
    /// Run a Monte-Carlo simulation of the gyroscope array.
    Simulate(SimArgs),
    /// Repeat the simulation over a list of values of one parameter.
    Sweep(SweepArgs),
    /// Check whether a design has enough positions and sensors.
    CheckDesign(CheckDesignArgs),
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Ambient dimension of the measured quantity.
    #[arg(long)]
    pub dim: Option<usize>,

    /// Magnitude of the measured vector; if omitted, 1 is used and sensor
    /// gains are only determined up to a common factor.
    #[arg(long)]
    pub magnitude: Option<f64>,
}

#[derive(Debug, Args, Default, Clone)]
pub struct SimArgs {
    /// Positions per trial [default: 20]
    #[arg(long)]
    pub positions: Option<usize>,

    /// Reading noise standard deviation [default: 0.001]
    #[arg(long)]
    pub noise_sigma: Option<f64>,

    /// Per-entry perturbation of the nominal sensor axes [default: 0.01]
    #[arg(long)]
    pub axis_sigma: Option<f64>,

    /// Field magnitude at every position [default: 1]
    #[arg(long)]
    pub magnitude: Option<f64>,

    /// Number of Monte-Carlo trials [default: 1000]
    #[arg(long)]
    pub trials: Option<usize>,

    /// Simulate the stationary/rotating two-phase bias removal.
    #[arg(long)]
    pub bias_protocol: bool,

    /// Half-width of the uniform per-sensor bias.
    #[arg(long)]
    pub bias_range: Option<f64>,

    /// Noise of the stationary phase; defaults to --noise-sigma.
    #[arg(long)]
    pub static_noise_sigma: Option<f64>,

    /// Use one perturbed system for every trial.
    #[arg(long)]
    pub fixed_system: bool,

    /// Run trials on a single thread.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    Positions,
    NoiseSigma,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Positions => "positions",
            Self::NoiseSigma => "noise-sigma",
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub vary: Option<SweepAxis>,

    /// Comma-separated values of the swept parameter.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub values: Option<Vec<f64>>,

    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Args)]
pub struct CheckDesignArgs {
    #[arg(long)]
    pub sensors: usize,

    #[arg(long)]
    pub positions: usize,

    #[arg(long)]
    pub dim: usize,
}
