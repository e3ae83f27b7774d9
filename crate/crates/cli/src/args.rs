use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use warpgeo::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "warpgeo", version, about = "Rao-Fisher geometry of location-scale models")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Model name: normal, vmf or rgauss.
    #[arg(long, global = true)]
    pub model: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; relative paths resolve under $WARPGEO_OUT_DIR when it is set.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A single σ or a grid `min:max:count:log|lin`.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SigmaSpec {
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,

    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Warp coefficients I0, I1 and their derivatives.
    Coeffs(SigmaSpec),

    /// Sectional curvatures of the slice and mixed planes.
    Curvature(SigmaSpec),

    /// Samples the geodesic from (point, σ) with the given initial velocity.
    Geodesic {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        /// Base velocity in chart components.
        #[arg(long, allow_hyphen_values = true)]
        velocity: String,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        sigma_rate: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        /// Number of intervals between t = 0 and t_max.
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },

    /// Rao distance between (point, σ) and (to, to-sigma).
    Distance {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, allow_negative_numbers = true)]
        to_sigma: f64,
    },

    /// I1-scaled base distance between two locations at a common σ.
    ExtrinsicDistance {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
    },

    /// Fréchet mean of the points in a file (base coordinates, σ, optional weight per line).
    Mean {
        #[arg(long)]
        input: PathBuf,
    },

    /// Natural-gradient estimate over a sample file or a generated stream.
    Estimate {
        /// Base points, one per line; without it the stream is drawn from the truth.
        #[arg(long, conflicts_with_all = ["truth", "truth_sigma"])]
        input: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, requires = "truth_sigma")]
        truth: Option<String>,
        #[arg(long, allow_negative_numbers = true, requires = "truth")]
        truth_sigma: Option<f64>,
        /// Initial estimate.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        /// Stream length when generating.
        #[arg(short, long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        gain: f64,
        #[arg(long, default_value_t = 1.0)]
        clip: f64,
        /// Emit every k-th step; by default powers of two and the last step.
        #[arg(long)]
        every: Option<usize>,
    },

    /// Draws base points from p(· | point, σ).
    Sample {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(short, long, default_value_t = 1000)]
        n: usize,
    },

    /// Monte-Carlo Fisher information against the analytic coefficients.
    ValidateFisher {
        #[command(flatten)]
        sigma: SigmaSpec,
        /// Location; defaults to the base origin.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(short, long, default_value_t = 100_000)]
        n: usize,
    },

    /// Completeness of the model at σ → 0 and σ → ∞ (all models when --model is absent).
    Completeness,
}
