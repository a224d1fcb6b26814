use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stableprod::units::Units;
use stableprod::{StabilityIndex, Workers};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "stableprod",
    version,
    about = "Monte Carlo experiments on suprema of products of symmetric stable processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// P(S_n ≤ ε) over a list of ε, with the fitted persistence exponent.
    Persist(PersistArgs),
    /// P(S_n ≥ x) over a list of x, divided by the large-deviation shape.
    Tails(TailsArgs),
    /// Last sign change g_1: small-r density slope and CDF.
    Gtime(GtimeArgs),
    /// Survival P(T_0 ≥ t) of a path started above zero.
    Passage(PassageArgs),
    /// Rescaled pre-g_1 path against the matching bridge.
    BridgeCheck(BridgeCheckArgs),
    /// Mellin transform of a product of |standard normal| variables.
    Mellin(MellinArgs),
    /// Tail of a product of two Pareto variables.
    XyCheck(XyArgs),
    /// Every experiment at one budget.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Unit system for positions and thresholds on the command line. Only
/// matters for α = 2, where `standard` means variance-`t` Brownian motion and
/// `native` the variance-`2t` process that is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitsArg {
    Standard,
    Native,
}

impl From<UnitsArg> for Units {
    fn from(u: UnitsArg) -> Units {
        match u {
            UnitsArg::Standard => Units::Standard,
            UnitsArg::Native => Units::Native,
        }
    }
}

/// Output destination and shape; never part of the recorded configuration.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads, 0 for all cores. Changes wall time only.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

impl OutputArgs {
    pub fn workers(&self) -> Workers {
        Workers::new(self.workers)
    }

    pub fn validate(&self) -> CliResult<()> {
        if let Some(path) = &self.out {
            if path.is_dir() {
                return Err(CliError::Config(format!(
                    "--out {} is a directory",
                    path.display()
                )));
            }
            let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
            if let Some(dir) = parent {
                if !dir.is_dir() {
                    return Err(CliError::Config(format!(
                        "--out: directory {} does not exist",
                        dir.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Options shared by the simulation subcommands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Stability index in (0, 2].
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Grid steps per path.
    #[arg(long, default_value_t = 4096)]
    pub steps: usize,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = UnitsArg::Standard)]
    pub units: UnitsArg,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

impl RunConfig {
    pub fn index(&self) -> CliResult<StabilityIndex> {
        Ok(StabilityIndex::new(self.alpha)?)
    }

    pub fn units(&self) -> Units {
        self.units.into()
    }

    pub fn validate(&self) -> CliResult<()> {
        self.index()?;
        if self.steps == 0 {
            return Err(CliError::Config("--steps must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(CliError::Config("--samples must be positive".into()));
        }
        self.output.validate()
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PersistArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
    /// Number of processes in the product.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Thresholds ε, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..,
          default_values_t = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625])]
    pub eps: Vec<f64>,
    /// Also run at 2 × steps on fresh paths and report the gap.
    #[arg(long)]
    pub refine: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TailsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Thresholds x, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [2.0, 3.0, 4.0])]
    pub x: Vec<f64>,
    #[arg(long)]
    pub refine: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GtimeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
    /// Points r at which the CDF of g_1 is reported.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.25, 0.5])]
    pub r: Vec<f64>,
    /// Histogram bin edges for the density slope fit.
    #[arg(long, value_delimiter = ',', num_args = 1..,
          default_values_t = [0.0009765625, 0.001953125, 0.00390625, 0.0078125,
                              0.015625, 0.03125, 0.0625, 0.125, 0.25])]
    pub edges: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PassageArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
    /// Starting point, above zero.
    #[arg(long, default_value_t = 1.0)]
    pub start: f64,
    /// Times t, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [1.0, 4.0, 16.0])]
    pub t: Vec<f64>,
    /// Simulation horizon; defaults to the largest t.
    #[arg(long)]
    pub horizon: Option<f64>,
}

impl PassageArgs {
    pub fn horizon(&self) -> f64 {
        self.horizon
            .unwrap_or_else(|| self.t.iter().cloned().fold(f64::NAN, f64::max))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BridgeCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
    /// Samples used in each comparison.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    /// Lower edge of the |a| bin (width 0.1) conditioned on when α < 2.
    #[arg(long, default_value_t = 0.1)]
    pub a_bin: f64,
    /// Grid steps of the reference bridges.
    #[arg(long, default_value_t = 16)]
    pub bridge_steps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MellinArgs {
    /// Exponents ν > -1.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.5, 1.0, 2.0])]
    pub nu: Vec<f64>,
    /// Numbers of factors.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [1u32, 2, 3])]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct XyArgs {
    /// Pareto index ν > 0.
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Thresholds z ≥ 1.
    #[arg(long, value_delimiter = ',', num_args = 1..,
          default_values_t = [std::f64::consts::E, 10.0, 1e6])]
    pub z: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
}
