use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use lbd::ModelId;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "lbd", version, about = "Langmuir birth-death processes: exact laws, limits and simulation")]
pub struct Cli {
    /// JSON file with parameters for the subcommand; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the resolved parameters as a JSON config file.
    #[arg(long, global = true)]
    pub write_config: Option<PathBuf>,

    /// Output file (written atomically, with a `.meta.json` sidecar).
    /// Standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Birth, death and noise rates on 0..=N.
    #[command(allow_negative_numbers = true)]
    Rates(ChainArgs),
    /// Exact stationary pmf.
    #[command(allow_negative_numbers = true)]
    Stationary(ChainArgs),
    /// Limit law summary or cdf/pdf table.
    #[command(allow_negative_numbers = true)]
    Limit(LimitArgs),
    /// Gillespie or Euler-Maruyama simulation.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Distances and errors to the limit over a grid of N.
    #[command(allow_negative_numbers = true)]
    Converge(ConvergeArgs),
    /// Partial sums of the incomplete-gamma series.
    #[command(allow_negative_numbers = true)]
    Lemma2(Lemma2Args),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Rates(_) => "rates",
            Command::Stationary(_) => "stationary",
            Command::Limit(_) => "limit",
            Command::Simulate(_) => "simulate",
            Command::Converge(_) => "converge",
            Command::Lemma2(_) => "lemma2",
        }
    }
}

/// Model constants, given directly or as physical Langmuir constants.
#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
pub struct ParamArgs {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c3: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<f64>,
    #[arg(long = "C")]
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

pub const MODEL_KEYS: [&str; 3] = ["c1", "c2", "c3"];
pub const PHYSICAL_KEYS: [&str; 4] = ["d1", "x", "d2", "C"];

#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
pub struct ChainArgs {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelId>,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[arg(long = "N")]
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
pub struct LimitArgs {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelId>,
    /// `c1 / c3`; give with `--b` instead of model constants.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// `(c1 + c2) / c3`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Highest moment order in the summary.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<usize>,
    /// Tabulate cdf and density at `i / points`, `i = 0..=points`, instead of the summary.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ssa,
    Sde,
}

#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Discarded initial time; defaults to a fifth of `t_max`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Write the path instead of the occupation pmf or histogram.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<bool>,
    /// SSA: initial state; defaults to the nearest state to `N c1 / (c1 + c2)`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<usize>,
    /// SSA: independent runs with seeds `seed, seed + 1, ...`, pooled.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    /// SDE: initial value; defaults to the deterministic equilibrium.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
pub struct ConvergeArgs {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelId>,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
pub struct Lemma2Args {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
}
