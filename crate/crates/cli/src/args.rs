use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cptwb", version, about = "Numerical workbench for quantum channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Horn,
    Szarek,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Report entropies in bits (computation stays in nats).
    #[arg(long, global = true)]
    pub bits: bool,

    /// Seed for channel construction and the optimizer.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ChannelArgs {
    /// Zoo family, e.g. werner_holevo, depolarized_wh, fss_psi, shift_subunitary.
    #[arg(long)]
    pub family: Option<String>,

    #[arg(long)]
    pub dim: Option<usize>,

    #[arg(long)]
    pub x: Option<f64>,

    #[arg(long)]
    pub epsilon: Option<f64>,

    /// JSON list of (d-1)x(d-1) unitaries for shift_subunitary.
    #[arg(long)]
    pub unitaries_file: Option<PathBuf>,

    /// Cycles for shift_subunitary, e.g. "1,2,3;1,3,4".
    #[arg(long)]
    pub cycles: Option<String>,

    /// Channel JSON file (Kraus schema) instead of a family.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Skip the CPT check when loading --input.
    #[arg(long)]
    pub no_validate: bool,
}

#[derive(Debug, Args, Clone, Default)]
pub struct SecondChannelArgs {
    /// Second factor; defaults to the first channel.
    #[arg(long)]
    pub family_b: Option<String>,

    #[arg(long)]
    pub dim_b: Option<usize>,

    #[arg(long)]
    pub x_b: Option<f64>,

    #[arg(long)]
    pub input_b: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,

    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,

    #[arg(long, default_value_t = 200)]
    pub tensor_restarts: usize,

    /// Largest input dimension allowed for a tensor product search.
    #[arg(long, default_value_t = 256)]
    pub tensor_cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions, Choi rank, CPT residuals and extremality of a channel.
    Info {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Write the Kraus operators to this file.
        #[arg(long)]
        dump_kraus: Option<PathBuf>,
    },
    /// Maximal output p-norm.
    Numax {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Minimal output Rényi entropy.
    Smin {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Multiplicativity of the maximal output p-norm at one p.
    Multcheck {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        second: SecondChannelArgs,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[arg(long)]
        p: f64,
    },
    /// Multiplicativity over a grid of p with threshold bisection.
    Multscan {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        second: SecondChannelArgs,
        #[command(flatten)]
        opt: OptimizerArgs,
        /// start:stop:step, endpoints inclusive.
        #[arg(long)]
        p_grid: String,
    },
    /// Horn or two-block decomposition of a PSD matrix or Choi matrix.
    Decompose {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, value_enum, default_value_t = Mode::Szarek)]
        mode: Mode,
    },
    /// Extremality test, optionally perturbing onto an extreme point.
    Extremality {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Starting ε for the perturbation search.
        #[arg(long)]
        perturb: Option<f64>,
        #[arg(long)]
        dump_kraus: Option<PathBuf>,
    },
    /// Complementary channel.
    Complement {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Random pure inputs used to compare output spectra.
        #[arg(long, default_value_t = 20)]
        probes: usize,
        #[arg(long)]
        dump_kraus: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Info { .. } => "info",
            Command::Numax { .. } => "numax",
            Command::Smin { .. } => "smin",
            Command::Multcheck { .. } => "multcheck",
            Command::Multscan { .. } => "multscan",
            Command::Decompose { .. } => "decompose",
            Command::Extremality { .. } => "extremality",
            Command::Complement { .. } => "complement",
        }
    }
}
