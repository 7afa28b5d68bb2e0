use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::parse::{parse_angle, BinMap, parse_binning, parse_dims, parse_thetas, parse_unit_interval, StateSpec};

/// Fixed master seed so that runs without `--seed` are reproducible.
pub const DEFAULT_SEED: u64 = 20_060_707;

pub const DEFAULT_SHOTS: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "ghz",
    version,
    about = "GHZ correlations of the photon-number triplet c0|001> + c1|110>"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// F from binary (or binned s-level) phase measurements
    #[command(args_override_self = true)]
    Discrete(DiscreteArgs),
    /// F from sign-binned homodyne quadratures
    #[command(args_override_self = true)]
    Homodyne(HomodyneArgs),
    /// Evolve the pump photon and report the generated triplet
    #[command(args_override_self = true)]
    Evolve(EvolveArgs),
    /// Best local-hidden-variable value of F
    #[command(args_override_self = true)]
    Lhv(LhvArgs),
    /// Smallest detector efficiency that still violates F <= 2
    #[command(args_override_self = true)]
    Threshold(ThresholdArgs),
    /// Monte Carlo homodyne shots and the sampled F
    #[command(args_override_self = true)]
    Sample(SampleArgs),
    /// F over a grid of c0 values
    #[command(args_override_self = true)]
    Scan(ScanArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Discrete(_) => "discrete",
            Command::Homodyne(_) => "homodyne",
            Command::Evolve(_) => "evolve",
            Command::Lhv(_) => "lhv",
            Command::Threshold(_) => "threshold",
            Command::Sample(_) => "sample",
            Command::Scan(_) => "scan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArrangementArg {
    /// +yyx -xxx -yxy -xyy
    #[value(name = "eq14", alias = "triplet")]
    Eq14,
    /// +xxx -yyx -yxy -xyy
    #[value(name = "eq1", alias = "mermin")]
    Eq1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Beamsplitter,
    DetectorFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasurementArg {
    Discrete,
    Homodyne,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Flat key=value file; keys are flag names, flags on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Real c0 in [0, 1]; c1 = sqrt(1 - c0^2)
    #[arg(long, value_parser = parse_unit_interval, conflicts_with = "state")]
    pub c0: Option<f64>,
    /// maximal | c0=VALUE | evolve:chi_t=VALUE
    #[arg(long)]
    pub state: Option<StateSpec>,
}

impl StateArgs {
    pub fn spec(&self) -> StateSpec {
        match (self.c0, self.state) {
            (Some(c0), _) => StateSpec::C0(c0),
            (None, Some(s)) => s,
            (None, None) => StateSpec::Maximal,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ArrangementArgs {
    #[arg(long, value_enum, default_value_t = ArrangementArg::Eq14)]
    pub arrangement: ArrangementArg,
    /// Phase-reference angle for an x setting (radians)
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub x_angle: Option<f64>,
    /// Phase-reference angle for a y setting (radians)
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub y_angle: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct AngleArgs {
    /// Offset added to theta1 in every term, which shifts psi0 (radians)
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, conflicts_with = "thetas")]
    pub psi0: Option<f64>,
    /// Per-mode offsets theta1,theta2,theta3 added to every term (radians)
    #[arg(long, value_parser = parse_thetas, allow_hyphen_values = true)]
    pub thetas: Option<[f64; 3]>,
}

impl AngleArgs {
    pub fn offsets(&self) -> [f64; 3] {
        match (self.psi0, self.thetas) {
            (Some(p), _) => [p, 0.0, 0.0],
            (None, Some(t)) => t,
            (None, None) => [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PhaseArgs {
    /// Phase states per mode are s + 1
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    /// Bin of each phase index, e.g. 0,0,1,1 (default: contiguous halves)
    #[arg(long, value_parser = parse_binning)]
    pub binning: Option<BinMap>,
}

#[derive(Debug, Clone, Args)]
pub struct EfficiencyArgs {
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = LossArg::Beamsplitter)]
    pub loss: LossArg,
}

#[derive(Debug, Clone, Args)]
pub struct DiscreteArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[command(flatten)]
    pub angles: AngleArgs,
    #[command(flatten)]
    pub phase: PhaseArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct HomodyneArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[command(flatten)]
    pub angles: AngleArgs,
    #[command(flatten)]
    pub efficiency: EfficiencyArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::ClosedForm)]
    pub method: MethodArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    /// Dimensionless times chi*t, comma separated
    #[arg(long, value_parser = parse_angle, value_delimiter = ',', allow_hyphen_values = true, default_value = "pi/4")]
    pub chi_t: Vec<f64>,
    /// Fock truncation per mode
    #[arg(long, value_parser = parse_dims, default_value = "2x2x2")]
    pub dims: [usize; 3],
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LhvArgs {
    #[arg(long, value_enum, default_value_t = ArrangementArg::Eq14)]
    pub arrangement: ArrangementArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[arg(long, value_enum, default_value_t = LossArg::DetectorFailure)]
    pub loss: LossArg,
    #[arg(long, value_enum, default_value_t = MethodArg::ClosedForm)]
    pub method: MethodArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[command(flatten)]
    pub angles: AngleArgs,
    #[command(flatten)]
    pub efficiency: EfficiencyArgs,
    /// Shots per measurement setting
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub n_shots: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Explicit c0 values, comma separated; overrides the linear grid
    #[arg(long = "c0", value_parser = parse_unit_interval, value_delimiter = ',')]
    pub c0_values: Vec<f64>,
    #[arg(long, value_parser = parse_unit_interval, default_value_t = 0.0)]
    pub c0_start: f64,
    #[arg(long, value_parser = parse_unit_interval, default_value_t = 1.0)]
    pub c0_stop: f64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = MeasurementArg::Discrete)]
    pub measurement: MeasurementArg,
    #[command(flatten)]
    pub arrangement: ArrangementArgs,
    #[command(flatten)]
    pub angles: AngleArgs,
    #[command(flatten)]
    pub phase: PhaseArgs,
    #[command(flatten)]
    pub efficiency: EfficiencyArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::ClosedForm)]
    pub method: MethodArg,
    #[command(flatten)]
    pub output: OutputArgs,
}
