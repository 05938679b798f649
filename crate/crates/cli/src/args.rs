use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zbw_core::bz::RootMethod;
use zbw_core::quantum::{DEFAULT_DT, DEFAULT_T_MAX};
use zbw_core::{Charge, Spin};

#[derive(Parser, Debug, Clone)]
#[command(name = "zbw", version, about = "Zitterbewegung frequency shifts in a weak magnetic field")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Sample the packet's mean position and fit its frequency
    Quantum(QuantumArgs),
    /// Integrate the classical spinning-particle equations
    Classical(ClassicalArgs),
    /// Roots of the classical characteristic cubic
    Roots(RootsArgs),
    /// Energy of a Landau level
    Landau(LandauArgs),
    /// Shift tables, CP verdicts and the quantum/classical discrepancy
    Compare(CompareArgs),
    /// Shift tables over a list of field strengths
    Sweep(SweepArgs),
    /// Fit the frequency content of a trajectory CSV
    Fit(FitArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Dimensionless field ε = −ω_c/ω_zbw (negative for a physical field)
    #[arg(long, allow_hyphen_values = true, conflicts_with = "tesla")]
    pub epsilon: Option<f64>,
    /// Field in tesla, converted to ε
    #[arg(long, allow_hyphen_values = true)]
    pub tesla: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinArg {
    Up,
    Down,
}

impl From<SpinArg> for Spin {
    fn from(s: SpinArg) -> Self {
        match s {
            SpinArg::Up => Spin::Up,
            SpinArg::Down => Spin::Down,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeArg {
    Electron,
    Positron,
}

impl From<ChargeArg> for Charge {
    fn from(c: ChargeArg) -> Self {
        match c {
            ChargeArg::Electron => Charge::Electron,
            ChargeArg::Positron => Charge::Positron,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Exact,
    Rough,
    Accurate,
}

impl From<MethodArg> for RootMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => RootMethod::Exact,
            MethodArg::Rough => RootMethod::Rough,
            MethodArg::Accurate => RootMethod::Accurate,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitArg {
    /// At rest on average, S¹² = s_z
    Rest,
    /// Superposition of the three circular modes
    Modes,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct QuantumArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum, default_value = "up")]
    pub spin: SpinArg,
    #[arg(long, value_enum, default_value = "electron")]
    pub charge: ChargeArg,
    /// Packet width r_o in units of λ_c
    #[arg(long, default_value_t = 100.0)]
    pub r0: f64,
    /// Azimuth φ₀ of the Fourier component
    #[arg(long, default_value_t = 0.0)]
    pub phi0: f64,
    #[arg(long, default_value_t = DEFAULT_T_MAX, allow_hyphen_values = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = DEFAULT_DT, allow_hyphen_values = true)]
    pub dt: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ClassicalArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum, default_value = "up")]
    pub spin: SpinArg,
    /// Proper-time span (default: ten periods of the slow root)
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = std::f64::consts::PI / 100.0, allow_hyphen_values = true)]
    pub dt: f64,
    /// Spacing of recorded samples
    #[arg(long, default_value_t = 0.25)]
    pub sample_every: f64,
    #[arg(long, value_enum, default_value = "modes")]
    pub init: InitArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct RootsArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum, default_value = "up")]
    pub spin: SpinArg,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct LandauArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub l: i64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub pz: f64,
    #[arg(long, value_enum, default_value = "up")]
    pub spin: SpinArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Also fit simulated trajectories from both engines
    #[arg(long)]
    pub fit: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Comma-separated ε values
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub epsilons: Vec<f64>,
    /// Approaches to tabulate (default: all)
    #[arg(long, value_delimiter = ',')]
    pub approaches: Vec<String>,
    /// Worker threads
    #[arg(long, env = "ZBW_JOBS")]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    /// Trajectory CSV written by `quantum` or `classical`
    #[arg(long)]
    pub input: PathBuf,
    /// Seeds a three-mode fit of a classical trajectory with the exact roots
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum, default_value = "up")]
    pub spin: SpinArg,
    #[command(flatten)]
    pub output: OutputArgs,
}
