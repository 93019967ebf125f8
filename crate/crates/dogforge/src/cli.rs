use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Angle;

#[derive(Debug, Parser)]
#[command(
    name = "dogforge",
    version,
    about = "Synthesize and benchmark doubly geometric qubit gates"
)]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Accepted for scripts; every run is deterministic.
    #[arg(long, global = true)]
    pub seedless: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a design and write its bundle.
    Synth(DesignArgs),
    /// Fidelity against detuning or amplitude error for a list of designs.
    Sweep(SweepArgs),
    /// Error curve, Frenet data and fields of one design.
    Curve(DesignArgs),
    /// Closed-form vs simulated toy-model fidelities.
    Toy(ToyArgs),
    /// Geometric phase of the twisted family against the twist.
    PhaseMap(PhaseMapArgs),
    /// Re-check every design invariant on a stored bundle.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Twisted,
    Orange,
    Standard,
    StandardSech,
}

impl FamilyArg {
    pub fn name(self) -> &'static str {
        match self {
            FamilyArg::Twisted => "twisted",
            FamilyArg::Orange => "orange",
            FamilyArg::Standard => "standard",
            FamilyArg::StandardSech => "standard-sech",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConstructionArgs {
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Half width of each sech window (twisted family).
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Twist parameter, e.g. `pi/2000`.
    #[arg(long)]
    pub xi: Option<Angle>,
    /// Relative phase of the second half, e.g. `0.5pi`.
    #[arg(long)]
    pub phi0: Option<Angle>,
    #[command(flatten)]
    pub construction: ConstructionArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Detuning,
    Amplitude,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
    /// Comma-separated `twisted:XI`, `orange:PHI0`, `standard:PHI0`,
    /// `standard-sech:PHI0` or `bundle:PATH`.
    #[arg(long, num_args = 1..)]
    pub designs: Vec<String>,
    #[arg(long)]
    pub rate_min: Option<f64>,
    #[arg(long)]
    pub rate_max: Option<f64>,
    #[arg(long)]
    pub rate_count: Option<usize>,
    #[command(flatten)]
    pub construction: ConstructionArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ToyArgs {
    #[arg(long, value_delimiter = ',')]
    pub phi: Vec<Angle>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PhaseMapArgs {
    #[arg(long)]
    pub xi_min: Option<Angle>,
    #[arg(long)]
    pub xi_max: Option<Angle>,
    #[arg(long)]
    pub count: Option<usize>,
    #[command(flatten)]
    pub construction: ConstructionArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    pub bundle: PathBuf,
}
