use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "tempstep",
    version,
    about = "Electron scattering at a smooth temporal potential step (natural units, hbar = c = 1)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scattering probabilities at a single parameter point.
    Scatter(ScatterArgs),
    /// Scan one parameter and stream a CSV table.
    Sweep(SweepArgs),
    /// Write the two figure panels (tau = 1e-4 and tau = 0.5) and a gnuplot script.
    Figure2(Figure2Args),
    /// Run the built-in validation checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct PhysicsArgs {
    /// Electron mass.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub m: f64,
    /// Charge.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub q: f64,
    /// Canonical momentum.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Potential long before the step.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a1: f64,
    /// Potential long after the step.
    #[arg(long, allow_negative_numbers = true)]
    pub a2: Option<f64>,
    /// Centre of the step.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    /// Width of the step.
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    #[value(alias = "csv-row")]
    Csv,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Use the instantaneous (Heaviside) step instead of a finite width.
    #[arg(long, conflicts_with = "tau")]
    pub sharp: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Also integrate the equations of motion and report the deviations.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    P,
    A2,
    Tau,
    EnergyRatio,
}

impl SweepVar {
    pub fn column(self) -> &'static str {
        match self {
            SweepVar::P => "p",
            SweepVar::A2 => "a2",
            SweepVar::Tau => "tau",
            SweepVar::EnergyRatio => "energy_ratio",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[arg(long, value_enum)]
    pub sweep_var: SweepVar,
    #[arg(long, allow_negative_numbers = true)]
    pub start: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: f64,
    #[arg(long)]
    pub count: usize,
    /// Space the points logarithmically.
    #[arg(long)]
    pub log: bool,
    /// For energy-ratio sweeps, take the negative kinetic momentum root.
    #[arg(long)]
    pub negative_branch: bool,
    /// Keep A1 equal to A2 at every point.
    #[arg(long)]
    pub lock_a1: bool,
    /// Compare against the integrator on every k-th row.
    #[arg(long, value_name = "K")]
    pub oracle_every: Option<usize>,
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    pub format: SweepFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureAxis {
    A2,
    P,
}

#[derive(Debug, Args)]
pub struct Figure2Args {
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Horizontal axis: step strength at E1/m = 2, or canonical momentum at fixed A2.
    #[arg(long, value_enum, default_value_t = FigureAxis::A2)]
    pub sweep_var: FigureAxis,
    #[arg(long, allow_negative_numbers = true)]
    pub start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: Option<f64>,
    #[arg(long, default_value_t = 241)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Emit one JSON record per check.
    #[arg(long)]
    pub json: bool,
    /// Shrink every tolerance so the checks fail (exercises the failure path).
    #[arg(long, hide = true)]
    pub break_tolerance: bool,
}
