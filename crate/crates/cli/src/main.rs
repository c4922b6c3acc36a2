//! `quenchlab`: batch driver for the quench and critical-point pipelines.
//!
//! Every subcommand writes its results under `--out-dir` as `curves.csv`
//! and/or `estimate.json`, plus a `manifest.json` that records the exact
//! arguments so the run can be repeated with `quenchlab replay`.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quenchlab::Error;

#[derive(Parser, Debug)]
#[command(
    name = "quenchlab",
    version,
    about = "Quench dynamics of transverse-field Ising chains"
)]
pub struct Cli {
    /// Directory for curves.csv, estimate.json and manifest.json.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// dG_av/dB curves from the exact free-fermion solution, with crossing
    /// and collapse estimates.
    ExactSweep(ExactSweepArgs),
    /// dG_av/dB curves from state-vector quenches at B +- delta_b.
    SvSweep(SvSweepArgs),
    /// Ground-state Binder cumulant curves and their crossing.
    Binder(BinderArgs),
    /// First-order mean-field critical fields.
    Meanfield(MeanfieldArgs),
    /// Quasiparticle dispersion table.
    Dispersion(DispersionArgs),
    /// GGE stationary correlator across a field grid.
    Gge(GgeArgs),
    /// A single state-vector quench: G(t) and G_av(t).
    Quench(QuenchArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Nn,
    Nnn,
    Lr,
}

#[derive(Args, Debug, Clone)]
pub struct FieldGrid {
    #[arg(long)]
    pub b_min: f64,
    #[arg(long)]
    pub b_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub b_step: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "nn")]
    pub family: Family,
    /// Next-nearest-neighbour coupling Delta / J.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Long-range exponent.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ExactSweepArgs {
    #[arg(long = "L")]
    pub sites: usize,
    #[command(flatten)]
    pub grid: FieldGrid,
    /// Comma-separated Jt values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct SvSweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "L")]
    pub sites: usize,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Defaults to the largest requested time.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[command(flatten)]
    pub grid: FieldGrid,
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
    #[arg(long, default_value_t = quenchlab::scaling::DEFAULT_DELTA_B)]
    pub delta_b: f64,
}

#[derive(Args, Debug, Clone)]
pub struct BinderArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated chain lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[command(flatten)]
    pub grid: FieldGrid,
}

#[derive(Args, Debug, Clone)]
pub struct MeanfieldArgs {
    #[arg(long)]
    pub delta: f64,
}

#[derive(Args, Debug, Clone)]
pub struct DispersionArgs {
    #[arg(long = "B")]
    pub field: f64,
    /// Tabulate the antiperiodic momenta of a ring of this length instead of
    /// a uniform grid on [0, pi].
    #[arg(long = "L")]
    pub sites: Option<usize>,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

#[derive(Args, Debug, Clone)]
pub struct GgeArgs {
    #[arg(long = "L")]
    pub sites: usize,
    #[command(flatten)]
    pub grid: FieldGrid,
    /// Thermal occupations at inverse temperature --beta.
    #[arg(long, conflicts_with_all = ["polarized", "occupations"])]
    pub thermal: bool,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Occupations of the quench from the x-polarized state (default).
    #[arg(long, conflicts_with = "occupations")]
    pub polarized: bool,
    /// Explicit occupations, one per full-zone antiperiodic momentum.
    #[arg(long, value_delimiter = ',')]
    pub occupations: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
pub struct QuenchArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "L")]
    pub sites: usize,
    #[arg(long = "B")]
    pub field: f64,
    #[arg(long, default_value_t = 9.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Also write the final amplitudes as a binary checkpoint.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Exit status for an error: 2 usage, 3 numerical, 4 resource limit.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        e if e.is_numerical() => 3,
        Error::MemoryBudget { .. } => 4,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Checkpoint(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
