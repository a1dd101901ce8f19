//! Command-line laboratory driver. Every subcommand runs one experiment,
//! writes `summary.json`, `timings.json`, and CSV/SVG artifacts into the
//! output directory, and exits 0 when all indicators pass, 1 when a numeric
//! check fails, 2 on usage errors, and 3 when a solver breaks down.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod experiments;
mod report;
mod svg;

use config::{Config, ConfigError};
use experiments::Ctx;

#[derive(Debug)]
pub enum Failure {
    /// Bad invocation or configuration; exit code 2.
    Usage(String),
    /// The experiment could not be carried out; exit code 3.
    Run(String),
}

impl Failure {
    fn io(e: std::io::Error) -> Self {
        Failure::Run(format!("io error: {e}"))
    }
}

impl From<viscolab::Error> for Failure {
    fn from(e: viscolab::Error) -> Self {
        match e {
            viscolab::Error::Invalid(m) => Failure::Usage(m),
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "viscolab",
    about = "Numerical experiments probing boundary identifiability of viscosity",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// INI-style experiment configuration
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for summary.json, timings.json, CSV and SVG artifacts
    #[arg(long, value_name = "DIR", default_value = "report")]
    out: PathBuf,
    /// RNG seed; overrides the [experiment] section
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Grid override as NR,NT or NRxNT; overrides the [experiment] section
    #[arg(long, value_name = "NR,NT")]
    resolution: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Velocity solves against manufactured flows and rigid-rotation checks
    ForwardStokes(CommonArgs),
    /// Fourth-order potential solves against closed-form fields
    ForwardPlate(CommonArgs),
    /// Flow data to potential data and back through both formulations
    EquivalenceRoundtrip(CommonArgs),
    /// Coefficient identity, first-order system consistency, transport factor
    FirstOrderResidual(CommonArgs),
    /// Solid-transform operators and the second-order constructor
    DbarResidual(CommonArgs),
    /// Deviation of advective solutions from the linear limit as data shrinks
    NseScaling(CommonArgs),
    /// Derivative traces of the potential recovered from boundary data alone
    BoundaryJets(CommonArgs),
    /// Forward data gap between two viscosities vs the refinement floor
    UniquenessProbe(CommonArgs),
    /// Parametric viscosity recovery from synthetic boundary datasets
    Reconstruct(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::ForwardStokes(a)
            | Command::ForwardPlate(a)
            | Command::EquivalenceRoundtrip(a)
            | Command::FirstOrderResidual(a)
            | Command::DbarResidual(a)
            | Command::NseScaling(a)
            | Command::BoundaryJets(a)
            | Command::UniquenessProbe(a)
            | Command::Reconstruct(a) => a,
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let args = cli.command.common();
    let cfg = match &args.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    let seed = match args.seed {
        Some(s) => s,
        None => cfg.seed_default()?,
    };
    let res_override = args
        .resolution
        .as_deref()
        .map(config::parse_resolution)
        .transpose()?;

    std::fs::create_dir_all(&args.out).map_err(Failure::io)?;
    let ctx = Ctx {
        cfg: &cfg,
        out: &args.out,
        seed,
        res_override,
    };

    let report = match &cli.command {
        Command::ForwardStokes(_) => experiments::forward_stokes(&ctx)?,
        Command::ForwardPlate(_) => experiments::forward_plate(&ctx)?,
        Command::EquivalenceRoundtrip(_) => experiments::equivalence_roundtrip(&ctx)?,
        Command::FirstOrderResidual(_) => experiments::first_order_residual(&ctx)?,
        Command::DbarResidual(_) => experiments::dbar_residual(&ctx)?,
        Command::NseScaling(_) => experiments::nse_scaling(&ctx)?,
        Command::BoundaryJets(_) => experiments::boundary_jets(&ctx)?,
        Command::UniquenessProbe(_) => experiments::uniqueness_probe(&ctx)?,
        Command::Reconstruct(_) => experiments::reconstruct(&ctx)?,
    };

    report.write(&ctx.out).map_err(Failure::io)?;
    report.print();
    Ok(report.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
