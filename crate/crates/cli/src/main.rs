//! `plateflow`: batch runs of the time-periodic fluid-plate solvers.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use plateflow_cli::{commands, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "plateflow", version, about = "Time-periodic viscous flow over a damped elastic plate")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; falls back to PLATEFLOW_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed of the validation suite; overrides `[validate] seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Linear fluid-plate problem with data (f, g, h).
    SolveLinear,
    /// Nonlinear problem by fixed-point iteration.
    SolveNonlinear,
    /// Boundedness scan of the plate multiplier.
    MultiplierScan,
    /// Damped and undamped multipliers on a small lattice.
    ResonanceReport,
    /// Divergence lift of the data g.
    LiftDiv,
    /// Runs the validation oracles.
    Validate,
}

fn threads(cli: &Cli) -> Result<Option<usize>, CliError> {
    if let Some(n) = cli.threads {
        return Ok(Some(n));
    }
    match std::env::var("PLATEFLOW_THREADS") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| CliError::Config(format!("PLATEFLOW_THREADS = '{s}' is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = threads(cli)? {
        if n == 0 {
            return Err(CliError::Config("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut sc = ScenarioConfig::load(path)?;
    if let Some(seed) = cli.seed {
        sc.validate.seed = seed;
    }
    let out = cli.out.clone().unwrap_or_else(|| sc.output.dir.clone());
    match cli.command {
        Command::SolveLinear => commands::solve_linear(&sc, &out),
        Command::SolveNonlinear => commands::solve_nonlinear(&sc, &out),
        Command::MultiplierScan => {
            commands::check_lattice(&sc, "scan")?;
            commands::multiplier_scan(&sc, &out)
        }
        Command::ResonanceReport => {
            commands::check_lattice(&sc, "resonance")?;
            commands::resonance(&sc, &out)
        }
        Command::LiftDiv => commands::lift_div(&sc, &out),
        Command::Validate => commands::validate(&sc, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
