mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{Ctx, Status};
use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "adiacycle", version, about = "Geometric engine cycles of a slowly driven qubit")]
struct Cli {
    /// TOML configuration file; missing keys take the standard parameters.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed of the optimizer's random starts (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; falls back to ADIACYCLE_THREADS.
    #[arg(long, global = true, env = "ADIACYCLE_THREADS")]
    threads: Option<usize>,
    /// Relative tolerance of the line integrals (overrides the config).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Response coefficients on a field grid.
    Coeffs,
    /// Geometry and figures of merit of the configured curve.
    Eval,
    /// Best ellipse about one center.
    Optimize,
    /// Best ellipse for every center of a grid.
    Scan,
    /// Circular-sector family on an (R, Omega) grid.
    Sector,
    /// Constant speed against the optimal speed profiles.
    Profiles,
    /// Data behind every figure, one CSV each.
    ReproduceFigures,
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tolerance {
        cfg.numerics.tolerance = t;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    let ctx = Ctx::new(cfg, cli.out)?;
    match cli.command {
        Command::Coeffs => commands::coeffs(&ctx),
        Command::Eval => commands::eval(&ctx),
        Command::Optimize => commands::optimize(&ctx),
        Command::Scan => commands::scan(&ctx),
        Command::Sector => commands::sector(&ctx),
        Command::Profiles => commands::profiles(&ctx),
        Command::ReproduceFigures => commands::reproduce_figures(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Partial(n)) => {
            log::error!("{n} cells failed; see the failures file");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
