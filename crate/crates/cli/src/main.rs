use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ostro_cli::check::{check, Suite};
use ostro_cli::config::{DualizeConfig, ScenarioConfig};
use ostro_cli::{check_environment, dualize::dualize, read_config, run::run, CliError};

/// Higher-order Lagrangian scenarios, residual checks and dualization
/// tables.
#[derive(Parser)]
#[command(name = "ostro", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and export the trajectory as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.path`; without either the CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a residual check suite.
    Check {
        /// duality, euler-lagrange, hamilton, zermelo, transform or energy.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate H₀ and the momentum hessian spectrum at sample points.
    Dualize {
        #[arg(long)]
        config: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    check_environment()?;
    let stdout = &mut std::io::stdout().lock();
    let stderr = &mut std::io::stderr().lock();
    match cli.command {
        Command::Run { config, out } => {
            let cfg = ScenarioConfig::from_text(&read_config(&config)?)?;
            run(&cfg, out.as_deref(), stdout, stderr)
        }
        Command::Check { suite, config } => {
            let suite = Suite::parse(&suite)?;
            let cfg = ScenarioConfig::from_text(&read_config(&config)?)?;
            check(&cfg, suite, stdout)
        }
        Command::Dualize { config } => {
            let cfg = DualizeConfig::from_text(&read_config(&config)?)?;
            dualize(&cfg, stdout)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
