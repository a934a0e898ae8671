mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Suite, VerifyOptions};
use config::ModelKind;

/// Solvers and verification suites for initial-boundary value problems with
/// dynamic boundary conditions.
#[derive(Parser)]
#[command(name = "aibvp", version)]
struct Cli {
    /// More log output on stderr (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Run all data-parallel loops on the main thread
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a configured scenario and write trajectory.csv, report.json, run.log
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite and print (or write) the JSON report
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, value_enum, default_value = "heat")]
        model: ModelKind,
        /// Grid nodes (default 33, or 129 for the sweep suite)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        d: f64,
        /// Multiplies every tolerance
        #[arg(long = "tol-scale", visible_alias = "tol", default_value_t = 1.0)]
        tol_scale: f64,
        /// Seed of the random draws (else AIBVP_SEED, else 42)
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for report.json instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid refinement study, writes convergence.csv
    Convergence {
        #[arg(long, value_enum, default_value = "heat")]
        model: ModelKind,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Observation time of the heat study
        #[arg(long, default_value_t = 0.1)]
        t: f64,
        /// Transport coefficient of the Dirichlet-map study
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Spectral-bound sweep over (k, c, d), writes sweep.csv
    Sweep {
        /// Comma list or lo:hi:step
        #[arg(long, default_value = commands::SWEEP_K, allow_hyphen_values = true)]
        k: String,
        #[arg(long, default_value = commands::SWEEP_CD, allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value = commands::SWEEP_CD, allow_hyphen_values = true)]
        d: String,
        #[arg(long, default_value_t = commands::SWEEP_NODES)]
        n: usize,
        #[arg(long, default_value_t = aibvp::verify::DEFAULT_BAND)]
        band: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(command: Command) -> Result<(), error::CliError> {
    match command {
        Command::Solve { config, out } => commands::solve(&config, &out),
        Command::Verify { suite, model, n, k, c, d, tol_scale, seed, out } => {
            commands::verify(&VerifyOptions { suite, model, n_nodes: n, params: (k, c, d), tol_scale, seed, out })
        }
        Command::Convergence { model, levels, t, k, out } => commands::convergence(model, levels, t, k, &out),
        Command::Sweep { k, c, d, n, band, out } => commands::sweep(&k, &c, &d, n, band, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();

    let result = if cli.sequential { aibvp::exec::with_sequential(|| run(cli.command)) } else { run(cli.command) };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aibvp: {e}");
            e.exit_code()
        }
    }
}
