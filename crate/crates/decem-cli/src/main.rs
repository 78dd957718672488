//! `decem` — simulate, verify and analyze the lattice Maxwell system.
//!
//! Exit codes: 0 success, 2 input parse error, 3 scenario validation error,
//! 4 failed verification or analytic check.

mod scenario;
mod simulate;
mod torus_cmd;
mod verify_cmd;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or syntactically invalid input.
    Parse(String),
    /// Well-formed input describing an inconsistent scenario.
    Validation(String),
    /// A verification or analytic acceptance check failed.
    Check(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Check(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Validation(m) | CliError::Check(m) | CliError::Io(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "decem",
    about = "Discrete exterior calculus Maxwell system: simulation, verification, torus analytics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and export the component time series.
    Simulate {
        /// Scenario description (JSON).
        scenario: PathBuf,
        /// Trajectory CSV path (overrides the scenario's `run.csv`).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Per-step diagnostics JSON path (overrides `run.diagnostics`).
        #[arg(long)]
        diagnostics: Option<PathBuf>,
        /// Also write a long-format (t,series,value) CSV for plotting.
        #[arg(long, value_name = "PATH")]
        emit_plot_data: Option<PathBuf>,
    },
    /// Run the randomized operator-identity suite.
    Verify {
        /// Comma-separated lattice sizes, e.g. "2x2x2,4x4x4,6x6".
        #[arg(long)]
        sizes: Option<String>,
        /// Trials per check.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// RNG seed (reports are byte-identical for a fixed seed).
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Export the torus matrices, eigen report and solution comparison.
    Torus {
        /// End time of the comparison trajectory.
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        /// RK4 step for the comparison trajectory.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Initial reduced state: "random", "h1".."h9", or nine
        /// comma-separated numbers.
        #[arg(long, default_value = "random")]
        x0: String,
        /// Seed for "--x0 random".
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output directory (created if missing).
        #[arg(long, default_value = "torus-out")]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            scenario,
            csv,
            diagnostics,
            emit_plot_data,
        } => simulate::run(&scenario, csv, diagnostics, emit_plot_data),
        Command::Verify {
            sizes,
            trials,
            seed,
            report,
        } => verify_cmd::run(sizes.as_deref(), trials, seed, report),
        Command::Torus {
            t_end,
            dt,
            x0,
            seed,
            out_dir,
        } => torus_cmd::run(t_end, dt, &x0, seed, &out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
