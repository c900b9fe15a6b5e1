mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Solver and verification lab for symmetric self-shrinkers outside a disk.
#[derive(Parser, Debug)]
#[command(name = "shrinkerlab", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (SHRINKERLAB_OUT takes precedence).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Concurrent runs for sweeps and multi-run checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Accept boundary data above the admissible bound.
    #[arg(long, global = true)]
    pub force: bool,
    /// Write a field snapshot every this many steps.
    #[arg(long, global = true)]
    pub snapshot_every: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the flow to a steady state and write all artifacts.
    Solve,
    /// Solve, then run the verification suite.
    Verify {
        /// Also run the checks that need extra solves (uniqueness
        /// experiment and cone refinement).
        #[arg(long)]
        full: bool,
    },
    /// Eigenvalues, polynomial coefficients and Gram matrices of L.
    Spectrum {
        #[arg(long = "N", default_value_t = 5)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        k_max: u32,
        #[arg(long, default_value_t = 2)]
        l_max: usize,
    },
    /// One solve per parameter value, with convergence orders.
    Sweep {
        /// eps_fraction, eps_scale, nr, resolution or R_max.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        /// Radius below which successive fields are compared.
        #[arg(long, default_value_t = 8.0)]
        drift_cut: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = commands::exit_code(&e);
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
