use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hadamard_bvp::cli::{self, Exit};

/// Checks and solves singular Hadamard fractional two-point problems.
///
/// Log verbosity is read from `HBVP_LOG` (e.g. `HBVP_LOG=info`).
#[derive(Debug, Parser)]
#[command(name = "hbvp", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the admissibility conditions for a problem file.
    Check { file: PathBuf },
    /// Solve a problem file and write the solution grid as CSV.
    Solve {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Certify the envelope bounds of the Green's function on a grid.
    ValidateGreen {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Residual of a solution CSV against its problem file.
    Residual { file: PathBuf, csv: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("HBVP_LOG")).init();
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(Exit::InputError.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match args.command {
        Command::Check { file } => cli::cmd_check(&file, &mut out),
        Command::Solve { file, out: csv } => cli::cmd_solve(&file, &csv, &mut out),
        Command::ValidateGreen { a, b, mu, grid } => cli::cmd_validate_green(a, b, mu, grid, &mut out),
        Command::Residual { file, csv } => cli::cmd_residual(&file, &csv, &mut out),
    };
    let _ = out.flush();
    let exit = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit
    });
    ExitCode::from(exit.code() as u8)
}
