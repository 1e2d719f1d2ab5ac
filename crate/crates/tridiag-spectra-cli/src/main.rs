//! Command-line interface to the tridiagonal-operator library: coefficient
//! tables, finite-section spectra against closed-form predictions, named
//! verification suites, and lattice-transform tables.
//!
//! Exit codes: 0 = report produced and all checks passed, 1 = report
//! produced but a check failed, 2 = usage or configuration error.

// Range guards are written `!(x > 0.0)` on purpose: the negation rejects
// NaN along with the out-of-range sign, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod verify;

use clap::{Parser, Subcommand};

use crate::commands::{cmd_coeffs, cmd_spectrum, cmd_transform, CommandOutput};
use crate::config::{resolve, CommonArgs};
use crate::verify::cmd_verify;

#[derive(Parser)]
#[command(
    name = "tridiag-spectra",
    version,
    about = "Tridiagonal operators from pairs of orthogonal-polynomial families: \
             coefficients, truncated spectra, and transform identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate connection coefficients and operator coefficients.
    Coeffs(CommonArgs),
    /// Compare a finite-section spectrum with its closed-form prediction.
    Spectrum(CommonArgs),
    /// Run the verification suites, one pass/fail line per check.
    Verify(CommonArgs),
    /// Tabulate the lattice transform of one polynomial against its
    /// closed form (bounded q-case).
    Transform(CommonArgs),
}

/// Sizes the global worker pool from `TRIDIAG_SPECTRA_THREADS` when set.
/// Results are identical for any thread count; the variable only trades
/// wall time for cores.
fn configure_threads() -> Result<(), String> {
    let raw = match std::env::var("TRIDIAG_SPECTRA_THREADS") {
        Ok(raw) => raw,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => return Err(format!("TRIDIAG_SPECTRA_THREADS: {e}")),
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            format!("TRIDIAG_SPECTRA_THREADS must be a positive integer, got `{raw}`")
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("cannot configure the worker pool: {e}"))
}

fn run(cli: &Cli) -> Result<CommandOutput, String> {
    match &cli.command {
        Command::Coeffs(args) => cmd_coeffs(&resolve(args)?),
        Command::Spectrum(args) => cmd_spectrum(&resolve(args)?),
        Command::Verify(args) => cmd_verify(&resolve(args)?),
        Command::Transform(args) => cmd_transform(&resolve(args)?),
    }
}

fn main() {
    if let Err(message) = configure_threads() {
        eprintln!("{message}");
        std::process::exit(2);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            std::process::exit(if out.pass { 0 } else { 1 });
        }
        Err(message) => {
            eprintln!("{message}");
            std::process::exit(2);
        }
    }
}
