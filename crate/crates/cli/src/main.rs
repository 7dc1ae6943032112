//! platelab: spectral runs for the vibrating plate equation.
//!
//! Global lattice flags feed every subcommand; a flat `key = value` config
//! file may supply any long option, with explicit command-line flags taking
//! precedence. Every run writes `manifest.txt` with the fully resolved
//! configuration. Exit codes: 0 success, 1 operational error, 2 an experiment
//! returned an Inconsistent verdict.

mod config;
mod runs;

use std::process::ExitCode;

fn main() -> ExitCode {
    let argv = match config::resolve_argv(std::env::args().collect()) {
        Ok(argv) => argv,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(1);
        }
    };
    let cli = match config::parse(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own message (including --help/--version).
            let _ = err.print();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match runs::dispatch(cli) {
        Ok(runs::Outcome::Success) => ExitCode::SUCCESS,
        Ok(runs::Outcome::InconsistentVerdict) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
