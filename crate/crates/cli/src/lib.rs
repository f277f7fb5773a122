//! Command-line front end: `calibrate`, `simulate`, `sweep` and
//! `check-design`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{EXIT_CONFIG, EXIT_OK};

/// Parses `argv` and runs the selected command, returning the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };

    let outcome = match &cli.command {
        Command::Calibrate(args) => commands::cmd_calibrate(&cli.global, args),
        Command::Simulate(args) => commands::cmd_simulate(&cli.global, args),
        Command::Sweep(args) => commands::cmd_sweep(&cli.global, args),
        Command::CheckDesign(args) => commands::cmd_check_design(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
