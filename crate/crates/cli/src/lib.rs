//! Batch commands and the HTTP session service over the `pecr` kernel.

pub mod commands;
pub mod config;
pub mod error;
pub mod service;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::Command;
pub use config::{Format, Global};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "pecr", version, about = "Check, extract and explore program-list proofs")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

/// Runs one invocation and returns the exit code: 0 ok, 2 parse, 3
/// verification, 4 evaluation, 5 internal.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match commands::execute(&cli.command, &cli.global, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "pecr: {e}");
            e.exit_code()
        }
    }
}
