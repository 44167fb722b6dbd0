//! Library side of the `fluorospec` command-line tool: argument types,
//! config-file handling, output writers, figure presets and verification
//! suites.
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 for
//! usage or configuration errors. Errors go to standard error as one JSON
//! object per line.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::config::RunConfig;
pub use crate::error::{CliError, ErrorKind};

pub const THREADS_ENV: &str = "FLUOROSPEC_THREADS";

/// Caps the global worker pool from `FLUOROSPEC_THREADS` (0 or unset means
/// automatic).
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::config(format!(
            "{THREADS_ENV} must be a non-negative integer (got `{raw}`)"
        ))
    })?;
    if n > 0 {
        // A pool that already exists is left alone.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let mut stdout = std::io::stdout();
    match cli.command {
        Command::Spectrum(a) => {
            let cfg = RunConfig::from_args(&a)?;
            let summary = commands::cmd_spectrum(&cfg)?;
            if cfg.output.is_some() {
                writeln!(stdout, "{summary}")?;
            } else {
                eprintln!("{summary}");
            }
        }
        Command::Figure(a) => {
            for line in commands::cmd_figure(&a)? {
                writeln!(stdout, "{line}")?;
            }
        }
        Command::Verify(a) => {
            let (lines, ok) = commands::cmd_verify(&a)?;
            for line in &lines {
                writeln!(stdout, "{line}")?;
            }
            if !ok {
                return Err(CliError::new(
                    ErrorKind::Verification,
                    "one or more verification checks failed",
                ));
            }
        }
        Command::Sweep(a) => commands::cmd_sweep(&a)?,
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let err = CliError::new(ErrorKind::Usage, e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
