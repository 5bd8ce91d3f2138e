//! Command-line front end for the `betaorder` library.

pub mod args;
pub mod cache;
pub mod commands;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REGIME: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] betaorder::Error),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Verification(_) => EXIT_VERIFY,
            CliError::Io(_) => EXIT_INTERNAL,
            CliError::Core(e) => match e.root() {
                betaorder::Error::RegimeUnsupported(_) => EXIT_REGIME,
                betaorder::Error::Numerical(_) => EXIT_NUMERICAL,
                betaorder::Error::Invalid(_) | betaorder::Error::Parse(_) => EXIT_USAGE,
                _ => EXIT_INTERNAL,
            },
        }
    }
}

/// Parses `argv`, runs the command, writes its output and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match commands::dispatch(&cli) {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(_) => EXIT_INTERNAL,
        },
        Err(commands::Failure { output, error }) => {
            if let Some(text) = output {
                let _ = out.write_all(text.as_bytes());
            }
            let _ = writeln!(err, "error: {error}");
            error.exit_code()
        }
    }
}
