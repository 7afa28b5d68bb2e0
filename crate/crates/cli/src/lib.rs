//! Command-line front end for `ghz-core`: argument and config-file handling,
//! the subcommands, and CSV / JSON output.

pub mod args;
pub mod config;
pub mod error;
pub mod parse;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind as ClapKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{CliError, ErrorKind, Result};
use crate::report::Report;

/// Parses `args` (program name first), applying any `--config` file.
pub fn parse_command(args: Vec<OsString>) -> std::result::Result<Command, ParseOutcome> {
    let args = config::expand_args(args).map_err(ParseOutcome::Failed)?;
    match Cli::try_parse_from(args) {
        Ok(cli) => Ok(cli.command),
        Err(e) if matches!(e.kind(), ClapKind::DisplayHelp | ClapKind::DisplayVersion) => {
            Err(ParseOutcome::Info(e.to_string()))
        }
        Err(e) if e.kind() == ClapKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            Err(ParseOutcome::Failed(CliError::config(e.to_string())))
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            Err(ParseOutcome::Failed(CliError::config(first.to_string())))
        }
    }
}

#[derive(Debug)]
pub enum ParseOutcome {
    /// Help or version text for stdout.
    Info(String),
    Failed(CliError),
}

/// Runs a parsed command and writes its report where `--output` says.
pub fn execute<W: Write>(command: &Command, stdout: &mut W) -> Result<Report> {
    let report = run::dispatch(command)?;
    let out = run::output_args(command);
    let mut buf = Vec::new();
    report.write(out.format, &mut buf)?;
    match &out.output {
        Some(path) => std::fs::write(path, &buf)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?,
        None => stdout.write_all(&buf)?,
    }
    Ok(report)
}

/// Full entry point; returns the process exit status.
pub fn main_with<O: Write, E: Write>(args: Vec<OsString>, stdout: &mut O, stderr: &mut E) -> u8 {
    let command = match parse_command(args) {
        Ok(c) => c,
        Err(ParseOutcome::Info(text)) => {
            let _ = write!(stdout, "{text}");
            return 0;
        }
        Err(ParseOutcome::Failed(e)) => {
            let _ = writeln!(stderr, "{e}");
            return e.kind.code();
        }
    };
    match execute(&command, stdout) {
        Ok(_) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.kind.code()
        }
    }
}

impl ErrorKind {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            2 => Some(ErrorKind::Config),
            3 => Some(ErrorKind::Numerical),
            4 => Some(ErrorKind::Io),
            _ => None,
        }
    }
}
