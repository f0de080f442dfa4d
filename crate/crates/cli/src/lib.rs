//! Command-line front end for `toda-core`: reads a JSON run configuration
//! and writes CSV samples and JSON reports.

// `!(x > 0.0)` style tests are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod format;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{CliError, Output};
use config::{parse_config, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "toda",
    version,
    about = "Explicit solutions of the open Toda system"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Add `EPS |z|^2` to every u before verification (test hook).
    #[arg(
        long,
        global = true,
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub perturb: f64,
    /// Write the JSON summary of `stokes` or `growth` here instead of
    /// standard output.
    #[arg(long, global = true)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// u_1..u_n on the configured grid, as CSV.
    Grid,
    /// Toda, Plücker and Abel residuals over the grid disc, as JSON.
    Verify,
    /// Exact order from the Newton diagram and the fitted growth order.
    Order,
    /// Samples along Stokes rays and sector bisectors (n = 1).
    Stokes,
    /// Growth functionals A(r) and B(r), as CSV.
    Growth,
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(parse_config(&text)?)
}

pub fn execute(command: Command, config: &RunConfig, perturb: f64) -> Result<Output, CliError> {
    match command {
        Command::Grid => commands::grid(config),
        Command::Verify => commands::verify(config, perturb),
        Command::Order => commands::order(config),
        Command::Stokes => commands::stokes(config),
        Command::Growth => commands::growth(config),
    }
}

/// Run a parsed command line, writing to the given streams; returns the
/// exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = (|| {
        let path = cli.config.as_ref().ok_or_else(|| CliError::Io {
            path: "--config".into(),
            message: "the --config option is required".into(),
        })?;
        let config = load_config(path)?;
        let output = execute(cli.command, &config, cli.perturb)?;
        let mut text = output.body;
        if let Some(summary) = output.summary {
            match &cli.summary {
                Some(path) => std::fs::write(path, summary).map_err(|e| {
                    CliError::Runtime(format!("cannot write {}: {e}", path.display()))
                })?,
                None => {
                    text.push('\n');
                    text.push_str(&summary);
                }
            }
        }
        Ok::<_, CliError>((text, output.pass))
    })();
    match result {
        Ok((text, pass)) => {
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return 1;
            }
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "toda: {e}");
            e.exit_code()
        }
    }
}
