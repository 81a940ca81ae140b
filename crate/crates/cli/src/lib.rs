//! Batch front end: one subcommand per experiment, each writing CSV tables and
//! a JSON manifest to the output directory.
//!
//! Exit codes: 0 on success, 2 on a usage error, 1 on a numerical or I/O
//! failure.

pub mod args;
mod commands;
pub mod manifest;

use std::fs;

use chrono::{SecondsFormat, Utc};
use clap::Parser;

use args::{Cli, Command};
use manifest::RunManifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] lorentz_core::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I: IntoIterator<Item = String>>(argv: I) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let started_at = now();
    let w = cli.workers;
    let output = match &cli.command {
        Command::Cf(a) => commands::cf(a),
        Command::Partition(a) => commands::partition(a),
        Command::PsiCurve(a) => commands::psi_curve(a, w),
        Command::Tau(a) => commands::tau(a),
        Command::PhiCurve(a) => commands::phi_curve(a, w),
        Command::Cesaro(a) => commands::cesaro(a, w),
        Command::LambdaCurve(a) => commands::lambda_curve(a),
        Command::Nstat(a) => commands::nstat(a),
        Command::Kinetic(a) => commands::kinetic(a, w),
    }?;
    fs::create_dir_all(&cli.out)?;
    let mut outputs = Vec::new();
    for (name, contents) in &output.files {
        fs::write(cli.out.join(name), contents)?;
        outputs.push(name.clone());
    }
    let manifest = RunManifest {
        subcommand: cli.command.name(),
        parameters: &cli.command,
        seed: cli.command.seed(),
        workers: w,
        tool_version: env!("CARGO_PKG_VERSION"),
        started_at,
        finished_at: now(),
        outputs,
    };
    let name = manifest.write(&cli.out)?;
    println!("{}: {}", cli.command.name(), output.summary);
    println!(
        "wrote {} and {name} to {}",
        manifest.outputs.join(", "),
        cli.out.display()
    );
    Ok(())
}
