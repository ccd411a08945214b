// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! Front end for `cqed`: config ingestion, subcommands and serializers.
//!
//! Exit codes: 0 success, 1 a fidelity check failed, 2 config or I/O error,
//! 3 parameters outside the physical regime of the model.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::SweepKind;
use crate::config::RunConfig;
use crate::error::{exit, CliError};

/// Directory searched for relative `--config` paths and for `cqed.json`
/// when `--config` is omitted.
pub const CONFIG_DIR_ENV: &str = "CQED_CONFIG_DIR";
pub const DEFAULT_CONFIG_NAME: &str = "cqed.json";

#[derive(Debug, Parser)]
#[command(name = "cqed", version, about = "Heralded entangled photons from two-stage cavity QED")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Run configuration (JSON, frequencies in MHz).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file; defaults to the config's output section, then stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Accepted for scripting compatibility. Every computation is
    /// deterministic, so it changes nothing.
    #[arg(long, global = true)]
    pub seedless: bool,
    #[arg(long, env = CONFIG_DIR_ENV, hide_env_values = true, value_name = "DIR")]
    pub config_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two atoms: the four heralded Bell states.
    Bell,
    /// N atoms: the 2^N heralded GHZ-class states.
    Ghz {
        #[arg(long)]
        n: usize,
    },
    /// Frame-change and approximation ladder of the microwave stage.
    Verify {
        /// Atom count; defaults to the number of optical cavities, at least 2.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Parameter sweep written as CSV.
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
    },
}

impl Common {
    fn config_path(&self) -> Result<PathBuf, CliError> {
        match (&self.config, &self.config_dir) {
            (Some(p), Some(dir)) if p.is_relative() && !p.exists() => Ok(dir.join(p)),
            (Some(p), _) => Ok(p.clone()),
            (None, Some(dir)) => Ok(dir.join(DEFAULT_CONFIG_NAME)),
            (None, None) => Err(CliError::Config(format!("no --config given and {CONFIG_DIR_ENV} is not set"))),
        }
    }
}

pub fn run(cli: &Cli) -> ExitCode {
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cqed: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let cfg = RunConfig::load(&cli.common.config_path()?)?;
    let (report, default_out) = match &cli.command {
        Command::Bell => (commands::bell(&cfg)?, &cfg.output.report),
        Command::Ghz { n } => (commands::ghz(&cfg, *n)?, &cfg.output.report),
        Command::Verify { n } => (commands::verify(&cfg, n.unwrap_or(cfg.default_atoms()))?, &cfg.output.report),
        Command::Sweep { kind } => (commands::sweep(&cfg, *kind)?, &cfg.output.table),
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let out: Option<&Path> = cli.common.out.as_deref().or(default_out.as_deref());
    output::emit(out, &report.bytes)?;
    eprintln!("{}", report.summary);
    Ok(if report.passed { exit::OK } else { exit::FIDELITY })
}
