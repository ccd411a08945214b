// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

use std::process::ExitCode;

use clap::Parser;
use cqed_cli::Cli;

fn main() -> ExitCode {
    cqed_cli::run(&Cli::parse())
}
