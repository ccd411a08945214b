// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

use std::io;
use std::path::PathBuf;

use cqed_core::analysis::AnalysisError;
use cqed_core::microwave::MicrowaveError;
use cqed_core::optical::OpticalError;
use cqed_core::protocol::ProtocolError;
use cqed_core::HilbertError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FIDELITY: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const REGIME: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed, inconsistent or out-of-budget input.
    #[error("config error: {0}")]
    Config(String),
    /// Parameters outside the regime the model can describe at all.
    #[error("physics regime violation: {0}")]
    Regime(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => exit::CONFIG,
            CliError::Regime(_) => exit::REGIME,
        }
    }
}

impl From<OpticalError> for CliError {
    fn from(e: OpticalError) -> Self {
        match e {
            OpticalError::InvalidParameter { .. } | OpticalError::NegativeTime(_) => CliError::Config(e.to_string()),
            _ => CliError::Regime(e.to_string()),
        }
    }
}

impl From<MicrowaveError> for CliError {
    fn from(e: MicrowaveError) -> Self {
        match e {
            MicrowaveError::InvalidParameter { .. }
            | MicrowaveError::NoAtoms
            | MicrowaveError::ZeroCutoff(_)
            | MicrowaveError::CutoffTooSmall { .. }
            | MicrowaveError::AtomCount { .. } => CliError::Config(e.to_string()),
            _ => CliError::Regime(e.to_string()),
        }
    }
}

impl From<HilbertError> for CliError {
    fn from(e: HilbertError) -> Self {
        CliError::Regime(e.to_string())
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::Optical(e) => e.into(),
            ProtocolError::Microwave(e) => e.into(),
            ProtocolError::Hilbert(e) => e.into(),
            ProtocolError::TooFewAtoms(_)
            | ProtocolError::AtomCountMismatch { .. }
            | ProtocolError::BadPattern { .. } => CliError::Config(e.to_string()),
            _ => CliError::Regime(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Microwave(e) => e.into(),
            AnalysisError::Optical(e) => e.into(),
            AnalysisError::Hilbert(e) => e.into(),
            _ => CliError::Config(e.to_string()),
        }
    }
}
