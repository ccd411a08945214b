// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

mod heralding;
mod sweep;
mod verify;

pub use heralding::{bell, ghz, FIDELITY_MIN, GHZ_ATOMS};
pub use sweep::{sweep, SweepKind, STAGGER_HEADER, SUCCESS_HEADER};
pub use verify::{verify, APPROX_MIN, FRAME_MIN};

use serde::Serialize;

use crate::output::json_bytes;

/// Serialized output of one command and whether its checks passed.
#[derive(Debug)]
pub struct Report {
    pub bytes: Vec<u8>,
    pub passed: bool,
    pub warnings: Vec<String>,
    /// One line for stderr.
    pub summary: String,
}

impl Report {
    fn json<T: Serialize>(value: &T, passed: bool, warnings: Vec<String>, summary: String) -> Self {
        Self { bytes: json_bytes(value), passed, warnings, summary }
    }
}

#[derive(Clone, Copy, Serialize)]
struct Units {
    frequency: &'static str,
    time: &'static str,
}

impl Units {
    const CANONICAL: Self = Self { frequency: "rad/us", time: "us" };
}
