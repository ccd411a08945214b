// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! Canonical units: angular frequency in rad/μs, time in μs.

use std::f64::consts::TAU;

/// Linear frequency in MHz → angular frequency in rad/μs.
pub fn from_mhz(f_mhz: f64) -> f64 {
    TAU * f_mhz
}

/// Angular frequency in rad/μs → linear frequency in MHz.
pub fn to_mhz(omega: f64) -> f64 {
    omega / TAU
}

pub fn ns_to_us(t_ns: f64) -> f64 {
    t_ns * 1e-3
}

pub fn us_to_ns(t_us: f64) -> f64 {
    t_us * 1e3
}
