// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! `verify`: walks the microwave stage from the lab frame down to the
//! effective generator and checks each step against the next.

use std::f64::consts::TAU;

use cqed_core::microwave::{
    atom_space, dispersive_validity, dressed_frame_consistency, effective_couplings, effective_model_fidelity,
    fock_independence, lab_frame_consistency, strong_driving_consistency, DispersiveReport, EffectiveCouplings,
    MicrowaveError, MicrowaveParams, TimingPlan,
};
use cqed_core::StateVector;
use serde::Serialize;

use super::{Report, Units, GHZ_ATOMS};
use crate::config::RunConfig;
use crate::error::CliError;

/// Frame changes are exact, so only integration error is tolerated.
pub const FRAME_MIN: f64 = 1.0 - 1e-6;
/// Floor for the approximations: strong driving, cavity elimination and
/// photon-number independence.
pub const APPROX_MIN: f64 = 0.98;
const FOCK_LEVELS: [usize; 3] = [0, 1, 2];

#[derive(Serialize)]
struct VerifyReport {
    command: &'static str,
    units: Units,
    parameters: MicrowaveParams,
    couplings: EffectiveCouplings,
    /// Absent when `g = 0` leaves no interaction time to solve for.
    timing_plan: Option<TimingPlan>,
    ratios: Ratios,
    initial_state: String,
    frame_window: f64,
    evaluation_time: f64,
    checks: Vec<Check>,
    dispersive: Vec<DispersiveEntry>,
    fock_independence: Vec<FockPair>,
    warnings: Vec<String>,
    passed: bool,
}

#[derive(Serialize)]
struct Ratios {
    drive_over_g: Option<f64>,
    delta_over_g: Option<f64>,
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    fock_n: usize,
    time: f64,
    fidelity: f64,
    threshold: f64,
    passed: bool,
}

impl Check {
    fn new(name: &'static str, fock_n: usize, time: f64, fidelity: f64, threshold: f64) -> Self {
        Self { name, fock_n, time, fidelity, threshold, passed: fidelity >= threshold }
    }
}

#[derive(Serialize)]
struct DispersiveEntry {
    #[serde(flatten)]
    report: DispersiveReport,
    threshold: f64,
    passed: bool,
}

#[derive(Serialize)]
struct FockPair {
    fock_a: usize,
    fock_b: usize,
    fidelity: f64,
    threshold: f64,
    passed: bool,
}

/// Runs the driven chain for `n` atoms starting from all atoms in `g`.
///
/// Frame checks run over one period of the cavity detuning, `2π/δ`, which
/// cycles every oscillating coupling at least once; the approximations run
/// over the planned interaction time `t0`.
pub fn verify(cfg: &RunConfig, n: usize) -> Result<Report, CliError> {
    if !GHZ_ATOMS.contains(&n) {
        return Err(CliError::Config(format!(
            "--n {n} exceeds the dense-simulation budget of {} to {} atoms",
            GHZ_ATOMS.start(),
            GHZ_ATOMS.end()
        )));
    }
    let needed = FOCK_LEVELS.iter().max().copied().unwrap_or(0) + 2;
    if cfg.microwave.fock_cutoff < needed {
        return Err(MicrowaveError::CutoffTooSmall { required: needed, got: cfg.microwave.fock_cutoff }.into());
    }
    let (g, delta) = cfg.couplings();
    let couplings = effective_couplings(g, delta)?;
    let plan = if g == 0.0 { None } else { Some(cfg.timing_plan(couplings.lambda, n)?) };
    let big_g = match plan {
        Some(p) => p.g_required,
        None => cfg.plan.min_drive_factor * delta.abs(),
    };
    let p = cfg.microwave_with_drive(n, big_g)?;
    let psi = StateVector::basis(atom_space(n)?, &vec![0; n])?;
    let window = TAU / delta.abs();
    let t = plan.map_or(window, |p| p.t0);

    let checks = vec![
        Check::new("lab_to_interaction", 0, window, lab_frame_consistency(&p, &psi, 0, window)?, FRAME_MIN),
        Check::new("interaction_to_dressed", 0, window, dressed_frame_consistency(&p, &psi, 0, window)?, FRAME_MIN),
        Check::new("dressed_to_strong_driving", 0, t, strong_driving_consistency(&p, &psi, 0, t)?, APPROX_MIN),
        Check::new("interaction_to_effective", 0, t, effective_model_fidelity(&p, &psi, t)?, APPROX_MIN),
    ];

    let dispersive = FOCK_LEVELS
        .iter()
        .map(|&k| {
            let report = dispersive_validity(&p, &psi, k, t)?;
            Ok(DispersiveEntry { report, threshold: APPROX_MIN, passed: report.fidelity >= APPROX_MIN })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let pairs = fock_independence(&p, &psi, &FOCK_LEVELS, t)?
        .into_iter()
        .map(|(a, b, f)| FockPair { fock_a: a, fock_b: b, fidelity: f, threshold: APPROX_MIN, passed: f >= APPROX_MIN })
        .collect::<Vec<_>>();

    let passed =
        checks.iter().all(|c| c.passed) && dispersive.iter().all(|d| d.passed) && pairs.iter().all(|f| f.passed);
    let warnings: Vec<String> = p.warnings().iter().map(|w| format!("microwave: {w}")).collect();
    let worst = checks
        .iter()
        .map(|c| (c.name, c.fidelity))
        .chain(dispersive.iter().map(|d| ("dispersive", d.report.fidelity)))
        .chain(pairs.iter().map(|f| ("fock_independence", f.fidelity)))
        .fold(("none", f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let ratio = if g == 0.0 { "n/a".to_string() } else { format!("{:.3}", big_g / g) };
    let summary = format!("verify: N = {n}, G/g = {ratio}, lowest fidelity {:.6} ({})", worst.1, worst.0);

    let report = VerifyReport {
        command: "verify",
        units: Units::CANONICAL,
        parameters: p,
        couplings,
        timing_plan: plan,
        ratios: Ratios { drive_over_g: (g != 0.0).then(|| big_g / g), delta_over_g: (g != 0.0).then(|| delta / g) },
        initial_state: "g".repeat(n),
        frame_window: window,
        evaluation_time: t,
        checks,
        dispersive,
        fock_independence: pairs,
        warnings: warnings.clone(),
        passed,
    };
    Ok(Report::json(&report, passed, warnings, summary))
}
