// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end composition: every atom emits a photon in its own optical
//! cavity, the atoms then interact jointly in the microwave cavity, and a
//! measurement of the atoms projects the photons onto one member of an
//! entangled basis.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::hilbert::{expm::propagator, project, reduced_state, HilbertError, OperatorMatrix, StateVector};
use crate::microwave::{
    self, default_min_drive, driveless_effective_hamiltonian, effective_couplings, effective_hamiltonian,
    make_timing_plan, MicrowaveError, MicrowaveParams, MicrowaveWarning, TimingPlan,
};
use crate::optical::{self, OpticalCavityParams, OpticalError, OpticalStageResult, OpticalWarning};
use crate::units::from_mhz;

/// Tolerance for "maximally entangled" and orthonormality checks.
pub const ENTANGLEMENT_TOL: f64 = 1e-9;
/// Outcomes below this probability carry no conditional state.
pub const MIN_OUTCOME_PROB: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("at least two atoms are required, got {0}")]
    TooFewAtoms(usize),
    #[error("{optical} optical cavities but the microwave stage holds {microwave} atoms")]
    AtomCountMismatch { optical: usize, microwave: usize },
    #[error("timing plan inconsistent with the microwave couplings: λt0 = {lambda_t0}, Gt0 = {g_t0}")]
    PlanMismatch { lambda_t0: f64, g_t0: f64 },
    #[error("pattern {pattern:?} must have {expected} entries of 'g' or 'e'")]
    BadPattern { pattern: String, expected: usize },
    #[error("atomic outcome {0} has zero probability")]
    ZeroProbability(String),
    #[error("state is not a register of qubits: {0}")]
    NotQubits(String),
    #[error(transparent)]
    Optical(#[from] OpticalError),
    #[error(transparent)]
    Microwave(#[from] MicrowaveError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

pub type Result<T> = std::result::Result<T, ProtocolError>;

/// Whether the classical field drives the atoms in the microwave cavity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveMode {
    #[default]
    Driven,
    /// No drive: only the drive-independent pairwise exchange remains.
    Driveless,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub optical: Vec<OpticalCavityParams>,
    pub microwave: MicrowaveParams,
    pub plan: TimingPlan,
    pub drive: DriveMode,
}

impl ProtocolConfig {
    /// Identical optical cavities; the drive is set to the plan's `G_required`.
    pub fn uniform(optical: OpticalCavityParams, microwave: MicrowaveParams, plan: TimingPlan) -> Self {
        let n = microwave.n_atoms;
        Self {
            optical: vec![optical; n],
            microwave: microwave.with_drive(plan.g_required),
            plan,
            drive: DriveMode::Driven,
        }
    }

    /// Reference configuration: h = 2π×34 MHz, γ = 2π×2.6 MHz,
    /// κ = 2π×4.1 MHz; g = 2π×0.05 MHz, δ = 5g, and the smallest drive branch
    /// at or above 10·max(δ, g). The atomic frequency is set to 20·G.
    pub fn reference(n_atoms: usize) -> Result<Self> {
        let optical = OpticalCavityParams::symmetric(from_mhz(34.0), from_mhz(2.6), from_mhz(4.1))?;
        let g = from_mhz(0.05);
        let delta = 5.0 * g;
        let lambda = effective_couplings(g, delta)?.lambda;
        let plan = make_timing_plan(lambda, n_atoms, default_min_drive(g, delta))?;
        let microwave = MicrowaveParams::new(g, plan.g_required, delta, 20.0 * plan.g_required, 8, n_atoms)?;
        Ok(Self::uniform(optical, microwave, plan))
    }

    pub fn n_atoms(&self) -> usize {
        self.optical.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_atoms();
        if n < 2 {
            return Err(ProtocolError::TooFewAtoms(n));
        }
        if self.microwave.n_atoms != n {
            return Err(ProtocolError::AtomCountMismatch { optical: n, microwave: self.microwave.n_atoms });
        }
        for p in &self.optical {
            p.validate()?;
        }
        self.microwave.validate()?;
        let lambda = self.microwave.couplings()?.lambda;
        let consistent = match self.drive {
            DriveMode::Driven => self.plan.is_satisfied_by(lambda, self.microwave.big_g),
            DriveMode::Driveless => (lambda * self.plan.t0 - PI / 4.0).abs() <= 1e-10,
        };
        if !consistent {
            return Err(ProtocolError::PlanMismatch {
                lambda_t0: lambda * self.plan.t0,
                g_t0: self.microwave.big_g * self.plan.t0,
            });
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.optical.iter().all(|p| p.h_r == p.h_l)
    }

    pub fn optical_warnings(&self) -> Vec<(usize, OpticalWarning)> {
        self.optical.iter().enumerate().flat_map(|(j, p)| p.warnings().into_iter().map(move |w| (j + 1, w))).collect()
    }

    pub fn microwave_warnings(&self) -> Vec<MicrowaveWarning> {
        self.microwave.warnings()
    }

    /// Atoms-only propagator applied in the microwave cavity.
    pub fn atomic_propagator(&self) -> Result<OperatorMatrix> {
        let n = self.n_atoms();
        let cpl = self.microwave.couplings()?;
        let h = match self.drive {
            DriveMode::Driven => effective_hamiltonian(n, cpl.lambda, self.microwave.big_g)?,
            DriveMode::Driveless => driveless_effective_hamiltonian(n, cpl)?,
        };
        Ok(propagator(&h, self.plan.t0))
    }
}

/// Atomic measurement pattern, one entry per atom (`0 = g`, `1 = e`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Pattern(pub Vec<usize>);

impl Pattern {
    pub fn parse(s: &str, n_atoms: usize) -> Result<Self> {
        let bad = || ProtocolError::BadPattern { pattern: s.to_string(), expected: n_atoms };
        let digits = s
            .chars()
            .map(|ch| match ch {
                'g' => Ok(0),
                'e' => Ok(1),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        if digits.len() != n_atoms {
            return Err(bad());
        }
        Ok(Pattern(digits))
    }

    /// All `2^N` patterns in lexicographic order (`g` before `e`).
    pub fn all(n_atoms: usize) -> Vec<Self> {
        (0..1usize << n_atoms).map(|k| Pattern((0..n_atoms).map(|j| (k >> (n_atoms - 1 - j)) & 1).collect())).collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.0 {
            f.write_str(if d == 0 { "g" } else { "e" })?;
        }
        Ok(())
    }
}

/// Two-photon family, or GHZ-class pair `(x, x̄)` for more photons.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `|σ+σ+⟩, |σ−σ−⟩`
    Phi,
    /// `|σ+σ−⟩, |σ−σ+⟩`
    Psi,
    /// `(|x⟩ + e^{iθ}|x̄⟩)/√2` with `x` starting in `σ+`, written as `+`/`-`.
    Ghz(String),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Phi => f.write_str("phi"),
            Family::Psi => f.write_str("psi"),
            Family::Ghz(x) => write!(f, "ghz({x})"),
        }
    }
}

/// Best match of a photon state to the phase-generalized entangled families.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub family: Family,
    /// Unit-modulus relative phase `e^{iθ}` of the `x̄` component.
    #[serde(serialize_with = "serialize_complex")]
    pub phase: Complex64,
    /// Fidelity to `(|x⟩ + e^{iθ}|x̄⟩)/√2` at the best θ.
    pub fidelity: f64,
}

impl Classification {
    /// `phi+`, `psi-i`, `ghz(++-)+i`, or `phi@0.785398` for a phase that is
    /// not a multiple of π/2.
    pub fn label(&self) -> String {
        format!("{}{}", self.family, phase_suffix(self.phase))
    }
}

fn phase_suffix(z: Complex64) -> String {
    const TOL: f64 = 1e-6;
    for (w, s) in [
        (Complex64::new(1.0, 0.0), "+"),
        (Complex64::new(-1.0, 0.0), "-"),
        (Complex64::i(), "+i"),
        (-Complex64::i(), "-i"),
    ] {
        if (z - w).norm() < TOL {
            return s.to_string();
        }
    }
    format!("@{:.6}", z.arg())
}

pub(crate) fn serialize_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Finds the pair `(x, x̄)` maximizing `(|a_x| + |a_x̄|)²/2`, the fidelity to
/// `(|x⟩ + e^{iθ}|x̄⟩)/√2` at the optimal θ. Ties go to the smaller `x`. Two
/// photons report `Phi`/`Psi`, more report `Ghz(x)`.
pub fn classify_entangled_state(photon_state: &StateVector) -> Result<Classification> {
    let space = photon_state.space();
    if space.is_empty() || space.factors().iter().any(|f| f.dim != 2) {
        return Err(ProtocolError::NotQubits(space.to_string()));
    }
    let psi = photon_state.normalized()?;
    let n = space.len();
    let dim = space.dim();
    let amps = psi.amplitudes();
    let mut best: Option<(usize, f64)> = None;
    for x in 0..dim / 2 {
        let xbar = dim - 1 - x;
        let f = (amps[x].norm() + amps[xbar].norm()).powi(2) / 2.0;
        // Strictly greater keeps the lexicographically first pair on ties.
        if best.is_none_or(|(_, b)| f.partial_cmp(&b) == Some(Ordering::Greater) && f - b > 1e-15) {
            best = Some((x, f));
        }
    }
    let (x, fidelity) = best.expect("at least one qubit");
    let (ax, axbar) = (amps[x], amps[dim - 1 - x]);
    let phase = if ax.norm() > 0.0 && axbar.norm() > 0.0 {
        let r = axbar / ax;
        r / r.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let family = if n == 2 {
        if x == 0 {
            Family::Phi
        } else {
            Family::Psi
        }
    } else {
        Family::Ghz((0..n).map(|j| if (x >> (n - 1 - j)) & 1 == 0 { '+' } else { '-' }).collect())
    };
    Ok(Classification { family, phase, fidelity: fidelity.min(1.0) })
}

/// One atomic measurement outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeRow {
    pub pattern: Pattern,
    pub probability: f64,
    /// Normalized conditional photon state; `None` for a null outcome.
    pub photon_state: Option<StateVector>,
    pub classification: Option<Classification>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolResult {
    pub config: ProtocolConfig,
    pub optical: Vec<OpticalStageResult>,
    /// Normalized `atom1 … atomN ⊗ photon1 … photonN` state after the
    /// microwave stage, conditioned on every optical stage succeeding.
    pub joint_state: StateVector,
    pub outcome_table: Vec<OutcomeRow>,
    /// `∏_j P_j` over the optical stages.
    pub total_success_prob: f64,
}

impl ProtocolResult {
    pub fn row(&self, pattern: &Pattern) -> Option<&OutcomeRow> {
        self.outcome_table.iter().find(|r| &r.pattern == pattern)
    }

    pub fn n_atoms(&self) -> usize {
        self.config.n_atoms()
    }
}

pub fn run_protocol(cfg: &ProtocolConfig) -> Result<ProtocolResult> {
    cfg.validate()?;
    let optical = cfg.optical.iter().map(optical::run_optical_stage).collect::<std::result::Result<Vec<_>, _>>()?;
    let total_success_prob = optical.iter().map(|r| r.success_prob).product();
    let emitted = optical::emit_photons(&optical)?;
    let joint_state = cfg.atomic_propagator()?.apply_on(&emitted)?;

    let n = cfg.n_atoms();
    let outcome_table =
        Pattern::all(n).into_iter().map(|pattern| outcome_row(&joint_state, n, pattern)).collect::<Result<Vec<_>>>()?;
    Ok(ProtocolResult { config: cfg.clone(), optical, joint_state, outcome_table, total_success_prob })
}

fn outcome_row(joint: &StateVector, n: usize, pattern: Pattern) -> Result<OutcomeRow> {
    match project_atoms(joint, n, &pattern) {
        Ok((photons, probability)) => {
            let classification = Some(classify_entangled_state(&photons)?);
            Ok(OutcomeRow { pattern, probability, photon_state: Some(photons), classification })
        }
        Err(ProtocolError::ZeroProbability(_)) => {
            Ok(OutcomeRow { pattern, probability: 0.0, photon_state: None, classification: None })
        }
        Err(e) => Err(e),
    }
}

fn project_atoms(joint: &StateVector, n: usize, pattern: &Pattern) -> Result<(StateVector, f64)> {
    if pattern.0.len() != n || pattern.0.iter().any(|&d| d > 1) {
        return Err(ProtocolError::BadPattern { pattern: format!("{:?}", pattern.0), expected: n });
    }
    let mut state = joint.clone();
    let mut probability = 1.0;
    for (label, &d) in microwave::atom_labels(n).iter().zip(&pattern.0) {
        match project(&state, label, d) {
            Ok((rest, p)) => {
                state = rest;
                probability *= p;
            }
            Err(HilbertError::ZeroProbability { .. }) => {
                return Err(ProtocolError::ZeroProbability(pattern.to_string()))
            }
            Err(e) => return Err(e.into()),
        }
    }
    if probability < MIN_OUTCOME_PROB {
        return Err(ProtocolError::ZeroProbability(pattern.to_string()));
    }
    Ok((state, probability))
}

/// Projects the atoms of `result` onto `pattern`, returning the normalized
/// photon state and the outcome probability.
pub fn measure_atoms(result: &ProtocolResult, pattern: &Pattern) -> Result<(StateVector, f64)> {
    project_atoms(&result.joint_state, result.n_atoms(), pattern)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompleteSetRow {
    pub pattern: String,
    pub probability: f64,
    pub label: Option<String>,
    pub fidelity: f64,
    /// Largest entry of `|ρ_j − I/2|` over the single-photon reduced states.
    pub reduced_deviation: f64,
    pub maximally_entangled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompleteSetReport {
    pub n_atoms: usize,
    pub symmetric_couplings: bool,
    pub rows: Vec<CompleteSetRow>,
    /// Largest entry of `|Gram − I|` over the conditional photon states.
    pub gram_deviation: f64,
    pub orthonormal: bool,
    /// Patterns whose photon state is not maximally entangled.
    pub flagged: Vec<String>,
    pub complete: bool,
}

/// Runs the protocol and checks that the `2^N` conditional photon states are
/// maximally entangled and mutually orthogonal.
pub fn complete_set_table(cfg: &ProtocolConfig) -> Result<CompleteSetReport> {
    let result = run_protocol(cfg)?;
    complete_set_from(&result)
}

pub fn complete_set_from(result: &ProtocolResult) -> Result<CompleteSetReport> {
    let n = result.n_atoms();
    let photon_labels: Vec<String> = (1..=n).map(|j| format!("{}{j}", optical::PHOTON)).collect();
    let mut rows = Vec::with_capacity(result.outcome_table.len());
    let mut states = Vec::new();
    for r in &result.outcome_table {
        let (reduced_deviation, fidelity) = match &r.photon_state {
            Some(s) => {
                let mut dev: f64 = 0.0;
                for label in &photon_labels {
                    let rho = reduced_state(s, &[label.as_str()])?;
                    for (k, z) in rho.matrix().iter().enumerate() {
                        let target = if k == 0 || k == 3 { 0.5 } else { 0.0 };
                        dev = dev.max((z - Complex64::new(target, 0.0)).norm());
                    }
                }
                states.push(s.clone());
                (dev, r.classification.as_ref().map_or(0.0, |c| c.fidelity))
            }
            None => (f64::INFINITY, 0.0),
        };
        rows.push(CompleteSetRow {
            pattern: r.pattern.to_string(),
            probability: r.probability,
            label: r.classification.as_ref().map(Classification::label),
            fidelity,
            reduced_deviation,
            maximally_entangled: reduced_deviation <= ENTANGLEMENT_TOL,
        });
    }
    let mut gram_deviation: f64 = if states.len() == rows.len() { 0.0 } else { f64::INFINITY };
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            gram_deviation = gram_deviation.max((a.inner(b)? - Complex64::new(target, 0.0)).norm());
        }
    }
    let flagged: Vec<String> = rows.iter().filter(|r| !r.maximally_entangled).map(|r| r.pattern.clone()).collect();
    let orthonormal = gram_deviation <= ENTANGLEMENT_TOL;
    Ok(CompleteSetReport {
        n_atoms: n,
        symmetric_couplings: result.config.is_symmetric(),
        complete: flagged.is_empty() && orthonormal,
        rows,
        gram_deviation,
        orthonormal,
        flagged,
    })
}
