// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! Stage one: a three-level atom (ground levels `g`, `e`, excited `r`)
//! resonantly coupled to the σ⁺ (right) and σ⁻ (left) modes of a lossy
//! two-mode optical cavity.
//!
//! Starting from `|r, 0_L, 0_R⟩`, the no-jump evolution stays in the
//! single-excitation sector `{|r,0,0⟩, |g,0,1_R⟩, |e,1_L,0⟩}` and has a closed
//! form. Choosing the interaction time so that the `|r⟩` amplitude vanishes
//! leaves the atom entangled with exactly one intracavity photon, which then
//! leaks out as a propagating polarization qubit.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::hilbert::{HilbertError, HilbertSpace, OperatorMatrix, StateVector};

pub const ATOM: &str = "atom";
pub const MODE_L: &str = "mode_L";
pub const MODE_R: &str = "mode_R";
pub const PHOTON: &str = "photon";

/// Atomic level indices on the `atom` factor of the cavity space.
pub mod level {
    pub const G: usize = 0;
    pub const E: usize = 1;
    pub const R: usize = 2;
}

/// Polarization indices on a `photon` factor.
pub mod polarization {
    pub const SIGMA_PLUS: usize = 0;
    pub const SIGMA_MINUS: usize = 1;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticalError {
    #[error("{name} must be finite and non-negative, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("atom is uncoupled (h_R = h_L = 0)")]
    NoCoupling,
    #[error("overdamped regime: Rabi radicand {radicand:e} < 0, no oscillatory solution")]
    Overdamped { radicand: f64 },
    #[error("interaction time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("no photon amplitude at this interaction time")]
    NoPhotonAmplitude,
    #[error("atom-photon state has squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

pub type Result<T> = std::result::Result<T, OpticalError>;

/// Couplings and losses of one optical cavity, rad/μs. Both polarization
/// modes share the decay rate `kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OpticalCavityParams {
    pub h_r: f64,
    pub h_l: f64,
    pub gamma: f64,
    pub kappa: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum OpticalWarning {
    /// The high-efficiency ordering γ/2 < κ < min(h_R, h_L) does not hold.
    OutsideEfficientRegime { half_gamma: f64, kappa: f64, min_coupling: f64 },
}

impl fmt::Display for OpticalWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpticalWarning::OutsideEfficientRegime { half_gamma, kappa, min_coupling } => write!(
                f,
                "outside γ/2 < κ < min(h_R, h_L): γ/2 = {half_gamma:.6}, κ = {kappa:.6}, min h = {min_coupling:.6} rad/μs"
            ),
        }
    }
}

impl OpticalCavityParams {
    pub fn new(h_r: f64, h_l: f64, gamma: f64, kappa: f64) -> Result<Self> {
        let p = Self { h_r, h_l, gamma, kappa };
        p.validate()?;
        Ok(p)
    }

    /// Equal coupling to both polarization modes.
    pub fn symmetric(h: f64, gamma: f64, kappa: f64) -> Result<Self> {
        Self::new(h, h, gamma, kappa)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("h_R", self.h_r), ("h_L", self.h_l), ("gamma", self.gamma), ("kappa", self.kappa)] {
            if !value.is_finite() || value < 0.0 {
                return Err(OpticalError::InvalidParameter { name, value });
            }
        }
        if self.h_r == 0.0 && self.h_l == 0.0 {
            return Err(OpticalError::NoCoupling);
        }
        Ok(())
    }

    /// √(h_R² + h_L²)
    pub fn coupling_norm(&self) -> f64 {
        self.h_r.hypot(self.h_l)
    }

    /// 2γκ + h_R² + h_L² − (κ + γ/2)², i.e. (2Ω)².
    pub fn radicand(&self) -> f64 {
        2.0 * self.gamma * self.kappa + self.h_r * self.h_r + self.h_l * self.h_l
            - (self.kappa + 0.5 * self.gamma).powi(2)
    }

    /// Total amplitude decay rate of the no-jump state, κ + γ/2.
    pub fn total_loss(&self) -> f64 {
        self.kappa + 0.5 * self.gamma
    }

    /// Time after which the intracavity photon has leaked out, 1/(κ + γ/2).
    pub fn emission_time(&self) -> f64 {
        1.0 / self.total_loss()
    }

    pub fn warnings(&self) -> Vec<OpticalWarning> {
        let half_gamma = 0.5 * self.gamma;
        let min_coupling = self.h_r.min(self.h_l);
        if half_gamma < self.kappa && self.kappa < min_coupling {
            Vec::new()
        } else {
            vec![OpticalWarning::OutsideEfficientRegime { half_gamma, kappa: self.kappa, min_coupling }]
        }
    }
}

/// Ω = ½√(2γκ + h_R² + h_L² − (κ+γ/2)²).
pub fn rabi_frequency(p: &OpticalCavityParams) -> Result<f64> {
    p.validate()?;
    let radicand = p.radicand();
    if radicand < 0.0 {
        return Err(OpticalError::Overdamped { radicand });
    }
    Ok(0.5 * radicand.sqrt())
}

/// Smallest τ > 0 with tan(Ωτ) = 2Ω/(γ/2 − κ), which is where the `|r⟩`
/// amplitude first vanishes.
///
/// `atan2` picks the branch in (0, π) on which (κ−γ/2)·sin + 2Ω·cos = 0, and
/// covers γ/2 = κ (Ωτ = π/2) without a special case.
pub fn solve_interaction_time(p: &OpticalCavityParams) -> Result<f64> {
    let omega = rabi_frequency(p)?;
    if omega == 0.0 {
        return Err(OpticalError::Overdamped { radicand: 0.0 });
    }
    let theta = (2.0 * omega).atan2(0.5 * p.gamma - p.kappa);
    Ok(theta / omega)
}

/// Probability of leaving the atom in the ground superposition with one photon to emit,
/// `exp[−(κ+γ/2)τ]·sin²(Ωτ)·(√(h_R²+h_L²)/2Ω)²`.
pub fn success_probability(p: &OpticalCavityParams, tau: f64) -> Result<f64> {
    if tau.is_nan() || tau < 0.0 {
        return Err(OpticalError::NegativeTime(tau));
    }
    let omega = rabi_frequency(p)?;
    let ratio = p.coupling_norm() / (2.0 * omega);
    Ok((-p.total_loss() * tau).exp() * (omega * tau).sin().powi(2) * ratio * ratio)
}

/// Outcome of one atom's passage through its optical cavity.
#[derive(Clone, Debug, PartialEq)]
pub struct OpticalStageResult {
    pub params: OpticalCavityParams,
    pub omega: f64,
    pub tau: f64,
    /// Amplitude of `|r,0_L,0_R⟩` (decay prefactor included).
    pub a: Complex64,
    /// Amplitude of `|g,0_L,1_R⟩`.
    pub b: Complex64,
    /// Amplitude of `|e,1_L,0_R⟩`.
    pub c: Complex64,
    /// Probability of the photon-carrying branch, |b|² + |c|².
    pub success_prob: f64,
    /// Sub-normalized no-jump state on `atom ⊗ mode_L ⊗ mode_R`.
    pub cavity_state: StateVector,
    /// Normalized `atom ⊗ photon` state after the photon has leaked out;
    /// `None` when the photon branch is empty (e.g. τ = 0).
    pub atom_photon_state: Option<StateVector>,
}

pub fn cavity_space() -> HilbertSpace {
    HilbertSpace::new([(ATOM, 3), (MODE_L, 2), (MODE_R, 2)]).expect("static space")
}

pub fn emission_space() -> HilbertSpace {
    HilbertSpace::new([(ATOM, 2), (PHOTON, 2)]).expect("static space")
}

/// `|r, 0_L, 0_R⟩`
pub fn initial_state() -> StateVector {
    StateVector::basis(cavity_space(), &[level::R, 0, 0]).expect("static basis state")
}

/// Closed-form no-jump evolution for time `tau`.
pub fn evolve_optical(p: &OpticalCavityParams, tau: f64) -> Result<OpticalStageResult> {
    if tau.is_nan() || tau < 0.0 {
        return Err(OpticalError::NegativeTime(tau));
    }
    let omega = rabi_frequency(p)?;
    if omega == 0.0 {
        return Err(OpticalError::Overdamped { radicand: 0.0 });
    }
    let (s, co) = (omega * tau).sin_cos();
    let prefactor = (-0.5 * p.total_loss() * tau).exp() / (2.0 * omega);
    let a = Complex64::new(prefactor * ((p.kappa - 0.5 * p.gamma) * s + 2.0 * omega * co), 0.0);
    let b = Complex64::new(0.0, -prefactor * p.h_r * s);
    let c = Complex64::new(0.0, -prefactor * p.h_l * s);

    let space = cavity_space();
    let mut amps = nalgebra::DVector::zeros(space.dim());
    amps[space.flat_index(&[level::R, 0, 0])?] = a;
    amps[space.flat_index(&[level::G, 0, 1])?] = b;
    amps[space.flat_index(&[level::E, 1, 0])?] = c;
    let cavity_state = StateVector::new(space, amps)?;

    let success_prob = b.norm_sqr() + c.norm_sqr();
    let atom_photon_state = if success_prob > 0.0 {
        let e = emission_space();
        let mut v = nalgebra::DVector::zeros(4);
        v[e.flat_index(&[level::G, polarization::SIGMA_PLUS])?] = b;
        v[e.flat_index(&[level::E, polarization::SIGMA_MINUS])?] = c;
        Some(StateVector::new(e, v.unscale(success_prob.sqrt()))?)
    } else {
        None
    };

    Ok(OpticalStageResult { params: *p, omega, tau, a, b, c, success_prob, cavity_state, atom_photon_state })
}

/// Evolution at the solved interaction time.
pub fn run_optical_stage(p: &OpticalCavityParams) -> Result<OpticalStageResult> {
    evolve_optical(p, solve_interaction_time(p)?)
}

/// Non-Hermitian no-jump Hamiltonian on `atom ⊗ mode_L ⊗ mode_R`
/// with photon modes truncated to {0, 1}.
pub fn cavity_hamiltonian(p: &OpticalCavityParams) -> Result<OperatorMatrix> {
    p.validate()?;
    let space = cavity_space();
    let one = Complex64::new(1.0, 0.0);
    let transition = |to: usize, from: usize| {
        let mut m = DMatrix::<Complex64>::zeros(3, 3);
        m[(to, from)] = one;
        m
    };
    let create = DMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), one, Complex64::new(0.0, 0.0)],
    );
    let number = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(0.0, 0.0), one]));

    let emit_r =
        OperatorMatrix::product(&space, &[(MODE_R, &create), (ATOM, &transition(level::G, level::R))])? * (0.5 * p.h_r);
    let emit_l =
        OperatorMatrix::product(&space, &[(MODE_L, &create), (ATOM, &transition(level::E, level::R))])? * (0.5 * p.h_l);
    let coupling = emit_r.clone() + &emit_r.adjoint() + &emit_l + &emit_l.adjoint();

    let excited = OperatorMatrix::embed(&space, ATOM, &transition(level::R, level::R))?;
    let photons = OperatorMatrix::embed(&space, MODE_L, &number)? + OperatorMatrix::embed(&space, MODE_R, &number)?;
    let loss = excited * Complex64::new(0.0, -0.5 * p.gamma) + &(photons * Complex64::new(0.0, -p.kappa));
    Ok(coupling + &loss)
}

/// Ideal post-emission factor `(h_R|g⟩|σ⁺⟩ + h_L|e⟩|σ⁻⟩)/√(h_R²+h_L²)`.
pub fn ideal_emission_state(p: &OpticalCavityParams) -> Result<StateVector> {
    p.validate()?;
    Ok(StateVector::from_real_normalized(emission_space(), &[p.h_r, 0.0, 0.0, p.h_l])?)
}

/// Joint post-emission state of all atoms, ordered `atom1 … atomN ⊗ photon1 … photonN`.
pub fn emit_photons(results: &[OpticalStageResult]) -> Result<StateVector> {
    let mut joint: Option<StateVector> = None;
    for (j, r) in results.iter().enumerate() {
        let s = r.atom_photon_state.as_ref().ok_or(OpticalError::NoPhotonAmplitude)?;
        let n = s.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(OpticalError::NotNormalized(n));
        }
        let s = s.relabeled([format!("atom{}", j + 1), format!("photon{}", j + 1)])?;
        joint = Some(match joint {
            None => s,
            Some(acc) => acc.tensor(&s)?,
        });
    }
    let joint = joint.ok_or(OpticalError::NoPhotonAmplitude)?;
    let n = results.len();
    let atoms: Vec<String> = (1..=n).map(|j| format!("atom{j}")).collect();
    let photons: Vec<String> = (1..=n).map(|j| format!("photon{j}")).collect();
    let order: Vec<&str> = atoms.iter().chain(&photons).map(String::as_str).collect();
    Ok(joint.permuted(&order)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{evolve_const, fidelity};
    use crate::units::from_mhz;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn reference() -> OpticalCavityParams {
        OpticalCavityParams::symmetric(from_mhz(34.0), from_mhz(2.6), from_mhz(4.1)).unwrap()
    }

    #[test]
    fn lossless_rabi_frequency() {
        let p = OpticalCavityParams::symmetric(2.0, 0.0, 0.0).unwrap();
        assert!((rabi_frequency(&p).unwrap() - 2.0 / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn reference_rabi_frequency_is_24_mhz() {
        // ½√(2·2.6·4.1 + 2·34² − 5.4²) = ½√2304.16 = 24.0008 MHz
        let omega = rabi_frequency(&reference()).unwrap();
        assert!((omega / (2.0 * PI) - 24.000_833_318_866).abs() < 1e-9);
    }

    #[test]
    fn overdamped_is_rejected() {
        let p = OpticalCavityParams::new(0.1, 0.0, 0.0, 5.0).unwrap();
        assert!(matches!(rabi_frequency(&p), Err(OpticalError::Overdamped { .. })));
        assert!(matches!(OpticalCavityParams::new(0.0, 0.0, 1.0, 1.0), Err(OpticalError::NoCoupling)));
        assert!(matches!(
            OpticalCavityParams::new(1.0, 1.0, -1.0, 1.0),
            Err(OpticalError::InvalidParameter { name: "gamma", .. })
        ));
    }

    #[test]
    fn lossless_time_is_quarter_period() {
        let p = OpticalCavityParams::symmetric(3.0, 0.0, 0.0).unwrap();
        let omega = rabi_frequency(&p).unwrap();
        assert!((solve_interaction_time(&p).unwrap() - FRAC_PI_2 / omega).abs() < 1e-15);
    }

    #[test]
    fn balanced_losses_give_quarter_period() {
        let p = OpticalCavityParams::symmetric(3.0, 1.0, 0.5).unwrap();
        let omega = rabi_frequency(&p).unwrap();
        assert!((solve_interaction_time(&p).unwrap() * omega - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn zero_time_is_initial_state() {
        let r = evolve_optical(&reference(), 0.0).unwrap();
        assert_eq!(r.cavity_state, initial_state());
        assert!(r.atom_photon_state.is_none());
        assert_eq!(success_probability(&reference(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn lossless_unequal_couplings_reduce_to_three_four_five() {
        let p = OpticalCavityParams::new(3.0, 4.0, 0.0, 0.0).unwrap();
        let r = run_optical_stage(&p).unwrap();
        assert!(r.a.norm() < 1e-15);
        assert!((r.success_prob - 1.0).abs() < 1e-14);
        let want = StateVector::from_real_normalized(emission_space(), &[3.0, 0.0, 0.0, 4.0]).unwrap();
        assert!((fidelity(r.atom_photon_state.as_ref().unwrap(), &want).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_lossless_quarter_period_empties_excited_level() {
        let h = 1.7;
        let p = OpticalCavityParams::symmetric(h, 0.0, 0.0).unwrap();
        let omega = (2.0 * h * h).sqrt() / 2.0;
        let out = evolve_const(&cavity_hamiltonian(&p).unwrap(), &initial_state(), FRAC_PI_2 / omega).unwrap();
        assert!(out.amplitude(&[level::R, 0, 0]).unwrap().norm() < 1e-10);
    }

    #[test]
    fn cavity_hamiltonian_is_non_hermitian_only_through_losses() {
        let p = reference();
        let h = cavity_hamiltonian(&p).unwrap();
        let lossless = cavity_hamiltonian(&OpticalCavityParams { gamma: 0.0, kappa: 0.0, ..p }).unwrap();
        assert!(lossless.is_hermitian(1e-12));
        assert!(!h.is_hermitian(1e-3));
    }

    #[test]
    fn emit_single_symmetric_atom() {
        let r = run_optical_stage(&reference()).unwrap();
        let joint = emit_photons(&[r]).unwrap();
        let labels: Vec<&str> = joint.space().labels().collect();
        assert_eq!(labels, ["atom1", "photon1"]);
        let want = StateVector::from_real_normalized(joint.space().clone(), &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((fidelity(&joint, &want).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn emit_with_left_mode_uncoupled_is_deterministic() {
        let p1 = OpticalCavityParams::new(from_mhz(34.0), 0.0, from_mhz(2.6), from_mhz(4.1)).unwrap();
        let r1 = run_optical_stage(&p1).unwrap();
        let r2 = run_optical_stage(&reference()).unwrap();
        let joint = emit_photons(&[r1, r2.clone()]).unwrap();
        let g1 = StateVector::basis(HilbertSpace::new([("atom1", 2), ("photon1", 2)]).unwrap(), &[0, 0]).unwrap();
        let second = r2.atom_photon_state.unwrap().relabeled(["atom2", "photon2"]).unwrap();
        let want = g1.tensor(&second).unwrap().permuted(&["atom1", "atom2", "photon1", "photon2"]).unwrap();
        assert!((fidelity(&joint, &want).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn emit_three_symmetric_atoms_is_uniform() {
        let r = run_optical_stage(&reference()).unwrap();
        let joint = emit_photons(&[r.clone(), r.clone(), r]).unwrap();
        // Σ_x |x⟩_atoms |x⟩_photons / √8: nonzero exactly where atom digits equal photon digits.
        let mut count = 0;
        for idx in 0..joint.space().dim() {
            let d = joint.space().digits(idx);
            let amp = joint.amplitudes()[idx].norm();
            if d[..3] == d[3..] {
                assert!((amp - 1.0 / 8f64.sqrt()).abs() < 1e-12);
                count += 1;
            } else {
                assert!(amp < 1e-15);
            }
        }
        assert_eq!(count, 8);
    }

    #[test]
    fn emit_requires_photon() {
        let r = evolve_optical(&reference(), 0.0).unwrap();
        assert!(matches!(emit_photons(&[r]), Err(OpticalError::NoPhotonAmplitude)));
    }

    #[test]
    fn warning_when_gamma_dominates() {
        let p = OpticalCavityParams::symmetric(10.0, 4.0, 1.0).unwrap();
        assert_eq!(p.warnings().len(), 1);
        assert!(reference().warnings().is_empty());
    }
}
