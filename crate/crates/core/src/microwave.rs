// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! Stage two: N two-level atoms (`g`, `e`) dispersively coupled to one
//! microwave cavity mode while a strong resonant classical field drives them.
//!
//! The same physics is available at four levels of approximation, each a
//! Hamiltonian on `atom1 … atomN ⊗ cavity`:
//!
//! * [`build_full_hamiltonian`]: lab frame.
//! * [`build_interaction_hamiltonian`]: rotating with the free atom and cavity.
//! * [`build_dressed_hamiltonian`]: additionally rotating with the drive.
//! * [`build_strong_driving_hamiltonian`]: the dressed form with the
//!   `e^{±i2Gt}` terms dropped.
//!
//! Eliminating the virtually excited cavity leaves the atoms-only generator
//! `2G·S_x + 2λ·S_x²` ([`build_effective_hamiltonian`]), whose propagator at
//! `λt = π/4` entangles the atoms.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::hilbert::{
    self, density_fidelity, evolve_timedep, expm::propagator, outcome_probabilities, reduced_state, state_fidelity,
    HilbertError, HilbertSpace, OperatorMatrix, StateVector, TimeDependentHamiltonian, TimeGenerator,
};

pub const CAVITY: &str = "cavity";
pub const ATOM_PREFIX: &str = "atom";

const HERMITIAN_TOL: f64 = 1e-12;
const PLAN_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MicrowaveError {
    #[error("{name} must be finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("at least one atom is required")]
    NoAtoms,
    #[error("Fock cutoff 0 truncates the cavity to vacuum while g = {0} couples to it")]
    ZeroCutoff(f64),
    #[error("Fock cutoff {got} too small, need at least {required}")]
    CutoffTooSmall { required: usize, got: usize },
    #[error("detuning δ = 0: the dispersive expansion is undefined")]
    ZeroDetuning,
    #[error("drive frequency {omega} differs from atomic frequency {omega0}")]
    OffResonantDrive { omega0: f64, omega: f64 },
    #[error("δ = {delta} does not equal ω₀ − ω_c = {expected}")]
    DetuningMismatch { delta: f64, expected: f64 },
    #[error("effective coupling λ must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("state lives on {got} atoms, expected {expected}")]
    AtomCount { expected: usize, got: usize },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

pub type Result<T> = std::result::Result<T, MicrowaveError>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MicrowaveWarning {
    /// δ < 5·(g/2): second-order elimination of the cavity is doubtful.
    WeakDispersion { delta: f64, g: f64 },
    /// G < 10·max(δ, g): the `e^{±i2Gt}` terms are not negligible.
    WeakDriving { big_g: f64, bound: f64 },
    /// Evolution ran with (λ, G) that do not satisfy the timing plan.
    TimingViolated { lambda_t0: f64, g_t0: f64, fidelity_to_plan: f64 },
}

impl fmt::Display for MicrowaveWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MicrowaveWarning::WeakDispersion { delta, g } => {
                write!(f, "weak dispersion: δ = {delta:.6} < 5·g/2 = {:.6} rad/μs", 2.5 * g)
            }
            MicrowaveWarning::WeakDriving { big_g, bound } => {
                write!(f, "weak driving: G = {big_g:.6} < 10·max(δ, g) = {bound:.6} rad/μs")
            }
            MicrowaveWarning::TimingViolated { lambda_t0, g_t0, fidelity_to_plan } => write!(
                f,
                "timing plan violated: λt0 = {lambda_t0:.9}, Gt0 = {g_t0:.9}, fidelity to planned output {fidelity_to_plan:.9}"
            ),
        }
    }
}

/// Microwave-stage parameters in rad/μs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MicrowaveParams {
    pub g: f64,
    pub big_g: f64,
    pub delta: f64,
    pub omega0: f64,
    pub omega_c: f64,
    pub omega: f64,
    pub fock_cutoff: usize,
    pub n_atoms: usize,
}

impl MicrowaveParams {
    /// Resonant drive (ω = ω₀) and cavity at ω_c = ω₀ − δ.
    pub fn new(g: f64, big_g: f64, delta: f64, omega0: f64, fock_cutoff: usize, n_atoms: usize) -> Result<Self> {
        let p = Self { g, big_g, delta, omega0, omega_c: omega0 - delta, omega: omega0, fock_cutoff, n_atoms };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("g", self.g),
            ("G", self.big_g),
            ("delta", self.delta),
            ("omega0", self.omega0),
            ("omega_c", self.omega_c),
            ("omega", self.omega),
        ] {
            if !value.is_finite() {
                return Err(MicrowaveError::InvalidParameter { name, value });
            }
        }
        if self.n_atoms == 0 {
            return Err(MicrowaveError::NoAtoms);
        }
        let scale = self.omega0.abs().max(1.0);
        if (self.omega - self.omega0).abs() > 1e-12 * scale {
            return Err(MicrowaveError::OffResonantDrive { omega0: self.omega0, omega: self.omega });
        }
        let expected = self.omega0 - self.omega_c;
        if (self.delta - expected).abs() > 1e-12 * scale {
            return Err(MicrowaveError::DetuningMismatch { delta: self.delta, expected });
        }
        Ok(())
    }

    pub fn with_drive(self, big_g: f64) -> Self {
        Self { big_g, ..self }
    }

    pub fn with_cutoff(self, fock_cutoff: usize) -> Self {
        Self { fock_cutoff, ..self }
    }

    pub fn with_atoms(self, n_atoms: usize) -> Self {
        Self { n_atoms, ..self }
    }

    pub fn warnings(&self) -> Vec<MicrowaveWarning> {
        let mut out = Vec::new();
        if self.delta.abs() < 2.5 * self.g.abs() {
            out.push(MicrowaveWarning::WeakDispersion { delta: self.delta, g: self.g });
        }
        let bound = 10.0 * self.delta.abs().max(self.g.abs());
        // Plans solved for exactly the bound land on it up to roundoff.
        if self.big_g.abs() < bound * (1.0 - 1e-9) {
            out.push(MicrowaveWarning::WeakDriving { big_g: self.big_g, bound });
        }
        out
    }

    pub fn couplings(&self) -> Result<EffectiveCouplings> {
        effective_couplings(self.g, self.delta)
    }

    fn check_cutoff(&self) -> Result<()> {
        self.validate()?;
        if self.fock_cutoff == 0 && self.g != 0.0 {
            return Err(MicrowaveError::ZeroCutoff(self.g));
        }
        Ok(())
    }
}

/// Second-order dispersive couplings: exchange λ = g²/2δ and Stark shift
/// λ' = g²/4δ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EffectiveCouplings {
    pub lambda: f64,
    pub lambda_prime: f64,
}

pub fn effective_couplings(g: f64, delta: f64) -> Result<EffectiveCouplings> {
    if delta == 0.0 {
        return Err(MicrowaveError::ZeroDetuning);
    }
    if !g.is_finite() || !delta.is_finite() {
        return Err(MicrowaveError::InvalidParameter { name: "g", value: g });
    }
    let lambda_prime = g * g / (4.0 * delta);
    Ok(EffectiveCouplings { lambda: 2.0 * lambda_prime, lambda_prime })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(n_atoms: usize) -> Self {
        if n_atoms % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// Interaction time and drive strength that jointly satisfy `λ·t0 = π/4` and
/// the parity condition on `G·t0`: `(2n + 3/4)π` for odd N, `nπ` for even N.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimingPlan {
    pub t0: f64,
    pub n_branch: u64,
    pub g_required: f64,
    pub parity: Parity,
}

impl TimingPlan {
    /// `G·t0` demanded by the parity condition for branch `n`.
    pub fn phase_for(parity: Parity, n: u64) -> f64 {
        match parity {
            Parity::Odd => (2.0 * n as f64 + 0.75) * PI,
            Parity::Even => n as f64 * PI,
        }
    }

    /// Plan for an explicit branch integer.
    pub fn with_branch(lambda: f64, n_atoms: usize, n: u64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(MicrowaveError::NonPositiveLambda(lambda));
        }
        let parity = Parity::of(n_atoms);
        let t0 = FRAC_PI_4 / lambda;
        Ok(Self { t0, n_branch: n, g_required: Self::phase_for(parity, n) / t0, parity })
    }

    /// Whether (λ, G) are the couplings this plan was solved for, with
    /// relative tolerance `1e-10`.
    pub fn is_satisfied_by(&self, lambda: f64, big_g: f64) -> bool {
        let lt = lambda * self.t0;
        (lt - FRAC_PI_4).abs() <= PLAN_TOL
            && (big_g * self.t0 - Self::phase_for(self.parity, self.n_branch)).abs()
                <= PLAN_TOL * (big_g * self.t0).abs().max(1.0)
    }
}

/// Smallest branch `n` whose drive `G_required ≥ min_g`. For even N the
/// undriven branch `n = 0` is excluded.
pub fn make_timing_plan(lambda: f64, n_atoms: usize, min_g: f64) -> Result<TimingPlan> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(MicrowaveError::NonPositiveLambda(lambda));
    }
    if n_atoms == 0 {
        return Err(MicrowaveError::NoAtoms);
    }
    // G_required/λ is 8n + 3 (odd) or 4n (even); the slack absorbs rounding
    // in min_g/λ when min_g lands exactly on a branch.
    let ratio = (min_g / lambda).max(0.0) - 1e-9;
    let n = match Parity::of(n_atoms) {
        Parity::Odd => ((ratio - 3.0) / 8.0).ceil().max(0.0) as u64,
        Parity::Even => (ratio / 4.0).ceil().max(1.0) as u64,
    };
    TimingPlan::with_branch(lambda, n_atoms, n)
}

/// Default lower bound for the drive, 10·max(δ, g).
pub fn default_min_drive(g: f64, delta: f64) -> f64 {
    10.0 * delta.abs().max(g.abs())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn local(entries: [[Complex64; 2]; 2]) -> DMatrix<Complex64> {
    DMatrix::from_fn(2, 2, |r, k| entries[r][k])
}

/// Single-atom operators in the `(g, e)` basis.
pub mod ops {
    use super::*;

    /// `|e⟩⟨g|`
    pub fn sigma_plus() -> DMatrix<Complex64> {
        local([[c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn sigma_x() -> DMatrix<Complex64> {
        local([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
    }

    /// Pauli y in index order, `[[0, −i], [i, 0]]`.
    pub fn sigma_y() -> DMatrix<Complex64> {
        local([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
    }

    /// Pauli z in index order, `|g⟩⟨g| − |e⟩⟨e|`.
    pub fn sigma_z() -> DMatrix<Complex64> {
        local([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    /// Energy operator `S_z = (|e⟩⟨e| − |g⟩⟨g|)/2`.
    pub fn s_z() -> DMatrix<Complex64> {
        sigma_z() * c(-0.5, 0.0)
    }

    pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(dim, dim, |r, k| if k == r + 1 { c((k as f64).sqrt(), 0.0) } else { c(0.0, 0.0) })
    }

    pub fn number(dim: usize) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&DVector::from_fn(dim, |n, _| c(n as f64, 0.0)))
    }
}

pub fn atom_labels(n_atoms: usize) -> Vec<String> {
    (1..=n_atoms).map(|j| format!("{ATOM_PREFIX}{j}")).collect()
}

pub fn atom_space(n_atoms: usize) -> Result<HilbertSpace> {
    if n_atoms == 0 {
        return Err(MicrowaveError::NoAtoms);
    }
    Ok(HilbertSpace::qubits(ATOM_PREFIX, n_atoms)?)
}

/// `atom1 … atomN ⊗ cavity[fock_cutoff + 1]`
pub fn joint_space(p: &MicrowaveParams) -> Result<HilbertSpace> {
    Ok(atom_space(p.n_atoms)?.tensor(&HilbertSpace::single(CAVITY, p.fock_cutoff + 1)?)?)
}

/// `Σ_j local_j` over every atom factor of `space`.
fn collective(space: &HilbertSpace, n_atoms: usize, local: &DMatrix<Complex64>) -> Result<OperatorMatrix> {
    let mut acc = OperatorMatrix::zeros(space.clone());
    for label in atom_labels(n_atoms) {
        acc = acc + &OperatorMatrix::embed(space, &label, local)?;
    }
    Ok(acc)
}

/// `Σ_j local_j ⊗ a`
fn collective_with_a(space: &HilbertSpace, p: &MicrowaveParams, local: &DMatrix<Complex64>) -> Result<OperatorMatrix> {
    let a = ops::annihilation(p.fock_cutoff + 1);
    let mut acc = OperatorMatrix::zeros(space.clone());
    for label in atom_labels(p.n_atoms) {
        acc = acc + &OperatorMatrix::product(space, &[(label.as_str(), local), (CAVITY, &a)])?;
    }
    Ok(acc)
}

/// Collective `S_x = ½Σσx` on the atoms-only space.
pub fn collective_sx(n_atoms: usize) -> Result<OperatorMatrix> {
    let space = atom_space(n_atoms)?;
    Ok(collective(&space, n_atoms, &ops::sigma_x())? * 0.5)
}

/// Lab frame:
/// `ω₀ΣS_z + ω_c a†a + GΣ(e^{−iωt}S⁺ + e^{iωt}S⁻) + gΣ(S⁺a + S⁻a†)`.
pub fn build_full_hamiltonian(p: &MicrowaveParams) -> Result<TimeDependentHamiltonian> {
    p.check_cutoff()?;
    let space = joint_space(p)?;
    let free = collective(&space, p.n_atoms, &ops::s_z())? * p.omega0
        + &(OperatorMatrix::embed(&space, CAVITY, &ops::number(p.fock_cutoff + 1))? * p.omega_c);
    let jc = collective_with_a(&space, p, &ops::sigma_plus())?;
    let mut h = TimeDependentHamiltonian::constant(free + &((jc.clone() + &jc.adjoint()) * p.g));
    h.push_hermitian_pair(p.big_g, -p.omega, collective(&space, p.n_atoms, &ops::sigma_plus())?)?;
    Ok(h)
}

/// Interaction picture with respect to `ω₀ΣS_z + ω_c a†a`:
/// `GΣσx + gΣ(e^{iδt}S⁺a + e^{−iδt}S⁻a†)`.
pub fn build_interaction_hamiltonian(p: &MicrowaveParams) -> Result<TimeDependentHamiltonian> {
    p.check_cutoff()?;
    let space = joint_space(p)?;
    let mut h = TimeDependentHamiltonian::constant(collective(&space, p.n_atoms, &ops::sigma_x())? * p.big_g);
    h.push_hermitian_pair(p.g, p.delta, collective_with_a(&space, p, &ops::sigma_plus())?)?;
    Ok(h)
}

/// Interaction picture additionally rotated by the drive, `ψ' = e^{i2GS_x t}ψ`.
///
/// Each `S⁺_j` becomes `σx/2 + e^{i2Gt}(σz − iσy)/4 − e^{−i2Gt}(σz + iσy)/4`
/// (index-order Paulis), i.e. a slow part along `σx` and two sidebands at
/// `±2G`.
pub fn build_dressed_hamiltonian(p: &MicrowaveParams) -> Result<TimeDependentHamiltonian> {
    p.check_cutoff()?;
    let space = joint_space(p)?;
    let up = (ops::sigma_z() - ops::sigma_y() * c(0.0, 1.0)) * c(0.25, 0.0);
    let down = (ops::sigma_z() + ops::sigma_y() * c(0.0, 1.0)) * c(-0.25, 0.0);
    let mut h = TimeDependentHamiltonian::new(space.clone());
    h.push_hermitian_pair(p.g, p.delta, collective_with_a(&space, p, &(ops::sigma_x() * c(0.5, 0.0)))?)?;
    h.push_hermitian_pair(p.g, p.delta + 2.0 * p.big_g, collective_with_a(&space, p, &up)?)?;
    h.push_hermitian_pair(p.g, p.delta - 2.0 * p.big_g, collective_with_a(&space, p, &down)?)?;
    Ok(h)
}

/// Strong-driving limit of the dressed form: `g·S_x(e^{iδt}a + e^{−iδt}a†)`.
pub fn build_strong_driving_hamiltonian(p: &MicrowaveParams) -> Result<TimeDependentHamiltonian> {
    p.check_cutoff()?;
    let space = joint_space(p)?;
    let mut h = TimeDependentHamiltonian::new(space.clone());
    h.push_hermitian_pair(p.g, p.delta, collective_with_a(&space, p, &(ops::sigma_x() * c(0.5, 0.0)))?)?;
    Ok(h)
}

/// Atoms-only effective generator `2G·S_x + 2λ·S_x²`, with λ from `p`.
pub fn build_effective_hamiltonian(p: &MicrowaveParams) -> Result<OperatorMatrix> {
    let lambda = p.couplings()?.lambda;
    effective_hamiltonian(p.n_atoms, lambda, p.big_g)
}

pub fn effective_hamiltonian(n_atoms: usize, lambda: f64, big_g: f64) -> Result<OperatorMatrix> {
    let sx = collective_sx(n_atoms)?;
    let sx2 = &sx * &sx;
    Ok(sx * (2.0 * big_g) + &(sx2 * (2.0 * lambda)))
}

/// The pairwise form `λ'Σ_j(|e⟩⟨e| + |g⟩⟨g|) + λΣ_{i<j}(S_i⁺S_j⁺ + S_i⁺S_j⁻ + h.c.)`,
/// which equals `2λS_x²` identically.
pub fn pairwise_effective_hamiltonian(n_atoms: usize, cpl: EffectiveCouplings) -> Result<OperatorMatrix> {
    pairwise(n_atoms, cpl, true)
}

/// The pairwise form without the `S_i⁺S_j⁺` and `S_i⁻S_j⁻` terms, which only
/// the drive makes resonant. Used for the undriven comparison.
pub fn driveless_effective_hamiltonian(n_atoms: usize, cpl: EffectiveCouplings) -> Result<OperatorMatrix> {
    pairwise(n_atoms, cpl, false)
}

fn pairwise(n_atoms: usize, cpl: EffectiveCouplings, with_double: bool) -> Result<OperatorMatrix> {
    let space = atom_space(n_atoms)?;
    let labels = atom_labels(n_atoms);
    let sp = ops::sigma_plus();
    let sm = sp.adjoint();
    let mut acc = OperatorMatrix::identity(space.clone()) * (cpl.lambda_prime * n_atoms as f64);
    for i in 0..n_atoms {
        for j in (i + 1)..n_atoms {
            let (li, lj) = (labels[i].as_str(), labels[j].as_str());
            let mut pair = OperatorMatrix::product(&space, &[(li, &sp), (lj, &sm)])?;
            if with_double {
                pair = pair + &OperatorMatrix::product(&space, &[(li, &sp), (lj, &sp)])?;
            }
            acc = acc + &((pair.clone() + &pair.adjoint()) * cpl.lambda);
        }
    }
    Ok(acc)
}

/// Maps dressed-basis amplitudes to computational ones: the N-fold tensor
/// power of `[[1, 1], [1, −1]]/√2`, with `+ ↔ 0` and `− ↔ 1`. Self-inverse.
pub fn sx_basis_transform(n_atoms: usize) -> Result<OperatorMatrix> {
    let space = atom_space(n_atoms)?;
    let dim = space.dim();
    let scale = FRAC_1_SQRT_2.powi(n_atoms as i32);
    let m = DMatrix::from_fn(dim, dim, |r, k| {
        let sign = if (r & k).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        c(sign * scale, 0.0)
    });
    Ok(OperatorMatrix::new(space, m)?)
}

/// Output of [`evolve_atoms_effective`].
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveEvolution {
    pub state: StateVector,
    pub warning: Option<MicrowaveWarning>,
}

/// Applies `exp[−i(2GS_x + 2λS_x²)t0]` to an atoms-only state. A plan that
/// (λ, G) do not satisfy is reported, along with the fidelity between the
/// actual output and the one the plan's own couplings would give.
pub fn evolve_atoms_effective(
    psi_atoms: &StateVector,
    plan: &TimingPlan,
    lambda: f64,
    big_g: f64,
) -> Result<EffectiveEvolution> {
    let n_atoms = psi_atoms.space().len();
    atom_space(n_atoms)?.ensure_same(psi_atoms.space())?;
    let run = |lambda: f64, big_g: f64| -> Result<StateVector> {
        let h = effective_hamiltonian(n_atoms, lambda, big_g)?;
        Ok(propagator(&h, plan.t0).apply(psi_atoms)?)
    };
    let state = run(lambda, big_g)?;
    let warning = if plan.is_satisfied_by(lambda, big_g) {
        None
    } else {
        let planned = run(FRAC_PI_4 / plan.t0, plan.g_required)?;
        Some(MicrowaveWarning::TimingViolated {
            lambda_t0: lambda * plan.t0,
            g_t0: big_g * plan.t0,
            fidelity_to_plan: hilbert::fidelity(&state, &planned)?,
        })
    };
    Ok(EffectiveEvolution { state, warning })
}

/// `psi_atoms ⊗ |n⟩` on the joint space of `p`.
pub fn with_fock(p: &MicrowaveParams, psi_atoms: &StateVector, n: usize) -> Result<StateVector> {
    if n > p.fock_cutoff {
        return Err(MicrowaveError::CutoffTooSmall { required: n, got: p.fock_cutoff });
    }
    check_atoms(p, psi_atoms)?;
    let fock = StateVector::basis(HilbertSpace::single(CAVITY, p.fock_cutoff + 1)?, &[n])?;
    Ok(psi_atoms.tensor(&fock)?)
}

fn check_atoms(p: &MicrowaveParams, psi_atoms: &StateVector) -> Result<()> {
    let space = atom_space(p.n_atoms)?;
    if psi_atoms.space().len() != p.n_atoms {
        return Err(MicrowaveError::AtomCount { expected: p.n_atoms, got: psi_atoms.space().len() });
    }
    Ok(space.ensure_same(psi_atoms.space())?)
}

/// Reduced atomic density matrix of a joint atoms ⊗ cavity state.
pub fn reduced_atoms(psi: &StateVector, n_atoms: usize) -> Result<OperatorMatrix> {
    let labels = atom_labels(n_atoms);
    let keep: Vec<&str> = labels.iter().map(String::as_str).collect();
    Ok(reduced_state(psi, &keep)?)
}

/// Evolves `psi_atoms ⊗ |n⟩` under `hgen` for time `t` with the generator's
/// default RK4 step.
pub fn evolve_with_cavity<G: TimeGenerator + ?Sized>(
    hgen: &G,
    p: &MicrowaveParams,
    psi_atoms: &StateVector,
    fock_n: usize,
    t: f64,
) -> Result<StateVector> {
    let psi0 = with_fock(p, psi_atoms, fock_n)?;
    Ok(evolve_timedep(hgen, &psi0, t, hgen.default_step())?)
}

/// Fidelity `⟨φ|ρ_atoms|φ⟩` between the interaction-picture evolution of
/// `psi_atoms ⊗ |0⟩` and the effective atoms-only evolution over `t`.
pub fn effective_model_fidelity(p: &MicrowaveParams, psi_atoms: &StateVector, t: f64) -> Result<f64> {
    let full = evolve_with_cavity(&build_interaction_hamiltonian(p)?, p, psi_atoms, 0, t)?;
    let rho = reduced_atoms(&full, p.n_atoms)?;
    let phi = propagator(&build_effective_hamiltonian(p)?, t).apply(psi_atoms)?;
    Ok(state_fidelity(&phi, &rho)?)
}

/// Fidelity between lab-frame evolution and interaction-picture evolution
/// rotated back by `e^{−i(ω₀ΣS_z + ω_c a†a)t}`, from `psi_atoms ⊗ |fock_n⟩`.
pub fn lab_frame_consistency(p: &MicrowaveParams, psi_atoms: &StateVector, fock_n: usize, t: f64) -> Result<f64> {
    let lab = evolve_with_cavity(&build_full_hamiltonian(p)?, p, psi_atoms, fock_n, t)?;
    let rot = evolve_with_cavity(&build_interaction_hamiltonian(p)?, p, psi_atoms, fock_n, t)?;
    let space = joint_space(p)?;
    let free = (collective(&space, p.n_atoms, &ops::s_z())? * p.omega0
        + &(OperatorMatrix::embed(&space, CAVITY, &ops::number(p.fock_cutoff + 1))? * p.omega_c))
        .into_matrix();
    // The free part is diagonal, so its propagator is a phase per basis state.
    let amps =
        DVector::from_fn(space.dim(), |k, _| Complex64::from_polar(1.0, -free[(k, k)].re * t) * rot.amplitudes()[k]);
    let back = StateVector::new(space, amps)?;
    Ok(hilbert::fidelity(&lab, &back)?)
}

/// Fidelity between interaction-picture evolution and dressed-frame
/// evolution rotated back by `e^{−i2GS_x t}`, from `psi_atoms ⊗ |fock_n⟩`.
pub fn dressed_frame_consistency(p: &MicrowaveParams, psi_atoms: &StateVector, fock_n: usize, t: f64) -> Result<f64> {
    let direct = evolve_with_cavity(&build_interaction_hamiltonian(p)?, p, psi_atoms, fock_n, t)?;
    let dressed = evolve_with_cavity(&build_dressed_hamiltonian(p)?, p, psi_atoms, fock_n, t)?;
    let space = joint_space(p)?;
    let drive = collective(&space, p.n_atoms, &ops::sigma_x())? * p.big_g;
    let back = propagator(&drive, t).apply(&dressed)?;
    Ok(hilbert::fidelity(&direct, &back)?)
}

/// Fidelity between dressed-frame evolution and its strong-driving limit
/// (sidebands at `δ ± 2G` dropped), from `psi_atoms ⊗ |fock_n⟩`.
pub fn strong_driving_consistency(p: &MicrowaveParams, psi_atoms: &StateVector, fock_n: usize, t: f64) -> Result<f64> {
    let dressed = evolve_with_cavity(&build_dressed_hamiltonian(p)?, p, psi_atoms, fock_n, t)?;
    let strong = evolve_with_cavity(&build_strong_driving_hamiltonian(p)?, p, psi_atoms, fock_n, t)?;
    Ok(hilbert::fidelity(&dressed, &strong)?)
}

/// Cavity-elimination check at one initial Fock occupation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DispersiveReport {
    pub fock_n: usize,
    /// `⟨φ|ρ_atoms|φ⟩` against `exp(−i2λS_x²t)ψ`.
    pub fidelity: f64,
    /// Population that left the initial Fock level.
    pub leakage: f64,
    /// Perturbative ceiling `8N²(g/2δ)²(n + 1)` on `leakage`.
    pub leakage_bound: f64,
}

/// Evolves `psi_atoms ⊗ |fock_n⟩` under the strong-driving Hamiltonian for
/// `t` and compares the atoms with the undriven effective model.
pub fn dispersive_validity(
    p: &MicrowaveParams,
    psi_atoms: &StateVector,
    fock_n: usize,
    t: f64,
) -> Result<DispersiveReport> {
    if fock_n + 2 > p.fock_cutoff {
        return Err(MicrowaveError::CutoffTooSmall { required: fock_n + 2, got: p.fock_cutoff });
    }
    let n = p.n_atoms as f64;
    let ratio = if p.g == 0.0 { 0.0 } else { p.g / (2.0 * p.delta) };
    let leakage_bound = 8.0 * n * n * ratio * ratio * (fock_n as f64 + 1.0);
    if p.g == 0.0 {
        check_atoms(p, psi_atoms)?;
        return Ok(DispersiveReport { fock_n, fidelity: 1.0, leakage: 0.0, leakage_bound });
    }
    let (psi, rho) = strong_driving_atoms(p, psi_atoms, fock_n, t)?;
    let lambda = p.couplings()?.lambda;
    let phi = propagator(&effective_hamiltonian(p.n_atoms, lambda, 0.0)?, t).apply(psi_atoms)?;
    let stay = outcome_probabilities(&psi, CAVITY)?[fock_n];
    Ok(DispersiveReport {
        fock_n,
        fidelity: state_fidelity(&phi, &rho)?,
        leakage: (1.0 - stay).max(0.0),
        leakage_bound,
    })
}

fn strong_driving_atoms(
    p: &MicrowaveParams,
    psi_atoms: &StateVector,
    fock_n: usize,
    t: f64,
) -> Result<(StateVector, OperatorMatrix)> {
    let psi = evolve_with_cavity(&build_strong_driving_hamiltonian(p)?, p, psi_atoms, fock_n, t)?;
    let rho = reduced_atoms(&psi, p.n_atoms)?;
    Ok((psi, rho))
}

/// Pairwise Uhlmann fidelities between the reduced atomic states reached
/// under the strong-driving Hamiltonian from each initial Fock level in
/// `fock_ns`. Rows are `(n_i, n_j, F)` for `i < j`.
pub fn fock_independence(
    p: &MicrowaveParams,
    psi_atoms: &StateVector,
    fock_ns: &[usize],
    t: f64,
) -> Result<Vec<(usize, usize, f64)>> {
    if let Some(&max) = fock_ns.iter().max() {
        if max + 2 > p.fock_cutoff {
            return Err(MicrowaveError::CutoffTooSmall { required: max + 2, got: p.fock_cutoff });
        }
    }
    let rhos = fock_ns
        .iter()
        .map(|&n| strong_driving_atoms(p, psi_atoms, n, t).map(|(_, rho)| rho))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..fock_ns.len() {
        for j in (i + 1)..fock_ns.len() {
            out.push((fock_ns[i], fock_ns[j], density_fidelity(&rhos[i], &rhos[j])?));
        }
    }
    Ok(out)
}

/// The effective generator extended by the identity on a cavity of
/// `fock_cutoff + 1` levels.
pub fn effective_with_cavity(p: &MicrowaveParams) -> Result<OperatorMatrix> {
    let h = build_effective_hamiltonian(p)?;
    let cav = OperatorMatrix::identity(HilbertSpace::single(CAVITY, p.fock_cutoff + 1)?);
    Ok(h.tensor(&cav)?)
}

/// Largest Hermiticity residual of `hgen` over `times`.
pub fn max_hermiticity_residual<G: TimeGenerator + ?Sized>(hgen: &G, times: &[f64]) -> f64 {
    times.iter().map(|&t| hgen.at(t).hermiticity_residual()).fold(0.0, f64::max)
}

pub fn is_hermitian_everywhere<G: TimeGenerator + ?Sized>(hgen: &G, times: &[f64]) -> bool {
    max_hermiticity_residual(hgen, times) <= HERMITIAN_TOL
}
