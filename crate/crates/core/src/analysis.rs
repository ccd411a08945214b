// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! Error and efficiency studies: staggered atom entry into the microwave
//! cavity, and optical success probability over loss-rate grids.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hilbert::{expm::propagator, HilbertError, HilbertSpace, OperatorMatrix, StateVector};
use crate::microwave::{atom_space, ops, MicrowaveError};
use crate::optical::{self, OpticalCavityParams, OpticalError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("stagger analysis supports 2 or 3 atoms, got {0}")]
    UnsupportedAtomCount(usize),
    #[error("closed-form stagger infidelity exists only for 2 atoms, got {0}")]
    NoClosedForm(usize),
    #[error("entry offset δt = {delta_t} must lie in [0, t0/2] with t0 = {t0}")]
    OffsetOutOfRange { delta_t: f64, t0: f64 },
    #[error("all-atom window t0 − Nδt = {0} is negative")]
    NegativeWindow(f64),
    #[error("grid value {name} = {value} must be finite and non-negative")]
    BadGrid { name: &'static str, value: f64 },
    #[error(transparent)]
    Microwave(#[from] MicrowaveError),
    #[error(transparent)]
    Optical(#[from] OpticalError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;

/// Staggered passage through the microwave cavity, rad/μs and μs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StaggerSpec {
    pub delta_t: f64,
    pub t0: f64,
    pub n_atoms: usize,
    pub big_g: f64,
    pub lambda: f64,
}

impl StaggerSpec {
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.n_atoms) {
            return Err(AnalysisError::UnsupportedAtomCount(self.n_atoms));
        }
        if !(self.delta_t >= 0.0 && self.delta_t <= 0.5 * self.t0) {
            return Err(AnalysisError::OffsetOutOfRange { delta_t: self.delta_t, t0: self.t0 });
        }
        Ok(())
    }
}

/// Which passage times the offset perturbs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StaggerSchedule {
    /// Atom k enters at k·δt. The leading atom leaves at t0 − δt and the
    /// others dwell the full t0, so every atom shares the cavity for
    /// t0 − N·δt.
    #[default]
    SequentialEntry,
    /// All atoms enter together; atom k leaves at t0 − k·δt (atoms moving
    /// at different speeds).
    UnequalExit,
}

impl StaggerSchedule {
    /// Entry and exit time of every atom.
    pub fn windows(self, n_atoms: usize, t0: f64, delta_t: f64) -> Vec<(f64, f64)> {
        match self {
            StaggerSchedule::SequentialEntry => (0..n_atoms)
                .map(|k| {
                    let entry = k as f64 * delta_t;
                    let exit = if k == 0 { t0 - delta_t } else { entry + t0 };
                    (entry, exit)
                })
                .collect(),
            StaggerSchedule::UnequalExit => (0..n_atoms).map(|k| (0.0, t0 - k as f64 * delta_t)).collect(),
        }
    }
}

/// Closed-form two-atom result
/// `sin²(Gδt) + cos²(Gδt)·{1 − sin[2λ(t0 − 2δt)]}/2`.
pub fn infidelity_stagger_analytic(s: &StaggerSpec) -> Result<f64> {
    if s.n_atoms != 2 {
        return Err(AnalysisError::NoClosedForm(s.n_atoms));
    }
    s.validate()?;
    let (sin, cos) = (s.big_g * s.delta_t).sin_cos();
    let v = sin * sin + cos * cos * (1.0 - (2.0 * s.lambda * (s.t0 - 2.0 * s.delta_t)).sin()) / 2.0;
    Ok(v.clamp(0.0, 1.0))
}

/// `2G·S_x + 2λ·S_x²` where `S_x` runs only over the atoms in `present`.
fn partial_generator(space: &HilbertSpace, present: &[usize], big_g: f64, lambda: f64) -> Result<OperatorMatrix> {
    let labels: Vec<String> = space.labels().map(str::to_string).collect();
    let mut sx = OperatorMatrix::zeros(space.clone());
    for &k in present {
        sx = sx + &OperatorMatrix::embed(space, &labels[k], &ops::sigma_x())?;
    }
    let sx = sx * 0.5;
    let sx2 = &sx * &sx;
    Ok(sx * (2.0 * big_g) + &(sx2 * (2.0 * lambda)))
}

/// Piecewise-constant evolution: between consecutive entry/exit times the
/// atoms inside the cavity evolve under their own effective generator.
pub fn evolve_windows(psi: &StateVector, windows: &[(f64, f64)], big_g: f64, lambda: f64) -> Result<StateVector> {
    let space = psi.space().clone();
    let mut times: Vec<f64> = windows.iter().flat_map(|&(a, b)| [a, b]).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut state = psi.clone();
    for seg in times.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b <= a {
            continue;
        }
        let present: Vec<usize> =
            windows.iter().enumerate().filter(|(_, &(e, x))| e <= a && x >= b).map(|(k, _)| k).collect();
        if present.is_empty() {
            continue;
        }
        let h = partial_generator(&space, &present, big_g, lambda)?;
        state = propagator(&h, b - a).apply(&state)?;
    }
    Ok(state)
}

/// `1 − |⟨ideal|actual⟩|²` for `|g…g⟩`, with the ideal being the unstaggered
/// passage. The effective propagator is diagonal in the dressed product
/// basis, so every computational input gives this same value.
pub fn infidelity_stagger_simulated(s: &StaggerSpec) -> Result<f64> {
    infidelity_stagger_with(s, StaggerSchedule::SequentialEntry)
}

pub fn infidelity_stagger_with(s: &StaggerSpec, schedule: StaggerSchedule) -> Result<f64> {
    s.validate()?;
    let window = s.t0 - s.n_atoms as f64 * s.delta_t;
    if schedule == StaggerSchedule::SequentialEntry && window < 0.0 {
        return Err(AnalysisError::NegativeWindow(window));
    }
    let space = atom_space(s.n_atoms)?;
    let psi = StateVector::basis(space, &vec![0; s.n_atoms])?;
    let ideal = evolve_windows(&psi, &vec![(0.0, s.t0); s.n_atoms], s.big_g, s.lambda)?;
    let actual = evolve_windows(&psi, &schedule.windows(s.n_atoms, s.t0, s.delta_t), s.big_g, s.lambda)?;
    Ok((1.0 - ideal.inner(&actual)?.norm_sqr()).clamp(0.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    /// One coordinate per axis.
    pub point: Vec<f64>,
    /// One value per column; NaN where undefined.
    pub values: Vec<f64>,
    pub flag: Option<String>,
}

/// Observables over the Cartesian product of the axes, rows in row-major
/// order (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub axes: Vec<SweepAxis>,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    /// Shape of the grid, one length per axis.
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

fn check_grid(name: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        Some(&value) => Err(AnalysisError::BadGrid { name, value }),
        None => Ok(()),
    }
}

/// Success probability over a (γ, κ) grid for `n_cavities` identical
/// cavities of coupling `h` (rad/μs). Columns: `tau`, `p_single`, `p_total`.
/// Overdamped points are kept with NaN values and a flag.
pub fn sweep_success(h: f64, gammas: &[f64], kappas: &[f64], n_cavities: usize) -> Result<SweepTable> {
    check_grid("gamma", gammas)?;
    check_grid("kappa", kappas)?;
    let points = cartesian(&[gammas.to_vec(), kappas.to_vec()]);
    let rows = points
        .into_par_iter()
        .map(|point| {
            let row = OpticalCavityParams::symmetric(h, point[0], point[1]).and_then(|p| {
                let tau = optical::solve_interaction_time(&p)?;
                let single = optical::success_probability(&p, tau)?;
                Ok(vec![tau, single, single.powi(n_cavities as i32)])
            });
            match row {
                Ok(values) => Ok(SweepRow { point, values, flag: None }),
                Err(e @ OpticalError::Overdamped { .. }) => {
                    Ok(SweepRow { point, values: vec![f64::NAN; 3], flag: Some(e.to_string()) })
                }
                Err(e) => Err(e.into()),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axes: vec![
            SweepAxis { name: "gamma".into(), values: gammas.to_vec() },
            SweepAxis { name: "kappa".into(), values: kappas.to_vec() },
        ],
        columns: vec!["tau".into(), "p_single".into(), "p_total".into()],
        rows,
    })
}

/// Stagger infidelity over `δt/t0 × N`. Columns: `G`, `infid_analytic`
/// (NaN for N ≠ 2), `infid_sim`.
pub fn sweep_stagger(
    fractions: &[f64],
    atom_counts: &[usize],
    t0: f64,
    big_g: f64,
    lambda: f64,
    schedule: StaggerSchedule,
) -> Result<SweepTable> {
    check_grid("dt_over_t0", fractions)?;
    let counts: Vec<f64> = atom_counts.iter().map(|&n| n as f64).collect();
    let points = cartesian(&[fractions.to_vec(), counts.clone()]);
    let rows = points
        .into_par_iter()
        .map(|point| {
            let spec = StaggerSpec { delta_t: point[0] * t0, t0, n_atoms: point[1] as usize, big_g, lambda };
            let analytic = if spec.n_atoms == 2 { infidelity_stagger_analytic(&spec)? } else { f64::NAN };
            let sim = infidelity_stagger_with(&spec, schedule)?;
            Ok(SweepRow { point, values: vec![big_g, analytic, sim], flag: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axes: vec![
            SweepAxis { name: "dt_over_t0".into(), values: fractions.to_vec() },
            SweepAxis { name: "n_atoms".into(), values: counts },
        ],
        columns: vec!["G".into(), "infid_analytic".into(), "infid_sim".into()],
        rows,
    })
}

/// `n + 1` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![lo];
    }
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}
