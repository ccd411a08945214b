// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! `RunConfig`: the JSON document every subcommand reads.
//!
//! Frequencies are linear MHz and converted to rad/μs here. Unknown keys are
//! rejected and every parse error carries the key path that caused it.

use std::fs;
use std::path::{Path, PathBuf};

use cqed_core::analysis::StaggerSchedule;
use cqed_core::microwave::{effective_couplings, make_timing_plan, MicrowaveParams, TimingPlan};
use cqed_core::optical::OpticalCavityParams;
use cqed_core::protocol::{DriveMode, ProtocolConfig};
use cqed_core::units::from_mhz;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// One entry per optical cavity; a single entry is reused for every atom.
    pub optical: Vec<OpticalSection>,
    pub microwave: MicrowaveSection,
    #[serde(default)]
    pub plan: PlanSection,
    #[serde(default)]
    pub drive: DriveSetting,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticalSection {
    pub h_r_mhz: f64,
    pub h_l_mhz: f64,
    pub gamma_mhz: f64,
    pub kappa_mhz: f64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicrowaveSection {
    pub g_mhz: f64,
    pub delta_mhz: f64,
    /// Atomic transition frequency; defaults to 20 times the larger of the
    /// drive and the detuning.
    #[serde(default)]
    pub omega0_mhz: Option<f64>,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff: usize,
}

fn default_cutoff() -> usize {
    8
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    /// The drive branch is the smallest with `G ≥ min_drive_factor·max(δ, g)`.
    #[serde(default = "default_min_drive_factor")]
    pub min_drive_factor: f64,
    /// Pins the branch integer instead of searching.
    #[serde(default)]
    pub branch: Option<u64>,
}

fn default_min_drive_factor() -> f64 {
    10.0
}

impl Default for PlanSection {
    fn default() -> Self {
        Self { min_drive_factor: default_min_drive_factor(), branch: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveSetting {
    #[default]
    Driven,
    Driveless,
}

impl From<DriveSetting> for DriveMode {
    fn from(d: DriveSetting) -> Self {
        match d {
            DriveSetting::Driven => DriveMode::Driven,
            DriveSetting::Driveless => DriveMode::Driveless,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub success: Option<SuccessSweep>,
    #[serde(default)]
    pub stagger: Option<StaggerSweep>,
}

/// Inclusive grid of `points` evenly spaced values.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self, key: &str) -> Result<Vec<f64>, CliError> {
        if self.points == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Config(format!("{key}: need finite bounds and at least one point")));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        Ok(cqed_core::analysis::linspace(self.start, self.stop, self.points - 1))
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuccessSweep {
    /// Coupling of both circular polarizations.
    pub h_mhz: f64,
    pub gamma_mhz: Grid,
    pub kappa_mhz: Grid,
    #[serde(default = "default_cavities")]
    pub cavities: usize,
}

fn default_cavities() -> usize {
    2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaggerSweep {
    pub dt_over_t0: Grid,
    #[serde(default = "default_stagger_atoms")]
    pub n_atoms: Vec<usize>,
    #[serde(default)]
    pub schedule: ScheduleSetting,
}

fn default_stagger_atoms() -> Vec<usize> {
    vec![2, 3]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleSetting {
    #[default]
    SequentialEntry,
    UnequalExit,
}

impl From<ScheduleSetting> for StaggerSchedule {
    fn from(s: ScheduleSetting) -> Self {
        match s {
            ScheduleSetting::SequentialEntry => StaggerSchedule::SequentialEntry,
            ScheduleSetting::UnequalExit => StaggerSchedule::UnequalExit,
        }
    }
}

/// Default destinations, overridden by `--out`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub table: Option<PathBuf>,
}

/// Microwave stage with the plan that fixed its drive.
#[derive(Clone, Copy, Debug)]
pub struct ResolvedMicrowave {
    pub params: MicrowaveParams,
    pub plan: TimingPlan,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    /// Atom count implied by the optical section, at least two.
    pub fn default_atoms(&self) -> usize {
        self.optical.len().max(2)
    }

    /// Optical cavities for `n` atoms in rad/μs.
    pub fn optical_params(&self, n: usize) -> Result<Vec<OpticalCavityParams>, CliError> {
        let sections = match self.optical.len() {
            1 => vec![self.optical[0]; n],
            len if len == n => self.optical.clone(),
            len => {
                return Err(CliError::Config(format!("optical: {len} cavities given for {n} atoms, expected 1 or {n}")))
            }
        };
        sections
            .iter()
            .enumerate()
            .map(|(j, s)| {
                OpticalCavityParams::new(
                    from_mhz(s.h_r_mhz),
                    from_mhz(s.h_l_mhz),
                    from_mhz(s.gamma_mhz),
                    from_mhz(s.kappa_mhz),
                )
                .map_err(|e| CliError::Config(format!("optical[{j}]: {e}")))
            })
            .collect()
    }

    /// Couplings in rad/μs as `(g, δ)`.
    pub fn couplings(&self) -> (f64, f64) {
        (from_mhz(self.microwave.g_mhz), from_mhz(self.microwave.delta_mhz))
    }

    /// Microwave parameters for `n` atoms with the drive set by the timing
    /// plan. Driveless runs keep the plan's `t0` with `G = 0`.
    pub fn microwave_params(&self, n: usize) -> Result<ResolvedMicrowave, CliError> {
        let (g, delta) = self.couplings();
        let lambda = effective_couplings(g, delta)?.lambda;
        let plan = self.timing_plan(lambda, n)?;
        let big_g = match self.drive {
            DriveSetting::Driven => plan.g_required,
            DriveSetting::Driveless => 0.0,
        };
        let params = self.microwave_with_drive(n, big_g)?;
        Ok(ResolvedMicrowave { params, plan })
    }

    pub fn timing_plan(&self, lambda: f64, n: usize) -> Result<TimingPlan, CliError> {
        let (g, delta) = self.couplings();
        let factor = self.plan.min_drive_factor;
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(CliError::Config(format!(
                "plan.min_drive_factor: must be finite and non-negative, got {factor}"
            )));
        }
        let plan = match self.plan.branch {
            Some(branch) => TimingPlan::with_branch(lambda, n, branch)?,
            None => make_timing_plan(lambda, n, factor * delta.abs().max(g.abs()))?,
        };
        Ok(plan)
    }

    /// Microwave parameters for an explicit drive, bypassing the plan.
    pub fn microwave_with_drive(&self, n: usize, big_g: f64) -> Result<MicrowaveParams, CliError> {
        let (g, delta) = self.couplings();
        let omega0 = match self.microwave.omega0_mhz {
            Some(f) => from_mhz(f),
            None => 20.0 * big_g.abs().max(delta.abs()),
        };
        Ok(MicrowaveParams::new(g, big_g, delta, omega0, self.microwave.fock_cutoff, n)?)
    }

    pub fn protocol(&self, n: usize) -> Result<ProtocolConfig, CliError> {
        let optical = self.optical_params(n)?;
        let mw = self.microwave_params(n)?;
        let cfg = ProtocolConfig { optical, microwave: mw.params, plan: mw.plan, drive: self.drive.into() };
        cfg.validate()?;
        Ok(cfg)
    }
}
