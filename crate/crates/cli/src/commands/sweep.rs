// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! `sweep`: CSV tables over the success-probability and stagger grids.

use cqed_core::analysis::{sweep_stagger, sweep_success, SweepTable};
use cqed_core::units::from_mhz;

use super::Report;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{csv_bytes, format_sig, CSV_DIGITS};

pub const SUCCESS_HEADER: [&str; 5] = ["gamma_mhz", "kappa_mhz", "tau_us", "p_single", "p_total"];
pub const STAGGER_HEADER: [&str; 5] = ["dt_over_t0", "n_atoms", "G_rad_per_us", "infid_analytic", "infid_sim"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKind {
    Success,
    Stagger,
}

pub fn sweep(cfg: &RunConfig, kind: SweepKind) -> Result<Report, CliError> {
    match kind {
        SweepKind::Success => success(cfg),
        SweepKind::Stagger => stagger(cfg),
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!("sweep.{key}: section required for this sweep kind"))
}

fn cell(x: f64) -> String {
    format_sig(x, CSV_DIGITS)
}

fn success(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = cfg.sweep.success.ok_or_else(|| missing("success"))?;
    // The grid axes are written as given, not converted back from rad/μs.
    let gammas = spec.gamma_mhz.values("sweep.success.gamma_mhz")?;
    let kappas = spec.kappa_mhz.values("sweep.success.kappa_mhz")?;
    let to_rad = |v: &[f64]| v.iter().map(|&f| from_mhz(f)).collect::<Vec<_>>();
    let table = sweep_success(from_mhz(spec.h_mhz), &to_rad(&gammas), &to_rad(&kappas), spec.cavities)?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut out = vec![cell(gammas[i / kappas.len()]), cell(kappas[i % kappas.len()])];
            out.extend(row.values.iter().map(|&v| cell(v)));
            out
        })
        .collect();
    let warnings = flagged(&table, |i| {
        format!("gamma_mhz = {}, kappa_mhz = {}", gammas[i / kappas.len()], kappas[i % kappas.len()])
    });
    let summary = format!("sweep success: {} rows, {} overdamped", rows.len(), warnings.len());
    Ok(Report { bytes: csv_bytes(&SUCCESS_HEADER, &rows)?, passed: true, warnings, summary })
}

fn stagger(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = cfg.sweep.stagger.as_ref().ok_or_else(|| missing("stagger"))?;
    if spec.n_atoms.is_empty() {
        return Err(CliError::Config("sweep.stagger.n_atoms: at least one atom count required".into()));
    }
    let fractions = spec.dt_over_t0.values("sweep.stagger.dt_over_t0")?;
    let mw = cfg.microwave_params(cfg.default_atoms())?;
    let lambda = mw.params.couplings()?.lambda;
    let table = sweep_stagger(&fractions, &spec.n_atoms, mw.plan.t0, mw.params.big_g, lambda, spec.schedule.into())?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| {
            let mut out = vec![cell(row.point[0]), format!("{}", row.point[1] as usize)];
            out.extend(row.values.iter().map(|&v| cell(v)));
            out
        })
        .collect();
    let summary = format!("sweep stagger: {} rows, G = {} rad/us", rows.len(), cell(mw.params.big_g));
    Ok(Report { bytes: csv_bytes(&STAGGER_HEADER, &rows)?, passed: true, warnings: Vec::new(), summary })
}

fn flagged(table: &SweepTable, point: impl Fn(usize) -> String) -> Vec<String> {
    table.rows.iter().enumerate().filter_map(|(i, r)| r.flag.as_ref().map(|f| format!("{}: {f}", point(i)))).collect()
}
