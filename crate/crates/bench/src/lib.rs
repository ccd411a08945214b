// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixtures shared by the benchmarks.

use cqed_core::microwave::{atom_space, effective_couplings, make_timing_plan, MicrowaveParams, TimingPlan};
use cqed_core::units::from_mhz;
use cqed_core::StateVector;

/// Reference microwave stage for `n` atoms with the planned drive.
pub fn microwave(n: usize, fock_cutoff: usize) -> (MicrowaveParams, TimingPlan) {
    let g = from_mhz(0.05);
    let delta = 5.0 * g;
    let lambda = effective_couplings(g, delta).expect("nonzero detuning").lambda;
    let plan = make_timing_plan(lambda, n, 50.0 * g).expect("positive λ");
    let p = MicrowaveParams::new(g, plan.g_required, delta, 20.0 * plan.g_required, fock_cutoff, n).expect("finite");
    (p, plan)
}

pub fn ground(n: usize) -> StateVector {
    StateVector::basis(atom_space(n).expect("n > 0"), &vec![0; n]).expect("in range")
}
