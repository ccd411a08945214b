// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation of a two-stage cavity-QED source of entangled photons.
//!
//! Stage one sends three-level atoms through two-mode optical cavities, where
//! each atom emits one polarized photon whose polarization is correlated with
//! the atom's final ground level ([`optical`]). Stage two entangles the atoms
//! through a strongly driven, dispersively coupled microwave cavity
//! ([`microwave`]). Measuring the atoms then heralds one member of a complete
//! set of Bell or GHZ-class photon states ([`protocol`]). [`analysis`] holds
//! the staggered-entry error model and parameter sweeps.
//!
//! Internally every frequency is an angular frequency in rad/μs and every time
//! is in μs; [`units`] converts from linear MHz.

pub mod analysis;
pub mod hilbert;
pub mod microwave;
pub mod optical;
pub mod protocol;
pub mod units;

pub use hilbert::{HilbertError, HilbertSpace, OperatorMatrix, StateVector};
pub use microwave::{EffectiveCouplings, MicrowaveParams, TimingPlan};
pub use num_complex::Complex64;
pub use optical::{OpticalCavityParams, OpticalStageResult};
pub use protocol::{ProtocolConfig, ProtocolResult};
