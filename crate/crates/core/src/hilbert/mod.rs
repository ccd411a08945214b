// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense, labeled finite-dimensional Hilbert-space algebra.
//!
//! A [`HilbertSpace`] is an ordered list of labeled tensor factors. States and
//! operators carry their space with them, so composite systems such as
//! `atom ⊗ mode_L ⊗ mode_R` or `atom1 ⊗ atom2 ⊗ cavity` can be sliced by
//! factor label instead of by hand-computed index arithmetic.
//!
//! Amplitudes are stored row-major over the factors in declared order: the
//! first factor is the most significant digit of the flat index.

mod evolve;
pub mod expm;
mod measure;
mod operator;
mod space;
mod state;

pub use evolve::{evolve_const, evolve_timedep, Coefficient, FnGenerator, TimeDependentHamiltonian, TimeGenerator};
pub use measure::{density_fidelity, fidelity, outcome_probabilities, project, reduced_state, state_fidelity};
pub use operator::OperatorMatrix;
pub use space::{Factor, HilbertSpace};
pub use state::StateVector;

use thiserror::Error;

/// Tolerance on the squared norm accepted for a "normalized" state by
/// [`fidelity`] and friends.
pub const NORM_TOL: f64 = 1e-9;

/// Hermiticity tolerance used by every Hamiltonian builder.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("factor `{0}` has dimension 0")]
    ZeroDimension(String),
    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),
    #[error("factor label `{0}` appears in both operands")]
    LabelCollision(String),
    #[error("unknown factor `{0}`")]
    UnknownFactor(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spaces differ: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },
    #[error("outcome {outcome} out of range for factor `{label}` (dim {dim})")]
    OutcomeOutOfRange { label: String, outcome: usize, dim: usize },
    #[error("outcome {outcome} of factor `{label}` has zero probability")]
    ZeroProbability { label: String, outcome: usize },
    #[error("state has squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("state squared norm {0} exceeds 1")]
    NormTooLarge(f64),
    #[error("operator is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("time step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),
    #[error("no factors requested")]
    EmptySelection,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

pub type Result<T> = std::result::Result<T, HilbertError>;
