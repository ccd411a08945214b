// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! Matrix exponentials for propagators `exp(−iHt)`.
//!
//! Hermitian generators go through an eigendecomposition, which is exactly
//! unitary up to rounding. Everything else (the non-Hermitian no-jump
//! Hamiltonians) uses scaling-and-squaring with a degree-13 Padé approximant
//! (Higham 2005, SIAM J. Matrix Anal. Appl. 26(4), 1179).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{OperatorMatrix, HERMITIAN_TOL};

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(A)` for a general complex square matrix.
///
/// Panics if `a` is not square.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let norm = one_norm(a);
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let scaled = a * Complex64::new(2f64.powi(-squarings), 0.0);

    let b = |k: usize| Complex64::new(PADE_13[k], 0.0);
    let eye = DMatrix::<Complex64>::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = &scaled * (&a6 * inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &eye * b(1));
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &eye * b(0);

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut r = lhs.lu().solve(&rhs).expect("Padé denominator is nonsingular for scaled norms below theta_13");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// `exp(−iHt)` via eigendecomposition of a Hermitian `h`.
pub fn hermitian_propagator(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
    v * phases * v.adjoint()
}

/// `exp(−iHt)` as an operator, picking the eigendecomposition route when `h`
/// is Hermitian to [`HERMITIAN_TOL`] (relative to its norm).
pub fn propagator(h: &OperatorMatrix, t: f64) -> OperatorMatrix {
    let scale = h.norm_one().max(1.0);
    let mat = if h.hermiticity_residual() <= HERMITIAN_TOL * scale {
        hermitian_propagator(h.matrix(), t)
    } else {
        expm(&(h.matrix() * Complex64::new(0.0, -t)))
    };
    OperatorMatrix::unchecked(h.space().clone(), mat)
}
