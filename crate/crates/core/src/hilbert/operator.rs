// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{HilbertError, HilbertSpace, Result, StateVector};

/// Dense complex square matrix bound to a [`HilbertSpace`].
///
/// The arithmetic operators panic when the operands live on different
/// spaces, mirroring shape-mismatch panics in the matrix crates.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    space: HilbertSpace,
    mat: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn new(space: HilbertSpace, mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(HilbertError::NotSquare { rows: mat.nrows(), cols: mat.ncols() });
        }
        if mat.nrows() != space.dim() {
            return Err(HilbertError::DimensionMismatch { expected: space.dim(), got: mat.nrows() });
        }
        Ok(Self { space, mat })
    }

    pub(crate) fn unchecked(space: HilbertSpace, mat: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(mat.nrows(), space.dim());
        Self { space, mat }
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self { space, mat: DMatrix::zeros(d, d) }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self { space, mat: DMatrix::identity(d, d) }
    }

    /// `local` acting on factor `label`, identity on every other factor.
    pub fn embed(space: &HilbertSpace, label: &str, local: &DMatrix<Complex64>) -> Result<Self> {
        Self::product(space, &[(label, local)])
    }

    /// Tensor product of local operators on distinct factors (identity elsewhere).
    pub fn product(space: &HilbertSpace, locals: &[(&str, &DMatrix<Complex64>)]) -> Result<Self> {
        let mut slots: Vec<Option<&DMatrix<Complex64>>> = vec![None; space.len()];
        for (label, m) in locals {
            let p = space.position(label)?;
            let d = space.factors()[p].dim;
            if m.nrows() != d || m.ncols() != d {
                return Err(HilbertError::DimensionMismatch { expected: d, got: m.nrows() });
            }
            if slots[p].is_some() {
                return Err(HilbertError::DuplicateLabel(label.to_string()));
            }
            slots[p] = Some(m);
        }
        let mut mat = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for (slot, f) in slots.iter().zip(space.factors()) {
            mat = match slot {
                Some(m) => mat.kronecker(*m),
                None => mat.kronecker(&DMatrix::<Complex64>::identity(f.dim, f.dim)),
            };
        }
        Ok(Self { space: space.clone(), mat })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space.clone(), mat: self.mat.adjoint() }
    }

    /// max |A − A†| over entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Induced 1-norm (max column sum).
    pub fn norm_one(&self) -> f64 {
        self.mat.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { space: self.space.clone(), mat: &self.mat * c }
    }

    pub fn tensor(&self, other: &OperatorMatrix) -> Result<Self> {
        Ok(Self { space: self.space.tensor(&other.space)?, mat: self.mat.kronecker(&other.mat) })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.space.ensure_same(psi.space())?;
        Ok(StateVector::unchecked(self.space.clone(), &self.mat * psi.amplitudes()))
    }

    /// Apply to the factors of `psi` that carry this operator's labels, acting
    /// as identity on the rest.
    pub fn apply_on(&self, psi: &StateVector) -> Result<StateVector> {
        let labels: Vec<&str> = self.space.labels().collect();
        let sub = psi.space().select(&labels)?;
        if sub != self.space {
            return Err(HilbertError::SpaceMismatch { left: self.space.to_string(), right: sub.to_string() });
        }
        let order = psi.space().order_with_front(&labels)?;
        let front = psi.reordered(&order);
        let d = self.dim();
        let rest = front.space().dim() / d;
        // Row-major flat index = i * rest + r, nalgebra is column-major, so the
        // amplitude vector reads as a rest × d matrix whose column i is block i.
        let m = DMatrix::from_column_slice(rest, d, front.amplitudes().as_slice());
        let out = m * self.mat.transpose();
        let evolved = StateVector::unchecked(front.space().clone(), DVector::from_column_slice(out.as_slice()));
        let mut inverse = vec![0; order.len()];
        for (k, &p) in order.iter().enumerate() {
            inverse[p] = k;
        }
        Ok(evolved.reordered(&inverse))
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        let r = self.hermiticity_residual();
        if r > super::HERMITIAN_TOL * self.norm_one().max(1.0) {
            return Err(HilbertError::NotHermitian(r));
        }
        let eig = nalgebra::SymmetricEigen::new(self.mat.clone());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    /// ⟨psi|A|psi⟩.
    pub fn expectation(&self, psi: &StateVector) -> Result<Complex64> {
        self.space.ensure_same(psi.space())?;
        Ok(psi.amplitudes().dotc(&(&self.mat * psi.amplitudes())))
    }
}

impl Add<&OperatorMatrix> for OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(mut self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        self.mat += &rhs.mat;
        self
    }
}

impl Add for OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: OperatorMatrix) -> OperatorMatrix {
        self + &rhs
    }
}

impl Sub<&OperatorMatrix> for OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(mut self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        self.mat -= &rhs.mat;
        self
    }
}

impl Sub for OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: OperatorMatrix) -> OperatorMatrix {
        self - &rhs
    }
}

impl Neg for OperatorMatrix {
    type Output = OperatorMatrix;

    fn neg(self) -> OperatorMatrix {
        OperatorMatrix { space: self.space, mat: -self.mat }
    }
}

impl Mul<f64> for OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: f64) -> OperatorMatrix {
        OperatorMatrix { space: self.space, mat: self.mat * Complex64::new(rhs, 0.0) }
    }
}

impl Mul<Complex64> for OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: Complex64) -> OperatorMatrix {
        OperatorMatrix { space: self.space, mat: self.mat * rhs }
    }
}

impl Mul<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        OperatorMatrix { space: self.space.clone(), mat: &self.mat * &rhs.mat }
    }
}
