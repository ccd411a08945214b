// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DVector;
use num_complex::Complex64;

use super::{HilbertError, HilbertSpace, Result};

/// Complex amplitude vector bound to a [`HilbertSpace`].
///
/// States may be sub-normalized: a conditional (no-jump) state carries its
/// survival probability as the squared norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amps: DVector<Complex64>,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amps: DVector<Complex64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(HilbertError::DimensionMismatch { expected: space.dim(), got: amps.len() });
        }
        let n = amps.norm_squared();
        if n > 1.0 + 1e-12 {
            return Err(HilbertError::NormTooLarge(n));
        }
        Ok(Self { space, amps })
    }

    pub fn from_vec(space: HilbertSpace, amps: Vec<Complex64>) -> Result<Self> {
        Self::new(space, DVector::from_vec(amps))
    }

    /// Build from real amplitudes, normalizing.
    pub fn from_real_normalized(space: HilbertSpace, amps: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(amps.len(), amps.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::unchecked(space, v).normalized()
    }

    /// Computational basis state with the given digit per factor.
    pub fn basis(space: HilbertSpace, digits: &[usize]) -> Result<Self> {
        let idx = space.flat_index(digits)?;
        let mut amps = DVector::zeros(space.dim());
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { space, amps })
    }

    pub(crate) fn unchecked(space: HilbertSpace, amps: DVector<Complex64>) -> Self {
        debug_assert_eq!(space.dim(), amps.len());
        Self { space, amps }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amps
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.space.flat_index(digits)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.amps.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(HilbertError::NotNormalized(n * n));
        }
        Ok(Self::unchecked(self.space.clone(), self.amps.unscale(n)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::unchecked(self.space.clone(), self.amps.map(|a| a * c))
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.space.ensure_same(&other.space)?;
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let space = self.space.tensor(&other.space)?;
        Ok(Self::unchecked(space, self.amps.kronecker(&other.amps)))
    }

    /// Reorder factors; `labels` must name every factor exactly once.
    pub fn permuted(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.space.len() {
            return Err(HilbertError::DimensionMismatch { expected: self.space.len(), got: labels.len() });
        }
        let order = self.space.order_with_front(labels)?;
        Ok(self.reordered(&order))
    }

    pub(crate) fn reordered(&self, order: &[usize]) -> Self {
        let map = self.space.permutation_indices(order);
        let amps = DVector::from_iterator(map.len(), map.iter().map(|&i| self.amps[i]));
        Self::unchecked(self.space.reordered(order), amps)
    }

    pub fn relabeled<S: Into<String>>(&self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        Ok(Self::unchecked(self.space.relabeled(labels)?, self.amps.clone()))
    }
}
