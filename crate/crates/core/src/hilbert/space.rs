// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::Serialize;

use super::{HilbertError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered tensor product of labeled factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HilbertSpace {
    factors: Vec<Factor>,
}

impl HilbertSpace {
    pub fn new<I, S>(factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let factors: Vec<Factor> =
            factors.into_iter().map(|(label, dim)| Factor { label: label.into(), dim }).collect();
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(HilbertError::ZeroDimension(f.label.clone()));
            }
            if factors[..i].iter().any(|g| g.label == f.label) {
                return Err(HilbertError::DuplicateLabel(f.label.clone()));
            }
        }
        Ok(Self { factors })
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    /// `n` qubit factors named `{prefix}1 … {prefix}n`.
    pub fn qubits(prefix: &str, n: usize) -> Result<Self> {
        Self::new((1..=n).map(|j| (format!("{prefix}{j}"), 2)))
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|f| f.label.as_str())
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors.iter().position(|f| f.label == label).ok_or_else(|| HilbertError::UnknownFactor(label.to_string()))
    }

    pub fn factor_dim(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].dim)
    }

    /// Concatenation of factors; labels must not collide.
    pub fn tensor(&self, other: &HilbertSpace) -> Result<Self> {
        if let Some(f) = other.factors.iter().find(|f| self.factors.iter().any(|g| g.label == f.label)) {
            return Err(HilbertError::LabelCollision(f.label.clone()));
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Ok(Self { factors })
    }

    /// Row-major strides: stride of the last factor is 1.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for k in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factors[k + 1].dim;
        }
        strides
    }

    pub fn flat_index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.factors.len() {
            return Err(HilbertError::DimensionMismatch { expected: self.factors.len(), got: digits.len() });
        }
        let mut idx = 0;
        for (f, &d) in self.factors.iter().zip(digits) {
            if d >= f.dim {
                return Err(HilbertError::OutcomeOutOfRange { label: f.label.clone(), outcome: d, dim: f.dim });
            }
            idx = idx * f.dim + d;
        }
        Ok(idx)
    }

    pub fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = flat % f.dim;
            flat /= f.dim;
        }
        out
    }

    /// Subspace made of the named factors, in the order given.
    pub fn select(&self, labels: &[&str]) -> Result<Self> {
        let factors =
            labels.iter().map(|l| self.position(l).map(|p| self.factors[p].clone())).collect::<Result<Vec<_>>>()?;
        Self::new(factors.into_iter().map(|f| (f.label, f.dim)))
    }

    /// Factors not named in `labels`, in declared order.
    pub fn complement(&self, labels: &[&str]) -> Self {
        Self { factors: self.factors.iter().filter(|f| !labels.contains(&f.label.as_str())).cloned().collect() }
    }

    /// Same dimensions, new labels.
    pub fn relabeled<S: Into<String>>(&self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.factors.len() {
            return Err(HilbertError::DimensionMismatch { expected: self.factors.len(), got: labels.len() });
        }
        Self::new(labels.into_iter().zip(self.factors.iter().map(|f| f.dim)))
    }

    /// For a reordering `order` (new position k holds old factor `order[k]`),
    /// returns the old flat index of every new flat index.
    pub(crate) fn permutation_indices(&self, order: &[usize]) -> Vec<usize> {
        let old_strides = self.strides();
        let new_dims: Vec<usize> = order.iter().map(|&p| self.factors[p].dim).collect();
        let total = self.dim();
        let mut out = Vec::with_capacity(total);
        let mut digits = vec![0usize; order.len()];
        for _ in 0..total {
            out.push(digits.iter().zip(order).map(|(&d, &p)| d * old_strides[p]).sum());
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < new_dims[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        out
    }

    /// Positions of `labels` followed by every other factor in declared order.
    pub(crate) fn order_with_front(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut order = Vec::with_capacity(self.factors.len());
        for l in labels {
            let p = self.position(l)?;
            if order.contains(&p) {
                return Err(HilbertError::DuplicateLabel(l.to_string()));
            }
            order.push(p);
        }
        let rest: Vec<usize> = (0..self.factors.len()).filter(|p| !order.contains(p)).collect();
        order.extend(rest);
        Ok(order)
    }

    pub(crate) fn reordered(&self, order: &[usize]) -> Self {
        Self { factors: order.iter().map(|&p| self.factors[p].clone()).collect() }
    }

    pub(crate) fn ensure_same(&self, other: &HilbertSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(HilbertError::SpaceMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "C");
        }
        for (k, fac) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, "⊗")?;
            }
            write!(f, "{}[{}]", fac.label, fac.dim)?;
        }
        Ok(())
    }
}
