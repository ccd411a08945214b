// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{HilbertError, OperatorMatrix, Result, StateVector, NORM_TOL};

/// Outcomes with probability below this are treated as impossible.
const ZERO_PROB: f64 = 1e-14;

fn ensure_normalized(psi: &StateVector) -> Result<()> {
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        Err(HilbertError::NotNormalized(n))
    } else {
        Ok(())
    }
}

/// `|⟨psi|phi⟩|²` for normalized pure states.
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    psi.space().ensure_same(phi.space())?;
    ensure_normalized(psi)?;
    ensure_normalized(phi)?;
    Ok(psi.inner(phi)?.norm_sqr().clamp(0.0, 1.0))
}

/// `⟨phi|rho|phi⟩` for a pure reference state against a density matrix.
pub fn state_fidelity(phi: &StateVector, rho: &OperatorMatrix) -> Result<f64> {
    ensure_normalized(phi)?;
    Ok(rho.expectation(phi)?.re.clamp(0.0, 1.0))
}

fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(m.clone());
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::new(e.max(0.0).sqrt(), 0.0)));
    v * d * v.adjoint()
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²` between density matrices.
pub fn density_fidelity(rho: &OperatorMatrix, sigma: &OperatorMatrix) -> Result<f64> {
    rho.space().ensure_same(sigma.space())?;
    let sr = psd_sqrt(rho.matrix());
    let inner = &sr * sigma.matrix() * &sr;
    let inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(inner);
    let tr: f64 = eig.eigenvalues.iter().map(|e| e.max(0.0).sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// Splits `psi` as a `d × rest` block matrix (row i = outcome i of `label`).
fn blocks(psi: &StateVector, label: &str) -> Result<(usize, DMatrix<Complex64>, StateVector)> {
    let order = psi.space().order_with_front(&[label])?;
    let front = psi.reordered(&order);
    let d = front.space().factors()[0].dim;
    let rest = front.space().dim() / d;
    // Row-major flat index i*rest + r read column-major gives a rest × d matrix.
    let m = DMatrix::from_column_slice(rest, d, front.amplitudes().as_slice());
    Ok((d, m, front))
}

/// Probability of each outcome of one factor.
pub fn outcome_probabilities(psi: &StateVector, label: &str) -> Result<Vec<f64>> {
    let total = psi.norm_sqr();
    let (_, m, _) = blocks(psi, label)?;
    Ok(m.column_iter().map(|c| c.norm_squared() / total).collect())
}

/// Projective measurement of factor `label` in its computational basis.
///
/// Returns the normalized post-measurement state on the remaining factors and
/// the outcome probability (relative to the squared norm of `psi`).
pub fn project(psi: &StateVector, label: &str, outcome: usize) -> Result<(StateVector, f64)> {
    let dim = psi.space().factor_dim(label)?;
    if outcome >= dim {
        return Err(HilbertError::OutcomeOutOfRange { label: label.to_string(), outcome, dim });
    }
    let total = psi.norm_sqr();
    if total <= ZERO_PROB {
        return Err(HilbertError::ZeroProbability { label: label.to_string(), outcome });
    }
    let (_, m, front) = blocks(psi, label)?;
    let col: DVector<Complex64> = m.column(outcome).into_owned();
    let p = col.norm_squared() / total;
    if p <= ZERO_PROB {
        return Err(HilbertError::ZeroProbability { label: label.to_string(), outcome });
    }
    let rest_space = front.space().complement(&[label]);
    let state = StateVector::unchecked(rest_space, col.unscale(col.norm()));
    Ok((state, p))
}

/// Partial trace keeping `keep` (in the order given); trace normalized to 1.
pub fn reduced_state(psi: &StateVector, keep: &[&str]) -> Result<OperatorMatrix> {
    if keep.is_empty() {
        return Err(HilbertError::EmptySelection);
    }
    let total = psi.norm_sqr();
    if total <= ZERO_PROB {
        return Err(HilbertError::NotNormalized(total));
    }
    let kept = psi.space().select(keep)?;
    let order = psi.space().order_with_front(keep)?;
    let front = psi.reordered(&order);
    let dk = kept.dim();
    let rest = front.space().dim() / dk;
    let m = DMatrix::from_column_slice(rest, dk, front.amplitudes().as_slice());
    // ρ_{ij} = Σ_r ψ(i,r) ψ(j,r)*  with ψ(i,r) = m[(r,i)]
    let rho = m.transpose() * m.conjugate() * Complex64::new(1.0 / total, 0.0);
    OperatorMatrix::new(kept, rho)
}
