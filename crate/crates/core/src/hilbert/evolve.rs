// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::expm::propagator;
use super::{HilbertError, HilbertSpace, OperatorMatrix, Result, StateVector, HERMITIAN_TOL};

const MINUS_I: Complex64 = Complex64 { re: 0.0, im: -1.0 };

/// `exp(−iHt)·psi0`. `h` may be non-Hermitian (no-jump evolution).
pub fn evolve_const(h: &OperatorMatrix, psi0: &StateVector, t: f64) -> Result<StateVector> {
    h.space().ensure_same(psi0.space())?;
    if !t.is_finite() {
        return Err(HilbertError::InvalidTime(t));
    }
    propagator(h, t).apply(psi0)
}

/// A Hamiltonian that depends on time.
pub trait TimeGenerator: Sync {
    fn space(&self) -> &HilbertSpace;

    fn at(&self, t: f64) -> OperatorMatrix;

    /// `out ← H(t)·psi`.
    fn apply_into(&self, t: f64, psi: &DVector<Complex64>, out: &mut DVector<Complex64>) {
        out.copy_from(&(self.at(t).matrix() * psi));
    }

    /// Upper bound on ‖H(t)‖₁ over all t.
    fn norm_bound(&self) -> f64 {
        self.at(0.0).norm_one()
    }

    /// Step used when the caller has no better estimate: keeps the RK4 norm
    /// drift per step near (0.01)⁶/144.
    fn default_step(&self) -> f64 {
        0.01 / self.norm_bound().max(1e-12)
    }
}

/// Scalar time dependence of one Hamiltonian term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coefficient {
    Constant(Complex64),
    /// `amplitude · e^{i·frequency·t}`
    Oscillating {
        amplitude: Complex64,
        frequency: f64,
    },
}

impl Coefficient {
    pub fn real(x: f64) -> Self {
        Coefficient::Constant(Complex64::new(x, 0.0))
    }

    pub fn phase(amplitude: f64, frequency: f64) -> Self {
        Coefficient::Oscillating { amplitude: Complex64::new(amplitude, 0.0), frequency }
    }

    pub fn at(&self, t: f64) -> Complex64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Oscillating { amplitude, frequency } => amplitude * Complex64::from_polar(1.0, frequency * t),
        }
    }

    pub fn magnitude(&self) -> f64 {
        match *self {
            Coefficient::Constant(c) => c.norm(),
            Coefficient::Oscillating { amplitude, .. } => amplitude.norm(),
        }
    }
}

/// `H(t) = Σ_k c_k(t)·A_k` with scalar coefficients.
#[derive(Clone, Debug)]
pub struct TimeDependentHamiltonian {
    space: HilbertSpace,
    terms: Vec<(Coefficient, OperatorMatrix)>,
    /// Row-compressed copy of each term that is mostly zeros.
    sparse: Vec<Option<Csr>>,
}

#[derive(Clone, Debug)]
struct Csr {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl Csr {
    fn from_dense(m: &DMatrix<Complex64>) -> Option<Self> {
        let zero = Complex64::new(0.0, 0.0);
        let nnz = m.iter().filter(|z| **z != zero).count();
        if nnz * 4 > m.len() {
            return None;
        }
        let mut row_start = Vec::with_capacity(m.nrows() + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_start.push(0);
        for r in 0..m.nrows() {
            for k in 0..m.ncols() {
                let z = m[(r, k)];
                if z != zero {
                    cols.push(k);
                    vals.push(z);
                }
            }
            row_start.push(cols.len());
        }
        Some(Self { row_start, cols, vals })
    }

    /// `out += c·M·psi`
    fn accumulate(&self, c: Complex64, psi: &DVector<Complex64>, out: &mut DVector<Complex64>) {
        for r in 0..self.row_start.len() - 1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_start[r]..self.row_start[r + 1] {
                acc += self.vals[k] * psi[self.cols[k]];
            }
            out[r] += c * acc;
        }
    }
}

impl TimeDependentHamiltonian {
    pub fn new(space: HilbertSpace) -> Self {
        Self { space, terms: Vec::new(), sparse: Vec::new() }
    }

    pub fn constant(op: OperatorMatrix) -> Self {
        let mut h = Self::new(op.space().clone());
        h.sparse.push(Csr::from_dense(op.matrix()));
        h.terms.push((Coefficient::real(1.0), op));
        h
    }

    pub fn push(&mut self, coeff: Coefficient, op: OperatorMatrix) -> Result<()> {
        self.space.ensure_same(op.space())?;
        self.sparse.push(Csr::from_dense(op.matrix()));
        self.terms.push((coeff, op));
        Ok(())
    }

    /// Adds `amplitude·e^{iωt}·A + amplitude·e^{−iωt}·A†`.
    pub fn push_hermitian_pair(&mut self, amplitude: f64, frequency: f64, op: OperatorMatrix) -> Result<()> {
        let adj = op.adjoint();
        self.push(Coefficient::phase(amplitude, frequency), op)?;
        self.push(Coefficient::phase(amplitude, -frequency), adj)
    }

    pub fn terms(&self) -> &[(Coefficient, OperatorMatrix)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl TimeGenerator for TimeDependentHamiltonian {
    fn space(&self) -> &HilbertSpace {
        &self.space
    }

    fn at(&self, t: f64) -> OperatorMatrix {
        self.terms.iter().fold(OperatorMatrix::zeros(self.space.clone()), |acc, (c, op)| acc + &op.scaled(c.at(t)))
    }

    fn apply_into(&self, t: f64, psi: &DVector<Complex64>, out: &mut DVector<Complex64>) {
        out.fill(Complex64::new(0.0, 0.0));
        for ((c, op), sparse) in self.terms.iter().zip(&self.sparse) {
            match sparse {
                Some(csr) => csr.accumulate(c.at(t), psi, out),
                None => out.gemv(c.at(t), op.matrix(), psi, Complex64::new(1.0, 0.0)),
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|(c, op)| c.magnitude() * op.norm_one()).sum()
    }

    /// Also resolves the fastest coefficient oscillation, which can exceed
    /// the operator norm when small terms rotate quickly.
    fn default_step(&self) -> f64 {
        let fastest = self
            .terms
            .iter()
            .map(|(c, _)| match c {
                Coefficient::Constant(_) => 0.0,
                Coefficient::Oscillating { frequency, .. } => frequency.abs(),
            })
            .fold(0.0, f64::max);
        0.01 / self.norm_bound().max(fastest).max(1e-12)
    }
}

/// Adapts a closure `t ↦ H(t)`.
pub struct FnGenerator<F> {
    space: HilbertSpace,
    f: F,
}

impl<F> FnGenerator<F>
where
    F: Fn(f64) -> OperatorMatrix + Sync,
{
    pub fn new(space: HilbertSpace, f: F) -> Self {
        Self { space, f }
    }
}

impl<F> TimeGenerator for FnGenerator<F>
where
    F: Fn(f64) -> OperatorMatrix + Sync,
{
    fn space(&self) -> &HilbertSpace {
        &self.space
    }

    fn at(&self, t: f64) -> OperatorMatrix {
        (self.f)(t)
    }
}

/// Fixed-step classical RK4 on `i dψ/dt = H(t) ψ` from 0 to `t`.
///
/// The step is shrunk to `t / ceil(t / dt)` so the endpoint is hit exactly.
/// `hgen` is sampled for Hermiticity at the start, middle and end.
pub fn evolve_timedep<G>(hgen: &G, psi0: &StateVector, t: f64, dt: f64) -> Result<StateVector>
where
    G: TimeGenerator + ?Sized,
{
    hgen.space().ensure_same(psi0.space())?;
    if !dt.is_finite() || dt <= 0.0 {
        return Err(HilbertError::InvalidStep(dt));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(HilbertError::InvalidTime(t));
    }
    for s in [0.0, 0.5 * t, t] {
        let h = hgen.at(s);
        let r = h.hermiticity_residual();
        if r > HERMITIAN_TOL * h.norm_one().max(1.0) {
            return Err(HilbertError::NotHermitian(r));
        }
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }

    let steps = (t / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let n = psi0.space().dim();
    let mut psi = psi0.amplitudes().clone();
    let mut k1 = DVector::zeros(n);
    let mut k2 = DVector::zeros(n);
    let mut k3 = DVector::zeros(n);
    let mut k4 = DVector::zeros(n);
    let mut tmp = DVector::zeros(n);
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let sixth = Complex64::new(h / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);

    for step in 0..steps {
        let s = step as f64 * h;
        hgen.apply_into(s, &psi, &mut k1);
        k1 *= MINUS_I;

        tmp.copy_from(&psi);
        tmp.axpy(half, &k1, Complex64::new(1.0, 0.0));
        hgen.apply_into(s + 0.5 * h, &tmp, &mut k2);
        k2 *= MINUS_I;

        tmp.copy_from(&psi);
        tmp.axpy(half, &k2, Complex64::new(1.0, 0.0));
        hgen.apply_into(s + 0.5 * h, &tmp, &mut k3);
        k3 *= MINUS_I;

        tmp.copy_from(&psi);
        tmp.axpy(full, &k3, Complex64::new(1.0, 0.0));
        hgen.apply_into(s + h, &tmp, &mut k4);
        k4 *= MINUS_I;

        k1.axpy(two, &k2, Complex64::new(1.0, 0.0));
        k1.axpy(two, &k3, Complex64::new(1.0, 0.0));
        k1 += &k4;
        psi.axpy(sixth, &k1, Complex64::new(1.0, 0.0));
    }
    Ok(StateVector::unchecked(psi0.space().clone(), psi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit() -> HilbertSpace {
        HilbertSpace::single("q", 2).unwrap()
    }

    fn op(entries: [[f64; 2]; 2]) -> OperatorMatrix {
        OperatorMatrix::new(qubit(), DMatrix::from_fn(2, 2, |r, k| Complex64::new(entries[r][k], 0.0))).unwrap()
    }

    #[test]
    fn rk4_matches_exponential_for_constant_hamiltonian() {
        let h = op([[0.3, 1.1], [1.1, -0.7]]);
        let psi = StateVector::basis(qubit(), &[0]).unwrap();
        let td = TimeDependentHamiltonian::constant(h.clone());
        let a = evolve_timedep(&td, &psi, 4.0, td.default_step()).unwrap();
        let b = evolve_const(&h, &psi, 4.0).unwrap();
        assert!((a.inner(&b).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rotating_drive_in_its_own_frame() {
        // H(t) = w|1⟩⟨1| + Ω(e^{−iwt}|1⟩⟨0| + h.c.) is a resonant drive: in the
        // frame rotating at w it is a static Rabi coupling Ω.
        let (omega, w) = (0.8, 5.0);
        let mut td = TimeDependentHamiltonian::constant(op([[0.0, 0.0], [0.0, w]]));
        td.push_hermitian_pair(omega, -w, op([[0.0, 0.0], [1.0, 0.0]])).unwrap();
        let t = std::f64::consts::FRAC_PI_2 / omega;
        let out = evolve_timedep(&td, &StateVector::basis(qubit(), &[0]).unwrap(), t, td.default_step()).unwrap();
        assert!((out.amplitudes()[1].norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sparse_and_dense_terms_agree() {
        let space = HilbertSpace::qubits("q", 4).unwrap();
        let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|v| Complex64::new(v, 0.0)));
        let sparse = OperatorMatrix::embed(&space, "q2", &x).unwrap();
        assert!(Csr::from_dense(sparse.matrix()).is_some());
        let dense = OperatorMatrix::new(
            space.clone(),
            DMatrix::from_fn(16, 16, |r, k| Complex64::new((r * k) as f64 * 1e-3 + 0.1, 0.0)),
        )
        .unwrap();
        assert!(Csr::from_dense(dense.matrix()).is_none());
        let mut td = TimeDependentHamiltonian::new(space.clone());
        td.push_hermitian_pair(0.4, 2.0, sparse).unwrap();
        let psi = DVector::from_fn(16, |k, _| Complex64::new(k as f64, 1.0));
        let mut fast = DVector::zeros(16);
        td.apply_into(0.3, &psi, &mut fast);
        let slow = td.at(0.3).matrix() * &psi;
        assert!((fast - slow).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_step_and_time() {
        let td = TimeDependentHamiltonian::constant(op([[1.0, 0.0], [0.0, -1.0]]));
        let psi = StateVector::basis(qubit(), &[0]).unwrap();
        assert!(matches!(evolve_timedep(&td, &psi, 1.0, 0.0), Err(HilbertError::InvalidStep(_))));
        assert!(matches!(evolve_timedep(&td, &psi, -1.0, 0.1), Err(HilbertError::InvalidTime(_))));
        let nh = TimeDependentHamiltonian::constant(op([[0.0, 1.0], [0.0, 0.0]]));
        assert!(matches!(evolve_timedep(&nh, &psi, 1.0, 0.1), Err(HilbertError::NotHermitian(_))));
    }
}
