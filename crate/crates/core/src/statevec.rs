//! Dense state vectors over a handful of labelled qubits.
//!
//! Qubit 0 is the most significant bit of the amplitude index, so the
//! left-to-right order of a ket `|q0 q1 ... q(n-1)⟩` reads off the binary
//! index directly. In the teleportation protocols qubit 0 is the unknown
//! input, qubit 1 the ancilla, qubit 2 Alice's channel half and qubit 3
//! Bob's.

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Tolerance for exact-math invariants (normalization, unitarity).
pub const EXACT_TOL: f64 = 1e-12;

/// Tolerance for factorizing a state after a full protocol run.
pub const FACTOR_TOL: f64 = 1e-10;

/// Upper bound on register size for the dense representation.
pub const MAX_QUBITS: usize = 12;

/// Position of a qubit within a [`StateVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitLabel(pub usize);

impl QubitLabel {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for QubitLabel {
    fn from(i: usize) -> Self {
        QubitLabel(i)
    }
}

/// A normalized pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
        return Err(Error::NotPowerOfTwo { len });
    }
    Ok(len.trailing_zeros() as usize)
}

fn norm_sq(amps: &[Complex64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

impl StateVector {
    /// Wrap amplitudes that are already normalized (squared norm within
    /// [`EXACT_TOL`] of one).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let n = norm_sq(&amplitudes);
        if (n - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized { norm_sq: n });
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Rescale arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let n = norm_sq(&amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / n).collect();
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩` on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits <= MAX_QUBITS && index < 1 << num_qubits);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amplitudes }
    }

    /// `a|0⟩ + b|1⟩`
    pub fn qubit(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn zero() -> Self {
        Self::basis(1, 0)
    }

    pub fn one() -> Self {
        Self::basis(1, 1)
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { num_qubits: 1, amplitudes: vec![h, h] }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.amplitudes)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_size(other)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(x, y)| x.conj() * y).sum())
    }

    /// Largest amplitude-wise difference to another state of the same size.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_same_size(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    fn check_same_size(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch { left: self.num_qubits, right: other.num_qubits });
        }
        Ok(())
    }

    fn check_label(&self, q: QubitLabel) -> Result<()> {
        if q.0 >= self.num_qubits {
            return Err(Error::QubitOutOfRange { index: q.0, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    /// Bit mask of qubit `q` within an amplitude index.
    pub(crate) fn mask(&self, q: QubitLabel) -> usize {
        1 << (self.num_qubits - 1 - q.0)
    }

    /// Apply an arbitrary (not necessarily unitary) 2×2 operator to one
    /// qubit, returning the raw, unnormalized amplitudes.
    pub(crate) fn apply_operator(&self, target: QubitLabel, op: &Mat2) -> Result<Vec<Complex64>> {
        self.check_label(target)?;
        let mask = self.mask(target);
        let mut out = self.amplitudes.clone();
        for i0 in (0..self.dim()).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let [x0, x1] = op.apply([self.amplitudes[i0], self.amplitudes[i1]]);
            out[i0] = x0;
            out[i1] = x1;
        }
        Ok(out)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, z) in self.amplitudes.iter().enumerate() {
            if z.norm() < 1e-15 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{:0width$b}⟩", z.re, z.im, i, width = self.num_qubits)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A unitary 2×2 gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitGate(Mat2);

impl SingleQubitGate {
    pub fn new(matrix: Mat2) -> Result<Self> {
        let deviation = matrix.unitarity_defect();
        if deviation > EXACT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(matrix))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn identity() -> Self {
        Self(Mat2::identity())
    }

    /// σ_x
    pub fn pauli_x() -> Self {
        Self(Mat2::from_real([[0.0, 1.0], [1.0, 0.0]]))
    }

    /// σ_z
    pub fn pauli_z() -> Self {
        Self(Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]))
    }

    /// The matrix product σ_z σ_x (σ_x acts first).
    pub fn pauli_zx() -> Self {
        Self(Mat2::from_real([[0.0, 1.0], [-1.0, 0.0]]))
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self(Mat2::from_real([[h, h], [h, -h]]))
    }
}

/// `left ⊗ right`; the left operand's qubits come first (most significant).
pub fn tensor_product(left: &StateVector, right: &StateVector) -> StateVector {
    let amplitudes = left
        .amplitudes
        .iter()
        .flat_map(|l| right.amplitudes.iter().map(move |r| l * r))
        .collect();
    StateVector { num_qubits: left.num_qubits + right.num_qubits, amplitudes }
}

pub fn apply_gate(state: &StateVector, target: QubitLabel, gate: &SingleQubitGate) -> Result<StateVector> {
    let amplitudes = state.apply_operator(target, gate.matrix())?;
    Ok(StateVector { num_qubits: state.num_qubits, amplitudes })
}

/// `|⟨a|b⟩|²`, clamped to `[0, 1]`.
pub fn fidelity(state_a: &StateVector, state_b: &StateVector) -> Result<f64> {
    Ok(state_a.inner(state_b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Index bookkeeping for splitting a register into a listed subsystem and
/// the remaining qubits. Subsystem indices follow the order the labels were
/// given in; the remainder keeps ascending qubit order.
#[derive(Debug, Clone)]
pub(crate) struct Split {
    pub sub_dim: usize,
    pub rest_dim: usize,
    /// `full[sub * rest_dim + rest]`
    full: Vec<usize>,
}

impl Split {
    pub fn new(num_qubits: usize, subsystem: &[QubitLabel]) -> Result<Self> {
        let mut seen = vec![false; num_qubits];
        for q in subsystem {
            if q.0 >= num_qubits {
                return Err(Error::QubitOutOfRange { index: q.0, num_qubits });
            }
            if std::mem::replace(&mut seen[q.0], true) {
                return Err(Error::DuplicateQubit(q.0));
            }
        }
        let rest: Vec<usize> = (0..num_qubits).filter(|&q| !seen[q]).collect();
        let sub_dim = 1 << subsystem.len();
        let rest_dim = 1 << rest.len();
        let bit = |q: usize| 1usize << (num_qubits - 1 - q);
        let mut full = vec![0; sub_dim * rest_dim];
        for s in 0..sub_dim {
            for r in 0..rest_dim {
                let mut idx = 0;
                for (k, q) in subsystem.iter().enumerate() {
                    if s >> (subsystem.len() - 1 - k) & 1 == 1 {
                        idx |= bit(q.0);
                    }
                }
                for (k, &q) in rest.iter().enumerate() {
                    if r >> (rest.len() - 1 - k) & 1 == 1 {
                        idx |= bit(q);
                    }
                }
                full[s * rest_dim + r] = idx;
            }
        }
        Ok(Self { sub_dim, rest_dim, full })
    }

    pub fn full(&self, sub: usize, rest: usize) -> usize {
        self.full[sub * self.rest_dim + rest]
    }

    /// `(⟨w| ⊗ I) |ψ⟩` as raw amplitudes on the remainder.
    pub fn contract(&self, psi: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
        (0..self.rest_dim)
            .map(|r| (0..self.sub_dim).map(|s| w[s].conj() * psi[self.full(s, r)]).sum())
            .collect()
    }

    /// `|w⟩ ⊗ |r⟩` placed back into register order, accumulated into `out`.
    pub fn embed_into(&self, out: &mut [Complex64], w: &[Complex64], r: &[Complex64]) {
        for (s, ws) in w.iter().enumerate() {
            for (ri, rv) in r.iter().enumerate() {
                out[self.full(s, ri)] += ws * rv;
            }
        }
    }
}

/// Factor a state known to be `|witnessed⟩ ⊗ |rest⟩` over `measured_qubits`
/// and return the normalized remainder on the other qubits.
///
/// Fails with [`Error::NotFactorizable`] when the state carries residual
/// correlation with the measured qubits above [`FACTOR_TOL`].
pub fn extract_subsystem(
    state: &StateVector,
    measured_qubits: &[QubitLabel],
    witnessed_basis_state: &StateVector,
) -> Result<StateVector> {
    let split = Split::new(state.num_qubits, measured_qubits)?;
    if witnessed_basis_state.num_qubits != measured_qubits.len() {
        return Err(Error::DimensionMismatch {
            left: measured_qubits.len(),
            right: witnessed_basis_state.num_qubits,
        });
    }
    let remainder = split.contract(&state.amplitudes, &witnessed_basis_state.amplitudes);
    let mut rebuilt = vec![Complex64::new(0.0, 0.0); state.dim()];
    split.embed_into(&mut rebuilt, &witnessed_basis_state.amplitudes, &remainder);
    let residual = rebuilt.iter().zip(&state.amplitudes).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    if residual > FACTOR_TOL {
        return Err(Error::NotFactorizable { residual });
    }
    StateVector::normalized(remainder)
}

/// Best product approximation `|w⟩ ⊗ |r⟩` of a state across the cut between
/// `subsystem` and the remaining qubits. Returns `(w, r, residual)` where the
/// residual is the norm of what the product misses; it is zero exactly when
/// the state factorizes.
///
/// This is a power-iteration-free shortcut: the remainder is taken from the
/// heaviest subsystem row, which is exact for product states and close for
/// nearly product ones.
pub fn dominant_factor(state: &StateVector, subsystem: &[QubitLabel]) -> Result<(StateVector, StateVector, f64)> {
    let split = Split::new(state.num_qubits, subsystem)?;
    let psi = &state.amplitudes;
    let row = |s: usize| -> Vec<Complex64> { (0..split.rest_dim).map(|r| psi[split.full(s, r)]).collect() };
    let heaviest = (0..split.sub_dim)
        .max_by(|&x, &y| norm_sq(&row(x)).total_cmp(&norm_sq(&row(y))))
        .unwrap_or(0);
    let rest = StateVector::normalized(row(heaviest))?;
    let w: Vec<Complex64> = (0..split.sub_dim)
        .map(|s| (0..split.rest_dim).map(|r| psi[split.full(s, r)] * rest.amplitudes[r].conj()).sum())
        .collect();
    let mut rebuilt = vec![Complex64::new(0.0, 0.0); state.dim()];
    split.embed_into(&mut rebuilt, &w, &rest.amplitudes);
    let residual = rebuilt.iter().zip(psi).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    Ok((StateVector::normalized(w)?, rest, residual))
}
