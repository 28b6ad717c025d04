//! 2×2 complex matrices: the only dense operators the protocols need.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues below this magnitude are treated as exact zeros when taking
/// square roots of positive semidefinite matrices.
pub const PSD_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self(m)
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    pub const fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn zero() -> Self {
        Self([[ZERO, ZERO], [ZERO, ZERO]])
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: [Complex64; 2], v: [Complex64; 2]) -> Self {
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = u[i] * v[j].conj();
            }
        }
        Self(m)
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = &self.0;
        Self([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `⟨v|M|v⟩` (real part; exact for Hermitian `M`).
    pub fn expectation(&self, v: [Complex64; 2]) -> f64 {
        let mv = self.apply(v);
        (v[0].conj() * mv[0] + v[1].conj() * mv[1]).re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).max_abs()
    }

    /// Eigen-decomposition of a Hermitian matrix. Eigenvalues come back in
    /// ascending order with orthonormal eigenvectors in matching order.
    /// Only the Hermitian part of `self` is used.
    pub fn hermitian_eigen(&self) -> ([f64; 2], [[Complex64; 2]; 2]) {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let c = 0.5 * (self.0[0][1] + self.0[1][0].conj());
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d) * (a - d) + c.norm_sqr()).sqrt();
        let lo = mean - half_gap;
        let hi = mean + half_gap;

        if c.norm() <= f64::EPSILON * (a.abs() + d.abs()).max(f64::MIN_POSITIVE) {
            let e0 = [ONE, ZERO];
            let e1 = [ZERO, ONE];
            return if a <= d { ([a, d], [e0, e1]) } else { ([d, a], [e1, e0]) };
        }

        // Eigenvector for `hi` from whichever row is better conditioned.
        let from_row0 = [c, Complex64::new(hi - a, 0.0)];
        let from_row1 = [Complex64::new(hi - d, 0.0), c.conj()];
        let n0 = from_row0[0].norm_sqr() + from_row0[1].norm_sqr();
        let n1 = from_row1[0].norm_sqr() + from_row1[1].norm_sqr();
        let (v, n) = if n0 >= n1 { (from_row0, n0) } else { (from_row1, n1) };
        let n = n.sqrt();
        let v_hi = [v[0] / n, v[1] / n];
        // The orthogonal complement in C^2.
        let v_lo = [-v_hi[1].conj(), v_hi[0].conj()];
        ([lo, hi], [v_lo, v_hi])
    }

    /// Positive square root of a positive semidefinite matrix. Eigenvalues
    /// within [`PSD_CLAMP`] of zero (either sign) are set to zero.
    pub fn psd_sqrt(&self) -> Self {
        let (vals, vecs) = self.hermitian_eigen();
        vals.iter().zip(vecs.iter()).fold(Self::zero(), |acc, (&lambda, &v)| {
            let lambda = if lambda.abs() <= PSD_CLAMP { 0.0 } else { lambda.max(0.0) };
            acc + Self::outer(v, v).scale(lambda.sqrt())
        })
    }

    /// Clamp tiny negative eigenvalues to zero, keeping everything else.
    pub fn clamp_psd(&self) -> Self {
        let (vals, vecs) = self.hermitian_eigen();
        vals.iter().zip(vecs.iter()).fold(Self::zero(), |acc, (&lambda, &v)| {
            let lambda = if lambda.abs() <= PSD_CLAMP { 0.0 } else { lambda };
            acc + Self::outer(v, v).scale(lambda)
        })
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigen_of_diagonal() {
        let m = Mat2::from_real([[3.0, 0.0], [0.0, -1.0]]);
        let (vals, vecs) = m.hermitian_eigen();
        assert_eq!(vals, [-1.0, 3.0]);
        assert_eq!(vecs[0], [ZERO, ONE]);
    }

    #[test]
    fn eigen_reconstructs_hermitian() {
        let m = Mat2::new([[c(0.7, 0.0), c(0.1, -0.25)], [c(0.1, 0.25), c(0.2, 0.0)]]);
        let (vals, vecs) = m.hermitian_eigen();
        let rebuilt = Mat2::outer(vecs[0], vecs[0]).scale(vals[0]) + Mat2::outer(vecs[1], vecs[1]).scale(vals[1]);
        assert!((rebuilt - m).max_abs() < 1e-14);
        assert!(vals[0] <= vals[1]);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = Mat2::new([[c(0.5, 0.0), c(0.2, 0.1)], [c(0.2, -0.1), c(0.4, 0.0)]]);
        let r = m.psd_sqrt();
        assert!((r * r - m).max_abs() < 1e-14);
        assert!(r.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn sqrt_of_rank_one_stays_rank_one() {
        let s = 1.0 / 5f64.sqrt();
        let v = [c(2.0 * s, 0.0), c(s, 0.0)];
        let p = Mat2::outer(v, v).scale(0.3);
        let r = p.psd_sqrt();
        // sqrt(0.3 |v><v|) = sqrt(0.3) |v><v|
        assert!((r - Mat2::outer(v, v).scale(0.3f64.sqrt())).max_abs() < 1e-15);
    }

    #[test]
    fn pauli_products() {
        let x = Mat2::from_real([[0.0, 1.0], [1.0, 0.0]]);
        let z = Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]);
        assert_eq!(z * x, Mat2::from_real([[0.0, 1.0], [-1.0, 0.0]]));
        assert!((x * x - Mat2::identity()).max_abs() == 0.0);
        assert!((z * x).unitarity_defect() < 1e-15);
    }
}
