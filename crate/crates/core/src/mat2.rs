//! Minimal 2×2 complex matrices for single-qubit algebra.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major `[[m00, m01], [m10, m11]]`. Serializes as nested `[re, im]` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Self {
        Mat2([[m00, m01], [m10, m11]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        Mat2([[a, ZERO], [ZERO, b]])
    }

    /// `w~ = diag(z, 1/z)` for `z` on the unit circle.
    pub fn signal(z: Complex64) -> Self {
        Self::diag(z, z.conj())
    }

    /// `exp(i φ X)`.
    pub fn x_rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Mat2([[ONE * c, I * s], [I * s, ONE * c]])
    }

    /// `exp(i φ Z)`.
    pub fn z_rotation(phi: f64) -> Self {
        Self::diag(
            Complex64::from_polar(1.0, phi),
            Complex64::from_polar(1.0, -phi),
        )
    }

    /// `a·1 + b·iX + c·iY + d·iZ` for complex scalars.
    pub fn from_quaternion(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a + I * d, c + I * b], [-c + I * b, a - I * d]])
    }

    /// SU(2) matrix whose first column is the unit vector `v`.
    pub fn su2_with_first_column(v: [Complex64; 2]) -> Self {
        Mat2([[v[0], -v[1].conj()], [v[1], v[0].conj()]])
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[r][c]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn frobenius(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// `max |(M M† - 1)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.adjoint() - Mat2::identity()).max_abs()
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> (f64, f64) {
        // s1² + s2² = ‖M‖_F², s1·s2 = |det M|; the small one via the product
        // avoids the cancellation in the eigenvalue formula.
        let f = self.frobenius().powi(2);
        let det = self.det().norm();
        let disc = (f * f - 4.0 * det * det).max(0.0).sqrt();
        let s1 = (0.5 * (f + disc)).sqrt();
        let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
        (s1, s2)
    }

    /// Re-orthonormalizes the columns (Gram–Schmidt, first column kept in
    /// direction).
    pub fn unitarize(&self) -> Self {
        let c0 = [self.0[0][0], self.0[1][0]];
        let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
        let u0 = [c0[0] / n0, c0[1] / n0];
        let c1 = [self.0[0][1], self.0[1][1]];
        let proj = u0[0].conj() * c1[0] + u0[1].conj() * c1[1];
        let r1 = [c1[0] - u0[0] * proj, c1[1] - u0[1] * proj];
        let n1 = (r1[0].norm_sqr() + r1[1].norm_sqr()).sqrt();
        let u1 = [r1[0] / n1, r1[1] / n1];
        Mat2([[u0[0], u1[0]], [u0[1], u1[1]]])
    }
}

/// Eigenvalues `(larger, smaller)` of a Hermitian 2×2 matrix.
pub fn hermitian_eigenvalues(h: &Mat2) -> (f64, f64) {
    let a = h.0[0][0].re;
    let d = h.0[1][1].re;
    let b = h.0[0][1];
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean + rad, mean - rad)
}

/// Unit eigenvector of a Hermitian 2×2 matrix for its largest eigenvalue,
/// with the first nonzero component made real and non-negative.
pub fn top_eigenvector(h: &Mat2) -> [Complex64; 2] {
    let (hi, _) = hermitian_eigenvalues(h);
    let a = h.0[0][0].re;
    let d = h.0[1][1].re;
    let b = h.0[0][1];
    // (H - hi) v = 0; pick the better-conditioned of the two rows.
    let r0 = [Complex64::new(a - hi, 0.0), b];
    let r1 = [b.conj(), Complex64::new(d - hi, 0.0)];
    let row = if r0[0].norm_sqr() + r0[1].norm_sqr() >= r1[0].norm_sqr() + r1[1].norm_sqr() {
        r0
    } else {
        r1
    };
    let mut v = if row[0].norm() + row[1].norm() == 0.0 {
        [ONE, ZERO]
    } else {
        [row[1], -row[0]]
    };
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    v = [v[0] / n, v[1] / n];
    let pivot = if v[0].norm() > 1e-300 { v[0] } else { v[1] };
    let phase = pivot.conj() / pivot.norm();
    [v[0] * phase, v[1] * phase]
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self.0;
        for (row, rhs_row) in out.iter_mut().zip(rhs.0) {
            for (x, y) in row.iter_mut().zip(rhs_row) {
                *x += y;
            }
        }
        Mat2(out)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-ONE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_are_unitary() {
        assert!(Mat2::x_rotation(0.3).unitarity_defect() < 1e-15);
        assert!(Mat2::z_rotation(1.1).unitarity_defect() < 1e-15);
        let q = Mat2::su2_with_first_column([Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        assert!(q.unitarity_defect() < 1e-15);
        assert!((q.det() - ONE).norm() < 1e-15);
    }

    #[test]
    fn quaternion_layout() {
        // iX
        let ix = Mat2::from_quaternion(ZERO, ONE, ZERO, ZERO);
        assert_eq!(ix, Mat2::new(ZERO, I, I, ZERO));
        // iY
        let iy = Mat2::from_quaternion(ZERO, ZERO, ONE, ZERO);
        assert_eq!(iy, Mat2::new(ZERO, ONE, -ONE, ZERO));
        // iZ
        let iz = Mat2::from_quaternion(ZERO, ZERO, ZERO, ONE);
        assert_eq!(iz, Mat2::diag(I, -I));
    }

    #[test]
    fn rank_one_singular_values() {
        let v = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let p = Mat2::new(
            v[0] * v[0].conj(),
            v[0] * v[1].conj(),
            v[1] * v[0].conj(),
            v[1] * v[1].conj(),
        );
        let (s1, s2) = p.singular_values();
        assert!((s1 - 1.0).abs() < 1e-15 && s2 < 1e-15);
        let top = top_eigenvector(&(p * p.adjoint()));
        assert!((top[0] - v[0]).norm() < 1e-12 && (top[1] - v[1]).norm() < 1e-12);
    }
}
