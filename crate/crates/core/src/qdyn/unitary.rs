use core::ops::Mul;

use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::Vec3;

/// A 2x2 complex matrix, row-major `[u00, u01, u10, u11]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 8]", into = "[f64; 8]")]
pub struct Unitary2(pub [Complex64; 4]);

const I: Complex64 = Complex64::new(0.0, 1.0);

impl Unitary2 {
    pub const IDENTITY: Unitary2 = Unitary2([
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ]);

    pub fn new(u00: Complex64, u01: Complex64, u10: Complex64, u11: Complex64) -> Self {
        Unitary2([u00, u01, u10, u11])
    }

    /// `exp(-i b.sigma)`.
    pub fn exp_pauli(b: Vec3) -> Self {
        let a = b.norm();
        let (s, c) = a.sin_cos();
        // sin(a)/a without cancellation near zero
        let sinc = if a > 1e-4 {
            s / a
        } else {
            1.0 - a * a / 6.0 + a.powi(4) / 120.0
        };
        let (x, y, z) = (b.x * sinc, b.y * sinc, b.z * sinc);
        Unitary2([
            Complex64::new(c, -z),
            Complex64::new(-y, -x),
            Complex64::new(y, -x),
            Complex64::new(c, z),
        ])
    }

    /// Diagonal gate `diag(e^{i beta}, e^{-i beta})`.
    pub fn phase_gate(beta: f64) -> Self {
        let e = Complex64::from_polar(1.0, beta);
        Unitary2([
            e,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            e.conj(),
        ])
    }

    /// `v.sigma` as a matrix.
    pub fn pauli(v: Vec3) -> Self {
        Unitary2([
            Complex64::new(v.z, 0.0),
            Complex64::new(v.x, -v.y),
            Complex64::new(v.x, v.y),
            Complex64::new(-v.z, 0.0),
        ])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Unitary2([m[0].conj(), m[2].conj(), m[1].conj(), m[3].conj()])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0] + self.0[3]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0] * self.0[3] - self.0[1] * self.0[2]
    }

    /// Frobenius norm of `U^dagger U - 1`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint() * *self;
        let d = [p.0[0] - 1.0, p.0[1], p.0[2], p.0[3] - 1.0];
        d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Pauli coefficients of a traceless Hermitian matrix.
    pub fn pauli_coefficients(&self) -> Vec3 {
        let m = &self.0;
        Vec3::new(m[1].re, -m[1].im, 0.5 * (m[0].re - m[3].re))
    }

    /// Coefficients of `U^dagger (v.sigma) U`.
    pub fn heisenberg(&self, v: Vec3) -> Vec3 {
        (self.adjoint() * Unitary2::pauli(v) * *self).pauli_coefficients()
    }

    /// Largest entrywise distance to another matrix.
    pub fn max_abs_diff(&self, o: &Unitary2) -> f64 {
        (0..4)
            .map(|k| (self.0[k] - o.0[k]).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Unitary2(self.0.map(|z| z * s))
    }

    /// Re/im pairs of the four entries, row-major.
    pub fn to_floats(&self) -> [f64; 8] {
        let m = &self.0;
        [
            m[0].re, m[0].im, m[1].re, m[1].im, m[2].re, m[2].im, m[3].re, m[3].im,
        ]
    }

    pub fn from_floats(f: [f64; 8]) -> Self {
        Unitary2([
            Complex64::new(f[0], f[1]),
            Complex64::new(f[2], f[3]),
            Complex64::new(f[4], f[5]),
            Complex64::new(f[6], f[7]),
        ])
    }

    /// `-i sigma_x`, the ideal pi pulse about x.
    pub fn minus_i_sigma_x() -> Self {
        Unitary2::pauli(Vec3::X).scale(-I)
    }
}

impl From<[f64; 8]> for Unitary2 {
    fn from(f: [f64; 8]) -> Self {
        Unitary2::from_floats(f)
    }
}

impl From<Unitary2> for [f64; 8] {
    fn from(u: Unitary2) -> Self {
        u.to_floats()
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;
    fn mul(self, o: Unitary2) -> Unitary2 {
        let a = &self.0;
        let b = &o.0;
        Unitary2([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }
}
