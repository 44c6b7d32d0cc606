//! Dense 2×2 complex matrices used for every step propagator in the
//! `{|ω⟩, |r⟩}` subspace.

use std::ops::{Mul, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// `e^{-iθ}`.
#[inline]
pub fn phase(theta: f64) -> C64 {
    let (sin, cos) = theta.sin_cos();
    C64::new(cos, -sin)
}

/// Row-major 2×2 complex matrix. Named for its main use as a step propagator,
/// but differences of unitaries are stored in the same type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2(pub [[C64; 2]; 2]);

impl Unitary2 {
    pub const IDENTITY: Unitary2 = Unitary2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn diag(a: C64, b: C64) -> Self {
        Unitary2([[a, ZERO], [ZERO, b]])
    }

    pub fn scale(&self, k: C64) -> Self {
        let m = self.0;
        Unitary2([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    pub fn adjoint(&self) -> Self {
        let m = self.0;
        Unitary2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn det(&self) -> C64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// Largest singular value, from the eigenvalues of `M†M`:
    /// `σ²_max = (‖M‖²_F + sqrt(‖M‖⁴_F − 4|det M|²)) / 2`.
    pub fn spectral_norm(&self) -> f64 {
        let f = self.frobenius_sqr();
        let d = self.det().norm_sqr();
        let disc = (f * f - 4.0 * d).max(0.0).sqrt();
        ((f + disc) / 2.0).sqrt()
    }

    /// Max-entry deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Unitary2::IDENTITY).max_abs()
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        let a = self.0;
        let b = rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Unitary2(out)
    }
}

impl Sub for Unitary2 {
    type Output = Unitary2;

    fn sub(self, rhs: Unitary2) -> Unitary2 {
        let a = self.0;
        let b = rhs.0;
        Unitary2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
