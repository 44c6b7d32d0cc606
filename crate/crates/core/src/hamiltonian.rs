//! `H(s) = (1−s)H₀ + sH_f` restricted to the invariant subspace spanned by
//! `|ω⟩` and `|r⟩ = (N−1)^{-1/2} Σ_{x≠ω} |x⟩`, where
//! `H₀ = I − |ψ₀⟩⟨ψ₀|` and `H_f = I − |ω⟩⟨ω|`.
//!
//! Everything here is closed form: the matrices are real symmetric 2×2.

use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{phase, Unitary2, C64};
use crate::schedule::{continuous_unchecked, fmt_float, total_time};

/// Real symmetric 2×2 matrix, row-major.
pub type Sym2 = [[f64; 2]; 2];

fn check(dim: u64, s: f64) -> Result<()> {
    if dim < 2 {
        return Err(Error::domain(format!("N must be at least 2, got {dim}")));
    }
    if !s.is_finite() {
        return Err(Error::domain("schedule value s must be finite"));
    }
    Ok(())
}

/// Amplitudes of `|ψ₀⟩` in the `{|ω⟩, |r⟩}` basis.
#[inline]
pub(crate) fn psi0_amps(n: f64) -> (f64, f64) {
    (1.0 / n.sqrt(), ((n - 1.0) / n).sqrt())
}

/// `H(s)` in the `{|ω⟩, |r⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian2 {
    pub entries: Sym2,
    pub s: f64,
    pub dim: u64,
}

impl Hamiltonian2 {
    pub fn eigensystem(&self) -> EigenSystem2 {
        eigensystem(&self.entries)
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }
}

#[inline]
pub(crate) fn h_entries(s: f64, n: f64) -> Sym2 {
    let a = (1.0 - s) * (n - 1.0) / n;
    let b = -(1.0 - s) * (n - 1.0).sqrt() / n;
    [[a, b], [b, 1.0 - a]]
}

/// Build `H(s)`. Values of `s` outside `[0, 1]` are accepted so that
/// out-of-range literal schedules can still be evaluated.
pub fn h_subspace(s: f64, dim: u64) -> Result<Hamiltonian2> {
    check(dim, s)?;
    Ok(Hamiltonian2 {
        entries: h_entries(s, dim as f64),
        s,
        dim,
    })
}

/// `H_f − H₀ = |ψ₀⟩⟨ψ₀| − |ω⟩⟨ω|`, i.e. `dH/ds`.
pub(crate) fn dh_ds(n: f64) -> Sym2 {
    let (a, b) = psi0_amps(n);
    [[a * a - 1.0, a * b], [a * b, b * b]]
}

/// Eigenvalues `λ₀ ≤ λ₁` and matching orthonormal eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem2 {
    pub values: [f64; 2],
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: [[C64; 2]; 2],
}

impl EigenSystem2 {
    pub fn gap(&self) -> f64 {
        self.values[1] - self.values[0]
    }
}

fn normalize_sign(v: [f64; 2]) -> [f64; 2] {
    let lead = if v[0] != 0.0 { v[0] } else { v[1] };
    if lead < 0.0 {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Closed-form eigensolve of a real symmetric 2×2 matrix. Eigenvectors have
/// their first nonzero component real and positive.
pub fn eigensystem(m: &Sym2) -> EigenSystem2 {
    let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
    let (values, v0, v1) = if b == 0.0 {
        if a <= d {
            ([a, d], [1.0, 0.0], [0.0, 1.0])
        } else {
            ([d, a], [0.0, 1.0], [1.0, 0.0])
        }
    } else {
        let mean = 0.5 * (a + d);
        let half = 0.5 * (a - d);
        let radius = half.hypot(b);
        // a − d = 2r cos 2φ, 2b = 2r sin 2φ; (cos φ, sin φ) belongs to λ₁.
        let phi = 0.5 * b.atan2(half);
        let (sin, cos) = phi.sin_cos();
        ([mean - radius, mean + radius], [-sin, cos], [cos, sin])
    };
    let lift = |v: [f64; 2]| {
        let v = normalize_sign(v);
        [C64::new(v[0], 0.0), C64::new(v[1], 0.0)]
    };
    EigenSystem2 {
        values,
        vectors: [lift(v0), lift(v1)],
    }
}

/// `λ₁ − λ₀` of `H(s)`.
pub fn gap(s: f64, dim: u64) -> Result<f64> {
    Ok(h_subspace(s, dim)?.eigensystem().gap())
}

/// `e^{−iM·dt}` by spectral decomposition.
pub fn exp_symmetric(m: &Sym2, dt: f64) -> Unitary2 {
    let es = eigensystem(m);
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        let ph = phase(es.values[k] * dt);
        let v = es.vectors[k];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell += ph * v[i] * v[j].conj();
            }
        }
    }
    Unitary2(out)
}

#[inline]
pub(crate) fn exact_step_unchecked(s: f64, n: f64, dt: f64) -> Unitary2 {
    exp_symmetric(&h_entries(s, n), dt)
}

/// Exact step propagator `e^{−iH(s)·dt}`.
pub fn exact_step(s: f64, dim: u64, dt: f64) -> Result<Unitary2> {
    check(dim, s)?;
    if !dt.is_finite() {
        return Err(Error::domain("time step must be finite"));
    }
    Ok(exact_step_unchecked(s, dim as f64, dt))
}

/// `e^{−iθH₀} = e^{−iθ}I + (1 − e^{−iθ})|ψ₀⟩⟨ψ₀|` in the subspace.
#[inline]
pub(crate) fn mixer_exp(n: f64, theta: f64) -> Unitary2 {
    let (a, b) = psi0_amps(n);
    let ph = phase(theta);
    let k = C64::new(1.0, 0.0) - ph;
    Unitary2([
        [ph + k * (a * a), k * (a * b)],
        [k * (a * b), ph + k * (b * b)],
    ])
}

/// `e^{−iθH_f} = diag(1, e^{−iθ})` in the subspace.
#[inline]
pub(crate) fn cost_exp(theta: f64) -> Unitary2 {
    Unitary2::diag(C64::new(1.0, 0.0), phase(theta))
}

/// Largest value over a time grid of `|⟨λ₁|dH/dt|λ₀⟩| / g²` for the exact
/// local schedule, with `ds/dt` taken by finite differences.
pub fn adiabatic_margin(dim: u64, eps1: f64, grid: usize) -> Result<f64> {
    let total = total_time(dim, eps1)?;
    let n = dim as f64;
    adiabatic_margin_with(dim, total, grid, |t| {
        continuous_unchecked(t.clamp(0.0, total), n, eps1)
    })
}

/// [`adiabatic_margin`] for an arbitrary schedule `s(t)` on `[0, total]`.
/// The grid has `grid` evenly spaced points including both ends; `ds/dt` is a
/// central difference with step `1e-6·total`, one-sided at the ends.
pub fn adiabatic_margin_with<F: Fn(f64) -> f64>(
    dim: u64,
    total: f64,
    grid: usize,
    s_of_t: F,
) -> Result<f64> {
    if grid < 100 {
        return Err(Error::domain(format!(
            "margin grid needs at least 100 points, got {grid}"
        )));
    }
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::domain("total time must be positive"));
    }
    check(dim, 0.0)?;
    let n = dim as f64;
    let h = 1e-6 * total;
    let dh = dh_ds(n);
    let mut worst = 0.0f64;
    for i in 0..grid {
        let t = total * i as f64 / (grid - 1) as f64;
        let ds_dt = if t - h < 0.0 {
            (s_of_t(t + h) - s_of_t(t)) / h
        } else if t + h > total {
            (s_of_t(t) - s_of_t(t - h)) / h
        } else {
            (s_of_t(t + h) - s_of_t(t - h)) / (2.0 * h)
        };
        let s = s_of_t(t);
        let es = eigensystem(&h_entries(s, n));
        let v0 = es.vectors[0].map(|z| z.re);
        let v1 = es.vectors[1].map(|z| z.re);
        let coupling = v1[0] * (dh[0][0] * v0[0] + dh[0][1] * v0[1])
            + v1[1] * (dh[1][0] * v0[0] + dh[1][1] * v0[1]);
        let g = es.gap();
        worst = worst.max((coupling * ds_dt).abs() / (g * g));
    }
    Ok(worst)
}

/// CSV dump with columns `s,lambda0,lambda1,gap` over `points` evenly spaced
/// values of `s` in `[0, 1]`.
pub fn write_spectrum_csv<W: Write>(out: W, dim: u64, points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::domain("spectrum grid needs at least 2 points"));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "lambda0", "lambda1", "gap"])?;
    for i in 0..points {
        let s = i as f64 / (points - 1) as f64;
        let es = h_subspace(s, dim)?.eigensystem();
        w.write_record([
            fmt_float(s),
            fmt_float(es.values[0]),
            fmt_float(es.values[1]),
            fmt_float(es.gap()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
