//! Local adiabatic schedules for Grover search and the QAOA angles they induce.
//!
//! The continuous schedule is the exact inverse of the Roland–Cerf time map
//!
//! ```text
//! t(s) = N / (2 ε₁ √(N−1)) · [ arctan(√(N−1)(2s−1)) + arctan(√(N−1)) ]
//! ```
//!
//! Three discretizations are offered (see [`Variant`]). Step `l` runs over
//! `1..=R` and step 1 is applied to the state first.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::compensated_sum;

/// Relative slack allowed past `T` when sampling the continuous schedule.
const TIME_SLACK: f64 = 1e-9;

/// An unstructured search problem over `N = 2^n` items with one marked item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchInstance {
    n_qubits: u32,
    marked: u64,
}

impl SearchInstance {
    pub fn new(n_qubits: u32, marked: u64) -> Result<Self> {
        if !(1..=62).contains(&n_qubits) {
            return Err(Error::domain(format!(
                "n_qubits must be in 1..=62, got {n_qubits}"
            )));
        }
        let dim = 1u64 << n_qubits;
        if marked >= dim {
            return Err(Error::domain(format!(
                "marked index {marked} out of range for N = {dim}"
            )));
        }
        Ok(SearchInstance { n_qubits, marked })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    /// Search-space size `N = 2^n`.
    pub fn dim(&self) -> u64 {
        1u64 << self.n_qubits
    }

    pub fn marked(&self) -> u64 {
        self.marked
    }
}

/// How the discrete values `s_1..s_R` are produced.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub enum Variant {
    /// `s_l = √N tan(πl/R) / (2(√N tan(πl/R) + 1))`, the large-N approximation of
    /// `s(lT/R)`. Ends at `s_R = 0`.
    #[serde(rename = "paper")]
    PaperLiteral,
    /// The same closed form with the angle rescaled to `θ_max·l/R` so that
    /// `s_R = 1`.
    #[serde(rename = "regularized")]
    Regularized,
    /// `s_l = s(lT/R)` from the exact continuous schedule.
    #[serde(rename = "exact")]
    #[default]
    ExactInversion,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::PaperLiteral,
        Variant::Regularized,
        Variant::ExactInversion,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::PaperLiteral => "paper",
            Variant::Regularized => "regularized",
            Variant::ExactInversion => "exact",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Variant::PaperLiteral),
            "regularized" => Ok(Variant::Regularized),
            "exact" => Ok(Variant::ExactInversion),
            other => Err(Error::domain(format!(
                "unknown variant {other:?} (expected paper, regularized or exact)"
            ))),
        }
    }
}

/// Parameters that fix a discrete schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub variant: Variant,
    pub steps: u64,
    pub eps1: f64,
}

impl ScheduleSpec {
    pub fn new(variant: Variant, steps: u64, eps1: f64) -> Result<Self> {
        let spec = ScheduleSpec {
            variant,
            steps,
            eps1,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 1 {
            return Err(Error::domain("step count R must be at least 1"));
        }
        if !(self.eps1 > 0.0 && self.eps1 < 1.0) {
            return Err(Error::domain(format!(
                "eps1 must lie in (0, 1), got {}",
                self.eps1
            )));
        }
        Ok(())
    }
}

/// A discretized schedule: `s_1..s_R` with time step `τ = T/R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub spec: ScheduleSpec,
    /// Search-space size `N`.
    pub dim: u64,
    pub s: Vec<f64>,
    pub tau: f64,
    pub total_time: f64,
    /// Set when some `s_l` falls outside `[0, 1]` (possible only for
    /// [`Variant::PaperLiteral`]).
    pub out_of_range: bool,
}

impl Schedule {
    pub fn steps(&self) -> usize {
        self.s.len()
    }

    pub fn qaoa_params(&self) -> QaoaParams {
        synth_qaoa_params(self)
    }
}

/// QAOA angles `γ_1..γ_p`, `β_1..β_p`. Stored unreduced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let p = QaoaParams { gamma, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma.len() != self.beta.len() {
            return Err(Error::domain(format!(
                "gamma has {} entries but beta has {}",
                self.gamma.len(),
                self.beta.len()
            )));
        }
        if self.gamma.is_empty() {
            return Err(Error::domain("QAOA depth must be at least 1"));
        }
        if self
            .gamma
            .iter()
            .chain(self.beta.iter())
            .any(|a| !a.is_finite())
        {
            return Err(Error::domain("QAOA angles must be finite"));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.gamma.len()
    }

    /// Interleaved `[γ_1, β_1, γ_2, β_2, ...]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.gamma
            .iter()
            .zip(&self.beta)
            .flat_map(|(&g, &b)| [g, b])
            .collect()
    }

    /// Inverse of [`QaoaParams::to_flat`].
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::domain("flat parameter vector must have even length"));
        }
        let gamma = flat.iter().step_by(2).copied().collect();
        let beta = flat.iter().skip(1).step_by(2).copied().collect();
        QaoaParams::new(gamma, beta)
    }

    /// Every angle folded into `[0, 2π)`.
    pub fn reduced(&self) -> QaoaParams {
        let fold = |a: &f64| a.rem_euclid(2.0 * PI);
        QaoaParams {
            gamma: self.gamma.iter().map(fold).collect(),
            beta: self.beta.iter().map(fold).collect(),
        }
    }
}

fn check_dim(dim: u64) -> Result<()> {
    if dim < 2 {
        return Err(Error::domain(format!("N must be at least 2, got {dim}")));
    }
    Ok(())
}

fn check_eps1(eps1: f64) -> Result<()> {
    // eps1 = 1 is admitted here so T(N=2, ε₁=1) = π/2 can be evaluated.
    if !(eps1 > 0.0 && eps1 <= 1.0) {
        return Err(Error::domain(format!(
            "eps1 must lie in (0, 1], got {eps1}"
        )));
    }
    Ok(())
}

/// Total evolution time `T = t(s = 1) = N arctan(√(N−1)) / (ε₁ √(N−1))`.
pub fn total_time(dim: u64, eps1: f64) -> Result<f64> {
    check_dim(dim)?;
    check_eps1(eps1)?;
    let n = dim as f64;
    let root = (n - 1.0).sqrt();
    Ok(n * root.atan() / (eps1 * root))
}

/// Closed-form `t(s)` of the local schedule. Defined for any real `s`.
pub fn time_at(s: f64, dim: u64, eps1: f64) -> Result<f64> {
    check_dim(dim)?;
    check_eps1(eps1)?;
    let n = dim as f64;
    let root = (n - 1.0).sqrt();
    Ok(n / (2.0 * eps1 * root) * ((root * (2.0 * s - 1.0)).atan() + root.atan()))
}

/// `s(t)` for `0 ≤ t ≤ T`, the exact inverse of [`time_at`].
///
/// Evaluated as `s = √N sin θ / (2 √(N−1) cos(θ − θ₀))` with
/// `θ = 2tε₁√(N−1)/N` and `θ₀ = arctan √(N−1)`, which equals
/// `1/2 + tan(θ − θ₀)/(2√(N−1))` without the cancellation near `t = 0`.
pub fn schedule_continuous(t: f64, dim: u64, eps1: f64) -> Result<f64> {
    let total = total_time(dim, eps1)?;
    if !(t >= 0.0 && t <= total * (1.0 + TIME_SLACK)) {
        return Err(Error::domain(format!("time {t} outside [0, T = {total}]")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t >= total {
        return Ok(1.0);
    }
    Ok(continuous_unchecked(t, dim as f64, eps1))
}

pub(crate) fn continuous_unchecked(t: f64, n: f64, eps1: f64) -> f64 {
    let root = (n - 1.0).sqrt();
    let theta0 = root.atan();
    let theta = 2.0 * t * eps1 * root / n;
    let s = n.sqrt() * theta.sin() / (2.0 * root * (theta - theta0).cos());
    s.clamp(0.0, 1.0)
}

/// `1 / (2 + 2 cot θ / √N)`: the literal closed form `√N tanθ / (2(√N tanθ + 1))`
/// rewritten to stay finite where `tan θ` diverges.
fn literal_value(cot: f64, sqrt_n: f64) -> f64 {
    1.0 / (2.0 + 2.0 * cot / sqrt_n)
}

fn paper_literal(l: u64, steps: u64, sqrt_n: f64) -> f64 {
    if 2 * l == steps {
        return 0.5;
    }
    if l == steps {
        // θ = π: tan θ = 0.
        return 0.0;
    }
    let theta = PI * l as f64 / steps as f64;
    literal_value(theta.cos() / theta.sin(), sqrt_n)
}

/// Angle at which the literal closed form reaches exactly 1:
/// `π − arccot(√N / 2)`.
pub fn regularized_max_angle(dim: u64) -> f64 {
    PI - (2.0 / (dim as f64).sqrt()).atan()
}

fn regularized(l: u64, steps: u64, sqrt_n: f64, theta_max: f64) -> f64 {
    if l == steps {
        return 1.0;
    }
    let theta = theta_max * l as f64 / steps as f64;
    let (sin, cos) = theta.sin_cos();
    literal_value(cos / sin, sqrt_n).clamp(0.0, 1.0)
}

/// Discretize the schedule into `R` values.
pub fn schedule_discrete(spec: ScheduleSpec, dim: u64) -> Result<Schedule> {
    spec.validate()?;
    check_dim(dim)?;
    let total = total_time(dim, spec.eps1)?;
    let steps = spec.steps;
    let n = dim as f64;
    let sqrt_n = n.sqrt();
    let s: Vec<f64> = match spec.variant {
        Variant::PaperLiteral => (1..=steps)
            .map(|l| paper_literal(l, steps, sqrt_n))
            .collect(),
        Variant::Regularized => {
            let theta_max = regularized_max_angle(dim);
            (1..=steps)
                .map(|l| regularized(l, steps, sqrt_n, theta_max))
                .collect()
        }
        Variant::ExactInversion => (1..=steps)
            .map(|l| {
                if l == steps {
                    1.0
                } else {
                    continuous_unchecked(total * l as f64 / steps as f64, n, spec.eps1)
                }
            })
            .collect(),
    };
    let out_of_range = s.iter().any(|v| !(0.0..=1.0).contains(v));
    Ok(Schedule {
        spec,
        dim,
        s,
        tau: total / steps as f64,
        total_time: total,
        out_of_range,
    })
}

/// Map a schedule onto QAOA angles with `p = R`:
///
/// ```text
/// γ_l = τ s_l                          l = 1..R
/// β_l = (τ/2)(2 − s_l − s_{l+1})       l = 1..R−1
/// β_R = (τ/2)(1 − s_R)
/// ```
///
/// The leading half mixer `e^{−iτ(1−s_1)H₀/2}` acts on `|ψ₀⟩` as a global
/// phase and is dropped.
pub fn synth_qaoa_params(schedule: &Schedule) -> QaoaParams {
    let tau = schedule.tau;
    let s = &schedule.s;
    let gamma = s.iter().map(|&v| tau * v).collect();
    let beta = (0..s.len())
        .map(|i| match s.get(i + 1) {
            Some(&next) => tau / 2.0 * (2.0 - (s[i] + next)),
            None => tau / 2.0 * (1.0 - s[i]),
        })
        .collect();
    QaoaParams { gamma, beta }
}

/// `Σγ + Σβ` computed with compensated summation.
pub fn angle_sum(params: &QaoaParams) -> f64 {
    compensated_sum(params.gamma.iter().chain(params.beta.iter()).copied())
}

/// JSON form of a schedule together with its QAOA angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRecord {
    pub variant: Variant,
    #[serde(rename = "N")]
    pub dim: u64,
    #[serde(rename = "R")]
    pub steps: u64,
    pub eps1: f64,
    pub tau: f64,
    #[serde(rename = "T")]
    pub total_time: f64,
    pub s: Vec<f64>,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl From<&Schedule> for ScheduleRecord {
    fn from(schedule: &Schedule) -> Self {
        let params = synth_qaoa_params(schedule);
        ScheduleRecord {
            variant: schedule.spec.variant,
            dim: schedule.dim,
            steps: schedule.spec.steps,
            eps1: schedule.spec.eps1,
            tau: schedule.tau,
            total_time: schedule.total_time,
            s: schedule.s.clone(),
            gamma: params.gamma,
            beta: params.beta,
        }
    }
}

impl ScheduleRecord {
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// CSV with columns `l,s,gamma,beta`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["l", "s", "gamma", "beta"])?;
        for (i, ((s, g), b)) in self.s.iter().zip(&self.gamma).zip(&self.beta).enumerate() {
            w.write_record([
                (i + 1).to_string(),
                fmt_float(*s),
                fmt_float(*g),
                fmt_float(*b),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Floats are written with 17 significant digits so they parse back exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
