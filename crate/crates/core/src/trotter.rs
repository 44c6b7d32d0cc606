//! Product-formula approximations of the schedule steps and their error.
//!
//! The second-order step is the symmetric split
//! `e^{−iτA(s)H₀/2} e^{−iτC(s)H_f} e^{−iτA(s)H₀/2}` with `A = 1−s`, `C = s`.
//! Higher even orders use the five-factor Suzuki recursion
//! `U_{2k}(t) = U_{2k−2}(p t)² U_{2k−2}((1−4p) t) U_{2k−2}(p t)²`,
//! `p = 1/(4 − 4^{1/(2k−1)})`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{cost_exp, exact_step_unchecked, mixer_exp, psi0_amps};
use crate::linalg::{Unitary2, C64};
use crate::schedule::{synth_qaoa_params, total_time, Schedule};

/// Even product-formula order `2k`, `k ∈ {1, 2, 3, 4}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct TrotterOrder(u32);

impl TrotterOrder {
    pub const SECOND: TrotterOrder = TrotterOrder(2);
    pub const FOURTH: TrotterOrder = TrotterOrder(4);

    pub fn new(order: u32) -> Result<Self> {
        match order {
            2 | 4 | 6 | 8 => Ok(TrotterOrder(order)),
            _ => Err(Error::domain(format!(
                "unsupported Trotter order {order} (expected 2, 4, 6 or 8)"
            ))),
        }
    }

    pub fn get(&self) -> u32 {
        self.0
    }

    /// `k` in `2k`.
    pub fn k(&self) -> u32 {
        self.0 / 2
    }
}

impl TryFrom<u32> for TrotterOrder {
    type Error = Error;

    fn try_from(v: u32) -> Result<Self> {
        TrotterOrder::new(v)
    }
}

impl From<TrotterOrder> for u32 {
    fn from(o: TrotterOrder) -> u32 {
        o.0
    }
}

impl fmt::Display for TrotterOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Suzuki coefficient `1/(4 − 4^{1/(2k−1)})` for lifting to order `2k`.
pub fn suzuki_coefficient(k: u32) -> f64 {
    1.0 / (4.0 - 4f64.powf(1.0 / (2 * k - 1) as f64))
}

fn check(dim: u64, s: f64, dt: f64) -> Result<()> {
    if dim < 2 {
        return Err(Error::domain(format!("N must be at least 2, got {dim}")));
    }
    if !s.is_finite() || !dt.is_finite() {
        return Err(Error::domain("s and dt must be finite"));
    }
    Ok(())
}

#[inline]
fn strang_unchecked(s: f64, n: f64, dt: f64) -> Unitary2 {
    let half = mixer_exp(n, (1.0 - s) * dt / 2.0);
    half * cost_exp(s * dt) * half
}

fn suzuki_unchecked(k: u32, s: f64, n: f64, dt: f64) -> Unitary2 {
    if k == 1 {
        return strang_unchecked(s, n, dt);
    }
    let p = suzuki_coefficient(k);
    let outer = suzuki_unchecked(k - 1, s, n, p * dt);
    let inner = suzuki_unchecked(k - 1, s, n, (1.0 - 4.0 * p) * dt);
    let pair = outer * outer;
    pair * inner * pair
}

/// Second-order symmetric split of `e^{−iH(s)dt}`.
pub fn strang_step(s: f64, dim: u64, dt: f64) -> Result<Unitary2> {
    check(dim, s, dt)?;
    Ok(strang_unchecked(s, dim as f64, dt))
}

/// Order-`2k` Suzuki approximation of `e^{−iH(s)dt}`.
pub fn suzuki_step(order: TrotterOrder, s: f64, dim: u64, dt: f64) -> Result<Unitary2> {
    check(dim, s, dt)?;
    Ok(suzuki_unchecked(order.k(), s, dim as f64, dt))
}

/// Spectral norm `‖U − V‖₂`.
pub fn op_norm_diff(u: &Unitary2, v: &Unitary2) -> f64 {
    (*u - *v).spectral_norm()
}

/// `∏_{l=R..1} e^{−iH(s_l)τ}`, step 1 rightmost.
pub fn grid_exact_product(schedule: &Schedule) -> Unitary2 {
    let n = schedule.dim as f64;
    schedule.s.iter().fold(Unitary2::IDENTITY, |acc, &s| {
        exact_step_unchecked(s, n, schedule.tau) * acc
    })
}

/// `∏_{l=R..1} U_{2k}(s_l, τ)` with every factor evaluated separately.
pub fn trotter_product(schedule: &Schedule, order: TrotterOrder) -> Unitary2 {
    let n = schedule.dim as f64;
    let k = order.k();
    schedule.s.iter().fold(Unitary2::IDENTITY, |acc, &s| {
        suzuki_unchecked(k, s, n, schedule.tau) * acc
    })
}

/// The second-order product with adjacent mixer halves merged into the QAOA
/// angles: `[∏_{l=R..1} e^{−iβ_l H₀} e^{−iγ_l H_f}] · e^{−iτ(1−s_1)H₀/2}`.
pub fn merged_strang_product(schedule: &Schedule) -> Unitary2 {
    let n = schedule.dim as f64;
    let params = synth_qaoa_params(schedule);
    let lead = match schedule.s.first() {
        Some(&s1) => mixer_exp(n, schedule.tau * (1.0 - s1) / 2.0),
        None => Unitary2::IDENTITY,
    };
    params
        .gamma
        .iter()
        .zip(&params.beta)
        .fold(lead, |acc, (&g, &b)| mixer_exp(n, b) * cost_exp(g) * acc)
}

/// Fidelities and operator-norm error of one Trotterized schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `ε_{2k} = ‖U_grid − Ũ‖₂`.
    pub trotter_err: f64,
    /// `1 − |⟨ω|U_grid ψ₀⟩|²`.
    pub adiabatic_infidelity: f64,
    /// `1 − |⟨ω|Ũ ψ₀⟩|²`.
    pub trotterized_infidelity: f64,
    /// `1 − |⟨U_grid ψ₀|Ũ ψ₀⟩|²`.
    pub state_infidelity: f64,
    pub eps1: f64,
    /// `ε_{2k} + ε₁`.
    pub total: f64,
}

/// Compare the product of exact step exponentials on the schedule grid with
/// its order-`2k` Trotterization. For order 2 the merged QAOA form is used.
pub fn evolution_error(schedule: &Schedule, order: TrotterOrder) -> ErrorReport {
    let exact = grid_exact_product(schedule);
    let approx = if order == TrotterOrder::SECOND {
        merged_strang_product(schedule)
    } else {
        trotter_product(schedule, order)
    };
    let trotter_err = op_norm_diff(&exact, &approx);
    let (a, b) = psi0_amps(schedule.dim as f64);
    let psi0 = [C64::new(a, 0.0), C64::new(b, 0.0)];
    let x = exact.apply(psi0);
    let y = approx.apply(psi0);
    let overlap = x[0].conj() * y[0] + x[1].conj() * y[1];
    let eps1 = schedule.spec.eps1;
    ErrorReport {
        trotter_err,
        adiabatic_infidelity: (1.0 - x[0].norm_sqr()).max(0.0),
        trotterized_infidelity: (1.0 - y[0].norm_sqr()).max(0.0),
        state_infidelity: (1.0 - overlap.norm_sqr()).max(0.0),
        eps1,
        total: trotter_err + eps1,
    }
}

/// `ceil(constant · ((2T)^{2k+1} / budget)^{1/(2k)})` for a given total time.
pub fn required_steps_for_time(
    total: f64,
    budget: f64,
    order: TrotterOrder,
    constant: f64,
) -> Result<u64> {
    if !(budget > 0.0) {
        return Err(Error::domain(format!(
            "Trotter error budget must be positive, got {budget}"
        )));
    }
    if !(total > 0.0 && constant > 0.0) {
        return Err(Error::domain("total time and constant must be positive"));
    }
    let k2 = (2 * order.k()) as f64;
    // In logs to keep (2T)^{2k+1} from overflowing for large N and order 8.
    let log_r = constant.ln() + ((k2 + 1.0) * (2.0 * total).ln() - budget.ln()) / k2;
    let r = log_r.exp().ceil();
    if !r.is_finite() || r > u64::MAX as f64 {
        return Err(Error::domain("required step count overflows"));
    }
    Ok((r as u64).max(1))
}

/// Table-style step estimate for total budget `eps` split as
/// `ε_{2k} ≤ eps − eps1`, with `T = total_time(N, eps1)`.
pub fn required_r(
    dim: u64,
    eps: f64,
    eps1: f64,
    order: TrotterOrder,
    constant: f64,
) -> Result<u64> {
    if !(eps > eps1) {
        return Err(Error::domain(format!(
            "total budget {eps} must exceed eps1 = {eps1}"
        )));
    }
    let total = total_time(dim, eps1)?;
    required_steps_for_time(total, eps - eps1, order, constant)
}
