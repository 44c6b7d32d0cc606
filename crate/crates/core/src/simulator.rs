//! Exact simulation of the Grover-search QAOA circuit
//! `∏_{l=1}^p e^{−iβ_l H₀} e^{−iγ_l H_f}` on two interchangeable backends.
//!
//! The subspace backend tracks the amplitudes on `|ω⟩` and `|r⟩`; the
//! statevector backend tracks all `2^n` amplitudes. Both use the same phase
//! conventions so their states agree entrywise, global phase included.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hamiltonian::{exact_step_unchecked, psi0_amps};
use crate::linalg::{phase, C64};
use crate::schedule::{continuous_unchecked, fmt_float, QaoaParams, Schedule, SearchInstance};

/// Default cap on the statevector backend.
pub const DEFAULT_MAX_QUBITS: u32 = 24;

/// Operations shared by both state representations.
pub trait SearchState {
    /// `e^{−iγH_f}`: `|ω⟩` untouched, every other basis state phased by `e^{−iγ}`.
    fn apply_cost(&mut self, gamma: f64);
    /// `e^{−iβH₀}|v⟩ = e^{−iβ}|v⟩ + (1 − e^{−iβ})⟨ψ₀|v⟩|ψ₀⟩`.
    fn apply_mixer(&mut self, beta: f64);
    /// `|⟨ω|ψ⟩|²`.
    fn success_prob(&self) -> f64;
    fn norm_sqr(&self) -> f64;
}

/// Amplitudes on `|ω⟩` and `|r⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceState {
    pub a_omega: C64,
    pub a_r: C64,
    dim: u64,
}

impl SubspaceState {
    /// `|ψ₀⟩ = (1/√N, √((N−1)/N))`.
    pub fn initial(dim: u64) -> Self {
        let (a, b) = psi0_amps(dim as f64);
        SubspaceState {
            a_omega: C64::new(a, 0.0),
            a_r: C64::new(b, 0.0),
            dim,
        }
    }

    pub fn from_amplitudes(a_omega: C64, a_r: C64, dim: u64) -> Self {
        SubspaceState { a_omega, a_r, dim }
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [self.a_omega, self.a_r]
    }
}

impl SearchState for SubspaceState {
    fn apply_cost(&mut self, gamma: f64) {
        self.a_r *= phase(gamma);
    }

    fn apply_mixer(&mut self, beta: f64) {
        let (a, b) = psi0_amps(self.dim as f64);
        let ph = phase(beta);
        let k = (C64::new(1.0, 0.0) - ph) * (self.a_omega * a + self.a_r * b);
        self.a_omega = ph * self.a_omega + k * a;
        self.a_r = ph * self.a_r + k * b;
    }

    fn success_prob(&self) -> f64 {
        self.a_omega.norm_sqr()
    }

    fn norm_sqr(&self) -> f64 {
        self.a_omega.norm_sqr() + self.a_r.norm_sqr()
    }
}

/// All `2^n` amplitudes in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    marked: usize,
}

impl StateVector {
    /// Uniform superposition `|+⟩^{⊗n}`.
    pub fn initial(instance: &SearchInstance, max_qubits: u32) -> Result<Self> {
        if instance.n_qubits() > max_qubits {
            return Err(Error::domain(format!(
                "statevector backend limited to {max_qubits} qubits, got {}",
                instance.n_qubits()
            )));
        }
        let dim = instance.dim() as usize;
        let amp = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(StateVector {
            amps: vec![amp; dim],
            marked: instance.marked() as usize,
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn marked(&self) -> usize {
        self.marked
    }

    /// Components along `|ω⟩` and `|r⟩`, and the norm of what is left over.
    pub fn project(&self) -> (SubspaceState, f64) {
        let dim = self.amps.len();
        let root = ((dim - 1) as f64).sqrt();
        let a_omega = self.amps[self.marked];
        let rest: C64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|&(x, _)| x != self.marked)
            .map(|(_, z)| *z)
            .sum();
        let a_r = rest / root;
        let uniform = a_r / root;
        let residual = self
            .amps
            .iter()
            .enumerate()
            .filter(|&(x, _)| x != self.marked)
            .map(|(_, z)| (*z - uniform).norm_sqr())
            .sum::<f64>()
            .sqrt();
        (
            SubspaceState::from_amplitudes(a_omega, a_r, dim as u64),
            residual,
        )
    }
}

impl SearchState for StateVector {
    fn apply_cost(&mut self, gamma: f64) {
        let ph = phase(gamma);
        let keep = self.amps[self.marked];
        self.amps.iter_mut().for_each(|z| *z *= ph);
        self.amps[self.marked] = keep;
    }

    fn apply_mixer(&mut self, beta: f64) {
        let n = self.amps.len() as f64;
        let ph = phase(beta);
        // ⟨ψ₀|v⟩ |ψ₀⟩_x = (Σ v) / N for every x.
        let sum: C64 = self.amps.iter().sum();
        let shift = (C64::new(1.0, 0.0) - ph) * (sum / n);
        self.amps.iter_mut().for_each(|z| *z = ph * *z + shift);
    }

    fn success_prob(&self) -> f64 {
        self.amps[self.marked].norm_sqr()
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Which representation to simulate with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Subspace,
    Statevector,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Subspace => "subspace",
            Backend::Statevector => "statevector",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subspace" => Ok(Backend::Subspace),
            "statevector" => Ok(Backend::Statevector),
            other => Err(Error::domain(format!(
                "unknown backend {other:?} (expected subspace or statevector)"
            ))),
        }
    }
}

/// State in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Subspace(SubspaceState),
    Full(StateVector),
}

impl State {
    fn as_search_state(&mut self) -> &mut dyn SearchState {
        match self {
            State::Subspace(s) => s,
            State::Full(s) => s,
        }
    }

    pub fn success_prob(&self) -> f64 {
        match self {
            State::Subspace(s) => s.success_prob(),
            State::Full(s) => s.success_prob(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match self {
            State::Subspace(s) => s.norm_sqr(),
            State::Full(s) => s.norm_sqr(),
        }
    }

    /// Diagnostic dump with columns `index,re,im`. For the subspace backend
    /// index 0 is `|ω⟩` and index 1 is `|r⟩`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "re", "im"])?;
        let amps: Vec<C64> = match self {
            State::Subspace(s) => s.amplitudes().to_vec(),
            State::Full(s) => s.amplitudes().to_vec(),
        };
        for (i, z) in amps.iter().enumerate() {
            w.write_record([i.to_string(), fmt_float(z.re), fmt_float(z.im)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Uniform superposition on the requested backend, using the default qubit cap.
pub fn initial_state(instance: &SearchInstance, backend: Backend) -> Result<State> {
    Ok(match backend {
        Backend::Subspace => State::Subspace(SubspaceState::initial(instance.dim())),
        Backend::Statevector => State::Full(StateVector::initial(instance, DEFAULT_MAX_QUBITS)?),
    })
}

/// Knobs for [`run_qaoa_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub backend: Backend,
    pub max_qubits: u32,
    /// Record the success probability after every layer.
    pub trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            backend: Backend::Subspace,
            max_qubits: DEFAULT_MAX_QUBITS,
            trace: false,
        }
    }
}

/// Outcome of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub state: State,
    pub success_prob: f64,
    pub trace: Option<Vec<f64>>,
}

impl Serialize for RunResult {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            success_prob: f64,
            trace: &'a [f64],
        }
        View {
            success_prob: self.success_prob,
            trace: self.trace.as_deref().unwrap_or(&[]),
        }
        .serialize(ser)
    }
}

/// Run the QAOA circuit on one backend with default options.
pub fn run_qaoa(
    instance: &SearchInstance,
    params: &QaoaParams,
    backend: Backend,
) -> Result<RunResult> {
    run_qaoa_with(
        instance,
        params,
        RunOptions {
            backend,
            ..RunOptions::default()
        },
    )
}

/// Start from `|ψ₀⟩` and apply, for `l = 1..p`, the cost layer `γ_l` followed
/// by the mixer layer `β_l`.
pub fn run_qaoa_with(
    instance: &SearchInstance,
    params: &QaoaParams,
    options: RunOptions,
) -> Result<RunResult> {
    params.validate()?;
    let mut state = match options.backend {
        Backend::Subspace => State::Subspace(SubspaceState::initial(instance.dim())),
        Backend::Statevector => State::Full(StateVector::initial(instance, options.max_qubits)?),
    };
    let mut trace = options.trace.then(|| Vec::with_capacity(params.depth()));
    {
        let st = state.as_search_state();
        for (&g, &b) in params.gamma.iter().zip(&params.beta) {
            st.apply_cost(g);
            st.apply_mixer(b);
            if let Some(t) = trace.as_mut() {
                t.push(st.success_prob());
            }
        }
    }
    let success_prob = state.success_prob();
    Ok(RunResult {
        state,
        success_prob,
        trace,
    })
}

/// Evolve `|ψ₀⟩` through exact steps `e^{−iH(s_l)dt}` (step 1 first).
pub fn run_piecewise<I>(instance: &SearchInstance, s_values: I, dt: f64) -> Result<RunResult>
where
    I: IntoIterator<Item = f64>,
{
    if !dt.is_finite() {
        return Err(Error::domain("time step must be finite"));
    }
    let dim = instance.dim();
    let n = dim as f64;
    let st = SubspaceState::initial(dim);
    let mut amps = st.amplitudes();
    for s in s_values {
        if !s.is_finite() {
            return Err(Error::domain("schedule value s must be finite"));
        }
        amps = exact_step_unchecked(s, n, dt).apply(amps);
    }
    let state = SubspaceState::from_amplitudes(amps[0], amps[1], dim);
    Ok(RunResult {
        success_prob: state.success_prob(),
        state: State::Subspace(state),
        trace: None,
    })
}

/// Stand-in for the continuous adiabatic evolution: exact steps on the exact
/// local schedule sampled at `refine·R` points over the same `T`.
pub fn run_reference_adiabatic(
    instance: &SearchInstance,
    schedule: &Schedule,
    refine: u64,
) -> Result<RunResult> {
    if refine < 1 {
        return Err(Error::domain("refine must be at least 1"));
    }
    if instance.dim() != schedule.dim {
        return Err(Error::domain(format!(
            "instance has N = {} but schedule has N = {}",
            instance.dim(),
            schedule.dim
        )));
    }
    let steps = schedule
        .spec
        .steps
        .checked_mul(refine)
        .ok_or_else(|| Error::domain("refined grid size overflows"))?;
    let total = schedule.total_time;
    let n = schedule.dim as f64;
    let eps1 = schedule.spec.eps1;
    let s_values = (1..=steps).map(move |l| {
        if l == steps {
            1.0
        } else {
            continuous_unchecked(total * l as f64 / steps as f64, n, eps1)
        }
    });
    run_piecewise(instance, s_values, total / steps as f64)
}
