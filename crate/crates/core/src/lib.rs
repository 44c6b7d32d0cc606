//! Closed-form QAOA parameters for unstructured search, obtained by
//! Trotterizing the local adiabatic Grover schedule, plus exact simulators and
//! the benchmarks that measure Trotter error and step-count scaling.
//!
//! Module map:
//! - [`schedule`]: search instances, continuous and discrete schedules, angle synthesis
//! - [`hamiltonian`]: `H(s)` on the `{|ω⟩, |r⟩}` subspace, eigensystem, gap, exact steps
//! - [`trotter`]: Strang and Suzuki steps, operator-norm error, step-count estimates
//! - [`simulator`]: subspace and full-statevector backends
//! - [`baseline`]: restarted Nelder–Mead over the QAOA angles
//! - [`experiments`]: minimal-R search, power-law fits, sweeps and their CSV
//! - [`cli`]: the `ags-qaoa` command line

pub mod baseline;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod linalg;
pub mod schedule;
pub mod simulator;
pub mod trotter;

pub use error::{Error, Result};
pub use linalg::{Unitary2, C64};
pub use schedule::{QaoaParams, Schedule, ScheduleSpec, SearchInstance, Variant};
pub use simulator::{Backend, RunResult};
pub use trotter::TrotterOrder;
