//! Classical-optimizer baseline: tune the `2p` QAOA angles with a seeded,
//! restarted downhill-simplex search and compare against the closed-form ones.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{
    fmt_float, schedule_discrete, QaoaParams, ScheduleSpec, SearchInstance, Variant,
};
use crate::simulator::{run_qaoa, Backend};

/// Where the first restart starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Init {
    /// Uniform in `[0, 2π)^{2p}` from the seed.
    Random,
    /// The synthesized angles of a `p`-step schedule.
    ClosedForm { variant: Variant, eps1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Circuit depth `p`.
    pub depth: usize,
    /// Objective evaluations allowed across all restarts.
    pub max_evals: usize,
    /// Stop a restart once the simplex spread in objective falls below this.
    pub tol: f64,
    pub seed: u64,
    pub init: Init,
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            depth: 1,
            max_evals: 500,
            tol: 1e-6,
            seed: 42,
            init: Init::Random,
            restarts: 3,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 {
            return Err(Error::domain("depth p must be at least 1"));
        }
        if self.max_evals < 1 {
            return Err(Error::domain("max_evals must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::domain("tol must be positive"));
        }
        if self.restarts < 1 {
            return Err(Error::domain("restarts must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub eval: usize,
    pub best_objective: f64,
    /// Best parameters so far, interleaved `[γ_1, β_1, ...]`.
    pub params: Vec<f64>,
}

/// One entry per objective evaluation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub entries: Vec<TraceEntry>,
}

impl OptimizerTrace {
    /// CSV with columns `eval,best_objective`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["eval", "best_objective"])?;
        for e in &self.entries {
            w.write_record([e.eval.to_string(), fmt_float(e.best_objective)])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Converged,
    Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimized {
    /// Best angles found, folded into `[0, 2π)`.
    pub params: QaoaParams,
    pub objective: f64,
    pub initial_objective: f64,
    pub evals: usize,
    pub status: Status,
    pub trace: OptimizerTrace,
}

/// Success probability of the circuit, on the subspace backend.
pub fn objective(instance: &SearchInstance, params: &QaoaParams) -> Result<f64> {
    Ok(run_qaoa(instance, params, Backend::Subspace)?.success_prob)
}

struct Evaluator<'a> {
    instance: &'a SearchInstance,
    budget: usize,
    evals: usize,
    best: f64,
    best_x: Vec<f64>,
    trace: OptimizerTrace,
}

impl Evaluator<'_> {
    fn exhausted(&self) -> bool {
        self.evals >= self.budget
    }

    /// Negated objective, so the simplex minimizes.
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let value = objective(self.instance, &QaoaParams::from_flat(x)?)?;
        self.evals += 1;
        if value > self.best {
            self.best = value;
            self.best_x = x.to_vec();
        }
        self.trace.entries.push(TraceEntry {
            eval: self.evals,
            best_objective: self.best,
            params: self.best_x.clone(),
        });
        Ok(-value)
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const SIMPLEX_STEP: f64 = 0.5;

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b − a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// One Nelder–Mead run from `x0`. Returns `true` if it converged on `tol`.
fn nelder_mead(ev: &mut Evaluator<'_>, x0: Vec<f64>, tol: f64) -> Result<bool> {
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    if ev.exhausted() {
        return Ok(false);
    }
    let f0 = ev.eval(&x0)?;
    simplex.push((x0.clone(), f0));
    for i in 0..dim {
        if ev.exhausted() {
            return Ok(false);
        }
        let mut x = x0.clone();
        x[i] += SIMPLEX_STEP;
        let f = ev.eval(&x)?;
        simplex.push((x, f));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        if spread < tol {
            return Ok(true);
        }
        if ev.exhausted() {
            return Ok(false);
        }
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflected = affine(&centroid, &worst.0, -REFLECT);
        let fr = ev.eval(&reflected)?;
        if fr < simplex[0].1 {
            if ev.exhausted() {
                simplex[dim] = (reflected, fr);
                continue;
            }
            let expanded = affine(&centroid, &worst.0, -EXPAND);
            let fe = ev.eval(&expanded)?;
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            if ev.exhausted() {
                continue;
            }
            let (toward, fbase) = if fr < worst.1 {
                (&reflected, fr)
            } else {
                (&worst.0, worst.1)
            };
            let contracted = affine(&centroid, toward, CONTRACT);
            let fc = ev.eval(&contracted)?;
            if fc < fbase {
                simplex[dim] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    if ev.exhausted() {
                        break;
                    }
                    let x = affine(&best, &item.0, SHRINK);
                    let f = ev.eval(&x)?;
                    *item = (x, f);
                }
            }
        }
    }
}

/// Maximize the success probability over `2p` angles. Fully determined by
/// `(instance, config)`.
pub fn optimize(instance: &SearchInstance, config: &OptimizerConfig) -> Result<Optimized> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dim = 2 * config.depth;
    let random_point = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..dim).map(|_| rng.gen_range(0.0..2.0 * PI)).collect()
    };
    let first = match config.init {
        Init::Random => random_point(&mut rng),
        Init::ClosedForm { variant, eps1 } => {
            let spec = ScheduleSpec::new(variant, config.depth as u64, eps1)?;
            schedule_discrete(spec, instance.dim())?
                .qaoa_params()
                .to_flat()
        }
    };
    let mut ev = Evaluator {
        instance,
        budget: config.max_evals,
        evals: 0,
        best: f64::NEG_INFINITY,
        best_x: first.clone(),
        trace: OptimizerTrace::default(),
    };
    let mut converged = nelder_mead(&mut ev, first, config.tol)?;
    let initial_objective = ev.trace.entries[0].best_objective;
    for _ in 1..config.restarts {
        if ev.exhausted() {
            break;
        }
        let start = random_point(&mut rng);
        converged = nelder_mead(&mut ev, start, config.tol)?;
    }
    let status = if converged {
        Status::Converged
    } else {
        Status::Budget
    };
    Ok(Optimized {
        params: QaoaParams::from_flat(&ev.best_x)?.reduced(),
        objective: ev.best,
        initial_objective,
        evals: ev.evals,
        status,
        trace: ev.trace,
    })
}
