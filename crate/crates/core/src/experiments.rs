//! Step-count searches, power-law fits and reproducible parameter sweeps.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{fmt_float, schedule_discrete, ScheduleSpec, SearchInstance, Variant};
use crate::simulator::{run_qaoa, run_reference_adiabatic, Backend};
use crate::trotter::{evolution_error, TrotterOrder};

/// Largest step count [`minimal_r`] will try.
pub const R_CAP: u64 = 1 << 22;

/// Exact CSV header of a sweep file.
pub const SWEEP_HEADER: [&str; 10] = [
    "n",
    "N",
    "R",
    "order",
    "variant",
    "eps1",
    "trotter_err",
    "adiabatic_fidelity",
    "success_prob",
    "wall_ms",
];

/// `ε_{2k}` for an `R`-step schedule of the given variant.
pub fn trotter_error_at(
    dim: u64,
    steps: u64,
    order: TrotterOrder,
    variant: Variant,
    eps1: f64,
) -> Result<f64> {
    let schedule = schedule_discrete(ScheduleSpec::new(variant, steps, eps1)?, dim)?;
    Ok(evolution_error(&schedule, order).trotter_err)
}

/// Smallest `R` with `ε_{2k}(R) ≤ target_err`: doubling from `R = 4`, then
/// bisection on the last bracket.
pub fn minimal_r(
    instance: &SearchInstance,
    order: TrotterOrder,
    target_err: f64,
    variant: Variant,
    eps1: f64,
) -> Result<u64> {
    if !(target_err > 0.0) {
        return Err(Error::domain(format!(
            "target error must be positive, got {target_err}"
        )));
    }
    let dim = instance.dim();
    let err = |r| trotter_error_at(dim, r, order, variant, eps1);

    // `lo` fails the target (0 stands for "nothing below"), `hi` meets it.
    let mut r = 4u64;
    let (mut lo, mut hi) = if err(r)? <= target_err {
        (0, r)
    } else {
        loop {
            let prev = r;
            r *= 2;
            if r > R_CAP {
                return Err(Error::Unreachable {
                    target: target_err,
                    cap: R_CAP,
                    best_err: err(R_CAP)?,
                });
            }
            if err(r)? <= target_err {
                break (prev, r);
            }
        }
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if err(mid)? <= target_err {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Least-squares line through `(ln N, ln R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    /// Natural-log intercept: `R ≈ e^{intercept} N^{exponent}`.
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::domain(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::domain("power-law fit needs positive finite points"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("power-law fit needs at least two distinct N"));
    }
    let exponent = sxy / sxx;
    let intercept = mean_y - exponent * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|&(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    let r_squared = if syy <= f64::EPSILON * m {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        exponent,
        intercept,
        r_squared,
    })
}

/// One sweep: every `n` in `n_min..=n_max` against every order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_min: u32,
    pub n_max: u32,
    /// Per-cell `ε_{2k}` target used when `steps` is empty.
    pub target_err: f64,
    pub orders: Vec<TrotterOrder>,
    pub variant: Variant,
    pub eps1: f64,
    pub refine: u64,
    pub seed: u64,
    pub out_path: PathBuf,
    /// Fixed step counts to evaluate. Empty means "search the minimal R".
    #[serde(default)]
    pub steps: Vec<u64>,
    /// Worker threads; 0 picks the machine default.
    #[serde(default)]
    pub workers: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_min < 1 || self.n_min > self.n_max {
            return Err(Error::domain(format!(
                "qubit range {}..={} is empty or invalid",
                self.n_min, self.n_max
            )));
        }
        if !(self.target_err > 0.0) {
            return Err(Error::domain("target_err must be positive"));
        }
        if self.refine < 1 {
            return Err(Error::domain("refine must be at least 1"));
        }
        if self.steps.contains(&0) {
            return Err(Error::domain("step counts must be at least 1"));
        }
        ScheduleSpec::new(self.variant, 1, self.eps1)?;
        SearchInstance::new(self.n_max, 0)?;
        Ok(())
    }
}

/// One row of the sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: u32,
    #[serde(rename = "N")]
    pub dim: u64,
    #[serde(rename = "R")]
    pub steps: u64,
    pub order: u32,
    pub variant: Variant,
    pub eps1: f64,
    pub trotter_err: f64,
    /// Success probability of the refined reference adiabatic run.
    pub adiabatic_fidelity: f64,
    /// Success probability of the Trotterized circuit.
    pub success_prob: f64,
    pub wall_ms: f64,
}

impl SweepRecord {
    fn sort_key(&self) -> (u32, u32, u64) {
        (self.n, self.order, self.steps)
    }

    fn to_row(&self) -> [String; 10] {
        [
            self.n.to_string(),
            self.dim.to_string(),
            self.steps.to_string(),
            self.order.to_string(),
            self.variant.to_string(),
            fmt_float(self.eps1),
            fmt_float(self.trotter_err),
            fmt_float(self.adiabatic_fidelity),
            fmt_float(self.success_prob),
            fmt_float(self.wall_ms),
        ]
    }
}

pub fn write_sweep_csv<W: Write>(out: W, records: &[SweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in records {
        w.write_record(r.to_row())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != SWEEP_HEADER {
        return Err(Error::domain(format!(
            "unexpected sweep header {:?}",
            header.join(",")
        )));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let rec: SweepRecord = row?;
        out.push(rec);
    }
    Ok(out)
}

/// Fit `R ∝ N^a` separately for each `(variant, order)` group of a sweep.
pub fn fit_records(records: &[SweepRecord]) -> Result<Vec<(Variant, u32, FitResult)>> {
    let mut groups: BTreeMap<(Variant, u32), Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.variant, r.order))
            .or_default()
            .push((r.dim as f64, r.steps as f64));
    }
    groups
        .into_iter()
        .map(|((v, o), pts)| Ok((v, o, fit_power_law(&pts)?)))
        .collect()
}

/// Write `path` via a sibling temporary file and a rename.
pub fn write_atomic<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let tmp = temp_sibling(path);
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        write(&mut w)?;
        w.flush()?;
        drop(w);
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn temp_sibling(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_owned());
    path.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}

fn cell_marked(seed: u64, n: u32, order: TrotterOrder, dim: u64) -> u64 {
    let stream = (u64::from(n) << 8) | u64::from(order.get());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.gen_range(0..dim)
}

/// Evaluate one `(n, order, R)` cell. `steps = None` searches the minimal R.
pub fn run_cell(
    config: &SweepConfig,
    n: u32,
    order: TrotterOrder,
    steps: Option<u64>,
) -> Result<SweepRecord> {
    let start = Instant::now();
    let dim = 1u64 << n;
    let instance = SearchInstance::new(n, cell_marked(config.seed, n, order, dim))?;
    let steps = match steps {
        Some(r) => r,
        None => minimal_r(
            &instance,
            order,
            config.target_err,
            config.variant,
            config.eps1,
        )?,
    };
    let schedule = schedule_discrete(ScheduleSpec::new(config.variant, steps, config.eps1)?, dim)?;
    let report = evolution_error(&schedule, order);
    let success_prob = if order == TrotterOrder::SECOND {
        run_qaoa(&instance, &schedule.qaoa_params(), Backend::Subspace)?.success_prob
    } else {
        1.0 - report.trotterized_infidelity
    };
    let reference = run_reference_adiabatic(&instance, &schedule, config.refine)?;
    Ok(SweepRecord {
        n,
        dim,
        steps,
        order: order.get(),
        variant: config.variant,
        eps1: config.eps1,
        trotter_err: report.trotter_err,
        adiabatic_fidelity: reference.success_prob,
        success_prob,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Evaluate every cell, sort by `(n, order, R)` and write the CSV atomically.
/// The output location is probed before any computation starts.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let probe = temp_sibling(&config.out_path);
    File::create(&probe)?;
    fs::remove_file(&probe)?;

    let mut cells = Vec::new();
    for n in config.n_min..=config.n_max {
        for &order in &config.orders {
            if config.steps.is_empty() {
                cells.push((n, order, None));
            } else {
                cells.extend(config.steps.iter().map(|&r| (n, order, Some(r))));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<SweepRecord>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, order, steps)| run_cell(config, n, order, steps))
            .collect()
    });
    let mut records = results.into_iter().collect::<Result<Vec<_>>>()?;
    records.sort_by_key(SweepRecord::sort_key);
    write_atomic(&config.out_path, |w| write_sweep_csv(w, &records))?;
    Ok(records)
}
