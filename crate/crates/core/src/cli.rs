//! Command-line front end.
//!
//! Every flag can also be given in a JSON file passed with `--config`; keys
//! are the flag names with dashes replaced by underscores (`--n-qubits` is
//! `"n_qubits"`, `--in` is `"in"`). Flags on the command line win.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::baseline::{optimize, Init, OptimizerConfig};
use crate::error::{Error, Result};
use crate::experiments::{fit_records, read_sweep_csv, run_sweep, write_atomic, SweepConfig};
use crate::schedule::{
    schedule_discrete, QaoaParams, ScheduleRecord, ScheduleSpec, SearchInstance, Variant,
};
use crate::simulator::{run_qaoa_with, Backend, RunOptions};
use crate::trotter::TrotterOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "ags-qaoa",
    version,
    about = "Closed-form QAOA angles for Grover search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit s_l and the synthesized γ, β.
    Schedule(Flags),
    /// Run one circuit and report the success probability.
    Simulate(Flags),
    /// Sweep qubit counts and orders, writing a CSV.
    Sweep(Flags),
    /// Fit R ∝ N^a to a sweep CSV.
    Fit(Flags),
    /// Closed-form angles against the optimizer baseline at equal depth.
    Compare(Flags),
}

/// Flags shared by all subcommands. All optional so a config file can fill gaps.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[arg(long)]
    pub n_qubits: Option<u32>,
    /// Marked index ω (default 0).
    #[arg(long)]
    pub marked: Option<u64>,
    /// Step count R (= QAOA depth p).
    #[arg(long)]
    pub steps: Option<u64>,
    /// paper | regularized | exact (default exact).
    #[arg(long, value_parser = clap::value_parser!(Variant))]
    pub variant: Option<Variant>,
    /// Adiabatic accuracy ε₁ (default 0.1).
    #[arg(long)]
    pub eps1: Option<f64>,
    /// Trotter order 2 or 4 (default 2).
    #[arg(long)]
    pub order: Option<u32>,
    /// subspace | statevector (default subspace).
    #[arg(long, value_parser = clap::value_parser!(Backend))]
    pub backend: Option<Backend>,
    /// Reference-grid multiplier (default 64).
    #[arg(long)]
    pub refine: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file with any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Explicit cost angles, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gamma: Option<Vec<f64>>,
    /// Explicit mixer angles, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta: Option<Vec<f64>>,
    /// Input sweep CSV for `fit`.
    #[arg(long = "in")]
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n_min: Option<u32>,
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Sweep target for ε_{2k} (default 1e-3).
    #[arg(long)]
    pub target_err: Option<f64>,
    /// Sweep orders, comma separated (default: --order).
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<u32>>,
    /// Optimizer evaluation budget for `compare` (default 500).
    #[arg(long)]
    pub max_evals: Option<usize>,
    /// Sweep worker threads (default 1).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Record per-layer success probabilities in `simulate`.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub trace: Option<bool>,
}

macro_rules! merge_fields {
    ($cli:ident, $file:ident; $($f:ident),* $(,)?) => {
        Flags { $($f: $cli.$f.or($file.$f),)* config: None }
    };
}

impl Flags {
    /// Fill unset flags from the `--config` file, if any.
    pub fn resolve(self) -> Result<Flags> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path)?;
        let file: Flags = serde_json::from_str(&text)?;
        let cli = self;
        Ok(merge_fields!(cli, file;
            n_qubits, marked, steps, variant, eps1, order, backend, refine, seed,
            out, format, gamma, beta, input, n_min, n_max, target_err, orders,
            max_evals, workers, trace,
        ))
    }

    fn variant(&self) -> Variant {
        self.variant.unwrap_or_default()
    }

    fn eps1(&self) -> f64 {
        self.eps1.unwrap_or(0.1)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(42)
    }

    fn order(&self) -> Result<TrotterOrder> {
        TrotterOrder::new(self.order.unwrap_or(2))
    }

    fn instance(&self) -> Result<SearchInstance> {
        let n = self
            .n_qubits
            .ok_or_else(|| Error::domain("--n-qubits is required"))?;
        SearchInstance::new(n, self.marked.unwrap_or(0))
    }

    fn steps(&self) -> Result<u64> {
        self.steps
            .ok_or_else(|| Error::domain("--steps is required"))
    }

    fn schedule_spec(&self) -> Result<ScheduleSpec> {
        ScheduleSpec::new(self.variant(), self.steps()?, self.eps1())
    }
}

/// Write to `--out` (atomically) or to `stdout`.
fn emit<F>(out: Option<&Path>, stdout: &mut dyn Write, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => write_atomic(path, write),
        None => {
            write(stdout)?;
            Ok(())
        }
    }
}

fn json_line<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn cmd_schedule(flags: &Flags, stdout: &mut dyn Write) -> Result<()> {
    let instance = flags.instance()?;
    let schedule = schedule_discrete(flags.schedule_spec()?, instance.dim())?;
    let record = ScheduleRecord::from(&schedule);
    emit(flags.out.as_deref(), stdout, |w| {
        match flags.format.unwrap_or(Format::Csv) {
            Format::Csv => record.write_csv(w),
            Format::Json => {
                record.write_json(&mut *w)?;
                writeln!(w)?;
                Ok(())
            }
        }
    })
}

fn cmd_simulate(flags: &Flags, stdout: &mut dyn Write) -> Result<()> {
    let instance = flags.instance()?;
    let params = match (&flags.gamma, &flags.beta) {
        (Some(g), Some(b)) => {
            let p = QaoaParams::new(g.clone(), b.clone())?;
            if let Some(r) = flags.steps {
                if r as usize != p.depth() {
                    return Err(Error::domain(format!(
                        "--steps {r} does not match {} explicit angles",
                        p.depth()
                    )));
                }
            }
            p
        }
        (None, None) => schedule_discrete(flags.schedule_spec()?, instance.dim())?.qaoa_params(),
        _ => return Err(Error::domain("--gamma and --beta must be given together")),
    };
    let result = run_qaoa_with(
        &instance,
        &params,
        RunOptions {
            backend: flags.backend.unwrap_or_default(),
            trace: flags.trace.unwrap_or(false),
            ..RunOptions::default()
        },
    )?;
    emit(flags.out.as_deref(), stdout, |w| {
        match flags.format.unwrap_or(Format::Json) {
            Format::Json => json_line(w, &result),
            Format::Csv => result.state.write_csv(w),
        }
    })
}

fn sweep_config(flags: &Flags) -> Result<SweepConfig> {
    let (n_min, n_max) = match (flags.n_min, flags.n_max, flags.n_qubits) {
        (Some(a), Some(b), _) => (a, b),
        (Some(a), None, _) => (a, a),
        (None, Some(b), _) => (b, b),
        (None, None, Some(n)) => (n, n),
        (None, None, None) => {
            return Err(Error::domain("sweep needs --n-min/--n-max or --n-qubits"))
        }
    };
    let orders = match &flags.orders {
        Some(list) => list
            .iter()
            .map(|&o| TrotterOrder::new(o))
            .collect::<Result<Vec<_>>>()?,
        None => vec![flags.order()?],
    };
    Ok(SweepConfig {
        n_min,
        n_max,
        target_err: flags.target_err.unwrap_or(1e-3),
        orders,
        variant: flags.variant(),
        eps1: flags.eps1(),
        refine: flags.refine.unwrap_or(64),
        seed: flags.seed(),
        out_path: flags
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from("sweep.csv")),
        steps: flags.steps.into_iter().collect(),
        workers: flags.workers.unwrap_or(1),
    })
}

fn cmd_sweep(flags: &Flags, stdout: &mut dyn Write) -> Result<()> {
    let config = sweep_config(flags)?;
    let records = run_sweep(&config)?;
    writeln!(
        stdout,
        "wrote {} rows to {}",
        records.len(),
        config.out_path.display()
    )?;
    Ok(())
}

#[derive(Serialize)]
struct FitRow {
    variant: Variant,
    order: u32,
    exponent: f64,
    intercept: f64,
    r_squared: f64,
}

fn cmd_fit(flags: &Flags, stdout: &mut dyn Write) -> Result<()> {
    let path = flags
        .input
        .as_deref()
        .ok_or_else(|| Error::domain("--in is required"))?;
    let records = read_sweep_csv(fs::File::open(path)?)?;
    let rows: Vec<FitRow> = fit_records(&records)?
        .into_iter()
        .map(|(variant, order, fit)| FitRow {
            variant,
            order,
            exponent: fit.exponent,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
        })
        .collect();
    emit(flags.out.as_deref(), stdout, |w| {
        match flags.format.unwrap_or(Format::Csv) {
            Format::Json => json_line(w, &rows),
            Format::Csv => {
                let mut c = csv::Writer::from_writer(w);
                c.write_record(["variant", "order", "exponent", "intercept", "r_squared"])?;
                for r in &rows {
                    c.write_record([
                        r.variant.to_string(),
                        r.order.to_string(),
                        crate::schedule::fmt_float(r.exponent),
                        crate::schedule::fmt_float(r.intercept),
                        crate::schedule::fmt_float(r.r_squared),
                    ])?;
                }
                c.flush()?;
                Ok(())
            }
        }
    })
}

#[derive(Serialize)]
struct Comparison {
    n_qubits: u32,
    p: u64,
    closed_form_success: f64,
    optimized_success: f64,
    optimizer_evals: usize,
    optimizer_status: crate::baseline::Status,
    closed_form: QaoaParams,
    optimized: QaoaParams,
}

fn cmd_compare(flags: &Flags, stdout: &mut dyn Write) -> Result<()> {
    let instance = flags.instance()?;
    let spec = flags.schedule_spec()?;
    let closed = schedule_discrete(spec, instance.dim())?.qaoa_params();
    let closed_success = crate::baseline::objective(&instance, &closed)?;
    let config = OptimizerConfig {
        depth: spec.steps as usize,
        max_evals: flags.max_evals.unwrap_or(500),
        seed: flags.seed(),
        init: Init::Random,
        ..OptimizerConfig::default()
    };
    let opt = optimize(&instance, &config)?;
    let cmp = Comparison {
        n_qubits: instance.n_qubits(),
        p: spec.steps,
        closed_form_success: closed_success,
        optimized_success: opt.objective,
        optimizer_evals: opt.evals,
        optimizer_status: opt.status,
        closed_form: closed,
        optimized: opt.params,
    };
    emit(flags.out.as_deref(), stdout, |w| json_line(w, &cmp))
}

type Handler = fn(&Flags, &mut dyn Write) -> Result<()>;

/// Parse `argv` (program name first), run, and return the exit code:
/// 0 on success, 1 on usage or domain errors, 2 on I/O errors.
pub fn run_with_io<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return 1;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    let outcome = (|| {
        let (flags, run): (Flags, Handler) = match cli.command {
            Command::Schedule(f) => (f, cmd_schedule),
            Command::Simulate(f) => (f, cmd_simulate),
            Command::Sweep(f) => (f, cmd_sweep),
            Command::Fit(f) => (f, cmd_fit),
            Command::Compare(f) => (f, cmd_compare),
        };
        let flags = flags.resolve()?;
        run(&flags, stdout)
    })();
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// [`run_with_io`] on the process streams.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}
