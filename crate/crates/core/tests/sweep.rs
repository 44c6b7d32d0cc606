use std::fs;

use ags_qaoa::experiments::{run_sweep, SweepConfig};
use ags_qaoa::{TrotterOrder, Variant};

fn config(out: std::path::PathBuf, workers: usize) -> SweepConfig {
    SweepConfig {
        n_min: 4,
        n_max: 7,
        target_err: 1e-3,
        orders: vec![TrotterOrder::SECOND, TrotterOrder::FOURTH],
        variant: Variant::ExactInversion,
        eps1: 0.1,
        refine: 16,
        seed: 42,
        out_path: out,
        steps: vec![],
        workers,
    }
}

/// Every column except the trailing `wall_ms`.
fn strip_timing(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_owned())
        .collect()
}

#[test]
fn rerun_matches_except_timing() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run_sweep(&config(a.clone(), 1)).unwrap();
    run_sweep(&config(b.clone(), 4)).unwrap();
    let a = fs::read_to_string(a).unwrap();
    let b = fs::read_to_string(b).unwrap();
    assert_eq!(strip_timing(&a), strip_timing(&b));
    assert_eq!(a.lines().count(), 1 + 4 * 2);
}

#[test]
fn cells_meet_success_bound() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path().join("s.csv"), 2);
    cfg.n_min = 10;
    cfg.n_max = 10;
    cfg.refine = 64;
    for rec in run_sweep(&cfg).unwrap() {
        assert!(rec.trotter_err <= 1e-3);
        assert!(rec.success_prob >= 1.0 - 0.01 - 0.02, "{rec:?}");
    }
}
