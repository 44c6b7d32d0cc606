//! One test per acceptance criterion. Each prints a `[PASS]` or `[FAIL]` line
//! (run with `--nocapture` to see them) and then asserts.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use ags_qaoa::baseline::{optimize, OptimizerConfig};
use ags_qaoa::experiments::{fit_power_law, minimal_r, trotter_error_at};
use ags_qaoa::hamiltonian::adiabatic_margin;
use ags_qaoa::schedule::{angle_sum, schedule_continuous, schedule_discrete, time_at, total_time};
use ags_qaoa::simulator::{run_qaoa, run_reference_adiabatic, State};
use ags_qaoa::{Backend, QaoaParams, ScheduleSpec, SearchInstance, TrotterOrder, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id}: {name}: {detail}");
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    fit_power_law(&pts).unwrap().exponent
}

#[test]
fn criterion_01_grover_equivalence() {
    let start = Instant::now();
    let inst = SearchInstance::new(2, 0).unwrap();
    let params = QaoaParams::new(vec![PI], vec![PI]).unwrap();
    let sub = run_qaoa(&inst, &params, Backend::Subspace)
        .unwrap()
        .success_prob;
    let full = run_qaoa(&inst, &params, Backend::Statevector)
        .unwrap()
        .success_prob;
    let elapsed = start.elapsed();
    let ok = (sub - 1.0).abs() <= 1e-9 && (full - 1.0).abs() <= 1e-9 && within(elapsed, 1.0);
    report(
        1,
        "Grover equivalence",
        ok,
        format!("subspace {sub:.15}, statevector {full:.15}, {elapsed:?}"),
    );
}

#[test]
fn criterion_02_schedule_regression() {
    let paper = schedule_discrete(
        ScheduleSpec::new(Variant::PaperLiteral, 4, 0.1).unwrap(),
        16,
    )
    .unwrap();
    let want = [0.4, 0.5, 2.0 / 3.0, 0.0];
    let paper_ok = paper.s.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-6);

    let reg =
        schedule_discrete(ScheduleSpec::new(Variant::Regularized, 4, 0.1).unwrap(), 16).unwrap();
    let reg_ok = reg.s[3] == 1.0;

    let (dim, eps1) = (1024u64, 0.1);
    let total = total_time(dim, eps1).unwrap();
    let mut worst = 0.0f64;
    for i in 1..=1000 {
        let t = total * i as f64 / 1000.0;
        let s = schedule_continuous(t, dim, eps1).unwrap();
        let back = time_at(s, dim, eps1).unwrap();
        worst = worst.max((back - t).abs() / t);
    }
    let trip_ok = worst <= 1e-9;
    report(
        2,
        "schedule regression",
        paper_ok && reg_ok && trip_ok,
        format!(
            "paper s = {:?}, regularized s_4 = {}, round-trip rel err {worst:.2e}",
            paper.s, reg.s[3]
        ),
    );
}

fn order_slope(order: TrotterOrder) -> f64 {
    let rs = [16u64, 32, 64, 128, 256];
    let errs: Vec<f64> = rs
        .iter()
        .map(|&r| trotter_error_at(64, r, order, Variant::ExactInversion, 0.1).unwrap())
        .collect();
    let xs: Vec<f64> = rs.iter().map(|&r| r as f64).collect();
    slope(&xs, &errs)
}

#[test]
fn criterion_03_order2_scaling() {
    let start = Instant::now();
    let m = order_slope(TrotterOrder::SECOND);
    let elapsed = start.elapsed();
    let ok = (-2.3..=-1.7).contains(&m) && within(elapsed, 10.0);
    report(
        3,
        "order-2 global scaling",
        ok,
        format!("slope {m:.4}, {elapsed:?}"),
    );
}

#[test]
fn criterion_04_order4_scaling() {
    let start = Instant::now();
    let m = order_slope(TrotterOrder::FOURTH);
    let elapsed = start.elapsed();
    let ok = (-4.5..=-3.5).contains(&m) && within(elapsed, 30.0);
    report(
        4,
        "order-4 global scaling",
        ok,
        format!("slope {m:.4}, {elapsed:?}"),
    );
}

#[test]
fn criterion_05_minimal_r_exponent() {
    let start = Instant::now();
    let mut pts = Vec::new();
    for n in 8..=18u32 {
        let inst = SearchInstance::new(n, 0).unwrap();
        let r = minimal_r(
            &inst,
            TrotterOrder::SECOND,
            1e-3,
            Variant::ExactInversion,
            0.1,
        )
        .unwrap();
        pts.push(((1u64 << n) as f64, r as f64));
    }
    let fit = fit_power_law(&pts).unwrap();
    let elapsed = start.elapsed();
    let ok =
        (0.67..=0.83).contains(&fit.exponent) && fit.r_squared >= 0.98 && within(elapsed, 120.0);
    let rs: Vec<u64> = pts.iter().map(|p| p.1 as u64).collect();
    report(
        5,
        "minimal R exponent",
        ok,
        format!(
            "exponent {:.4}, r^2 {:.5}, R = {rs:?}, {elapsed:?}",
            fit.exponent, fit.r_squared
        ),
    );
}

#[test]
fn criterion_06_adiabatic_success() {
    let eps1 = 0.1;
    let inst = SearchInstance::new(10, 0).unwrap();
    let r = minimal_r(
        &inst,
        TrotterOrder::SECOND,
        1e-3,
        Variant::ExactInversion,
        eps1,
    )
    .unwrap();
    let schedule = schedule_discrete(
        ScheduleSpec::new(Variant::ExactInversion, r, eps1).unwrap(),
        1024,
    )
    .unwrap();
    let reference = run_reference_adiabatic(&inst, &schedule, 64)
        .unwrap()
        .success_prob;
    let qaoa = run_qaoa(&inst, &schedule.qaoa_params(), Backend::Subspace)
        .unwrap()
        .success_prob;
    let ok = reference >= 1.0 - eps1 * eps1 - 0.02 && (qaoa - reference).abs() <= 0.02;
    report(
        6,
        "adiabatic success",
        ok,
        format!("R = {r}, reference {reference:.6}, qaoa {qaoa:.6}"),
    );
}

#[test]
fn criterion_07_backend_equivalence() {
    let mut worst_entry = 0.0f64;
    let mut worst_resid = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 2..=12u32 {
        for r in [8usize, 64] {
            let marked = rng.gen_range(0..1u64 << n);
            let inst = SearchInstance::new(n, marked).unwrap();
            let gamma: Vec<f64> = (0..r).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
            let beta: Vec<f64> = (0..r).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
            let params = QaoaParams::new(gamma, beta).unwrap();
            let sub = match run_qaoa(&inst, &params, Backend::Subspace).unwrap().state {
                State::Subspace(s) => s,
                State::Full(_) => unreachable!(),
            };
            let full = match run_qaoa(&inst, &params, Backend::Statevector)
                .unwrap()
                .state
            {
                State::Full(s) => s,
                State::Subspace(_) => unreachable!(),
            };
            let (proj, resid) = full.project();
            worst_entry = worst_entry
                .max((proj.a_omega - sub.a_omega).norm())
                .max((proj.a_r - sub.a_r).norm());
            worst_resid = worst_resid.max(resid);
        }
    }
    let ok = worst_entry <= 1e-10 && worst_resid <= 1e-12;
    report(
        7,
        "backend equivalence",
        ok,
        format!("max entry diff {worst_entry:.2e}, max residual {worst_resid:.2e}"),
    );
}

#[test]
fn criterion_08_parameter_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for variant in Variant::ALL {
        for k in 2..=16u32 {
            let mut rs = vec![1u64, 2, 1024];
            rs.extend((0..6).map(|_| rng.gen_range(1..=1024u64)));
            for r in rs {
                let schedule =
                    schedule_discrete(ScheduleSpec::new(variant, r, 0.1).unwrap(), 1u64 << k)
                        .unwrap();
                let params = schedule.qaoa_params();
                let tau = schedule.tau;
                let want = tau * r as f64 - 0.5 * tau * (1.0 - schedule.s[0]);
                let scale = (tau * r as f64).max(1.0);
                worst = worst.max((angle_sum(&params) - want).abs() / scale);
                cases += 1;
            }
        }
    }
    report(
        8,
        "parameter identity",
        worst <= 1e-12,
        format!("{cases} cases, max relative deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_09_adiabatic_condition() {
    let margin = adiabatic_margin(1024, 0.1, 10_001).unwrap();
    report(
        9,
        "adiabatic condition margin",
        (0.08..=0.12).contains(&margin),
        format!("max margin {margin:.6}"),
    );
}

#[test]
fn criterion_10_baseline_sanity() {
    let inst = SearchInstance::new(2, 0).unwrap();
    let config = OptimizerConfig {
        depth: 1,
        max_evals: 500,
        seed: 7,
        ..OptimizerConfig::default()
    };
    let first = optimize(&inst, &config).unwrap();
    let second = optimize(&inst, &config).unwrap();
    let monotone = first
        .trace
        .entries
        .windows(2)
        .all(|w| w[1].best_objective >= w[0].best_objective);
    let bytes = |o: &ags_qaoa::baseline::Optimized| {
        let mut csv = Vec::new();
        o.trace.write_csv(&mut csv).unwrap();
        (serde_json::to_vec(o).unwrap(), csv)
    };
    let identical = bytes(&first) == bytes(&second);
    let ok = first.objective >= 0.99 && monotone && identical;
    report(
        10,
        "baseline sanity",
        ok,
        format!(
            "objective {:.9}, {} evals, monotone {monotone}, rerun identical {identical}",
            first.objective, first.evals
        ),
    );
}
