use std::fs;
use std::process::Command;

use ags_qaoa::cli::run_with_io;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ags-qaoa").chain(args.iter().copied());
    let code = run_with_io(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn s_column(csv: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["l", "s", "gamma", "beta"]);
    rdr.records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect()
}

#[test]
fn schedule_paper_literal() {
    let (code, out, _) = run(&[
        "schedule",
        "--n-qubits",
        "4",
        "--steps",
        "4",
        "--variant",
        "paper",
    ]);
    assert_eq!(code, 0);
    let s = s_column(&out);
    let want = [0.4, 0.5, 0.6667, 0.0];
    assert_eq!(s.len(), 4);
    for (a, b) in s.iter().zip(want) {
        assert!((a - b).abs() < 1e-4, "{s:?}");
    }
}

#[test]
fn schedule_json_keys() {
    let (code, out, _) = run(&[
        "schedule",
        "--n-qubits",
        "3",
        "--steps",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in [
        "variant", "N", "R", "eps1", "tau", "T", "s", "gamma", "beta",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["variant"], "exact");
    assert_eq!(v["N"], 8);
}

#[test]
fn simulate_grover_case() {
    for backend in ["subspace", "statevector"] {
        let (code, out, err) = run(&[
            "simulate",
            "--n-qubits",
            "2",
            "--steps",
            "1",
            "--gamma",
            "3.14159265",
            "--beta",
            "3.14159265",
            "--backend",
            backend,
        ]);
        assert_eq!(code, 0, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let p = v["success_prob"].as_f64().unwrap();
        assert!((p - 1.0).abs() <= 1e-6, "{p}");
        assert_eq!(v["trace"], serde_json::json!([]));
    }
}

#[test]
fn fit_echoes_exact_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let mut csv = String::from(
        "n,N,R,order,variant,eps1,trotter_err,adiabatic_fidelity,success_prob,wall_ms\n",
    );
    // R = 8·N^{3/4}, exact in integers for n divisible by 4.
    for n in [4u32, 8, 12, 16, 20] {
        let dim = 1u64 << n;
        let r = 8u64 << (3 * n / 4);
        csv.push_str(&format!("{n},{dim},{r},2,exact,0.1,1e-3,0.99,0.99,1.0\n"));
    }
    fs::write(&path, csv).unwrap();
    let (code, out, err) = run(&["fit", "--in", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let exponent = v[0]["exponent"].as_f64().unwrap();
    assert!((exponent - 0.75).abs() <= 1e-9, "{exponent}");
    assert!((v[0]["r_squared"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
}

#[test]
fn unknown_flag_is_usage_error() {
    let (code, _, err) = run(&["schedule", "--bogus"]);
    assert_eq!(code, 1);
    assert!(err.contains("--bogus"), "{err}");
}

#[test]
fn domain_and_io_exit_codes() {
    let (code, _, _) = run(&["schedule", "--n-qubits", "4", "--steps", "0"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["schedule", "--n-qubits", "4", "--steps", "4", "--eps1", "2"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["fit", "--in", "/nonexistent/dir/sweep.csv"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&[
        "schedule",
        "--n-qubits",
        "4",
        "--steps",
        "4",
        "--out",
        "/nonexistent/dir/s.csv",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"n_qubits": 4, "steps": 4, "variant": "paper"}"#).unwrap();
    let (code, out, err) = run(&["schedule", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(s_column(&out)[3], 0.0);
    // The command line overrides the file.
    let (code, out, _) = run(&[
        "schedule",
        "--config",
        cfg.to_str().unwrap(),
        "--variant",
        "regularized",
    ]);
    assert_eq!(code, 0);
    assert_eq!(s_column(&out)[3], 1.0);

    fs::write(&cfg, r#"{"n_qubits": 4, "colour": "red"}"#).unwrap();
    let (code, _, _) = run(&["schedule", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn sweep_then_fit_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.csv");
    let fit = dir.path().join("fit.csv");
    let (code, _, err) = run(&[
        "sweep",
        "--n-min",
        "4",
        "--n-max",
        "7",
        "--orders",
        "2,4",
        "--refine",
        "8",
        "--out",
        sweep.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&sweep).unwrap();
    assert!(text.starts_with(
        "n,N,R,order,variant,eps1,trotter_err,adiabatic_fidelity,success_prob,wall_ms\n"
    ));
    assert_eq!(text.lines().count(), 9);
    let (code, _, err) = run(&[
        "fit",
        "--in",
        sweep.to_str().unwrap(),
        "--out",
        fit.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let fit = fs::read_to_string(fit).unwrap();
    assert!(fit.starts_with("variant,order,exponent,intercept,r_squared\n"));
    assert_eq!(fit.lines().count(), 3);
}

#[test]
fn compare_reports_both_sides() {
    let (code, out, err) = run(&[
        "compare",
        "--n-qubits",
        "2",
        "--steps",
        "1",
        "--max-evals",
        "200",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["optimized_success"].as_f64().unwrap() >= 0.99);
    assert!(v["closed_form_success"].as_f64().unwrap() > 0.0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ags-qaoa");
    let ok = Command::new(bin)
        .args([
            "schedule",
            "--n-qubits",
            "4",
            "--steps",
            "4",
            "--variant",
            "paper",
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("l,s,gamma,beta"));
    let bad = Command::new(bin)
        .args(["simulate", "--nope"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
