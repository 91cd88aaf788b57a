// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end CLI behavior: exit codes, config validation messages, and
//! the qualitative content of the artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn qtailor() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qtailor"))
}

fn run_with_config(subcommand: &str, config_body: &str, out: &Path) -> Output {
    let config = out.join("config.json");
    std::fs::create_dir_all(out).unwrap();
    std::fs::write(&config, config_body).unwrap();
    qtailor()
        .arg(subcommand)
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(out.join("artifacts"))
        .output()
        .expect("binary runs")
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "fidelity-sweep",
        r#"{"circuit": {"kind": "cnot"}, "nois": {"deltas": [0.1]}}"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nois"), "message should name the bad key: {stderr}");
}

#[test]
fn missing_config_file_exits_2() {
    let status = qtailor()
        .arg("ptm")
        .arg("--config")
        .arg("/nonexistent/config.json")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn wrong_experiment_name_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "ptm",
        r#"{"experiment": "error-walk", "circuit": {"kind": "cnot"}}"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn error_walk_requires_depths() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "error-walk",
        r#"{"circuit": {"kind": "iswap-chain"}}"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("circuit.depths"), "{stderr}");
}

#[test]
fn imported_pulse_without_path_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "fidelity-sweep",
        r#"{"circuit": {"kind": "cnot"}, "pulse": {"kind": "imported"}}"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn additive_white_noise_parseval_fails_numerically() {
    // additive white noise has slowly decaying filter tails, so the
    // truncated ω window cannot certify the Parseval identity at 1e-6;
    // the run must fail loudly with the numerical exit code
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "filter-function",
        r#"{
            "noise": {
                "deltas": [0.02],
                "process": {"kind": "white", "level": 0.3},
                "coupling": "additive"
            },
            "pulse": {"steps": 128, "kind": "cosine"}
        }"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Parseval"), "{stderr}");
}

#[test]
fn amplitude_white_noise_parseval_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "filter-function",
        r#"{
            "noise": {"deltas": [0.02], "process": {"kind": "white", "level": 0.3}},
            "pulse": {"steps": 256, "kind": "cosine"}
        }"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let moments: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("artifacts/moments.json")).unwrap(),
    )
    .unwrap();
    let rel = moments["results"]["checks"]["parseval_rel_error"]
        .as_f64()
        .unwrap();
    assert!(rel <= 1e-6, "parseval rel {rel}");
}

#[test]
fn mix_circuit_walk_separates_bare_from_twirled() {
    // the 200-CNOT/74-Hadamard demo: twirling suppresses the accumulated
    // distance below the coherent bare trajectory at every checkpoint
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "error-walk",
        r#"{
            "circuit": {
                "kind": "cnot-hadamard-mix",
                "depths": [25, 50, 100, 200],
                "layers": 200,
                "hadamards": 74,
                "interleave_seed": 11
            },
            "noise": {"deltas": [0.02]},
            "twirl": {"shots": 32},
            "pulse": {"steps": 64, "kind": "cosine"},
            "master_seed": 12
        }"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("artifacts/error_walk.csv")).unwrap();
    let mut final_ratio = 0.0;
    for line in csv.lines().filter(|l| !l.starts_with('#') && !l.starts_with("depth")) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        let (bare, single, rms) = (fields[1], fields[2], fields[3]);
        assert!(
            bare > single && bare > rms,
            "bare below twirled in row: {line}"
        );
        final_ratio = bare / rms;
    }
    assert!(
        final_ratio > 1.5,
        "expected a clear final separation, bare/rms = {final_ratio:.2}"
    );
}

#[test]
fn fidelity_sweep_orders_rc_above_bare() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "fidelity-sweep",
        r#"{
            "circuit": {"kind": "cnot"},
            "noise": {"deltas": [0.0, 0.01, 0.03, 0.06]},
            "pulse": {"steps": 128, "kind": "cosine"},
            "master_seed": 4
        }"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("artifacts/fidelity_sweep.csv")).unwrap();
    for line in csv.lines().filter(|l| !l.starts_with('#') && !l.starts_with("delta")) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert!(
            fields[2] >= fields[1] - 1e-12,
            "RC below bare in row: {line}"
        );
        if fields[0] == 0.0 {
            assert!(fields[1] > 1.0 - 1e-9, "δ=0 bare fidelity {}", fields[1]);
            assert!(fields[2] > 1.0 - 1e-9, "δ=0 RC fidelity {}", fields[2]);
        }
    }
}

#[test]
fn zero_noise_walk_and_ptm_are_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "error-walk",
        r#"{
            "circuit": {"kind": "iswap-chain", "depths": [2, 4, 8], "iswap_steps": 32},
            "noise": {"deltas": [0.0]},
            "twirl": {"shots": 8}
        }"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("artifacts/error_walk.csv")).unwrap();
    for line in csv.lines().filter(|l| !l.starts_with('#') && !l.starts_with("depth")) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert!(
            fields[1..4].iter().all(|v| v.abs() < 1e-12),
            "nonzero distance at zero noise: {line}"
        );
    }

    let ptm_dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "ptm",
        r#"{
            "noise": {"deltas": [0.0]},
            "pulse": {"steps": 64, "kind": "optimized", "fourier_terms": 3}
        }"#,
        ptm_dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let diag: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(ptm_dir.path().join("artifacts/ptm_diagnostics.json")).unwrap(),
    )
    .unwrap();
    for condition in ["bare_trivial", "rc_trivial", "bare_robust", "rc_robust"] {
        let entry = &diag["results"][condition];
        assert!(entry["max_off_diagonal"].as_f64().unwrap() < 1e-9);
        for d in entry["diagonal"].as_array().unwrap() {
            assert!((d.as_f64().unwrap() - 1.0).abs() < 1e-9, "{condition}");
        }
    }
}

#[test]
fn pulse_opt_writes_importable_pulse() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "pulse-opt",
        r#"{"pulse": {"steps": 192, "fourier_terms": 4, "kind": "optimized"}}"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("artifacts/pulse_opt_report.json")).unwrap(),
    )
    .unwrap();
    let reduction = report["results"]["reduction_factor"].as_f64().unwrap();
    assert!(reduction >= 100.0, "reduction factor {reduction}");

    // the exported file round-trips through a fidelity sweep as an import
    let pulse_path = dir.path().join("artifacts/pulse_optimized.txt");
    let sweep_dir = tempfile::tempdir().unwrap();
    let sweep = run_with_config(
        "fidelity-sweep",
        &format!(
            r#"{{
                "circuit": {{"kind": "cnot"}},
                "noise": {{"deltas": [0.02, 0.05]}},
                "pulse": {{"kind": "imported", "path": {:?}, "steps": 192}},
                "master_seed": 8
            }}"#,
            pulse_path
        ),
        sweep_dir.path(),
    );
    assert_eq!(sweep.status.code(), Some(0));
    let csv =
        std::fs::read_to_string(sweep_dir.path().join("artifacts/fidelity_sweep.csv")).unwrap();
    for line in csv.lines().filter(|l| !l.starts_with('#') && !l.starts_with("delta")) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        // columns: delta, f_bare, f_rc, se, f_bare_robust, f_rc_robust, se
        assert!(
            fields[5] >= fields[2] - 1e-12,
            "robust RC below trivial RC in row: {line}"
        );
    }
}
