//! Config parsing, artifact formats, exit codes, and determinism of the
//! harness, partly in-process and partly through the installed binary.

use std::fs;
use std::path::Path;
use std::process::Command;

use lohe_cli::config::load_config;
use lohe_cli::experiment::{pair_run, run_experiment};
use lohe_cli::output::{write_json, StateJson};
use lohe_cli::CliError;
use lohe_core::random::{haar_unitary_with, rng_from_seed};
use lohe_core::ComplexMatrix;

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn lohe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lohe"))
}

#[test]
fn unknown_keys_are_rejected_with_the_field_name() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(
        tmp.path(),
        "bad.toml",
        "model = \"sphere\"\nd = 3\nN = 4\nkappa = 1.0\nh = 0.5\nsteps = 5\nseed = 1\nbogus_knob = 2\n",
    );
    let err = load_config(&path).unwrap_err();
    assert!(err.to_string().contains("bogus_knob"), "error does not name the key: {err}");

    let nested = write_config(
        tmp.path(),
        "nested.toml",
        "model = \"sphere\"\nd = 3\nN = 4\nkappa = 1.0\nh = 0.5\nsteps = 5\nseed = 1\n\n[init]\nkind = \"random\"\nwobble = 0.1\n",
    );
    let err = load_config(&nested).unwrap_err();
    assert!(err.to_string().contains("wobble"), "error does not name the nested key: {err}");

    let out = lohe().args(["run", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "unknown key should exit 2");
}

#[test]
fn same_config_and_seed_give_byte_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let body = |out: &str| {
        format!(
            "model = \"dlm-b\"\nd = 2\nN = 4\nkappa = 1.0\nh = 0.1\nsteps = 60\nseed = 99\nout_dir = \"{}\"\noutputs = [\"diagnostics-csv\", \"final-state-json\"]\n\n[init]\nkind = \"near-consensus\"\nradius = 0.2\n\n[hamiltonians]\nkind = \"random-zero-sum\"\nscale = 0.05\n",
            tmp.path().join(out).display()
        )
    };
    let cfg_a = load_config(&write_config(tmp.path(), "a.toml", &body("one"))).unwrap();
    let cfg_b = load_config(&write_config(tmp.path(), "b.toml", &body("two"))).unwrap();
    run_experiment(&cfg_a).unwrap();
    run_experiment(&cfg_b).unwrap();
    let csv_a = fs::read(tmp.path().join("one/diagnostics.csv")).unwrap();
    let csv_b = fs::read(tmp.path().join("two/diagnostics.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "diagnostics differ between identical runs");
    let json_a = fs::read(tmp.path().join("one/final_state.json")).unwrap();
    let json_b = fs::read(tmp.path().join("two/final_state.json")).unwrap();
    assert_eq!(json_a, json_b, "final states differ between identical runs");
    assert!(!csv_a.is_empty() && csv_a.iter().all(|&b| b != b'\r'), "CSV must use bare newlines");
}

#[test]
fn consensus_init_reports_an_exactly_zero_diameter_column() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load_config(&write_config(
        tmp.path(),
        "consensus.toml",
        &format!(
            "model = \"sphere\"\nd = 3\nN = 5\nkappa = 1.0\nh = 0.5\nsteps = 20\nseed = 4\nout_dir = \"{}\"\noutputs = [\"diagnostics-csv\"]\n\n[init]\nkind = \"consensus\"\n",
            tmp.path().join("cons").display()
        ),
    ))
    .unwrap();
    run_experiment(&cfg).unwrap();
    let text = fs::read_to_string(tmp.path().join("cons/diagnostics.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,diameter,rho,min_pair_inner,wall_clock_ns"));
    let mut rows = 0;
    for line in lines {
        let diameter = line.split(',').nth(1).unwrap();
        assert_eq!(diameter, "0.0000000000000000e0", "row {rows} diameter not exactly zero");
        rows += 1;
    }
    assert_eq!(rows, 21, "expected one row per step plus the initial row");
}

#[test]
fn numerical_failure_exits_three_and_flushes_a_trailer() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load_config(&write_config(
        tmp.path(),
        "blow.toml",
        &format!(
            "model = \"sphere\"\nd = 3\nN = 4\nkappa = 1.0e308\nh = 1.0\nsteps = 10\nseed = 2\nout_dir = \"{}\"\noutputs = [\"diagnostics-csv\"]\n",
            tmp.path().join("blow").display()
        ),
    ))
    .unwrap();
    let err = match run_experiment(&cfg) {
        Ok(_) => panic!("blow-up run unexpectedly succeeded"),
        Err(e) => e,
    };
    assert_eq!(err.exit_code(), 3, "numerical failure should map to exit 3, got {err}");
    let text = fs::read_to_string(tmp.path().join("blow/diagnostics.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() >= 3, "partial CSV missing rows: {text}");
    assert!(
        lines.last().unwrap().starts_with("# aborted: "),
        "missing trailer marker: {:?}",
        lines.last()
    );
}

#[test]
fn paired_identical_configs_stay_at_zero_distance() {
    let tmp = tempfile::tempdir().unwrap();
    let body = format!(
        "model = \"dlm-c\"\nd = 2\nN = 4\nkappa = 1.0\nh = 0.1\nsteps = 80\nseed = 11\nout_dir = \"{}\"\noutputs = [\"diagnostics-csv\"]\n\n[init]\nkind = \"near-consensus\"\nradius = 0.1\n\n[hamiltonians]\nkind = \"random-zero-sum\"\nscale = 0.02\n",
        tmp.path().join("pair").display()
    );
    let cfg_a = load_config(&write_config(tmp.path(), "pa.toml", &body)).unwrap();
    let cfg_b = load_config(&write_config(tmp.path(), "pb.toml", &body)).unwrap();
    let artifacts = pair_run(&cfg_a, &cfg_b).unwrap();
    assert_eq!(artifacts.distances.len(), 81);
    assert!(
        artifacts.distances.iter().all(|&d| d == 0.0),
        "identical initial data must stay at exactly zero distance"
    );
    let text = fs::read_to_string(tmp.path().join("pair/pair_diagnostics.csv")).unwrap();
    assert!(text.starts_with("n,relative_distance,diameter_a,diameter_b,wall_clock_ns\n"));
}

#[test]
fn paired_right_translated_states_keep_relative_positions() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = rng_from_seed(310);
    let mats: Vec<ComplexMatrix> = (0..4).map(|_| haar_unitary_with(2, &mut rng)).collect();
    let translation = haar_unitary_with(2, &mut rng);
    let translated: Vec<ComplexMatrix> = mats.iter().map(|m| m.matmul(&translation)).collect();
    let file_a = tmp.path().join("state_a.json");
    let file_b = tmp.path().join("state_b.json");
    write_json(&file_a, &StateJson::from_matrices("dlm-b", &mats)).unwrap();
    write_json(&file_b, &StateJson::from_matrices("dlm-b", &translated)).unwrap();
    let body = |file: &Path| {
        format!(
            "model = \"dlm-b\"\nd = 2\nN = 4\nkappa = 1.0\nh = 0.1\nsteps = 50\nseed = 17\n\n[init]\nkind = \"explicit\"\nfile = \"{}\"\n",
            file.display()
        )
    };
    let cfg_a = load_config(&write_config(tmp.path(), "ra.toml", &body(&file_a))).unwrap();
    let cfg_b = load_config(&write_config(tmp.path(), "rb.toml", &body(&file_b))).unwrap();
    let artifacts = pair_run(&cfg_a, &cfg_b).unwrap();
    let worst = artifacts.distances.iter().copied().fold(0.0, f64::max);
    assert!(worst <= 1e-13, "relative positions drifted by {worst:e} under right translation");
}

#[test]
fn pair_rejects_mismatched_shapes() {
    let tmp = tempfile::tempdir().unwrap();
    let body = |n: usize| {
        format!(
            "model = \"dlm-a\"\nd = 2\nN = {n}\nkappa = 1.0\nh = 0.1\nsteps = 5\nseed = 1\n"
        )
    };
    let cfg_a = load_config(&write_config(tmp.path(), "ma.toml", &body(4))).unwrap();
    let cfg_b = load_config(&write_config(tmp.path(), "mb.toml", &body(5))).unwrap();
    let err = match pair_run(&cfg_a, &cfg_b) {
        Ok(_) => panic!("mismatched pair unexpectedly succeeded"),
        Err(e) => e,
    };
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("share model, d, and N"), "unexpected message: {err}");
}

#[test]
fn violated_hypotheses_gate_the_suite_and_exit_four() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(
        tmp.path(),
        "gate.toml",
        "model = \"sphere\"\nd = 3\nN = 6\nkappa = 1.5\nh = 1.0\nsteps = 50\nseed = 7\n\n[init]\nkind = \"near-consensus\"\nradius = 0.3\n",
    );
    let out = lohe().args(["suite", "T3.1", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(4), "gated suite should exit 4");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(false));
    let checks = report["checks"].as_array().unwrap();
    let failed_hypothesis = checks
        .iter()
        .any(|c| c["status"] == "fail" && c["name"].as_str().unwrap().contains("kappa*h <= 1"));
    assert!(failed_hypothesis, "the violated hypothesis row is missing: {report}");
    let skipped = checks.iter().filter(|c| c["status"] == "skipped").count();
    assert!(skipped >= 3, "dynamics checks were not skipped: {report}");
    assert!(
        !checks.iter().any(|c| c["status"] == "fail" && c["name"].as_str().unwrap().contains("non-decreasing")),
        "dynamics must not fail under violated hypotheses"
    );
}

#[test]
fn unknown_suite_id_is_a_config_error() {
    let out = lohe().args(["suite", "T9.9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thresholds_prints_both_roots() {
    let out = lohe().arg("thresholds").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("beta0 = 4.3786357"), "beta0 missing: {text}");
    assert!(text.contains("beta1 = 1.9630199"), "beta1 missing: {text}");
    assert!(text.contains("Lambda(beta)") && text.contains("M(beta)"));
}

#[test]
fn run_subcommand_is_deterministic_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let body = |out: &str| {
        format!(
            "model = \"kuramoto\"\nd = 1\nN = 5\nkappa = 0.8\nh = 0.05\nsteps = 40\nseed = 3\nout_dir = \"{}\"\noutputs = [\"diagnostics-csv\", \"final-state-json\"]\n\n[init]\nkind = \"random\"\n\n[hamiltonians]\nkind = \"random-zero-sum\"\nscale = 0.1\n",
            tmp.path().join(out).display()
        )
    };
    for name in ["k1.toml", "k2.toml"] {
        let out_dir = name.trim_end_matches(".toml");
        let path = write_config(tmp.path(), name, &body(out_dir));
        let out = lohe().args(["run", "--config"]).arg(&path).output().unwrap();
        assert!(out.status.success(), "run failed: {}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(tmp.path().join("k1/diagnostics.csv")).unwrap();
    let b = fs::read(tmp.path().join("k2/diagnostics.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn final_state_feeds_back_as_explicit_init() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("stage1");
    let cfg1 = load_config(&write_config(
        tmp.path(),
        "stage1.toml",
        &format!(
            "model = \"dlm-a\"\nd = 3\nN = 3\nkappa = 1.0\nh = 0.1\nsteps = 7\nseed = 23\nout_dir = \"{}\"\noutputs = [\"final-state-json\"]\n\n[hamiltonians]\nkind = \"random-zero-sum\"\nscale = 0.1\n",
            out_dir.display()
        ),
    ))
    .unwrap();
    let first = run_experiment(&cfg1).unwrap();
    let state_file = first.final_state_path.unwrap();
    let cfg2 = load_config(&write_config(
        tmp.path(),
        "stage2.toml",
        &format!(
            "model = \"dlm-a\"\nd = 3\nN = 3\nkappa = 1.0\nh = 0.1\nsteps = 3\nseed = 24\n\n[init]\nkind = \"explicit\"\nfile = \"{}\"\n",
            state_file.display()
        ),
    ))
    .unwrap();
    run_experiment(&cfg2).unwrap();
}

#[test]
fn framework_report_output_requires_a_theorem() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(
        tmp.path(),
        "noref.toml",
        "model = \"dlm-b\"\nd = 2\nN = 4\nkappa = 1.0\nh = 0.1\nsteps = 5\nseed = 1\noutputs = [\"framework-report-json\"]\n",
    );
    let err = load_config(&path).unwrap_err();
    assert!(matches!(err, CliError::Config(_)), "expected config error, got {err}");
    assert!(err.to_string().contains("theorem"), "unexpected message: {err}");
}

#[test]
fn kuramoto_requires_dimension_one() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(
        tmp.path(),
        "kd.toml",
        "model = \"kuramoto\"\nd = 2\nN = 4\nkappa = 1.0\nh = 0.1\nsteps = 5\nseed = 1\n",
    );
    let err = load_config(&path).unwrap_err();
    assert!(err.to_string().contains("d must be 1"), "unexpected message: {err}");
}
