//! End-to-end tests of the `polarize` binary: exit codes, output
//! contracts, format round-trips, and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polarize::sphere_opt::WitnessReport;
use serde_json::Value;
use tempfile::TempDir;

fn polarize(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarize"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn write_identity_json(dir: &Path, n: usize) -> PathBuf {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let path = dir.join(format!("ortho{n}.json"));
    std::fs::write(
        &path,
        serde_json::to_string(&serde_json::json!({ "vectors": rows })).unwrap(),
    )
    .unwrap();
    path
}

#[test]
fn mu_prints_the_closed_form_value() {
    let output = polarize(&["mu", "--n", "9", "--s", "4"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    assert!(text.contains("1.220703125e-4"), "got: {text}");
    assert!(text.contains("pin threshold      7"), "got: {text}");

    let output = polarize(&["mu", "--n", "4", "--s", "2"]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout(&output).contains("0.0625"));
}

#[test]
fn mu_rejects_a_level_outside_the_feasible_interval() {
    let output = polarize(&["mu", "--n", "3", "--s", "5"]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("outside [sqrt(n), n]"));
}

#[test]
fn table_reproduces_exact_powers_and_the_failure_row() {
    let output = polarize(&["table"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    let row8 = text.lines().find(|l| l.starts_with("8 ")).expect("row 8");
    assert!(row8.contains("4096"), "got: {row8}");
    assert!(row8.ends_with("true"), "got: {row8}");
    let row15 = text.lines().find(|l| l.starts_with("15 ")).expect("row 15");
    assert!(row15.ends_with("false"), "got: {row15}");

    let output = polarize(&["table", "--n-min", "2"]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn scan_exit_code_tracks_the_bound() {
    let output = polarize(&["scan", "--n", "9", "--grid", "5000"]);
    assert_eq!(exit_code(&output), 0);
    let output = polarize(&["scan", "--n", "15", "--grid", "5000"]);
    assert_eq!(exit_code(&output), 1);
    let text = stdout(&output);
    assert!(
        text.lines()
            .any(|l| l.starts_with("bound holds") && l.ends_with("false")),
        "got: {text}"
    );
}

#[test]
fn witness_on_the_identity_attains_the_bound() {
    let dir = TempDir::new().unwrap();
    let path = write_identity_json(dir.path(), 10);
    let output = polarize(&["witness", path.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    assert!(text.contains("passes             true"), "got: {text}");
    assert!(text.contains("1e-5"), "got: {text}");
}

#[test]
fn witness_rejects_malformed_input() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "not json at all").unwrap();
    let output = polarize(&["witness", path.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("expected"));

    let missing = dir.path().join("nope.json");
    let output = polarize(&["witness", missing.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn witness_accepts_csv_rows() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("ortho3.csv");
    std::fs::write(&path, "1,0,0\n0,1,0\n0,0,1\n").unwrap();
    let output = polarize(&["witness", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&output), 0);
    let value: Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(value["n"], 3);
    assert_eq!(value["report"]["passes"], true);
}

#[test]
fn witness_local_method_requires_a_seed() {
    let dir = TempDir::new().unwrap();
    let path = write_identity_json(dir.path(), 4);
    let output = polarize(&["witness", path.to_str().unwrap(), "--method", "local"]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("--seed"));

    let output = polarize(&[
        "witness",
        path.to_str().unwrap(),
        "--method",
        "local",
        "--seed",
        "3",
    ]);
    assert_eq!(exit_code(&output), 0);
}

#[test]
fn witness_report_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let path = write_identity_json(dir.path(), 6);
    let output = polarize(&["witness", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&output), 0);
    let value: Value = serde_json::from_str(&stdout(&output)).unwrap();
    let report: WitnessReport =
        serde_json::from_value(value["report"].clone()).unwrap();
    let first = serde_json::to_string(&report).unwrap();
    let reparsed: WitnessReport = serde_json::from_str(&first).unwrap();
    let second = serde_json::to_string(&reparsed).unwrap();
    assert_eq!(first, second);
    assert_eq!(report.x.len(), reparsed.x.len());
    for (a, b) in report.x.iter().zip(&reparsed.x) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert_eq!(report.log_product.to_bits(), reparsed.log_product.to_bits());
    assert_eq!(report.product.to_bits(), reparsed.product.to_bits());
}

#[test]
fn maximize_orthonormal_twelve_reaches_the_bound() {
    let dir = TempDir::new().unwrap();
    let path = write_identity_json(dir.path(), 12);
    let output = polarize(&[
        "maximize",
        path.to_str().unwrap(),
        "--seed",
        "7",
        "--check-equality",
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let value: Value = serde_json::from_str(&stdout(&output)).unwrap();
    let product = value["report"]["product"].as_f64().unwrap();
    let expected = 12f64.powi(-6);
    assert!(
        ((product - expected) / expected).abs() <= 1e-6,
        "product {product} vs {expected}"
    );
    assert_eq!(value["equality"], true);
    assert!(value["stats"]["total_iterations"].as_u64().is_some());
}

#[test]
fn maximize_is_deterministic_for_a_fixed_seed() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("pair.json");
    std::fs::write(&path, r#"{"vectors": [[1,0],[0.5,0.8660254037844386]]}"#).unwrap();
    let run = || {
        let output = polarize(&[
            "maximize",
            path.to_str().unwrap(),
            "--seed",
            "3",
            "--format",
            "json",
        ]);
        assert_eq!(exit_code(&output), 0);
        stdout(&output)
    };
    let first = run();
    assert_eq!(first, run());
    let value: Value = serde_json::from_str(&first).unwrap();
    let product = value["report"]["product"].as_f64().unwrap();
    assert!((product - 0.75).abs() <= 1e-9, "product {product}");
}

#[test]
fn verify_small_run_passes_and_rejects_out_of_range_n_max() {
    let output = polarize(&[
        "verify", "--n-max", "4", "--trials", "5", "--seed", "1", "--grid", "2000",
    ]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    assert!(text.contains("[PASS]"));
    assert!(!text.contains("[FAIL]"));
    assert!(text.lines().last().unwrap().contains("OK"));

    let output = polarize(&["verify", "--n-max", "15", "--trials", "0", "--seed", "7"]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn verify_with_zero_trials_runs_only_deterministic_checks() {
    let output = polarize(&[
        "verify", "--n-max", "3", "--trials", "0", "--seed", "7", "--grid", "500",
    ]);
    assert_eq!(exit_code(&output), 0);
    assert!(!stdout(&output).contains("witness-trials"));
}

#[test]
fn verify_output_is_independent_of_the_worker_count() {
    let run = |threads: &str| {
        let output = Command::new(env!("CARGO_BIN_EXE_polarize"))
            .env("POLARIZE_THREADS", threads)
            .args(["verify", "--n-max", "5", "--trials", "16", "--seed", "9", "--grid", "1000"])
            .output()
            .expect("binary runs");
        assert_eq!(output.status.code(), Some(0));
        String::from_utf8(output.stdout).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn bad_thread_env_is_a_usage_error() {
    let output = Command::new(env!("CARGO_BIN_EXE_polarize"))
        .env("POLARIZE_THREADS", "zero")
        .args(["mu", "--n", "4", "--s", "2"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn random_trials_pass_across_kinds() {
    for kind in ["uniform", "perturbed", "clustered", "mixed"] {
        let output = polarize(&[
            "random-trials",
            "--n",
            "5",
            "--trials",
            "20",
            "--seed",
            "11",
            "--kind",
            kind,
        ]);
        assert_eq!(exit_code(&output), 0, "kind {kind}");
        assert!(stdout(&output).contains("failures           0"));
    }
}

#[test]
fn lambda_maps_the_identity_to_the_diagonal_slice_point() {
    let dir = TempDir::new().unwrap();
    let path = write_identity_json(dir.path(), 3);
    let output = polarize(&["lambda", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&output), 0);
    let value: Value = serde_json::from_str(&stdout(&output)).unwrap();
    let s = value["s"].as_f64().unwrap();
    assert!((s - 3f64.sqrt()).abs() <= 1e-12);
    let product = value["point_product"].as_f64().unwrap();
    let min = value["slice_minimum"].as_f64().unwrap();
    assert!(product >= min * (1.0 - 1e-12));
}

#[test]
fn breakpoints_csv_has_one_row_per_level() {
    let output = polarize(&["breakpoints", "--n", "6", "--format", "csv"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    assert_eq!(text.lines().count(), 8, "header plus j = 0..=6: {text}");
    assert!(text.lines().next().unwrap() == "j,level,minimum");
}
