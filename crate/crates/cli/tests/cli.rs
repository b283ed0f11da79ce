//! End-to-end tests of the installed binary: spec'd exit codes, report
//! shapes, and byte-level determinism.

use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mdpave"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-fixtures");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_fixture(name: &str, contents: &str) -> PathBuf {
    let path = scratch(name);
    fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const TUPLE_2X2: &str = r#"{"k": 1, "n": 2, "matrices": [{"n": 2, "entries": [[[0.0, 0.0], [0.5, 0.0]], [[0.5, 0.0], [0.0, 0.0]]]}]}"#;

#[test]
fn multipave_small_example_paves_into_singletons() {
    let input = write_fixture("tuple2.json", TUPLE_2X2);
    let out = run(&["multipave", "-i", input.to_str().unwrap(), "--r", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["paving"]["blocks"], serde_json::json!([[1], [2]]));
    assert_eq!(v["command"], "multipave");
    assert!(v["config_sha256"].as_str().unwrap().len() == 64);
    assert!(v["input_sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn multipave_rejects_nonzero_diagonal() {
    let input = write_fixture(
        "bad_diag.json",
        r#"{"k": 1, "n": 2, "matrices": [{"n": 2, "entries": [[[1.0, 0.0], [0.5, 0.0]], [[0.5, 0.0], [1.0, 0.0]]]}]}"#,
    );
    let out = run(&["multipave", "-i", input.to_str().unwrap(), "--epsilon", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn multipave_over_budget_is_exit_3() {
    let input = write_fixture("tuple2_budget.json", TUPLE_2X2);
    let out = run(&["multipave", "-i", input.to_str().unwrap(), "--r", "3", "--budget", "8"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn multipave_needs_epsilon_or_r() {
    let input = write_fixture("tuple2_noargs.json", TUPLE_2X2);
    let out = run(&["multipave", "-i", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn multipave_reports_are_byte_identical() {
    let input = write_fixture("tuple2_det.json", TUPLE_2X2);
    let out_a = scratch("det_a.json");
    let out_b = scratch("det_b.json");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "multipave",
            "-i",
            input.to_str().unwrap(),
            "--r",
            "2",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(res.status.code(), Some(0));
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn pave2sided_singleton_blocks() {
    let input = write_fixture(
        "offdiag.json",
        r#"{"n": 2, "entries": [[[0.0, 0.0], [0.9, 0.0]], [[0.9, 0.0], [0.0, 0.0]]]}"#,
    );
    let out = run(&["pave2sided", "-i", input.to_str().unwrap(), "--r", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let norms = v["report"]["per_block_operator_norm"].as_array().unwrap();
    assert_eq!(norms.len(), 2);
    for n in norms {
        assert!(n.as_f64().unwrap() < 12.0 * 2.0f64.sqrt() / 2.0f64.sqrt());
    }
}

#[test]
fn restrict_zero_tuple_is_degenerate_success() {
    let input = write_fixture(
        "zero3.json",
        r#"{"k": 1, "n": 3, "matrices": [{"n": 3, "entries": [[[0.0,0.0],[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0],[0.0,0.0]]]}]}"#,
    );
    let out = run(&["restrict", "-i", input.to_str().unwrap(), "--epsilon", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["degenerate"], Value::Bool(true));
    assert_eq!(v["report"]["kept_set"], serde_json::json!([]));
}

#[test]
fn restrict_keeps_subset_below_epsilon() {
    // 12×12 zero-diagonal contraction built from a scaled circulant pattern
    let n = 12;
    let mut entries = Vec::new();
    for i in 0..n {
        let mut row = Vec::new();
        for j in 0..n {
            let v = if i != j && (i + j) % 3 == 0 { 0.2 } else { 0.0 };
            row.push(format!("[{v:.1}, 0.0]"));
        }
        entries.push(format!("[{}]", row.join(", ")));
    }
    let text = format!(
        r#"{{"k": 1, "n": {n}, "matrices": [{{"n": {n}, "entries": [{}]}}]}}"#,
        entries.join(", ")
    );
    let input = write_fixture("circulant12.json", &text);
    let out = run(&["restrict", "-i", input.to_str().unwrap(), "--epsilon", "0.9"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let kept = v["report"]["kept_set"].as_array().unwrap();
    assert_eq!(kept.len(), 1); // floor(12·0.81/6) = 1
    for lam in v["report"]["per_matrix_lambda_max"].as_array().unwrap() {
        assert!(lam.as_f64().unwrap() < 0.9);
    }
}

#[test]
fn commutator_flip_matrix_succeeds() {
    let input = write_fixture(
        "flip.json",
        r#"{"n": 2, "entries": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]}"#,
    );
    let out = run(&["commutator", "-i", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!(v["report"]["residual"].as_f64().unwrap() <= 1e-10);
    assert!(v["report"]["norm_b"].as_f64().unwrap() <= 2.0f64.sqrt() + 1e-10);
}

#[test]
fn commutator_rejects_nonzero_trace() {
    let input = write_fixture(
        "eye2.json",
        r#"{"n": 2, "entries": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}"#,
    );
    let out = run(&["commutator", "-i", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_named_suite_passes() {
    let out = run(&["verify", "expected-mdp", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("expected-mdp"));
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_unknown_suite_is_validation_error() {
    let out = run(&["verify", "definitely-not-a-suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn verify_report_file_lists_outcomes() {
    let path = scratch("verify_scaling.json");
    let out = run(&["verify", "scaling", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let suites = v["report"]["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["name"], "scaling");
    assert_eq!(suites[0]["passed"], Value::Bool(true));
}

#[test]
fn construct_fourier_and_conference() {
    let out = run(&["construct", "fourier", "--m", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["matrix"]["n"], 4);

    let out = run(&["construct", "conference", "--m", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["matrix"]["n"], 6);

    let out = run(&["construct", "conference", "--m", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_tightness_certifies_singletons() {
    let out = run(&["construct", "tightness", "--k", "2", "--epsilon", "0.40"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let rep = &v["report"];
    assert_eq!(rep["certificate"]["holds"], Value::Bool(true));
    assert_eq!(rep["certificate"]["implied_block_count"], 12);
    assert_eq!(rep["dim"], 12);
}

#[test]
fn construct_graph_identity_on_cycle() {
    let input = write_fixture(
        "c4.json",
        r#"{"n": 4, "edges": [[1, 2], [2, 3], [3, 4], [1, 4]]}"#,
    );
    let out = run(&["construct", "graph-identity", "-i", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let idy = &v["report"]["identity"];
    assert!(idy["max_deviation"].as_f64().unwrap() <= 1e-10);
    assert_eq!(idy["radius_bound_met"], Value::Bool(true));
    assert!((idy["best_signing_radius"].as_f64().unwrap() - 2.0f64.sqrt()).abs() < 1e-9);
}

#[test]
fn missing_input_file_is_validation_error() {
    let out = run(&["multipave", "-i", "/nonexistent/nope.json", "--epsilon", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_tolerance_is_validation_error() {
    let input = write_fixture("tuple2_tol.json", TUPLE_2X2);
    let out = run(&[
        "multipave",
        "-i",
        input.to_str().unwrap(),
        "--r",
        "2",
        "--tol-root",
        "-1.0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn threads_flag_does_not_change_output() {
    let input = write_fixture("tuple2_threads.json", TUPLE_2X2);
    let base = run(&["multipave", "-i", input.to_str().unwrap(), "--r", "2"]);
    let threaded = run(&[
        "multipave",
        "-i",
        input.to_str().unwrap(),
        "--r",
        "2",
        "--threads",
        "2",
    ]);
    assert_eq!(base.status.code(), Some(0));
    assert_eq!(threaded.status.code(), Some(0));
    let a = stdout_json(&base);
    let b = stdout_json(&threaded);
    assert_eq!(a["report"], b["report"]);
}
