//! End-to-end tests of the `certseq` binary: documented example outputs,
//! exit-status conventions, report reproducibility, and config echoing.

use std::process::{Command, Output};

use serde_json::Value;

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_certseq"));
    // Isolate from the ambient environment so test runs are reproducible.
    cmd.env_remove("CERTSEQ_PRECISION_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.args(args).output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

fn json_report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process exits normally")
}

#[test]
fn bound_example_matches_documented_value() {
    let out = run(&["bound", "--r", "0.5", "--N", "10000"]);
    assert_eq!(exit_code(&out), 0);
    let rep = json_report(&out);
    assert_eq!(rep["command"], "bound");
    assert_eq!(rep["config"]["r"], "0.5");
    assert_eq!(rep["config"]["N"], "10000");
    assert_eq!(rep["config"]["output"], "json");
    assert!(rep["config"]["seed"].is_null());
    let bound = rep["bound"].as_f64().unwrap();
    assert!((bound - 3.547154215).abs() < 1e-6, "bound = {bound}");
    assert!(rep["elapsed_hint"].is_f64());
}

#[test]
fn count_empty_range_reports_zeros() {
    let out = run(&["count", "--alpha", "sqrt:2", "--r", "0.5", "--N", "0"]);
    assert_eq!(exit_code(&out), 0);
    let rep = json_report(&out);
    assert_eq!(rep["N"], 0);
    assert_eq!(rep["count_certain"], 0);
    assert_eq!(rep["count_unresolved"], 0);
}

#[test]
fn classify_golden_ratio_is_bounded_even() {
    let out = run(&["classify", "--alpha", "phi", "--depth", "100"]);
    assert_eq!(exit_code(&out), 0);
    let rep = json_report(&out);
    assert_eq!(rep["verdict"], "BoundedEven");
    assert_eq!(rep["M"], 2);
}

#[test]
fn reports_are_byte_reproducible_modulo_elapsed_hint() {
    let strip = |out: &Output| -> String {
        let text = String::from_utf8(out.stdout.clone()).unwrap();
        text.lines().filter(|l| !l.contains("elapsed_hint")).collect::<Vec<_>>().join("\n")
    };
    for args in [
        &["count", "--alpha", "sqrt:2", "--r", "0.5", "--N", "40"][..],
        &["hurwitz", "--alpha", "sqrt:2", "--count", "10"][..],
        &["expand", "--alpha", "e", "--terms", "12", "--output", "csv"][..],
    ] {
        let first = run(args);
        let second = run(args);
        assert_eq!(exit_code(&first), 0);
        assert_eq!(strip(&first), strip(&second), "args: {args:?}");
    }
}

#[test]
fn witness_budget_exhaustion_exits_two_with_best_attempt() {
    let out = run(&[
        "witness-frac",
        "--alpha",
        "cf-rule:even-ramp",
        "--target",
        "0.9",
        "--tol",
        "0.0001",
        "--t-max",
        "2",
    ]);
    assert_eq!(exit_code(&out), 2);
    let rep = json_report(&out);
    assert_eq!(rep["verdict"], "budget-exhausted");
    assert_eq!(rep["certified"], false);
    assert!(rep["n"].is_string(), "best attempt is reported");
}

#[test]
fn usage_error_exits_sixty_four() {
    let out = run(&["count", "--bogus"]);
    assert_eq!(exit_code(&out), 64);
    assert!(out.stdout.is_empty());
}

#[test]
fn module_error_exits_one_with_error_name() {
    let out = run(&["hurwitz", "--alpha", "3/4", "--count", "5"]);
    assert_eq!(exit_code(&out), 1);
    let rep = json_report(&out);
    assert_eq!(rep["error"], "NotIrrational");
    assert!(rep["detail"].is_string());
}

#[test]
fn precision_cap_env_var_applies_and_flag_wins() {
    let args = &["count", "--alpha", "sqrt:2", "--r", "0.5", "--N", "3"];
    let from_env = run_with_env(args, &[("CERTSEQ_PRECISION_CAP", "4096")]);
    assert_eq!(json_report(&from_env)["config"]["precision_cap"], 4096);

    let mut flagged = args.to_vec();
    flagged.extend(["--precision-cap", "8192"]);
    let from_flag = run_with_env(&flagged, &[("CERTSEQ_PRECISION_CAP", "4096")]);
    assert_eq!(json_report(&from_flag)["config"]["precision_cap"], 8192);

    let junk = run_with_env(args, &[("CERTSEQ_PRECISION_CAP", "junk")]);
    assert_eq!(exit_code(&junk), 1);
    assert_eq!(json_report(&junk)["error"], "InvalidParameter");
}

#[test]
fn csv_output_flattens_report() {
    let out = run(&["bound", "--r", "0.5", "--N", "1", "--output", "csv"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("key,value"));
    assert!(text.lines().any(|l| l.starts_with("bound,0.35471542")), "{text}");
    assert!(text.lines().any(|l| l == "config.output,csv"));
}

#[test]
fn cos_witness_certifies_unit_angle_target() {
    let out = run(&["witness-cos", "--alpha", "1", "--target", "0.5", "--tol", "0.05"]);
    assert_eq!(exit_code(&out), 0);
    let rep = json_report(&out);
    assert_eq!(rep["verdict"], "certified");
    assert_eq!(rep["n"], "1");
    assert_eq!(rep["certified"], true);
}

#[test]
fn verify_t5_pipeline_passes_for_sqrt2() {
    let out = run(&["verify-t5", "--alpha", "sqrt:2", "--r", "0.5", "--t", "8"]);
    assert_eq!(exit_code(&out), 0);
    let rep = json_report(&out);
    assert_eq!(rep["v_t"], "408");
    assert_eq!(rep["N_t"], "1632");
    assert_eq!(rep["d_max"], 4);
    assert_eq!(rep["count_certain"], 60);
    assert_eq!(rep["count_unresolved"], 0);
    assert_eq!(rep["pass"], true);
}
