//! End-to-end tests of the `odeinv` binary: documented invocations,
//! exit codes, and output determinism.

use std::process::{Command, Output};

fn odeinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_odeinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("valid JSON on stdout")
}

fn rel_close(got: f64, expected: f64, tol: f64) -> bool {
    (got - expected).abs() <= tol * (1.0 + expected.abs())
}

#[test]
fn classify_reports_constant_invariants_for_the_exponential() {
    let out = odeinv(&["classify", "--f", "c*exp(-p)", "--param", "c=1", "--json"]);
    assert!(out.status.success(), "stderr: {:?}", out.stderr);
    let doc = json(&out);
    assert_eq!(doc["class"], "first-class");
    assert_eq!(doc["rank"], 0);
    assert_eq!(doc["symmetry_dimension"], 3);
    let b = &doc["b_mean"];
    assert!(rel_close(b[0][0].as_f64().unwrap(), 4294967296.0, 1e-6));
    assert!(rel_close(b[1][0].as_f64().unwrap(), 4294967296.0, 1e-6));
    assert!(rel_close(b[2][0].as_f64().unwrap(), 7984925229121.0, 1e-6));
    assert!(rel_close(doc["r12_mean"][0].as_f64().unwrap(), 1.0, 1e-6));
}

#[test]
fn classify_zero_equation_is_linearizable() {
    let out = odeinv(&["classify", "--f", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("class: linearizable"));
    assert!(text.contains("symmetry dimension: 8"));
}

#[test]
fn classify_detects_the_second_class() {
    let out = odeinv(&["classify", "--f", "(p + p^3 + (1 + p^2)^(3/2))/x"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("class: second-class"));
}

#[test]
fn classify_rejects_malformed_input_with_exit_2() {
    let out = odeinv(&["classify", "--f", "c*exp("]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cannot parse"), "stderr: {err}");
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = ["classify", "--f", "p + exp(p - y)", "--seed", "7", "--json"];
    let first = odeinv(&args);
    let second = odeinv(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn invariants_at_the_origin_match_the_documented_values() {
    let out = odeinv(&[
        "invariants", "--f", "c*exp(-p)", "--param", "c=1", "--at", "0,0,0", "--json",
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    let values = &doc["values"];
    assert!(rel_close(values["i1"][0].as_f64().unwrap(), 1.0, 1e-9));
    assert!(rel_close(values["i2"][0].as_f64().unwrap(), 1.0, 1e-9));
    assert!(rel_close(values["b"][2][0].as_f64().unwrap(), 7984925229121.0, 1e-6));
}

#[test]
fn invariants_of_the_zero_equation_vanish() {
    let out = odeinv(&["invariants", "--f", "0", "--at", "1,1,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("I1 = 0"));
    assert!(text.contains("I2 = 0"));
}

#[test]
fn invariants_of_the_power_law_match_the_documented_value() {
    let out = odeinv(&[
        "invariants", "--f", "c*p^(3/2)", "--param", "c=2", "--at", "0,0,1", "--json",
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert!(rel_close(doc["values"]["b"][2][0].as_f64().unwrap(), 390625.0, 1e-6));
}

#[test]
fn transform_identity_returns_the_equation_and_passes_checks() {
    let out = odeinv(&[
        "transform", "--f", "c*exp(-p)", "--param", "c=1", "--phi", "x", "--psi", "y",
        "--phi-inv", "x", "--psi-inv", "y", "--check", "all",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("fbar = c*exp(-p)"));
    assert!(text.contains("invariance: ok"));
}

#[test]
fn transform_rejects_a_wrong_inverse_with_exit_2() {
    let out = odeinv(&[
        "transform", "--f", "exp(-p)", "--phi", "2*x", "--psi", "y", "--phi-inv", "x",
        "--psi-inv", "y",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_commutator_suite_passes() {
    let out = odeinv(&["verify", "--suite", "commutators"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("66 passed, 0 failed"));
}

#[test]
fn paper_examples_report_the_known_ratio_mismatch() {
    let out = odeinv(&["paper-examples"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let mismatches: Vec<&str> = text.lines().filter(|l| l.contains("MISMATCH")).collect();
    assert_eq!(mismatches.len(), 1, "only the 5.7 ratio should mismatch: {text}");
    assert!(mismatches[0].contains("R12"));
    assert!(text.contains("5.7"));
}

#[test]
fn paper_examples_filter_runs_clean_on_the_constant_example() {
    let out = odeinv(&["paper-examples", "--only", "5.1", "--json"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["ok"], true);
    assert_eq!(doc["cases"].as_array().unwrap().len(), 3);
}
