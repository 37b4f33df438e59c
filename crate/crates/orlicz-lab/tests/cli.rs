//! Black-box tests of the command-line interface: report envelope, exit
//! codes, CSV sweeps, environment handling, and determinism.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orlicz-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}):\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn norm_report_envelope() {
    let out = run(&[
        "norm",
        "--function",
        "box:0,1;0,1",
        "--young",
        "power:q=2",
        "--phi",
        "power:p=4,n=2",
        "--window",
        "cube",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let obj = v.as_object().expect("top-level object");
    let keys: Vec<&String> = obj.keys().collect();
    assert_eq!(keys, ["certificates_used", "inputs_echo", "results", "timings"]);
    assert_eq!(v["inputs_echo"]["command"], "norm");
    assert!(v["inputs_echo"]["tol"].is_number());
    assert!(v["inputs_echo"]["seed"].is_number());
    assert!(v["timings"]["total_ms"].is_number());
    let value = v["results"]["estimate"]["value"].as_f64().unwrap();
    assert!(
        (value - 1.0).abs() <= 1e-6,
        "unit square norm should be 1, got {value}"
    );
}

#[test]
fn indicator_norm_plateau_case() {
    let out = run(&[
        "indicator-norm",
        "--a",
        "1,4",
        "--n",
        "2",
        "--young",
        "power:q=2",
        "--phi",
        "power:p=4,n=2",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let value = v["results"]["value"].as_f64().unwrap();
    assert!((value - 1.0).abs() <= 1e-9, "plateau value {value}");
    assert_eq!(v["results"]["regime"], "between");
    assert!(!v["certificates_used"].as_object().unwrap().is_empty());
}

#[test]
fn missing_required_argument_is_usage_error() {
    let out = run(&["norm", "--function", "box:0,1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_growth_kind_is_usage_error() {
    let out = run(&["certify-phi", "--phi", "bogus:p=1"]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn certify_phi_power_constants() {
    let out = run(&["certify-phi", "--phi", "power:p=4,n=2"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    for key in ["almost_decreasing", "submultiplicative", "reciprocal"] {
        let c = v["results"]["certificate"][key]["value"].as_f64().unwrap();
        assert!((c - 1.0).abs() <= 1e-9, "{key} constant {c}");
    }
    assert_eq!(v["results"]["in_g2_dec"], true);
}

#[test]
fn necessity_band_failure_exits_one() {
    let out = run(&[
        "certify-necessity",
        "--samples",
        r#"{"samples":[{"x":[0,0],"jacobian":[[0.5,0],[0,0.5]]}]}"#,
        "--phi",
        "power:p=4,n=2",
        "--band",
        "1.5",
    ]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["pass"], false);
    let value = v["results"]["samples"][0]["value"].as_f64().unwrap();
    assert!((value - 2.0).abs() <= 1e-12, "phi of Jacobian product {value}");
}

#[test]
fn weak_norm_identity_flag() {
    let out = run(&[
        "weak-norm",
        "--function",
        "box:0,1;0,1*2",
        "--young",
        "power:q=1",
        "--phi",
        "power:p=2,n=2",
        "--check-identity",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let gap = v["results"]["identity"]["relative_gap"].as_f64().unwrap();
    assert!(gap <= 1e-6, "identity gap {gap}");
}

#[test]
fn op_norm_permutation_ratio_is_one() {
    let out = run(&[
        "op-norm",
        "--map",
        r#"{"kind":"perm","perm":[1,0]}"#,
        "--phi",
        "power:p=3,n=2",
        "--young",
        "power:q=2",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["orthogonal"]["ratio"].as_f64().unwrap(), 1.0);
}

#[test]
fn sweep_dilation_csv() {
    let out = run(&[
        "sweep",
        "--check",
        "dilation",
        "--phi",
        "power:p=2,n=1",
        "--c",
        "1,2,4",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "c,lower,upper,phi_c");
    let row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(row[0], "2.0");
    let phi_c: f64 = row[3].parse().unwrap();
    assert!((phi_c - 0.5f64.sqrt()).abs() <= 1e-12);
}

#[test]
fn sweep_cap_exceeded_is_usage_error() {
    let out = run(&[
        "sweep",
        "--check",
        "psi",
        "--n-list",
        "2",
        "--p-list",
        "1:10:200",
        "--q-list",
        "1,2",
        "--k-list",
        "1,2",
        "--cap",
        "100",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn thread_cap_env_is_validated() {
    let ok = bin()
        .args(["certify-phi", "--phi", "power:p=2,n=2"])
        .env("ORLICZ_LAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&ok), 0);

    let bad = bin()
        .args(["certify-phi", "--phi", "power:p=2,n=2"])
        .env("ORLICZ_LAB_THREADS", "abc")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
    assert!(!bad.stderr.is_empty());
}

#[test]
fn reports_are_deterministic_modulo_timings() {
    let args = [
        "weak-norm",
        "--function",
        "box:0,2;0,1*3",
        "--young",
        "power:q=2",
        "--phi",
        "power:p=3,n=2",
        "--seed",
        "7",
    ];
    let strip = |out: &Output| {
        let mut v = stdout_json(out);
        v.as_object_mut().unwrap().remove("timings");
        serde_json::to_string(&v).unwrap()
    };
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn output_file_target() {
    let path = std::env::temp_dir().join(format!("orlicz-lab-cli-test-{}.json", std::process::id()));
    let out = run(&[
        "certify-young",
        "--young",
        "flat",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["inputs_echo"]["command"], "certify-young");
    std::fs::remove_file(&path).ok();
}
