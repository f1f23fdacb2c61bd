//! End-to-end runs of the `hardylab` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn hardylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(args)
        .env_remove("HARDYLAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn analyze_dilation() {
    let out = hardylab(&["analyze", "--family", "dilation", "--param", "c=1", "--p", "2", "--t", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert!((r["delta"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert!((r["norm"].as_f64().unwrap() - 0.60653).abs() < 1e-5);
    assert_eq!(r["dw"], "infinity");
    assert_eq!(r["verdict"], "Bounded");
    assert_eq!(r["schema_version"], hardylab::report::SCHEMA_VERSION);
    assert_eq!(r["passed"], true);
    for c in r["checks"].as_array().unwrap() {
        assert!(c["tolerance"].as_f64().unwrap() > 0.0);
        assert_eq!(c["passed"], true, "{c}");
    }
}

#[test]
fn analyze_example2_is_unbounded() {
    let out = hardylab(&["analyze", "--family", "example2", "--p", "2"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["verdict"], "Unbounded");
    assert!(r["norm"].is_null());
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = (0..2)
        .map(|k| dir.path().join(format!("r{k}.json")).to_string_lossy().into_owned())
        .collect();
    for p in &paths {
        let out = hardylab(&[
            "analyze", "--family", "sqrt_parabolic", "--p", "2", "--t", "0.5", "--t", "2", "--out", p,
        ]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(a).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn sweep_t_for_dilation() {
    let out = hardylab(&[
        "sweep", "--family", "dilation", "--param", "c=1", "--p", "2", "--axis", "t", "--values", "0,0.5,1,2",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("axis,measured,predicted,abs_error"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let t: f64 = row[0].parse().unwrap();
        let predicted: f64 = row[2].parse().unwrap();
        assert!((predicted - (-t / 2.0).exp()).abs() < 1e-6);
        assert!(row[3].parse::<f64>().unwrap() < 1e-6);
    }
}

#[test]
fn sweep_n_for_translation_increases() {
    let out = hardylab(&["sweep", "--family", "translation", "--param", "b=1", "--axis", "n", "--values", "1..10"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let measured: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(measured.len(), 10);
    assert!(measured.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["sweep", "--family", "dilation", "--param", "c=1", "--axis", "t", "--values", ""],
        vec!["analyze", "--family", "spiral"],
        vec!["analyze", "--family", "dilation", "--param", "c=0"],
        vec!["analyze", "--family", "dilation", "--param", "c=1", "--tol", "unknown=1"],
        vec!["analyze", "--family", "dilation", "--param", "c=1", "--p", "0"],
        vec!["spectrum", "--family", "translation", "--param", "b=1", "--nu-grid", "1:0:3"],
        vec!["analyze"],
        vec!["frobnicate"],
    ] {
        let out = hardylab(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn bad_seed_is_a_config_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(["analyze", "--family", "dilation", "--param", "c=1"])
        .env("HARDYLAB_SEED", "minus one")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn unbounded_spectrum_is_a_compute_error() {
    let out = hardylab(&["spectrum", "--family", "example1"]);
    assert_eq!(code(&out), 3);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["operation"], "point_spectrum");
    assert_eq!(err["error"]["kind"], "compute");
}

#[test]
fn failed_checks_exit_3() {
    let out = hardylab(&["analyze", "--family", "sqrt_parabolic", "--tol", "continuity=1e-9"]);
    assert_eq!(code(&out), 3);
    let r = json(&out);
    assert_eq!(r["passed"], false);
    assert!(!r["failures"].as_array().unwrap().is_empty());
}

#[test]
fn spectrum_of_translation_is_empty() {
    let out = hardylab(&["spectrum", "--family", "translation", "--param", "b=1", "--nu-grid", "-1:1:3,-1:1:3"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["spectrum"]["sigma_pi"].as_array().unwrap().len(), 0);
    assert_eq!(r["spectrum"]["candidates"].as_array().unwrap().len(), 9);
    assert_eq!(r["spectrum"]["dw_kind"], "Boundary");
}

#[test]
fn semigroup_check_and_norm() {
    let out = hardylab(&["semigroup-check", "--family", "example1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["dw"]["interior"][1].as_f64().unwrap().round(), 1.0);
    let out = hardylab(&["norm", "--family", "dilation", "--param", "c=1", "--p", "2", "--p", "4", "--t", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["norm_table"].as_array().unwrap().len(), 2);
}

#[test]
fn suite_runs_selected_criteria() {
    let out = hardylab(&["suite", "--criterion", "1", "--criterion", "11"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["results"].as_array().unwrap().len(), 2);
    let lines = String::from_utf8(out.stderr).unwrap();
    assert!(lines.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn full_suite_exit_code_matches_results() {
    let out = hardylab(&["suite"]);
    let r = json(&out);
    let results = r["results"].as_array().unwrap();
    assert_eq!(results.len(), 17);
    let all = results.iter().all(|c| c["passed"] == true);
    assert_eq!(code(&out), if all { 0 } else { 3 });
    assert_eq!(String::from_utf8(out.stderr).unwrap().lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count(), 17);
}
