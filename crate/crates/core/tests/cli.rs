//! End-to-end runs of the binary: byte-exact goldens and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twostroke"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn assert_golden(args: &[&str], name: &str) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden(name), "{name}");
}

const TABLE_ONE: [&str; 8] = [
    "--beta-h", "1", "--beta-c", "3", "--omega-h", "1", "--omega-c", "0.5",
];

fn with<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(tail).copied().collect()
}

#[test]
fn worked_example_report() {
    assert_golden(
        &[
            "report", "--beta-h", "6", "--beta-c", "7", "--omega-h", "2", "--omega-c", "3", "--simple", "2,3",
        ],
        "worked_example_report.json",
    );
    let text = golden("worked_example_report.json");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["efficiency"].as_f64(), Some(0.1));
    assert_eq!(v["modes"][0], "engine");
}

#[test]
fn table_one_csv() {
    assert_golden(&with(&["table24"], &TABLE_ONE), "table_one.csv");
}

#[test]
fn table_one_optimize() {
    assert_golden(&with(&["optimize"], &TABLE_ONE), "table_one_optimize.json");
}

#[test]
fn table_one_lp_without_catalyst() {
    assert_golden(
        &with(&["lp-bound"], &with(&TABLE_ONE, &["--catalyst-dim", "1"])),
        "table_one_lp_d1.json",
    );
}

#[test]
fn fig5_defaults() {
    assert_golden(&["fig5"], "fig5_default.csv");
}

#[test]
fn regime_map_coarse() {
    assert_golden(&["regime-map", "--resolution", "5"], "regime_map_res5.csv");
}

#[test]
fn dimensionless_flags_match_explicit() {
    let a = run(&with(&["table24"], &TABLE_ONE));
    let b = run(&["table24", "--bh-wh", "1", "--bc-wc", "1.5", "--omega-c", "0.5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn otto_without_engine_regime() {
    let out = run(&["report", "--beta-h", "1", "--beta-c", "3", "--omega-h", "1", "--omega-c", "2", "--otto"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no engine regime"));
    assert!(out.stdout.is_empty());
}

#[test]
fn identity_is_all_zero() {
    let out = run(&with(&["report"], &with(&TABLE_ONE, &["--perm", "identity"])));
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["work", "heat_hot", "heat_cold"] {
        assert_eq!(v[key].as_f64(), Some(0.0), "{key}");
    }
}

#[test]
fn config_errors_exit_2() {
    let cases: [&[&str]; 5] = [
        &["report", "--beta-h", "3", "--beta-c", "1", "--omega-h", "1", "--omega-c", "0.5"],
        &["report", "--beta-h", "1", "--beta-c", "3", "--omega-h", "1"],
        &["report", "--beta-h", "1", "--beta-c", "3", "--omega-h", "1", "--omega-c", "0.5", "--simple", "2,3", "--catalyst-dim", "4"],
        &["report", "--beta-h", "1", "--beta-c", "3", "--omega-h", "-1", "--omega-c", "0.5"],
        &["no-such-command"],
    ];
    for args in cases {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn lp_guard_exits_4() {
    let out = run(&with(&["lp-bound"], &with(&TABLE_ONE, &["--catalyst-dim", "3"])));
    assert_eq!(out.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "guard_exceeded");
    assert!(v["note"].as_str().unwrap().contains("not a valid upper bound"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = run(&with(&["table24"], &with(&TABLE_ONE, &["--output", path.to_str().unwrap()])));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), golden("table_one.csv"));
}

#[test]
fn coherence_check_is_seeded() {
    let a = run(&["coherence-check", "--seed", "11", "--instances", "20"]);
    let b = run(&["coherence-check", "--instances", "20", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-10);
}
