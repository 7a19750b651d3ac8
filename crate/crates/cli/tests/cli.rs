use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn unres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unres")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn repro_all_passes() {
    let v = json(&unres(&["repro", "all"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 6);
}

#[test]
fn unknown_example_is_an_error() {
    let out = unres(&["repro", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown example"));
}

#[test]
fn segre_order_changes_the_limit() {
    let input = fixture("order_matters.json");
    let a = json(&unres(&["segre", "--input", &input, "--order", "3,1,2"]));
    assert_eq!(a["limit_pencil"], "[[x1, x2], [x2, x1]]");
    assert_eq!(a["restriction_identity"], true);
    let b = json(&unres(&["segre", "--input", &input, "--order", "2,3,1"]));
    assert_eq!(b["limit_pencil"], "[[x1, 0], [x2, x1]]");
    assert_eq!(b["border_rank_status"], "minimal");
}

#[test]
fn bad_order_is_rejected() {
    let input = fixture("order_matters.json");
    let out = unres(&["segre", "--input", &input, "--order", "1,1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("unres-cli-test-{}.json", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    let out = unres(&["--out", &p, "sigma2", "motive", "-d", "4"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["euler"], "208");
}

#[test]
fn motive_routes_agree() {
    let bb = json(&unres(&["sigma2", "motive", "-d", "5", "--via", "bb"]));
    let formula = json(&unres(&["sigma2", "motive", "-d", "5", "--via", "formula"]));
    assert_eq!(bb["coefficients"], formula["coefficients"]);
}

#[test]
fn small_count_matches_the_motive() {
    let v = json(&unres(&["sigma2", "count", "-d", "3", "-p", "2", "--threads", "2"]));
    assert_eq!(v["matches"], true);
    assert_eq!(v["csigma2"]["count"], "1065");
    assert_eq!(v["sigma2"]["count"], "255");
}
