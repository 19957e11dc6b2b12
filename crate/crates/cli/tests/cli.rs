use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use simpalg_core::{eilenberg_maclane, PrimeField};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simpalg")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn dims(v: &Value, key: &str) -> Vec<u64> {
    v[key].as_array().expect("array").iter().map(|x| x.as_u64().unwrap()).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("simpalg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn even_sphere_is_polynomial() {
    let out = run(&["--char", "0", "pi-sphere", "-q", "1", "-n", "2", "-T", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(dims(&v, "dims"), [1, 0, 1, 0, 1, 0, 1]);
    assert_eq!(v["certified_degree"], 6);
}

#[test]
fn low_weight_bound_is_inconclusive() {
    let out = run(&["--char", "0", "pi-sphere", "-q", "1", "-n", "2", "-T", "6", "-W", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["stable_flags"][3], true);
    assert_eq!(v["stable_flags"][4], false);
}

#[test]
fn eilenberg_maclane_both_functors() {
    let out = run(&["--char", "2", "em", "-q", "2", "-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(dims(&v, "dims"), [0, 0, 2, 0, 0, 0, 0]);
    assert_eq!(v["dims"], v["dims_unnormalized"]);
}

#[test]
fn indecomposables_of_a_sphere() {
    let v = json(&run(&["--char", "2", "hq-sphere", "-q", "2", "-n", "3", "-T", "5"]));
    assert_eq!(dims(&v, "hq"), [0, 0, 0, 2, 0, 0]);
    assert_eq!(v["hq"], v["hq_cellular"]);
}

#[test]
fn rational_example_tables() {
    let out = run(&["--char", "0", "rational-example", "-r", "1", "-s", "2", "-T", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(dims(&v, "pi"), [1, 0, 1, 0, 0, 0]);
    assert_eq!(v["pi"], v["pi_cell_model"]);
    assert_eq!(v["rational_check"]["verdict"], "not_applicable");
}

#[test]
fn cofiber_of_the_identity_is_contractible() {
    let v = json(&run(&["cofiber", "--map", "identity", "-n", "2", "-T", "4"]));
    assert_eq!(dims(&v, "pi"), [1, 0, 0, 0, 0]);
    assert_eq!(v["triple"]["inequality_holds"], true);
}

#[test]
fn cofiber_needs_characteristic_zero() {
    let out = run(&["--char", "2", "cofiber", "--map", "identity", "-n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("characteristic 0"));
}

#[test]
fn audit_finds_a_verified_contradiction() {
    let out = run(&["--char", "2", "audit", "--profile", "2:1,3:1", "--pi-bound", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"]["outcome"], "contradiction");
    assert_eq!(v["verdict"]["verified"], true);
}

#[test]
fn audit_of_a_degree_one_profile_is_consistent() {
    let v = json(&run(&["--char", "3", "audit", "--profile", "1:2", "--pi-bound", "100"]));
    assert_eq!(v["verdict"]["outcome"], "consistent");
}

#[test]
fn audit_rejects_characteristic_zero() {
    let out = run(&["--char", "0", "audit", "--profile", "2:1", "--pi-bound", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn even_profile_with_finite_homotopy_is_forced_empty() {
    let v = json(&run(&["rational-check", "--profile", "2:1,4:1", "--pi-finite"]));
    assert_eq!(v["verdict"], "forced_empty");
}

#[test]
fn series_closed_form_and_transform() {
    let v = json(&run(&["series", "-q", "1", "-n", "3", "-M", "6"]));
    assert_eq!(dims(&v, "coeffs"), [1, 0, 0, 1, 0, 0, 0]);
    let out = run(&["--char", "2", "--output", "csv", "series", "-q", "1", "-n", "2", "-M", "6", "--asymptotic"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,phi,reference,ratio,stabilized\n"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let path = scratch("run.toml");
    std::fs::write(&path, "char = 2\noutput = \"csv\"\ntruncation = 4\n").unwrap();
    let cfg = path.to_str().unwrap();
    let out = run(&["--config", cfg, "em", "-q", "1", "-n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("degree,dim,dim_unnormalized"));
    assert_eq!(text.lines().count(), 1 + 5);
    let v = json(&run(&["--config", cfg, "--output", "json", "-T", "3", "em", "-q", "1", "-n", "1"]));
    assert_eq!(v["field"], 2);
    assert_eq!(v["T"], 3);
}

#[test]
fn unknown_config_key_is_rejected() {
    let path = scratch("bad.toml");
    std::fs::write(&path, "colour = 1\n").unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "em", "-q", "1", "-n", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn zero_bounds_are_rejected() {
    assert_eq!(run(&["-W", "0", "pi-sphere", "-q", "1", "-n", "2"]).status.code(), Some(1));
}

#[test]
fn homotopy_of_a_json_object() {
    let f2 = PrimeField::new(2).unwrap();
    let k = eilenberg_maclane(&f2, 1, 2, 4).unwrap();
    let path = scratch("k.json");
    std::fs::write(&path, k.to_json().to_string()).unwrap();
    let v = json(&run(&["homotopy", "--input", path.to_str().unwrap()]));
    assert_eq!(dims(&v, "dims"), [0, 0, 1, 0]);
    assert_eq!(v["dims"], v["dims_unnormalized"]);
}

#[test]
fn randomized_check_passes_and_is_seeded() {
    let a = run(&["--char", "5", "--seed", "3", "check", "--count", "8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a)["failures"], 0);
    let b = run(&["--char", "5", "--seed", "3", "check", "--count", "8"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["--char", "5", "--seed", "4", "check", "--count", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn table_output_is_aligned() {
    let out = run(&["--output", "table", "pi-sphere", "-q", "1", "-n", "1", "-T", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("degree  dim  stable"));
}

#[test]
fn invalid_characteristic_is_rejected() {
    assert_eq!(run(&["--char", "4", "em", "-q", "1", "-n", "1"]).status.code(), Some(1));
}
