//! End-to-end runs of the binary: outputs, exit codes, reproducibility.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridposet")).args(args).env_remove("GRIDPOSET_THREADS").output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gridposet"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn la_strong_vee3_on_three_by_four() {
    let v = json(&run(&["la", "--grid", "3x4", "--poset", "vee:3", "--mode", "strong"]));
    assert_eq!(v["value"], 10);
    assert_eq!(v["witness"]["points"].as_array().unwrap().len(), 10);
    assert_eq!(v["witness"]["dims"], serde_json::json!([3, 4]));
}

#[test]
fn sat_strong_pair_is_max_side() {
    let v = json(&run(&["sat", "--grid", "3x4", "--poset", "vee:2", "--poset", "wedge:2", "--mode", "strong"]));
    assert_eq!(v["value"], 4);
}

#[test]
fn construct_weak_vee_family() {
    let v = json(&run(&["construct", "--family", "vee-weak", "--k", "12", "--s", "8"]));
    let pts = v["points"].as_array().unwrap();
    let first_row = pts.iter().filter(|p| p[0] == 1).count();
    assert_eq!(first_row, 1);
    let out = run(&["construct", "--family", "vee-border", "--k", "3", "--l", "4", "--render"]);
    assert!(out.status.success());
    assert!(!out.stdout.is_empty());
}

#[test]
fn contains_reads_stdin() {
    let fam = r#"{"dims":[3,3],"points":[[1,1],[1,2],[2,1]]}"#;
    let v = json(&run_stdin(&["contains", "--family", "-", "--poset", "vee:2", "--mode", "strong"], fam));
    assert_eq!(v["free"], false);
    assert_eq!(v["size"], 3);
    assert_eq!(v["copies"][0]["map"]["a"], serde_json::json!([1, 1]));
}

#[test]
fn matrix_commands() {
    let v = json(&run(&["matrix", "ex", "--n", "3", "--m", "3", "--pattern", "J:3"]));
    assert_eq!(v["value"], 8);
    let v = json(&run(&["matrix", "contains", "--host", "rows:110/011/101", "--pattern", "J:2"]));
    assert_eq!(v["contains"], true);
}

#[test]
fn bridge_and_levels() {
    let v = json(&run(&["bridge", "verify", "--nprime", "4", "--d", "2"]));
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    let v = json(&run(&["levels", "--grid", "3x3"]));
    assert_eq!(v["width"], 3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["la", "--grid", "7x7", "--poset", "vee:2"]).status.code(), Some(1));
    assert_eq!(run(&["la", "--grid", "3x3", "--poset", "nonsense:2"]).status.code(), Some(1));
    assert_eq!(run(&["report", "thm4", "--max", "99"]).status.code(), Some(1));
    assert_eq!(run(&["report", "thm8", "--max", "3"]).status.code(), Some(0));
}

#[test]
fn csv_report_has_header_and_rows() {
    let out = run(&["report", "prop6", "--max", "3", "--format", "csv", "--canonical"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "instance,quantity,value,relation,expected,source,match,wall_ms");
    assert!(lines.all(|l| l.ends_with(",true,0")));
}

#[test]
fn canonical_output_is_byte_stable_across_threads() {
    let a = run(&["report", "thm8", "--max", "3", "--canonical"]);
    let b = run(&["report", "thm8", "--max", "3", "--canonical", "--threads", "4"]);
    let c = Command::new(env!("CARGO_BIN_EXE_gridposet"))
        .args(["report", "thm8", "--max", "3", "--canonical"])
        .env("GRIDPOSET_THREADS", "3")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let a = run(&["la", "--grid", "4x4", "--poset", "diamond:2", "--canonical"]);
    let b = run(&["la", "--grid", "4x4", "--poset", "diamond:2", "--canonical"]);
    assert_eq!(a.stdout, b.stdout);
}
