use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hadwiger")).args(args).output().expect("spawn hadwiger")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn exact_fixture_values() {
    assert_eq!(json(&["mu", "--k", "1", "--input", &fixture("box_3x2.json")])["value"], 5.0);
    assert_eq!(json(&["chi", "--input", &fixture("open_interval.json")])["value"], -1);
    assert_eq!(json(&["chi", "--input", &fixture("unit_square.json")])["value"], 1);
    let tent = fixture("tent.json");
    assert_eq!(json(&["euler-int", "--input", &tent])["value"], 1.0);
    assert_eq!(json(&["euler-int", "--bound", "upper", "--input", &tent])["value"], -1.0);
}

#[test]
fn csv_lists_every_k() {
    let out = run(&["mu", "--format", "csv", "--input", &fixture("box_3x2.json")]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "k,mu\n0,1.0\n1,5.0\n2,6.0\n");
}

#[test]
fn image_input() {
    let v = json(&["euler-int", "--image", &fixture("small.pgm")]);
    assert!(v["value"].is_number());
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["chi", "--input", &fixture("open_interval.json"), "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["value"], -1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"kind\": \"grid-region\",\n").unwrap();
    let out = run(&["chi", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(run(&["chi", "--input", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["mu", "--k", "5", "--input", &fixture("box_3x2.json")]).status.code(), Some(3));
    assert_eq!(run(&["mu"]).status.code(), Some(3));
}

#[test]
fn sampled_output_ignores_thread_count() {
    let square = fixture("unit_square.json");
    let base = ["mu-mc", "--k", "1", "--samples", "500", "--seed", "3", "--input", &square];
    let one = run(&[&base[..], &["--threads", "1"]].concat()).stdout;
    let three = run(&[&base[..], &["--threads", "3"]].concat()).stdout;
    assert!(!one.is_empty());
    assert_eq!(one, three);
}
