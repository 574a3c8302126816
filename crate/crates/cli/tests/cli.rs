use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn milnor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_milnor")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = milnor(&all);
    (out.status.code().unwrap(), serde_json::from_slice(&out.stdout).unwrap())
}

#[test]
fn nu_member_of_dlog() {
    let out = milnor(&["--field", "p=2,e=1,vars=x", "nu-member", "1 * dlog(x)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("true"));
    let (code, v) = json(&["--field", "p=2,e=1,vars=x", "nu-member", "1 * dlog(x)"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["member"], true);
}

#[test]
fn not_in_nu_is_a_negative_verdict() {
    let (code, v) = json(&["--field", "p=2,e=1,vars=x", "nu-member", "x*dlog(x)"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["member"], false);
    let (code, _) = json(&["--field", "p=2,e=1,vars=x", "decompose-nu", "x*dlog(x)"]);
    assert_eq!(code, 1);
}

#[test]
fn analyze_desk_hypersurface() {
    let (code, v) = json(&["--field", "p=2,e=1,vars=x,y", "hypersurface", "analyze", "T1^2 + x*T2^2 + y"]);
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!(r["n"], 2);
    assert_eq!(r["gens"], serde_json::json!(["x", "y"]));
    assert_eq!(r["function_field"]["basis"], serde_json::json!(["x", "t2", "s"]));
}

#[test]
fn decompose_top_degree_form() {
    let (code, v) = json(&["decompose-nu", "x/(x+1) * dlog(x)"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["symbols"], serde_json::json!([["x+1"]]));
    assert_eq!(v["result"]["extension_degree"], 1);
    assert_eq!(v["result"]["verified"], true);
}

#[test]
fn kernel_decompose_certificates() {
    let (code, v) = json(&[
        "--field",
        "p=2,e=1,vars=x,y,z",
        "kernel-decompose",
        "--a",
        "y,z",
        "dlog(x+y)^dlog(y)^dlog(z) + dlog(x)^dlog(y)^dlog(z)",
    ]);
    assert_eq!(code, 0);
    let certs = v["result"]["certificates"].as_array().unwrap();
    assert!(!certs.is_empty());
    for c in certs {
        assert_eq!(c["contains"], serde_json::json!([true, true]));
        assert_eq!(c["in_wedge_ideal"], true);
    }
    let (code, v) = json(&["--field", "p=2,e=1,vars=x,y", "kernel-decompose", "--a", "y", "dlog(x)"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["in_wedge_ideal"], false);
}

#[test]
fn parse_errors_exit_two_with_position() {
    let (code, v) = json(&["is-exact", "x +"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "error");
    assert_eq!(v["error"]["kind"], "Parse");
    assert_eq!(v["error"]["column"], 4);
    assert_eq!(milnor(&["--field", "p=7,vars=x", "selftest"]).status.code(), Some(2));
    assert_eq!(milnor(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn degree_guard_exits_three() {
    let out = milnor(&["--max-degree", "3", "is-exact", "x^10*dlog(x)"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exactness_verdicts() {
    assert_eq!(milnor(&["--field", "p=2,vars=x,y", "is-exact", "x^2*y*dlog(y)"]).status.code(), Some(0));
    assert_eq!(milnor(&["--field", "p=2,vars=x,y", "is-exact", "dlog(x)^dlog(y)"]).status.code(), Some(1));
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_milnor"))
        .args(["--json", "--field", "p=3,vars=x", "nu-member", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"2*dlog(x^2+1)\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["member"], true);
}

#[test]
fn extension_field_elements() {
    let (code, v) = json(&["--field", "p=2,e=2,vars=x,modulus=w^2+w+1", "dlog", "{w*x, x+w}"]);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["field"]["e"], 2);
    assert_eq!(v["result"]["degree"], 2);
}

#[test]
fn kernel_check_is_reproducible() {
    let args = ["--seed", "7", "--trials", "5", "--field", "p=2,vars=x,y", "hypersurface", "kernel-check", "--m", "2", "T1^2 + x*T2^2 + y"];
    let a = milnor(&[&["--json"], &args[..]].concat());
    let b = milnor(&[&["--json"], &args[..]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["result"]["ok"], true);
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn kernel_check_single_symbol() {
    let base = ["--field", "p=2,vars=x,y", "hypersurface", "kernel-check", "--m", "2", "T1^2 + x*T2^2 + y"];
    let (code, v) = json(&[&base[..], &["--symbol", "{x*y, y}"]].concat());
    assert_eq!(code, 0);
    assert_eq!(v["result"]["predicate"], true);
    assert_eq!(v["result"]["restriction_zero"], true);
    let (code, v) = json(&["--field", "p=2,vars=x,y", "hypersurface", "kernel-check", "--m", "1", "--symbol", "{y}", "T1^2 + x*T2^2 + y"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["predicate"], false);
    assert_eq!(v["result"]["restriction_zero"], false);
}

#[test]
fn selftest_passes() {
    let (code, v) = json(&["--trials", "8", "selftest"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["ok"], true);
}
