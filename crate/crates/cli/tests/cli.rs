use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn geogt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geogt")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    geogt(args).status.code().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = geogt(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["delta", "--input", "cycle:8", "--samples", "100"]), 64);
    assert_eq!(code(&["horoball", "--base", "path:10", "--samples", "100"]), 64);
    assert_eq!(code(&["pseudochar", "--corpus", "no-such-instance"]), 64);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn precondition_failures_exit_2() {
    assert_eq!(code(&["steinberg", "--system", "A2", "--alpha", "0", "--beta", "0"]), 2);
    assert_eq!(code(&["rootsys", "--system", "Q7"]), 2);
}

#[test]
fn budget_exhaustion_exits_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_geogt"))
        .env("GEOGT_MEMORY_BUDGET", "1K")
        .args(["delta", "--input", "path:200", "--exact"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn io_failures_exit_74() {
    assert_eq!(code(&["delta", "--input", "/nonexistent/graph.txt", "--exact"]), 74);
    assert_eq!(code(&["delta", "--input", "cycle:8", "--exact", "-o", "/nonexistent/dir/out.json"]), 74);
}

#[test]
fn csv_headers() {
    let out = geogt(&["--format", "csv", "rootsys", "--system", "B2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("alpha,beta,class"));
    assert_eq!(text.lines().count(), 1 + 8 * 8);

    let out = geogt(&[
        "--format", "csv", "horoball", "--base", "path:12", "--depth", "4", "--profile", "--depths", "2,4",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("depth,delta4"));
    assert_eq!(text.lines().count(), 3);
    assert!(String::from_utf8(out.stderr).unwrap().contains("sha256:"));
}

#[test]
fn fingerprint_covers_canonical_result() {
    let v = json(&["delta", "--input", "cycle:12", "--exact"]);
    let payload = serde_json::to_string(&v["result"]).unwrap();
    let hex: String = Sha256::digest(payload.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(v["fingerprint"], Value::String(format!("sha256:{hex}")));
    assert_eq!(v["result"]["delta"]["delta4"], "3");
    assert_eq!(v["command"], "delta");
}

#[test]
fn pseudochar_fields() {
    let v = json(&["pseudochar", "--corpus", "line-shift"]);
    let r = &v["result"];
    for key in ["eta", "q", "p", "defect_observed"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["p"]["g^1"]["p_hat"], "-2");
    assert_eq!(r["defect_observed"], "0");
}

#[test]
fn action_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let n = 40;
    let shift: Vec<i64> = (0..n).map(|v| if v + 1 < n { v + 1 } else { -1 }).collect();
    let spec = serde_json::json!({
        "space": format!("path:{n}"),
        "generators": [shift],
        "elements": {"t": "0", "t2": "0 0", "ti": "-0"},
        "basepoint": 20,
        "ray": (20..n).collect::<Vec<_>>(),
        "window": 4,
        "n": 8,
        "delta": 0,
    });
    let path = dir.path().join("action.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    let v = json(&["classify", "--action", path.to_str().unwrap()]);
    let text = v["result"].to_string();
    assert!(text.contains("hyperbolic"), "{text}");
    let v = json(&["pseudochar", "--action", path.to_str().unwrap()]);
    assert_eq!(v["result"]["p"]["t2"]["p_hat"], "-2");
}

#[test]
fn reports_identical_across_worker_counts() {
    for args in [
        vec!["delta", "--input", "grid:8x8", "--samples", "5000", "--seed", "3"],
        vec!["horoball", "--base", "tree:40:2", "--depth", "6", "--profile", "--depths", "3,6"],
        vec!["fiber", "--instance", "two-lines:12"],
    ] {
        let mut a = vec!["--workers", "1"];
        a.extend(&args);
        let mut b = vec!["--workers", "3"];
        b.extend(&args);
        assert_eq!(geogt(&a).stdout, geogt(&b).stdout, "{args:?}");
    }
}
