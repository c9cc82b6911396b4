use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tracedist::channel::TraceBatch;
use tracedist::{BitString, CircleParams};

fn tracedist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tracedist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tracedist-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn generate_k1() {
    let v = json(&tracedist(&["generate", "--k", "1", "--prefix", ""]));
    assert_eq!(v["x"], "1001110");
    assert_eq!(v["y"], "0111001");
    assert_eq!(v["meta"]["family"], "hard");
    assert_eq!(v["meta"]["k"], 1);
}

#[test]
fn generate_even_k_is_a_usage_error() {
    let out = tracedist(&["generate", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn generate_random_prefix_is_reproducible() {
    let args = [
        "generate",
        "--k",
        "3",
        "--prefix-random",
        "40",
        "--seed",
        "7",
    ];
    let a = stdout(&tracedist(&args));
    assert_eq!(a, stdout(&tracedist(&args)));
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["x"].as_str().unwrap().len(), 83);
    assert_eq!(v["meta"]["prefix_len"], 40);
    let other = stdout(&tracedist(&[
        "generate",
        "--k",
        "3",
        "--prefix-random",
        "40",
        "--seed",
        "8",
    ]));
    assert_ne!(a, other);
}

#[test]
fn generate_then_analyze_round_trips() {
    let path = temp("k1.json");
    let p = path.to_str().unwrap();
    stdout(&tracedist(&[
        "generate", "--k", "1", "--p", "1/2", "--out", p,
    ]));
    let v = json(&tracedist(&["analyze", "--pair", p, "--p", "1/2"]));
    assert_eq!(v["x"], "1001110");
    assert_eq!(v["y"], "0111001");
    assert_eq!(v["multiplicity"], 3);
    assert_eq!(v["pte_degree"], 2);
    assert_eq!(v["edit_distance"], 4);
    let lo = v["supremum"]["lower"].as_f64().unwrap();
    let hi = v["supremum"]["upper"].as_f64().unwrap();
    assert!(lo <= hi);
}

#[test]
fn analyze_small_pairs() {
    let v = json(&tracedist(&["analyze", "--x", "10", "--y", "01"]));
    assert_eq!(v["multiplicity"], 1);
    assert_eq!(v["blocks"]["status"], "found");
    let out = tracedist(&["analyze", "--x", "101", "--y", "101"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strings must differ"));
    let text = stdout(&tracedist(&[
        "analyze", "--x", "10", "--y", "01", "--format", "text",
    ]));
    assert!(text.contains("multiplicity = 1"));
}

#[test]
fn bad_inputs_exit_with_2() {
    for args in [
        vec!["analyze", "--x", "10", "--y", "012"],
        vec!["analyze", "--x", "10", "--y", "01", "--p", "1"],
        vec!["analyze", "--x", "10", "--y", "01", "--grid", "4"],
        vec!["sample", "--string", "10", "--p", "abc"],
        vec!["analyze", "--pair", "/nonexistent/pair.json"],
        vec!["frobnicate"],
    ] {
        assert_eq!(tracedist(&args).status.code(), Some(2), "{args:?}");
    }
    let bad = temp("bad.json");
    std::fs::write(&bad, r#"{"x": "10", "y": "011"}"#).unwrap();
    let out = tracedist(&["analyze", "--pair", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_matches_library() {
    let args = [
        "sample", "--string", "1001110", "--p", "0.5", "--num", "3", "--seed", "42",
    ];
    let text = stdout(&tracedist(&args));
    assert_eq!(text, stdout(&tracedist(&args)));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "# n=7 p=1/2 seed=42");
    let x: BitString = "1001110".parse().unwrap();
    let batch = TraceBatch::sample(&x, &CircleParams::half(), 42, 3);
    let expected: Vec<String> = batch.traces().iter().map(|t| t.to_string()).collect();
    assert_eq!(&lines[1..], expected.as_slice());
}

#[test]
fn distinguish_from_trace_file() {
    let pair = temp("d-pair.json");
    let traces = temp("d-traces.txt");
    let (pair, traces) = (pair.to_str().unwrap(), traces.to_str().unwrap());
    stdout(&tracedist(&["generate", "--k", "1", "--out", pair]));
    stdout(&tracedist(&[
        "sample", "--pair", pair, "--which", "y", "--p", "1/2", "-T", "50000", "--seed", "5",
        "--out", traces,
    ]));
    let v = json(&tracedist(&[
        "distinguish",
        "--pair",
        pair,
        "--traces",
        traces,
        "--method",
        "potential",
    ]));
    assert_eq!(v["choice"], "Y");
    assert_eq!(v["method"], "potential");
    assert_eq!(v["k"], 3);
    assert_eq!(v["T"], 50000);
    let m = json(&tracedist(&[
        "distinguish",
        "--pair",
        pair,
        "--traces",
        traces,
        "--method",
        "mean",
    ]));
    assert_eq!(m["choice"], "Y");
    assert!(m.get("k").is_none());
}

#[test]
fn distinguish_streaming() {
    let pair = temp("s-pair.json");
    let pair = pair.to_str().unwrap();
    std::fs::write(pair, r#"{"x": "10", "y": "01"}"#).unwrap();
    let args = [
        "distinguish",
        "--pair",
        pair,
        "--simulate",
        "x",
        "-T",
        "100000",
        "--seed",
        "1",
    ];
    let a = stdout(&tracedist(&args));
    assert_eq!(a, stdout(&tracedist(&args)));
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["choice"], "X");
    assert_eq!(v["k"], 1);
}

#[test]
fn sweep_emits_sorted_csv() {
    let text = stdout(&tracedist(&[
        "sweep", "--family", "hard", "--k", "5,1,3", "--p", "0.5", "--padded",
    ]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "family,k,n,sup_lo,sup_hi,multiplicity,pte_degree,l1_separation"
    );
    assert_eq!(lines.len(), 4);
    let rows: Vec<Vec<&str>> = lines[1..].iter().map(|l| l.split(',').collect()).collect();
    let ks: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(ks, ["1", "3", "5"]);
    let mults: Vec<&str> = rows.iter().map(|r| r[5]).collect();
    assert_eq!(mults, ["3", "5", "7"]);
    let ratio = |r: &Vec<&str>| r[4].parse::<f64>().unwrap() / r[7].parse::<f64>().unwrap();
    assert!(ratio(&rows[0]) > ratio(&rows[1]) && ratio(&rows[1]) > ratio(&rows[2]));
}

#[test]
fn output_files_are_byte_identical() {
    let (a, b) = (temp("same-a.csv"), temp("same-b.csv"));
    for path in [&a, &b] {
        stdout(&tracedist(&[
            "sweep",
            "--family",
            "intro",
            "--k",
            "1,2",
            "--out",
            path.to_str().unwrap(),
        ]));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
