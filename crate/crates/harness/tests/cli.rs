//! Command-line behaviour: exit codes, report formats and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use learnaug_harness::{load_jsonl, CSV_HEADER};

fn learnaug(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_learnaug")).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("learnaug-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = learnaug(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(learnaug(&[]).status.code(), Some(1));
    assert_eq!(learnaug(&["--help"]).status.code(), Some(0));
}

#[test]
fn passing_suite_exits_zero_with_csv_rows() {
    let out = learnaug(&["run", "--problem", "caching", "--suite", "caching-realizable", "--seeds", "0..2", "--ell", "4", "--k", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 3);
    assert!(lines[1..].iter().all(|l| l.starts_with("caching,majority-realizable,") && l.ends_with(",pass")));
}

#[test]
fn same_config_gives_identical_reports() {
    let args = ["run", "--suite", "caching-agnostic", "--seeds", "0..5", "--mu", "5", "--format", "jsonl"];
    let a = learnaug(&args);
    let b = learnaug(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let records = load_jsonl(&stdout(&a)).unwrap();
    assert_eq!(records.len(), 6);
}

#[test]
fn failing_bound_exits_two() {
    // a single machine leaves the robust bound 8·log2 m at zero
    let out = learnaug(&["run", "--suite", "lb-robust", "--m", "1", "--seeds", "0..1"]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL [lb-robust-ratio]"));
}

#[test]
fn config_file_with_flag_override() {
    let path = tmp("config.json");
    std::fs::write(&path, r#"{"suite": "sched-two-length", "seeds": "0..9", "params": {"ell": [2], "n": [20], "lambda": ["1/2"]}}"#).unwrap();
    let out = learnaug(&["run", "--config", path.to_str().unwrap(), "--seeds", "0..3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1 + 4);
    std::fs::write(&path, r#"{"suite": "sched-two-length", "bogus": true}"#).unwrap();
    assert_eq!(learnaug(&["run", "--config", path.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(learnaug(&["run", "--suite", "no-such-suite"]).status.code(), Some(1));
    assert_eq!(learnaug(&["run", "--suite", "sched-inversions", "--problem", "lb"]).status.code(), Some(1));
}

#[test]
fn jsonl_report_round_trip_and_check() {
    let path = tmp("run.jsonl");
    let out = learnaug(&["run", "--suite", "sched-round-robin", "--seeds", "0..4", "--format", "jsonl", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let records = load_jsonl(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(records.len(), 15);

    let csv = learnaug(&["report", "--input", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(stdout(&csv).lines().count(), 16);
    let again = learnaug(&["report", "--input", path.to_str().unwrap(), "--format", "jsonl"]);
    assert_eq!(load_jsonl(&stdout(&again)).unwrap(), records);

    let check = learnaug(&["check", "--input", path.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap().replacen("\"verdict\":\"pass\"", "\"verdict\":\"fail\"", 1);
    std::fs::write(&path, text).unwrap();
    assert_eq!(learnaug(&["check", "--input", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(learnaug(&["check", "--input", "/nonexistent/run.jsonl"]).status.code(), Some(1));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let out = learnaug(&["run", "--suite", "sched-inversions", "--seeds", "0..1", "--format", "csv", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn adversaries_print_load_and_verdict() {
    let out = learnaug(&["adversary", "--problem", "lb", "--ell", "4", "--c", "8", "--algo", "greedy"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("measured 8 ≥ bound 8: PASS"));
    let out = learnaug(&["adversary", "--problem", "sched", "--ell", "2", "--n", "8", "--algo", "index"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = learnaug(&["adversary", "--problem", "caching", "--ell", "4", "--k", "2", "--algo", "majority"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(learnaug(&["adversary", "--problem", "lb", "--algo", "nope"]).status.code(), Some(1));
}

#[test]
fn generators_emit_json() {
    let out = learnaug(&["gen", "--problem", "caching", "--generator", "planted", "--ell", "4", "--horizon", "30", "--mu", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let requests = v["requests"].as_array().unwrap();
    let planted = &v["hypotheses"][v["planted"].as_u64().unwrap() as usize];
    let distance = requests.iter().zip(planted.as_array().unwrap()).filter(|(a, b)| a != b).count();
    assert_eq!(distance, 5);
    let out = learnaug(&["gen", "--problem", "lb", "--generator", "error-target", "--tau", "3", "--n", "60"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = learnaug(&["gen", "--problem", "sched", "--generator", "two-length", "--lambda", "1/4"]);
    assert_eq!(out.status.code(), Some(0));
    // more edits than requests
    assert_eq!(learnaug(&["gen", "--problem", "caching", "--generator", "planted", "--horizon", "4", "--mu", "5"]).status.code(), Some(1));
}
