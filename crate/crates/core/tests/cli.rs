use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use boundent::protocol::be_strategy;
use boundent::states::rho_be;
use serde_json::Value;

fn boundent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boundent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(args: &[&str]) -> Value {
    let out = boundent(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn state_info_reports_rho_be() {
    let v = json_stdout(&["state-info"]);
    assert!((v["report"]["ccnr"].as_f64().unwrap() - 1.5).abs() < 1e-10);
    assert_eq!(v["report"]["is_ppt"], Value::Bool(true));
    assert!((v["witness_closed_form"].as_f64().unwrap() - 0.375).abs() < 1e-12);
}

#[test]
fn maximally_mixed_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mixed.json");
    let mut lambdas = vec![0.0; 16];
    lambdas[0] = 0.25;
    let file = serde_json::json!({"n_copies": 1, "lambdas": lambdas, "convention": "k=4i+j+1"});
    fs::write(&path, file.to_string()).unwrap();
    let v = json_stdout(&["state-info", path_str(&path)]);
    assert!((v["report"]["ccnr"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((v["witness_closed_form"].as_f64().unwrap() - 0.0625).abs() < 1e-12);
}

#[test]
fn malformed_state_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"lambdas\": 3}").unwrap();
    assert_eq!(boundent(&["state-info", path_str(&path)]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(boundent(&["state-info", path_str(&missing)]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(boundent(&["witness", "--copies", "0"]).status.code(), Some(2));
    assert_eq!(boundent(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(boundent(&["witness", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(boundent(&["ccnr-search", "--dim", "5"]).status.code(), Some(2));
    assert_eq!(boundent(&["seesaw", "--kind", "quantum", "--dim", "1"]).status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(boundent(&["--help"]).status.code(), Some(0));
    assert_eq!(boundent(&["verify", "--help"]).status.code(), Some(0));
}

#[test]
fn witness_writes_csv_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = boundent(&["witness", "--format", "csv", "--out", path_str(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "value");
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert!((rows[0][0].parse::<f64>().unwrap() - 0.375).abs() < 1e-10);
}

#[test]
fn scaling_csv_rows() {
    let out = boundent(&["scaling", "--n-max", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "1,0.375,0.25,6,0.6");
    assert_eq!(lines[2], "2,0.140625,0.0625,36,0.428571428571");
}

#[test]
fn strategy_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("be.json");
    let file = be_strategy(&rho_be()).unwrap().to_file();
    fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let v = json_stdout(&["witness", "--strategy", path_str(&path)]);
    assert!((v["value"].as_f64().unwrap() - 0.375).abs() < 1e-10);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"kind\": \"prepared_states\"}").unwrap();
    assert_eq!(boundent(&["witness", "--strategy", path_str(&bad)]).status.code(), Some(2));
}

#[test]
fn output_is_identical_across_worker_counts() {
    let args = |w: &'static str| ["seesaw", "--kind", "quantum", "--dim", "4", "--restarts", "3", "--iters", "60", "--workers", w];
    let one = boundent(&args("1"));
    let three = boundent(&args("3"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);

    let sampled = |w: &'static str| ["witness", "--copies", "2", "--samples", "300", "--method", "brute", "--seed", "5", "--workers", w];
    let a = boundent(&sampled("1"));
    let b = boundent(&sampled("2"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_is_echoed_and_changes_samples() {
    let a = json_stdout(&["witness", "--copies", "2", "--method", "brute", "--samples", "200", "--seed", "1"]);
    let b = json_stdout(&["witness", "--copies", "2", "--method", "brute", "--samples", "200", "--seed", "2"]);
    assert_eq!(a["seed"], Value::from(1));
    assert_ne!(a["value"], b["value"]);
}

#[test]
fn seesaw_summary_is_appended() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.csv");
    for _ in 0..2 {
        let out = boundent(&[
            "seesaw", "--kind", "classical", "--dim", "4", "--restarts", "2", "--summary", path_str(&summary),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = fs::read_to_string(&summary).unwrap();
    assert_eq!(text.lines().count(), 3, "{text}");
}

#[test]
fn verify_passes_on_fast_checks() {
    let out = boundent(&["verify", "--checks", "1,2,3,4,5,6,7"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.matches("[PASS]").count(), 7);
}

#[test]
fn swapped_convention_also_passes() {
    assert_eq!(boundent(&["verify", "--convention", "swapped", "--checks", "1,2"]).status.code(), Some(0));
}

#[test]
fn negative_controls_fail_verification() {
    let corrupt = boundent(&["verify", "--corrupt-signs", "--checks", "1"]);
    assert_eq!(corrupt.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&corrupt.stdout).contains("[FAIL]"));
    assert_eq!(boundent(&["verify", "--convention", "zero-based", "--checks", "1"]).status.code(), Some(1));
}

#[test]
fn verify_writes_results_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let out = boundent(&["verify", "--checks", "7", "--out", path_str(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.to_string().contains("overhead dimension"));
}
