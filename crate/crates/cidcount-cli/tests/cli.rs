//! End-to-end tests that spawn the real binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cidcount"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary spawns")
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cidcount-cli-{}-{}", tag, std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn generated_instances_round_trip_through_the_exact_counter() {
    let dir = workdir("roundtrip");
    let path = dir.join("demo.hg");
    let path = path.to_str().unwrap();

    let gen = run(&[
        "gen", "--n", "20", "--d", "2", "--m", "30", "--seed", "11", "--out", path,
    ]);
    assert_eq!(gen.status.code(), Some(0));

    // tau above the ordered count: the verdict is the exact count d! * m
    let report = json(&run(&["exact", path, "--tau", "128"]));
    let row = &report["per_trial"][0];
    assert_eq!(row["outcome"], "at_most");
    assert_eq!(row["value"], 60.0);
    assert_eq!(report["instance_summary"]["m"], 30);
    assert!(report["ledger"]["cid1"].as_u64().unwrap() > 0);
    assert_eq!(report["ledger"]["cid_equivalent"], report["ledger"]["cid1"]);
}

#[test]
fn estimate_brute_forces_small_instances_to_the_exact_count() {
    let dir = workdir("brute");
    let path = dir.join("small.hg");
    let path = path.to_str().unwrap();
    run(&[
        "gen", "--n", "18", "--d", "3", "--m", "25", "--seed", "5", "--out", path,
    ]);

    let report = json(&run(&["estimate", path, "--eps", "0.3", "--trials", "2"]));
    for row in report["per_trial"].as_array().unwrap() {
        assert_eq!(row["outcome"], "estimate");
        assert_eq!(row["value"], 25.0);
        assert_eq!(row["fallback_used"], true);
        assert_eq!(row["relative_error"], 0.0);
    }
    assert_eq!(report["aggregate"]["band_hit_rate"], 1.0);
}

#[test]
fn identical_run_specs_render_byte_identical_reports() {
    let dir = workdir("bytes");
    let path = dir.join("inst.hg");
    let path = path.to_str().unwrap();
    run(&[
        "gen", "--n", "24", "--d", "2", "--m", "40", "--seed", "7", "--out", path,
    ]);

    let args = [
        "estimate",
        path,
        "--eps",
        "0.4",
        "--trials",
        "3",
        "--seed",
        "9",
        "--fallback",
        "pipeline",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());

    let rough_args = ["rough", path, "--trials", "4", "--seed", "2"];
    assert_eq!(run(&rough_args).stdout, run(&rough_args).stdout);
}

#[test]
fn rough_reports_not_found_on_an_empty_instance() {
    let dir = workdir("empty");
    let path = dir.join("empty.hg");
    let path = path.to_str().unwrap();
    run(&[
        "gen", "--n", "16", "--d", "2", "--m", "0", "--seed", "1", "--out", path,
    ]);

    let report = json(&run(&["rough", path, "--trials", "3"]));
    for row in report["per_trial"].as_array().unwrap() {
        assert_eq!(row["outcome"], "not_found");
        assert_eq!(row["band_hit"], true);
    }
    assert_eq!(report["aggregate"]["band_hit_rate"], 1.0);
    assert_eq!(report["aggregate"]["mean"], 0.0);
}

#[test]
fn csv_rows_carry_every_config_field() {
    let dir = workdir("csv");
    let path = dir.join("inst.hg");
    let path = path.to_str().unwrap();
    run(&[
        "gen", "--n", "20", "--d", "2", "--m", "15", "--seed", "3", "--out", path,
    ]);

    let out = run(&["rough", path, "--trials", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for field in ["command", "instance", "oracle", "preset", "seed", "trials"] {
        assert!(header.contains(&field), "missing config column {field}");
    }
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!(row.starts_with("rough,"), "row lost its config echo: {row}");
        assert_eq!(row.split(',').count(), header.len());
    }
}

#[test]
fn claim_checks_pass_and_exit_zero() {
    let out = run(&[
        "verify-claims",
        "--class",
        "bucket-chain",
        "--seed",
        "1",
        "--trials",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["per_trial"][0]["pass"], true);
    assert_eq!(report["instance_summary"], serde_json::Value::Null);
}

#[test]
fn failed_claim_checks_exit_one() {
    // the end-to-end accuracy bound does not hold at bench scale
    let out = run(&[
        "verify-claims",
        "--class",
        "pipeline-accuracy",
        "--seed",
        "1",
        "--trials",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["per_trial"][0]["pass"], false);
}

#[test]
fn usage_and_parse_problems_exit_two() {
    let dir = workdir("errors");
    let bad = dir.join("bad.hg");
    std::fs::write(&bad, "2 24 40\n0 x\n").unwrap();
    let bad = bad.to_str().unwrap();

    let malformed = run(&["exact", bad, "--tau", "8"]);
    assert_eq!(malformed.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&malformed.stderr);
    assert!(
        stderr.contains("line 2"),
        "parse error names no line: {stderr}"
    );

    let good = dir.join("good.hg");
    let good_path = good.to_str().unwrap();
    run(&[
        "gen", "--n", "12", "--d", "2", "--m", "6", "--seed", "1", "--out", good_path,
    ]);
    let unknown_flag = run(&["rough", good_path, "--bogus"]);
    assert_eq!(unknown_flag.status.code(), Some(2));

    let bad_parts = run(&["exact", good_path, "--tau", "8", "--parts", "2x0-3;1x4-6"]);
    assert_eq!(bad_parts.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&bad_parts.stderr);
    assert!(stderr.contains("parts"), "no parameter name: {stderr}");

    let missing_seed = run(&[
        "gen", "--n", "12", "--d", "2", "--m", "6", "--out", good_path,
    ]);
    assert_eq!(missing_seed.status.code(), Some(2));
}
