//! End-to-end runs of the `vsparse` binary: artifact layout, exit codes,
//! and the gen / sparsify / verify / replay chain.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_vsparse")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir()
        .join("vsparse-cli-tests")
        .join(format!("{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn path(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn lb_grid_chain_exits_zero_and_keeps_nonterminals() {
    let dir = scratch("lb");
    let stem = path(&dir.join("lb"));
    let out = path(&dir.join("out"));
    assert!(run(&[
        "gen", "--family", "lb-grid", "--k", "16", "--seed", "1", "--out", &stem
    ])
    .status
    .success());
    let manifest = std::fs::read_to_string(dir.join("lb.json")).unwrap();
    assert!(manifest.contains("\"family\": \"lb-grid\""));
    let graph = format!("{stem}.graph");
    assert!(run(&["sparsify", "--mode", "reach", "--in", &graph, "--out", &out])
        .status
        .success());
    let stats = std::fs::read_to_string(dir.join("out.stats.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stats).unwrap();
    assert!(parsed["output"]["nonterminals"].as_u64().unwrap() >= 9);
    let sparse = format!("{out}.graph");
    let verify = run(&["verify", "--mode", "reach", "--in", &graph, "--in", &sparse]);
    assert_eq!(verify.status.code(), Some(0));
    let replay = run(&["replay", "--mode", "reach", "--in", &graph, "--in", &out]);
    assert_eq!(replay.status.code(), Some(0));
}

#[test]
fn os_cut_chain_verifies_and_replays() {
    let dir = scratch("cut");
    let stem = path(&dir.join("g"));
    let out = path(&dir.join("s"));
    assert!(run(&[
        "gen", "--family", "os", "--seed", "42", "--n", "16", "--k", "4", "--mode", "cut",
        "--out", &stem
    ])
    .status
    .success());
    let graph = format!("{stem}.graph");
    assert!(run(&["sparsify", "--mode", "cut", "--in", &graph, "--out", &out])
        .status
        .success());
    for file in ["s.graph", "s.log", "s.stats.json"] {
        assert!(dir.join(file).exists(), "{file} missing");
    }
    let sparse = format!("{out}.graph");
    let verify = run(&["verify", "--mode", "cut", "--in", &graph, "--in", &sparse]);
    assert_eq!(verify.status.code(), Some(0));
    let replay = run(&["replay", "--mode", "cut", "--in", &graph, "--in", &out]);
    assert_eq!(replay.status.code(), Some(0));

    // Tampering with the recorded log must fail the replay.
    let log_path = dir.join("s.log");
    let log = std::fs::read_to_string(&log_path).unwrap();
    std::fs::write(&log_path, log.replace("\"stage\"", "\"staged\"")).unwrap();
    let replay = run(&["replay", "--mode", "cut", "--in", &graph, "--in", &out]);
    assert_eq!(replay.status.code(), Some(1));
}

#[test]
fn corrupted_sparsifier_fails_verification_with_report() {
    let dir = scratch("bad");
    let stem = path(&dir.join("g"));
    let out = path(&dir.join("s"));
    run(&[
        "gen", "--family", "os", "--seed", "9", "--n", "12", "--k", "3", "--mode", "distance",
        "--out", &stem,
    ]);
    let graph = format!("{stem}.graph");
    run(&["sparsify", "--mode", "distance", "--in", &graph, "--out", &out]);
    let sparse_path = dir.join("s.graph");
    let text = std::fs::read_to_string(&sparse_path).unwrap();
    // Double one edge weight.
    let bumped: String = text
        .lines()
        .map(|l| {
            if let Some(rest) = l.strip_prefix("e ") {
                let mut toks: Vec<String> = rest.split(' ').map(str::to_string).collect();
                let w = toks.last().unwrap().clone();
                *toks.last_mut().unwrap() = format!("{w}0");
                format!("e {}\n", toks.join(" "))
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    std::fs::write(&sparse_path, bumped).unwrap();
    let sparse = path(&sparse_path);
    let report_path = path(&dir.join("report.json"));
    let verify = run(&[
        "verify", "--mode", "distance", "--in", &graph, "--in", &sparse, "--out", &report_path,
    ]);
    assert_eq!(verify.status.code(), Some(1));
    let report = String::from_utf8(verify.stdout).unwrap();
    assert!(report.contains("\"equivalent\": false"));
    assert!(report.contains("\"mismatches\""));
    assert!(std::fs::read_to_string(&report_path)
        .unwrap()
        .contains("\"equivalent\": false"));
}

#[test]
fn usage_and_input_errors_exit_two() {
    let dir = scratch("usage");
    // Missing mandatory seed.
    let out = run(&["gen", "--family", "os", "--out", &path(&dir.join("x"))]);
    assert_eq!(out.status.code(), Some(2));
    // Verify wants exactly two inputs.
    let out = run(&["verify", "--mode", "cut", "--in", "nowhere.graph"]);
    assert_eq!(out.status.code(), Some(2));
    // Unreadable input path.
    let out = run(&[
        "sparsify", "--mode", "cut", "--in", "nowhere.graph", "--out", &path(&dir.join("y")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Directed input into the undirected pipeline.
    let stem = path(&dir.join("dag"));
    run(&["gen", "--family", "dag", "--seed", "3", "--n", "10", "--k", "3", "--out", &stem]);
    let out = run(&[
        "sparsify", "--mode", "cut", "--in", &format!("{stem}.graph"),
        "--out", &path(&dir.join("z")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flow_verify_runs_with_worker_threads() {
    let dir = scratch("flow");
    let stem = path(&dir.join("g"));
    let out = path(&dir.join("s"));
    run(&[
        "gen", "--family", "os", "--seed", "7", "--n", "12", "--k", "3", "--mode", "flow",
        "--out", &stem,
    ]);
    let graph = format!("{stem}.graph");
    run(&["sparsify", "--mode", "flow", "--in", &graph, "--out", &out]);
    let sparse = format!("{out}.graph");
    let verify = run(&[
        "verify", "--mode", "flow", "--in", &graph, "--in", &sparse, "--t", "6", "--seed", "5",
        "--jobs", "3",
    ]);
    assert_eq!(verify.status.code(), Some(0));
    let report = String::from_utf8(verify.stdout).unwrap();
    assert!(report.contains("\"entries_compared\": 6"));
}

#[test]
fn stats_reports_shape_flags() {
    let dir = scratch("stats");
    let stem = path(&dir.join("d"));
    run(&["gen", "--family", "dag", "--seed", "11", "--n", "14", "--k", "3", "--out", &stem]);
    let out = run(&["stats", "--in", &format!("{stem}.graph")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["acyclic"], serde_json::Value::Bool(true));
    assert_eq!(parsed["stats"]["k"].as_u64(), Some(3));
}
