// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dense-stream"));
    c.env_remove("DENSE_STREAM_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn planted_instance(dir: &Path) {
    let out = run(&[
        "generate",
        "--n",
        "10000",
        "--model",
        "concentrated",
        "--delta",
        "0.3",
        "--seed",
        "3",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let graph = dir.join("graph.txt");
    let stream = dir.join("stream.txt");
    let out = run(&[
        "stream",
        "--graph",
        graph.to_str().unwrap(),
        "--out",
        stream.to_str().unwrap(),
    ]);
    assert!(out.status.success());
}

#[test]
fn detect_on_empty_file_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.txt");
    std::fs::write(&path, "").unwrap();
    let out = run(&["detect", "--input", path.to_str().unwrap(), "--n", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["accept"], false);
}

#[test]
fn reconstruct_reports_scores() {
    let dir = tempfile::tempdir().unwrap();
    planted_instance(dir.path());
    let stream = dir.path().join("stream.txt");
    let truth = dir.path().join("truth.txt");
    let out = run(&[
        "reconstruct",
        "--input",
        stream.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
        "--threshold-coeff",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["accept"], true);
    assert!(v["score"]["recall"].as_f64().unwrap() > 0.5);
    assert!(v["score"].get("precision").is_some());
    assert_eq!(v["n"], 10000);
}

#[test]
fn seed_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    planted_instance(dir.path());
    let stream = dir.path().join("stream.txt");
    let args = ["stats", "--input", stream.to_str().unwrap(), "--k", "300"];
    let flag = bin().args(args).args(["--seed", "9"]).output().unwrap();
    let env = bin().args(args).env("DENSE_STREAM_SEED", "9").output().unwrap();
    let other = bin().args(args).env("DENSE_STREAM_SEED", "10").output().unwrap();
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["detect", "--bogus"]).status.code(), Some(64));
    assert_eq!(run(&[]).status.code(), Some(64));
    assert_eq!(
        run(&["detect", "--input", "/nonexistent/file", "--n", "10"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 x\n").unwrap();
    assert_eq!(
        run(&["stats", "--input", bad.to_str().unwrap(), "--k", "3"])
            .status
            .code(),
        Some(65)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn experiment_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "scenario = er-core\nn = 5000\nc1 = 2\ntrials = 3\nseed = 4\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "experiment",
        cfg.to_str().unwrap(),
        "--output",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(out_dir.join("report.json")).unwrap();
    let again = run(&[
        "experiment",
        cfg.to_str().unwrap(),
        "--output",
        out_dir.to_str().unwrap(),
    ]);
    assert!(again.status.success());
    assert_eq!(report, std::fs::read_to_string(out_dir.join("report.json")).unwrap());
    assert!(out_dir.join("trials.csv").exists());
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = dense_stream::harness::ExperimentConfig::parse(&text).unwrap();
        cfg.validate().unwrap();
    }
}

#[test]
fn dynamic_and_oracle_commands() {
    let dir = tempfile::tempdir().unwrap();
    let stream = dir.path().join("dyn.txt");
    let out = run(&[
        "dynamic",
        "--n",
        "20000",
        "--delta",
        "0.35",
        "--threshold-coeff",
        "0.1",
        "--tau",
        "40",
        "--lambda",
        "20",
        "--q",
        "300",
        "--uniform-steps",
        "40",
        "--concentrated-steps",
        "80",
        "--tail-steps",
        "20",
        "--stream-out",
        stream.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["estimate"]["windows_used"].is_array());
    let text = std::fs::read_to_string(&stream).unwrap();
    assert!(text.contains("# phase=concentrated step=41"));
    let out = run(&["oracle", "--graphs", "100"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);
}
