use std::process::{Command, Output};

use serde_json::Value;

fn twoclosed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoclosed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = twoclosed(&all);
    let v = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (v, out.status.code().expect("exited"))
}

#[test]
fn rank_13_prints_seven() {
    let out = twoclosed(&["rank", "--p", "13"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.trim() == "7"), "{text}");
    let (v, code) = json(&["rank", "--p", "13"]);
    assert_eq!(code, 0);
    assert_eq!(v["certificates"][0]["evidence"]["rank"], 7);
}

#[test]
fn scan_finds_seven_and_thirteen() {
    let (v, code) = json(&["scan", "--max-prime", "500"]);
    assert_eq!(code, 0);
    assert_eq!(
        v["certificates"][0]["evidence"]["both_obstructed"],
        serde_json::json!([7, 13])
    );
    assert_eq!(v["run_config"]["max_prime"], 500);
}

#[test]
fn two_closed_at_five_verifies() {
    let (v, code) = json(&["verify", "two-closed", "--p", "5", "--m", "2"]);
    assert_eq!(code, 0);
    let c = &v["certificates"][0];
    assert_eq!(c["status"], "verified");
    assert_eq!(c["claim"], "two-closed");
    assert_eq!(c["evidence"]["intersection"]["order"], 16);
    assert_eq!(v["summary"]["verified"], 1);
}

#[test]
fn theorem_q5_covers_fourteen_unions_with_any_job_count() {
    let (one, code) = json(&["verify", "theorem-q5", "--jobs", "1"]);
    assert_eq!(code, 0);
    assert_eq!(one["certificates"][0]["evidence"]["proper_unions"], 14);
    let (four, _) = json(&["verify", "theorem-q5", "--jobs", "4"]);
    assert_eq!(one, four);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = [
        "verify", "cliques", "--p", "13", "--mu", "2,6,7,11", "--seed", "7", "--format", "json",
    ];
    let a = twoclosed(&args);
    let b = twoclosed(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["run_config"]["seed"], 7);
    assert_eq!(v["certificates"][0]["evidence"]["mode"], "sampled");
}

#[test]
fn timings_only_touch_elapsed_ms() {
    let (plain, _) = json(&["verify", "cross-ratio-table", "--p", "7"]);
    let (timed, _) = json(&["verify", "cross-ratio-table", "--p", "7", "--timings"]);
    assert_ne!(plain["run_config"], timed["run_config"]);
    assert_eq!(plain["certificates"], {
        let mut c = timed["certificates"].clone();
        c[0]["elapsed_ms"] = 0.into();
        c
    });
}

#[test]
fn a_refuted_certificate_exits_nonzero_and_names_the_claim() {
    let out = twoclosed(&["verify", "q17", "--mu", "1,2,8,9,15", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q17-rigid-union"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["refuted"], 1);
    assert_eq!(v["summary"]["first_failure"], "q17-rigid-union");
    assert_eq!(v["certificates"][0]["evidence"]["kind"], "failure");
}

#[test]
fn invalid_configs_exit_two() {
    for args in [
        &["verify", "cliques", "--p", "5", "--z", "6", "--mu", "1,2,3,4"][..],
        &["rank"],
        &["rank", "--p", "15"],
        &["verify", "theorem-q7", "--p", "5"],
        &["verify", "lemma", "no-such-lemma", "--p", "5"],
    ] {
        let out = twoclosed(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn oversized_scan_is_refuted_not_crashed() {
    let (v, code) = json(&["scan", "--max-prime", "20000"]);
    assert_eq!(code, 1);
    assert_eq!(v["certificates"][0]["status"], "refuted");
}

#[test]
fn single_lemma_reports_only_that_lemma() {
    let (v, code) = json(&["verify", "lemma", "cosets-meet-once", "--p", "5"]);
    assert_eq!(code, 0);
    let lemmas = v["certificates"][0]["evidence"]["lemmas"].as_array().unwrap();
    assert_eq!(lemmas.len(), 1);
    assert_eq!(lemmas[0]["lemma"], "cosets-meet-once");
}

#[test]
fn out_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = twoclosed(&[
        "suborbits",
        "--p",
        "5",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["certificates"][0]["evidence"]["total"], 625);
}
