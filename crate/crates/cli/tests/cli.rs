use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use bidfair::io::write_instance;
use bidfair::rational::{format_rational, int, parse_rational, rat};
use bidfair::shares::aps_unit_demand;
use bidfair::valuation::{AdditiveValuation, UnitDemandValuation};
use bidfair::Instance;

fn bidfair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bidfair"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bidfair-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> String {
    let path = scratch(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn share(doc: &Value, agent: usize, key: &str) -> String {
    doc["shares"][agent][key].as_str().unwrap().to_string()
}

#[test]
fn sylvester_k1_mms_is_two() {
    let inst = bidfair(&["gen", "original-negative", "--k", "1"]);
    assert!(inst.status.success());
    let path = write("k1.json", std::str::from_utf8(&inst.stdout).unwrap());
    let out = bidfair(&["shares", &path, "--agent", "0"]);
    assert!(out.status.success());
    assert_eq!(share(&json(&out), 0, "mms"), "2/1");
}

#[test]
fn unit_demand_shares_match_the_closed_form() {
    let values = [int(5), int(3), int(3), int(1), int(0)];
    let b = rat(2, 5);
    let inst = Instance::new(
        (0..5).map(bidfair::Item).collect(),
        vec![
            bidfair::Agent::new(0, b.clone(), UnitDemandValuation::from_values(&values).unwrap()),
            bidfair::Agent::new(1, rat(3, 5), AdditiveValuation::from_values(&values).unwrap()),
        ],
    )
    .unwrap();
    let path = write("ud.json", &write_instance(&inst));
    let out = bidfair(&["shares", &path, "--agent", "0"]);
    assert!(out.status.success());
    assert_eq!(
        share(&json(&out), 0, "aps"),
        format_rational(&aps_unit_demand(&values, &b))
    );
}

#[test]
fn single_agent_shares_are_the_whole_value() {
    let inst = bidfair(&["gen", "random", "--n", "1", "--m", "4", "--seed", "9"]);
    let path = write("single.json", std::str::from_utf8(&inst.stdout).unwrap());
    let doc = json(&bidfair(&["shares", &path]));
    assert_eq!(share(&doc, 0, "mms"), share(&doc, 0, "total"));
    assert_eq!(share(&doc, 0, "aps"), share(&doc, 0, "total"));
}

#[test]
fn size_guard_is_an_input_error() {
    let inst = bidfair(&["gen", "random", "--n", "2", "--m", "6"]);
    let path = write("guard.json", std::str::from_utf8(&inst.stdout).unwrap());
    let out = bidfair(&["shares", &path, "--max-items", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size guard"));
}

#[test]
fn play_is_deterministic_and_reverifies() {
    let inst = bidfair(&["gen", "random", "--n", "3", "--m", "6", "--seed", "2"]);
    let path = write("play.json", std::str::from_utf8(&inst.stdout).unwrap());
    let args = [
        "play", &path, "--tiebreak", "random", "--seed", "5", "--strategy", "1=random",
    ];
    let a = bidfair(&args);
    let b = bidfair(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = write("play-report.json", std::str::from_utf8(&a.stdout).unwrap());
    let out = bidfair(&["verify", &report]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "pass");
}

#[test]
fn tampered_reports_fail() {
    let inst = bidfair(&["gen", "random", "--n", "2", "--m", "4", "--seed", "1"]);
    let path = write("tamper.json", std::str::from_utf8(&inst.stdout).unwrap());
    let out = bidfair(&["play", &path]);
    let mut doc = json(&out);
    doc["transcript"]["rounds"][0]["winner"] = Value::from(
        1 - doc["transcript"]["rounds"][0]["winner"].as_u64().unwrap(),
    );
    let report = write("tampered.json", &doc.to_string());
    assert_eq!(bidfair(&["verify", &report]).status.code(), Some(1));
}

#[test]
fn altruistic_rule_breaches_fail() {
    // One agent spends her whole budget in round 1, exceeding 10/27 of it,
    // and must not bid again.
    let inst = bidfair(&["gen", "random", "--n", "2", "--m", "4", "--seed", "3", "--equal"]);
    let path = write("alt.json", std::str::from_utf8(&inst.stdout).unwrap());
    let out = bidfair(&[
        "play", &path, "--mode", "altruistic", "--strategy", "0=all-in", "--strategy", "1=passive",
    ]);
    assert!(out.status.code().unwrap() <= 1);
    let mut doc = json(&out);
    let rounds = doc["transcript"]["rounds"].as_array_mut().unwrap();
    assert_eq!(rounds[0]["winner"], 0);
    assert!(rounds.len() >= 2);
    rounds[1]["bids"]["0"] = Value::from("0/1");
    let report = write("alt-forged.json", &doc.to_string());
    let verdict = bidfair(&["verify", &report]);
    assert_eq!(verdict.status.code(), Some(1));
}

#[test]
fn alloc_reports_every_guess() {
    let inst = bidfair(&["gen", "random", "--n", "3", "--m", "5", "--seed", "7"]);
    let path = write("alloc.json", std::str::from_utf8(&inst.stdout).unwrap());
    let out = bidfair(&["alloc", &path, "--epsilon", "1/10"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(!doc["guesses"].as_array().unwrap().is_empty());
    for row in doc["guarantee"].as_array().unwrap() {
        assert_eq!(row["pass"], true);
        assert_eq!(
            parse_rational(row["target"].as_str().unwrap()).unwrap()
                <= parse_rational("1/1").unwrap(),
            true
        );
    }
    let report = write("alloc-report.json", std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(bidfair(&["verify", &report]).status.code(), Some(0));
    let bad = bidfair(&["alloc", &path, "--epsilon", "3/2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn lpcert_reports_both_sides_of_the_bound() {
    let out = bidfair(&["lpcert", "--z", "27/10", "--n", "100"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["result"]["status"], "infeasible");
    assert_eq!(doc["result"]["verified"], true);
    assert_eq!(doc["result"]["combined_constant"], "-9/500");
    assert_eq!(doc["rows"][1]["relation"], "<");
    assert_eq!(doc["rows"][1]["rhs"], "-17/10");
    let below = json(&bidfair(&["lpcert", "--z", "51/20", "--n", "inf"]));
    assert_eq!(below["result"]["status"], "feasible");
    assert_eq!(bidfair(&["lpcert", "--z", "2", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn stdin_and_stdout_pipe() {
    use std::io::Write;
    let inst = bidfair(&["gen", "random", "--n", "2", "--m", "3"]);
    let mut child = Command::new(env!("CARGO_BIN_EXE_bidfair"))
        .args(["shares", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&inst.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["shares"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_input_is_an_input_error() {
    let path = write("bad.json", "{\"version\": 1, \"items\": [0], \"agents\": []}");
    assert_eq!(bidfair(&["shares", &path]).status.code(), Some(2));
    let path = write("bad2.json", "not json");
    assert_eq!(bidfair(&["play", &path]).status.code(), Some(2));
    assert_eq!(bidfair(&["verify", &path]).status.code(), Some(2));
}

#[test]
fn scripted_negative_run_reports_the_shortfall() {
    let out = bidfair(&["gen", "altruistic-negative", "--k", "1", "--run"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["guarantee"][0]["value"], "1/1");
    assert_eq!(doc["guarantee"][0]["ratio"], "1/2");
}
