use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name]
        .iter()
        .collect();
    path.to_string_lossy().into_owned()
}

fn popmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_popmatch"))
        .args(args)
        .env_remove("POPMATCH_MAX_ENUM")
        .output()
        .expect("binary runs")
}

fn json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("stdout is one JSON document")
}

fn pairs(matching: &Value) -> Vec<(String, String)> {
    matching["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["agent"].as_str().unwrap().into(),
                e["job"].as_str().unwrap().into(),
            )
        })
        .collect()
}

fn expected(list: &[(&str, &str)]) -> Vec<(String, String)> {
    list.iter().map(|&(a, b)| (a.into(), b.into())).collect()
}

#[test]
fn verify_popular_matching() {
    let out = popmatch(&[
        "verify",
        &fixture("f2.json"),
        "--matching",
        &fixture("f2_all.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["popular"], Value::Bool(true));
    assert!(report.get("witness").is_none());
}

#[test]
fn verify_unpopular_matching_emits_witness() {
    let out = popmatch(&[
        "verify",
        &fixture("f4.json"),
        "--matching",
        &fixture("f4_m.json"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let report = json(&out);
    assert_eq!(report["popular"], Value::Bool(false));
    assert_eq!(
        pairs(&report["witness"]["matching"]),
        expected(&[("a1", "b2"), ("a2", "b1")])
    );
    assert_eq!(report["witness"]["delta"], Value::from(-2));
}

#[test]
fn solve_with_costs() {
    let out = popmatch(&["solve", &fixture("f4_costs.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(
        pairs(&report["matching"]),
        expected(&[("a1", "b2"), ("a2", "b1")])
    );
    assert_eq!(report["cost"].to_string(), "10");
    assert_eq!(report["enumerated"], Value::from(2));
    assert_eq!(report["popular"], Value::from(1));
}

#[test]
fn solve_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = popmatch(&[
        "solve",
        &fixture("f1.json"),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(
        pairs(&report["matching"]),
        expected(&[("a", "b'"), ("a'", "b")])
    );
}

#[test]
fn stable_plain_and_colorful() {
    let out = popmatch(&["stable", &fixture("f1.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(pairs(&json(&out)), expected(&[("a", "b")]));

    let out = popmatch(&["stable", &fixture("f4.json"), "--colorful"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(pairs(&doc), expected(&[("a1", "b2"), ("a2", "b1")]));
    assert!(doc["edges"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["color"] == 1));
}

#[test]
fn compare_reports_per_vertex_votes() {
    let out = popmatch(&[
        "compare",
        &fixture("f4.json"),
        "--matching",
        &fixture("f4_n.json"),
        "--matching",
        &fixture("f4_m.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["delta"], Value::from(2));
    let votes: i64 = report["per_vertex"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["vote"].as_i64().unwrap())
        .sum();
    assert_eq!(votes, 2);

    let out = popmatch(&[
        "compare",
        &fixture("f4.json"),
        "--matching",
        &fixture("f4_n.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn enumerate_all_and_popular() {
    let out = popmatch(&["enumerate", &fixture("f4.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["count"], Value::from(2));
    assert_eq!(report["matchings"].as_array().unwrap().len(), 2);

    let out = popmatch(&["enumerate", &fixture("f4.json"), "--popular-only"]);
    let report = json(&out);
    assert_eq!(report["popular"], Value::from(1));
    assert_eq!(
        pairs(&report["matchings"][0]),
        expected(&[("a1", "b2"), ("a2", "b1")])
    );
}

#[test]
fn enumeration_limit_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_popmatch"))
        .args(["enumerate", &fixture("f4.json")])
        .env("POPMATCH_MAX_ENUM", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
    assert!(out.stdout.is_empty());
}

#[test]
fn reduce_and_lift() {
    let dir = tempfile::tempdir().unwrap();
    let gstar = dir.path().join("gstar.json");
    let out = popmatch(&[
        "reduce",
        &fixture("f2.json"),
        "--gstar",
        "--out",
        gstar.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&gstar).unwrap()).unwrap();
    assert_eq!(doc["colors"], Value::from(4));
    assert_eq!(doc["agents"][0]["preferences"].as_array().unwrap().len(), 8);

    let gm = dir.path().join("gm.json");
    let out = popmatch(&[
        "reduce",
        &fixture("f1.json"),
        "--gm",
        "--matching",
        &fixture("f1_m.json"),
        "--out",
        gm.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&gm).unwrap()).unwrap();
    let colored: usize = doc["agents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["preferences"].as_array().unwrap().len())
        .sum();
    assert_eq!(colored, 6);
    assert_eq!(
        pairs(&doc["realization"]),
        expected(&[("a#1", "b'#1"), ("a'#1", "b#1")])
    );

    let out = popmatch(&[
        "lift",
        &fixture("f4.json"),
        "--matching",
        &fixture("f4_n.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(doc["edges"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["color"] == 1));

    let out = popmatch(&[
        "lift",
        &fixture("f4.json"),
        "--matching",
        &fixture("f4_m.json"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn gen_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for name in ["one.json", "two.json"] {
        let path = dir.path().join(name);
        let out = popmatch(&[
            "gen",
            "--seed",
            "1",
            "--agents",
            "3",
            "--jobs",
            "3",
            "--max-cap",
            "2",
            "--density",
            "0.8",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        texts.push(std::fs::read_to_string(&path).unwrap());
        let out = popmatch(&["validate", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["perfect_matchable"], Value::Bool(true));
    }
    assert_eq!(texts[0], texts[1]);

    let path = dir.path().join("bad.json");
    let out = popmatch(&[
        "gen",
        "--seed",
        "1",
        "--agents",
        "0",
        "--jobs",
        "3",
        "--max-cap",
        "2",
        "--density",
        "0.8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_inputs_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ \"agents\": [").unwrap();
    assert_eq!(
        popmatch(&["validate", broken.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let asymmetric = dir.path().join("asym.json");
    std::fs::write(
        &asymmetric,
        r#"{"agents":[{"name":"a","capacity":1,"preferences":["b"]}],"jobs":[{"name":"b","capacity":1,"preferences":[]}]}"#,
    )
    .unwrap();
    let out = popmatch(&["validate", asymmetric.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("asymmetric"));

    assert_eq!(
        popmatch(&["validate", "/nonexistent/file.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(popmatch(&["frobnicate"]).status.code(), Some(1));
    // a non-perfect matching is rejected before verification
    let out = popmatch(&[
        "verify",
        &fixture("f1.json"),
        "--matching",
        &fixture("f1_s.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn infeasible_instance_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("star.json");
    std::fs::write(
        &path,
        r#"{"agents":[{"name":"v","capacity":1,"preferences":["u1","u2"]}],
            "jobs":[{"name":"u1","capacity":1,"preferences":["v"]},{"name":"u2","capacity":1,"preferences":["v"]}]}"#,
    )
    .unwrap();
    assert_eq!(
        popmatch(&["solve", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        popmatch(&["enumerate", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let out = popmatch(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["perfect_matchable"], Value::Bool(false));
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        vec!["solve", "f4_costs.json"],
        vec!["enumerate", "f2.json", "--popular-only"],
        vec!["stable", "f2.json", "--colorful"],
    ] {
        let file = fixture(args[1]);
        let mut full: Vec<&str> = vec![args[0], &file];
        full.extend(&args[2..]);
        assert_eq!(popmatch(&full).stdout, popmatch(&full).stdout);
    }
}

#[test]
fn in_process_run_matches_binary() {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let args = [
        "popmatch",
        "verify",
        &fixture("f4.json"),
        "--matching",
        &fixture("f4_n.json"),
    ];
    let code = popmatch_cli::run(args, &mut stdout, &mut stderr);
    assert_eq!(code, 0);
    assert_eq!(stdout, popmatch(&args[1..]).stdout);

    let mut stdout = Vec::new();
    assert_eq!(
        popmatch_cli::run(["popmatch", "--help"], &mut stdout, &mut stderr),
        0
    );
    assert!(String::from_utf8_lossy(&stdout).contains("Usage"));
}
