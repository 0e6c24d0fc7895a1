use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use upacket::lattices::{parse_golden_tables, Entry, LatticeKind, SubgroupKind, APPENDIX_TABLES};

fn params(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../params")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upacket"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn temp_params(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("upacket-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn level_file(d: u32) -> PathBuf {
    temp_params(
        &format!("level{d}.json"),
        &format!(
            r#"{{"q0": 3, "components": [{{"n": 1, "level": {d}, "beta_log": 2, "tame": 0, "omega": "+"}}]}}"#
        ),
    )
}

#[test]
fn packet_sizes() {
    let p = params("three_components.json");
    let v = json(&["packet", p.to_str().unwrap()]);
    assert_eq!(v["packet"]["members"].as_array().unwrap().len(), 4);
    let v = json(&["packet", params("single.json").to_str().unwrap()]);
    assert_eq!(v["packet"]["members"].as_array().unwrap().len(), 1);
}

#[test]
fn packet_output_is_deterministic() {
    let p = params("three_components.json");
    let a = run(&["packet", p.to_str().unwrap()]);
    let b = run(&["packet", p.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn packet_verify_checks_every_amendment() {
    let v = json(&[
        "packet",
        params("three_components.json").to_str().unwrap(),
        "--verify",
    ]);
    assert_eq!(v["oracle_checked"], 12);
}

#[test]
fn invalid_beta_names_the_invariant() {
    let out = run(&["packet", params("bad_beta.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("skew stratum condition"));
}

#[test]
fn malformed_json_is_invalid_input() {
    let p = temp_params("broken.json", r#"{"q0": 3, "components": [ {"n": 1} ]}"#);
    assert_eq!(run(&["packet", p.to_str().unwrap()]).status.code(), Some(2));
}

fn golden(lattice: LatticeKind, group: SubgroupKind, d: u32) -> Vec<Vec<String>> {
    let tables = parse_golden_tables(APPENDIX_TABLES).unwrap();
    let t = tables
        .iter()
        .find(|t| t.lattice == lattice && t.group == group && t.odd == (d % 2 == 1))
        .unwrap();
    t.instantiate(d)
        .iter()
        .map(|r| r.iter().map(|e: &Entry| e.to_string()).collect())
        .collect()
}

#[test]
fn filtration_tables() {
    let f3 = level_file(3);
    let v = json(&[
        "filtration",
        f3.to_str().unwrap(),
        "--lattice",
        "Lambda",
        "--group",
        "H1",
    ]);
    let rows: Vec<Vec<String>> = serde_json::from_value(v["rows"].clone()).unwrap();
    assert_eq!(rows, golden(LatticeKind::Lambda, SubgroupKind::H1, 3));

    let f2 = level_file(2);
    let v = json(&[
        "filtration",
        f2.to_str().unwrap(),
        "--lattice",
        "Mz",
        "--group",
        "J1",
    ]);
    let rows: Vec<Vec<String>> = serde_json::from_value(v["rows"].clone()).unwrap();
    assert_eq!(rows, golden(LatticeKind::Mz, SubgroupKind::J1, 2));
}

#[test]
fn filtration_rejects_bad_input() {
    let f0 = params("depth_zero.json");
    let out = run(&[
        "filtration",
        f0.to_str().unwrap(),
        "--lattice",
        "Mz",
        "--group",
        "J1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let f1 = level_file(1);
    let out = run(&[
        "filtration",
        f1.to_str().unwrap(),
        "--lattice",
        "Nope",
        "--group",
        "J1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn amend_reports_all_routes() {
    let v = json(&[
        "amend",
        params("three_components.json").to_str().unwrap(),
        "--even",
        "1,2",
        "--i0",
        "2",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["oracle"], "Quadratic");
    assert_eq!(rows[1]["oracle"], "Trivial");
    assert_eq!(v["transfer"], "Quadratic");
    let out = run(&[
        "amend",
        params("three_components.json").to_str().unwrap(),
        "--even",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hecke_points() {
    let f = params("even_rank.json");
    let v = json(&["hecke", f.to_str().unwrap()]);
    assert_eq!(v["matching"], true);
    assert_eq!(
        v["reducibility_points"],
        serde_json::json!(["-1", "-1/2", "1/2", "1"])
    );
    let v = json(&["hecke", f.to_str().unwrap(), "--gl-tame", "1"]);
    assert_eq!(v["matching"], false);
    assert_eq!(
        v["reducibility_points"],
        serde_json::json!(["-1/2", "0", "0", "1/2"])
    );
}

#[test]
fn embeddings_listing() {
    let v = json(&[
        "embeddings",
        params("three_components.json").to_str().unwrap(),
    ]);
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn endoscopic_file() {
    let v = json(&["packet", params("endoscopic.json").to_str().unwrap()]);
    assert_eq!(v["datum"]["n1"], 1);
    assert_eq!(v["datum"]["n2"], 1);
    assert_eq!(v["factors"][0]["ids"], serde_json::json!([0]));
}

#[test]
fn verify_presets() {
    let report = std::env::temp_dir().join(format!("upacket-report-{}.txt", std::process::id()));
    let out = run(&[
        "verify",
        "--grid",
        "small",
        "--jobs",
        "2",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.lines().count() > 100);
    assert!(text
        .lines()
        .all(|l| l.split(' ').count() == 9 && l.ends_with(" yes")));

    assert_eq!(
        run(&["verify", "--grid", "appendix"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["verify", "--grid", "small", "--inject-fault"])
            .status
            .code(),
        Some(1)
    );
}
