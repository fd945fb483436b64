//! End-to-end tests of the command-line interface: exit codes, file
//! round-trips, and byte-for-byte reproducibility of deterministic reports.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slupecki"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn check_on_symmetric_cycle_holds_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let c4 = dir.path().join("c4.dg");
    let out = run(&["family", "symmetric-cycle", "4", "-o", &path_str(&c4)]);
    assert!(out.status.success());
    let out = run(&["check", "slupecki", "-k", "2", "-i", &path_str(&c4)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("holds"));
}

#[test]
fn bmk_prints_the_value() {
    let out = run(&["bmk", "12", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "145");
}

#[test]
fn binary_witness_refusal_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let op = dir.path().join("f.op");
    let out = run(&["witness", "binary", "2", "6", "2", "-o", &path_str(&op)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("refused"), "stderr: {err}");
    assert!(!op.exists());
}

#[test]
fn witness_file_verifies_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let op = dir.path().join("f.op");
    let poset = dir.path().join("p.dg");
    assert!(run(&["witness", "binary", "2", "3", "2", "-o", &path_str(&op)])
        .status
        .success());
    assert!(run(&["family", "ordinal-sum", "2", "3", "2", "-o", &path_str(&poset)])
        .status
        .success());
    let out = run(&["verify", "op", "-i", &path_str(&poset), "--op", &path_str(&op)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"is_polymorphism\": true"));
    assert!(text.contains("\"surjective\": true"));
}

#[test]
fn inconclusive_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.dg");
    assert!(run(&["family", "ordinal-sum", "2", "5", "2", "-o", &path_str(&p)])
        .status
        .success());
    let out = run(&[
        "check",
        "slupecki",
        "-k",
        "2",
        "--budget-nodes",
        "10",
        "-i",
        &path_str(&p),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("inconclusive"));
}

#[test]
fn unknown_flag_exits_one() {
    let out = run(&["--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn usage_error_in_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dg");
    std::fs::write(&bad, "n 0\n").unwrap();
    let out = run(&["check", "slupecki", "-k", "2", "-i", &path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("line 1"), "stderr: {err}");
}

#[test]
fn deterministic_reports_reproduce_payloads() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.dg");
    assert!(run(&["family", "chorded4", "-o", &path_str(&g)]).status.success());
    let run_once = || {
        let out = run(&["--json", "check", "slupecki", "-k", "2", "-i", &path_str(&g)]);
        assert_eq!(out.status.code(), Some(0));
        let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(report["deterministic"], serde_json::json!(true));
        serde_json::to_string(&report["payload"]).unwrap()
    };
    let a = run_once();
    let b = run_once();
    assert_eq!(a, b, "payload reproduces byte for byte");
    assert!(a.contains("\"holds\":true"));
}

#[test]
fn hom_count_and_graph_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.dg");
    assert!(run(&["family", "chorded4", "-o", &path_str(&g)]).status.success());
    let out = run(&["hom", "count", "-i", &path_str(&g)]);
    assert!(stdout(&out).starts_with("11 homomorphisms"));

    let homdg = dir.path().join("hom.dg");
    let out = run(&["hom", "graph", "-i", &path_str(&g), "-o", &path_str(&homdg)]);
    assert!(out.status.success());
    assert!(homdg.exists());
    let sidecar = PathBuf::from(format!("{}.map", homdg.display()));
    let map = std::fs::read_to_string(sidecar).unwrap();
    assert_eq!(map.lines().count(), 11);
    assert!(map.lines().next().unwrap().starts_with("0 "));
}

#[test]
fn pinned_hom_count() {
    let dir = tempfile::tempdir().unwrap();
    let edge = dir.path().join("edge.dg");
    let h4 = dir.path().join("h4.dg");
    assert!(run(&["family", "path", "+", "-o", &path_str(&edge)]).status.success());
    assert!(run(&["family", "hn", "4", "-o", &path_str(&h4)]).status.success());
    let out = run(&[
        "hom",
        "count",
        "-i",
        &path_str(&edge),
        "--target",
        &path_str(&h4),
        "--pin",
        "0=0",
    ]);
    assert!(stdout(&out).starts_with("3 homomorphisms"));
}

#[test]
fn gadget_verify_with_explicit_spec() {
    let dir = tempfile::tempdir().unwrap();
    let h4 = dir.path().join("h4.dg");
    let edge = dir.path().join("edge.dg");
    assert!(run(&["family", "hn", "4", "-o", &path_str(&h4)]).status.success());
    assert!(run(&["family", "path", "+", "-o", &path_str(&edge)]).status.success());
    let out = run(&[
        "--json",
        "gadget",
        "verify",
        "-i",
        &path_str(&h4),
        "--gadget",
        &path_str(&edge),
        "--pins",
        "0",
        "--u",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["payload"]["valid"], serde_json::json!(true));
    assert_eq!(report["payload"]["rows"].as_array().unwrap().len(), 4);
    assert!(report["inputs"].as_array().unwrap().len() == 2);
}

#[test]
fn topo_summary() {
    let dir = tempfile::tempdir().unwrap();
    let g3 = dir.path().join("g3.dg");
    assert!(run(&["family", "gn", "6", "-o", &path_str(&g3)]).status.success());
    let out = run(&["--json", "topo", "-i", &path_str(&g3)]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["payload"]["euler_characteristic"], serde_json::json!(2));
    assert_eq!(report["payload"]["counts"], serde_json::json!([6, 12, 8]));
}

#[test]
fn threaded_check_flags_non_deterministic_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.dg");
    assert!(run(&["family", "ordinal-sum", "2", "2", "2", "-o", &path_str(&p)])
        .status
        .success());
    let out = run(&[
        "--json",
        "--threads",
        "2",
        "check",
        "slupecki",
        "-k",
        "2",
        "-i",
        &path_str(&p),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["deterministic"], serde_json::json!(false));
    assert_eq!(report["payload"]["holds"], serde_json::json!(false));
    assert_eq!(report["payload"]["canonical_witness"], serde_json::json!(false));
}

#[test]
fn bmk_table_sweep_csv() {
    let out = run(&["bmk", "2", "2", "--table", "11", "11", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,k,b,mu"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 100);
    for row in rows {
        let cells: Vec<usize> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[2], cells[0] * cells[1], "row {row}");
    }
}

#[test]
fn hyphen_leading_orientation_words() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.dg");
    let out = run(&["family", "path", "--word=-+s", "-o", &path_str(&p)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&p).unwrap();
    assert_eq!(text, "n 4\n1 0\n1 2\n2 3\n3 2\n");
}
