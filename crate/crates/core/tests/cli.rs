use std::process::{Command, Output};

use serde_json::Value;

fn qsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsym")).args(args).env_remove("QSYM_TOLERANCE").output().unwrap()
}

fn json(out: &[u8]) -> Value {
    serde_json::from_slice(out).unwrap()
}

#[test]
fn analyze_reports_type_and_classes() {
    let o = qsym(&["analyze", "--n", "5", "--s", "1,4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o.stdout);
    assert_eq!(v["k"], 2);
    assert_eq!(v["E"], serde_json::json!([1, 4]));
    assert_eq!(v["classes"], 3);
}

#[test]
fn invalid_input_exits_two_with_structured_error() {
    let o = qsym(&["analyze", "--n", "5", "--s", "1,2", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert_eq!(json(&o.stderr)["error"], "InvalidConnectionSet");

    let o = qsym(&["maximal", "--p", "11", "--order", "4", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o.stderr)["error"], "OrderDoesNotDivide");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(qsym(&["analyze", "--n", "5"]).status.code(), Some(1));
    assert_eq!(qsym(&["maximal", "--p", "5", "--order", "2", "--elements", "1,4"]).status.code(), Some(1));
    assert_eq!(qsym(&[]).status.code(), Some(1));
}

#[test]
fn certify_cycle_seven() {
    let o = qsym(&["certify", "--n", "7", "--s", "1,6", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o.stdout)["verdict"], "NoQuantumSymmetry");
    let text = String::from_utf8(qsym(&["certify", "--n", "7", "--s", "1,6"]).stdout).unwrap();
    assert!(text.starts_with("verdict: NoQuantumSymmetry"));
}

#[test]
fn witness_accepts_one_based_order() {
    let v = json(&qsym(&["witness", "--graph", "c4", "--order", "1,3,2,4", "--json"]).stdout);
    assert_eq!(v["commutes"], true);
    assert_eq!(v["vertex_order"], serde_json::json!([0, 2, 1, 3]));
    let v = json(&qsym(&["witness", "--graph", "x4", "--json"]).stdout);
    assert_eq!(v["verdict"], "HasQuantumSymmetry");
}

#[test]
fn tolerance_override() {
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_qsym"))
            .args(["analyze", "--n", "7", "--s", "1,6", "--json"])
            .env("QSYM_TOLERANCE", tol)
            .output()
            .unwrap()
    };
    let o = run("1e-6");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o.stdout)["numeric"]["tolerance"], 1e-6);
    assert_eq!(run("-1").status.code(), Some(2));
    assert_eq!(run("abc").status.code(), Some(1));
}

#[test]
fn atlas_and_scan_write_files() {
    let dir = std::env::temp_dir().join(format!("qsym-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let atlas = dir.join("atlas.csv");
    let o = qsym(&["atlas", "--p", "7", "--csv", "--out", atlas.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&atlas).unwrap();
    assert!(text.starts_with("p,representative,orbit_size,k,is_2maximal,verdict,"));
    assert_eq!(text.lines().count(), 1 + 4);

    let scan = dir.join("scan.jsonl");
    let o = qsym(&["scan", "--k", "2", "--pmax", "100", "--threads", "3", "--out", scan.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Value> =
        std::fs::read_to_string(&scan).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.first().unwrap()["p"], 5);
    assert_eq!(rows.last().unwrap()["p"], 97);
    assert!(rows.iter().all(|r| r["is_2maximal"] == true));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn scan_output_is_independent_of_threads() {
    let a = qsym(&["scan", "--k", "6", "--pmax", "600", "--threads", "1"]);
    let b = qsym(&["scan", "--k", "6", "--pmax", "600", "--threads", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bound_prints_integer() {
    assert_eq!(qsym(&["bound", "--k", "4"]).stdout, b"36\n");
}
