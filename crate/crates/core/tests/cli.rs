use std::path::Path;
use std::process::{Command, Output};

fn syncomp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syncomp"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_writes_code_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = syncomp(dir.path(), &["build", "--code", "surface", "--d", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("9 1 3\n"));
    let o = syncomp(dir.path(), &["build", "--code", "concat", "--base", "steane", "--levels", "2"]);
    assert!(stdout(&o).starts_with("49 1 9\n"));
    let o = syncomp(dir.path(), &["build", "--code", "tetrahedral", "--out", "t.code"]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(dir.path().join("t.code")).unwrap().starts_with("15 1 3\n"));
}

#[test]
fn compress_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    syncomp(dir.path(), &["build", "--code", "surface", "--d", "5", "--out", "s5.code"]);
    let o = syncomp(
        dir.path(),
        &["compress", "--code-file", "s5.code", "--strategy", "row_partition_repetition", "--rounds", "5", "--out", "s.json"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = stdout(&o);
    assert!(table.contains("per_round\t20"));
    assert!(table.contains("total\t100"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert!(json.is_object());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = syncomp(dir.path(), &["certify", "--check", "tetrahedral4"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("PASS"));
    let budget = syncomp(dir.path(), &["certify", "--check", "theorem1", "--code", "surface", "--d", "5", "--budget", "10"]);
    assert_eq!(budget.status.code(), Some(2));
    let usage = syncomp(dir.path(), &["compress", "--code", "surface", "--d", "3", "--strategy", "nope"]);
    assert_eq!(usage.status.code(), Some(3));
    let inapplicable = syncomp(dir.path(), &["compress", "--code", "surface", "--d", "3", "--strategy", "row_partition_repetition"]);
    assert_eq!(inapplicable.status.code(), Some(3));
    let missing = syncomp(dir.path(), &["simulate", "--config", "absent.json"]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn classical_distance_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = syncomp(dir.path(), &["certify", "--check", "classical_distance", "--classical", "bch", "--length", "15", "--delta", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["lines"][0], "distance 5");
}

#[test]
fn simulate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
        "codes": [{"family": "surface", "d": 3}, {"family": "surface", "d": 5}],
        "strategy": "identity",
        "rounds": 1,
        "noise": "code_capacity",
        "p_grid": [0.05, 0.1, 0.2, 0.3],
        "decoder": "lookup",
        "shots": {"rule": "fixed", "shots": 4000},
        "seed": 5,
        "shards": 3,
        "output_dir": "run"
    }"#;
    std::fs::write(dir.path().join("cfg.json"), config).unwrap();
    let o = syncomp(dir.path(), &["--threads", "2", "simulate", "--config", "cfg.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ledger = std::fs::read_to_string(dir.path().join("run/ledger.csv")).unwrap();
    assert!(ledger.starts_with("code,d,strategy,rounds,noise,p,decoder,shots,failures,decode_failures,seed,shard"));
    assert_eq!(ledger.lines().count(), 1 + 2 * 4 * 3);
    let o = syncomp(dir.path(), &["analyze", "--ledger", "run/ledger.csv", "--out", "report"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report/report.json")).unwrap()).unwrap();
    for key in ["crossings", "pseudothresholds", "slopes"] {
        assert!(report[key].is_array());
    }
    let p = report["crossings"][0]["p"].as_f64().unwrap();
    assert!((0.05..0.3).contains(&p));
    let tsv: Vec<_> = std::fs::read_dir(dir.path().join("report"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "tsv"))
        .collect();
    assert_eq!(tsv.len(), 2);
}
