//! Exit codes, diagnostics and report determinism of the `toroidal` binary.

use std::process::{Command, Output};

const SMALL: [&str; 8] = ["--modes", "1", "--energy-cap", "1", "--charge-cap", "2", "--word-depth", "1"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toroidal")).args(args).output().expect("binary runs")
}

fn verify(extra: &[&str]) -> Output {
    let mut args = vec!["verify"];
    args.extend_from_slice(&SMALL);
    args.extend_from_slice(extra);
    run(&args)
}

fn tables_dir() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/tables").to_string()
}

#[test]
fn rank_m_one_is_a_config_error() {
    let out = run(&["verify", "-m", "1", "-n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("type D(m,n) requires m>1"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_flags_exit_two() {
    for args in [
        vec!["--variant", "typo"],
        vec!["--relations", "7"],
        vec!["--format", "yaml"],
        vec!["--variant", "file=/nonexistent/table.txt"],
        vec!["-n", "0"],
    ] {
        let out = verify(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn malformed_table_file_exits_two() {
    let path = std::env::temp_dir().join("toroidal-cli-bad.table");
    std::fs::write(&path, "m = 2\nn = 1\nvariant = broken\ncentral = -1\nplus 0 = :e1\n").unwrap();
    let out = verify(&["--variant", &format!("file={}", path.display())]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(path).ok();
}

#[test]
fn corrected_passes_and_as_printed_fails() {
    let ok = verify(&["--variant", "corrected"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = verify(&["--variant", "as-printed"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert!(text.contains("FAIL"));
}

#[test]
fn shipped_table_file_passes() {
    for (m, n) in [("2", "1"), ("2", "2"), ("3", "1")] {
        let file = format!("file={}/corrected-m{m}-n{n}.txt", tables_dir());
        let out = verify(&["-m", m, "-n", n, "--variant", &file, "--relations", "2,3,4"]);
        assert_eq!(out.status.code(), Some(0), "{m},{n}");
    }
}

#[test]
fn json_reports_are_deterministic_and_follow_the_schema() {
    let args = ["-m", "2", "-n", "2", "--format", "json", "--relations", "3,5c"];
    let a = verify(&args);
    let b = verify(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["config"]["m"], 2);
    assert_eq!(doc["config"]["caps"]["energy"], 1);
    let results = doc["results"].as_array().unwrap();
    assert_eq!(doc["summary"]["checked"].as_u64().unwrap() as usize, results.len());
    assert_eq!(doc["summary"]["failed"], 0);
    assert!(results.iter().all(|r| r["status"] == "pass" && r.get("lhs").is_none()));
}

#[test]
fn failures_carry_both_sides() {
    let out = verify(&["--variant", "as-printed", "--format", "json", "--relations", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let fail = doc["results"].as_array().unwrap().iter().find(|r| r["status"] == "fail").unwrap();
    assert!(fail.get("lhs").is_some() && fail.get("rhs").is_some());
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join("toroidal-cli-report.json");
    let out = verify(&["--format", "json", "--relations", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["summary"]["failed"], 0);
    std::fs::remove_file(path).ok();
}

#[test]
fn table_command_matches_shipped_files() {
    for (m, n) in [("2", "1"), ("2", "2"), ("3", "1")] {
        for variant in ["as-printed", "corrected"] {
            let out = run(&["table", "-m", m, "-n", n, "--variant", variant]);
            assert_eq!(out.status.code(), Some(0));
            let shipped = std::fs::read_to_string(format!("{}/{variant}-m{m}-n{n}.txt", tables_dir())).unwrap();
            assert_eq!(String::from_utf8(out.stdout).unwrap(), shipped, "{variant} {m},{n}");
        }
    }
}
