//! Runs `profinity selftest` twice and prints one line per acceptance criterion.

use std::fs;
use std::process::Command;

use serde_json::Value;

fn selftest(out: &std::path::Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_profinity"))
        .args(["selftest", "--format", "json", "--out"])
        .arg(out)
        .status()
        .expect("profinity runs");
    assert!(status.code().is_some_and(|c| c <= 1), "selftest crashed: {status}");
    fs::read(out).expect("selftest writes its report")
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let first = selftest(&dir.path().join("first.json"));
    let second = selftest(&dir.path().join("second.json"));
    let report: Value = serde_json::from_slice(&first).unwrap();

    let mut failed = Vec::new();
    for c in report["criteria"].as_array().unwrap() {
        let id = c["id"].as_u64().unwrap();
        let passed = c["passed"].as_bool().unwrap();
        let mut line = format!(
            "criterion {id:>2}: {}  {} ({} cases, {} failures)",
            if passed { "PASS" } else { "FAIL" },
            c["name"].as_str().unwrap(),
            c["cases"],
            c["failure_count"],
        );
        if id == 10 {
            let same = first == second;
            line.push_str(&format!("; two selftest runs byte-identical: {same}"));
            if !same {
                failed.push(id);
            }
        }
        println!("{line}");
        for f in c["failures"].as_array().unwrap() {
            println!("    {}", f.as_str().unwrap());
        }
        if !passed {
            failed.push(id);
        }
    }
    failed.dedup();
    assert_eq!(report["criteria"].as_array().unwrap().len(), 10);
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
