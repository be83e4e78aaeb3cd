//! Runs every acceptance criterion through the command-line entry point,
//! prints one line per criterion and renders the report.
//!
//! Criterion 9 has one sub-check that cannot hold: the unstable-period
//! threshold of the (γ, a) = (0.05, 1) profile is 2π/√(-λ) ≈ 3.81, while the
//! stated target 2π/1.9 ≈ 3.31 mixes in the limit root of a different
//! equation. The suite reports it as failing; this harness accepts exactly
//! that failure and nothing else.

use std::process::ExitCode;

use clap::Parser;
use couette_cli::args::Cli;
use couette_cli::error::CliError;
use couette_cli::report::{build_rows, Status};
use couette_cli::suite::CriterionResult;
use serde_json::Value;

const KNOWN_FAILURE: (u32, &str) = (9, "t_min_within_10pct");

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let out = dir.path().to_str().expect("utf-8 path");
    let cli = Cli::try_parse_from(["couette", "--out", out, "--seed", "2024", "suite"]).expect("valid arguments");
    let mut print = |line: &str| println!("{line}");
    let status = couette_cli::run(cli, &mut print);

    let text = std::fs::read_to_string(dir.path().join("acceptance.json")).expect("acceptance.json written");
    let record: Value = serde_json::from_str(&text).expect("valid JSON");
    let criteria: Vec<CriterionResult> =
        serde_json::from_value(record["outputs"]["criteria"].clone()).expect("criteria list");

    let mut problems = Vec::new();
    if criteria.len() != 10 {
        problems.push(format!("expected 10 criteria, got {}", criteria.len()));
    }
    for c in &criteria {
        let failed = c.failed_checks();
        let expected_failure = c.id == KNOWN_FAILURE.0;
        let ok = if expected_failure {
            failed == [KNOWN_FAILURE.1] && c.error.is_none() && c.seconds <= c.budget_seconds
        } else {
            c.passed
        };
        if !ok {
            problems.push(format!("criterion {} unexpected result: {}", c.id, c.line()));
        }
    }
    match status {
        Err(CliError::SuiteFailed { failed: 1, total: 10 }) => {}
        other => problems.push(format!("suite status {:?}, expected exactly one failing criterion", other.err())),
    }

    let (rows, _) = build_rows(&[dir.path().to_path_buf()]).expect("report rows");
    for r in &rows {
        let want = if r.id == KNOWN_FAILURE.0 { Status::Fail } else { Status::Pass };
        if r.status != want {
            problems.push(format!("report row {} is {:?}, expected {want:?}", r.id, r.status));
        }
    }

    let t_min = criteria.iter().find(|c| c.id == 9).and_then(|c| c.measured.get("t_min")).and_then(Value::as_f64);
    if let Some(t) = t_min {
        println!("note: criterion 9 T_min = {t:.4}, target 2π/1.9 = {:.4} ± 10%", 2.0 * std::f64::consts::PI / 1.9);
    }
    if problems.is_empty() {
        println!("acceptance: 9 of 10 criteria pass; the one failure is the documented T_min target");
        ExitCode::SUCCESS
    } else {
        for p in &problems {
            println!("acceptance problem: {p}");
        }
        ExitCode::FAILURE
    }
}
