//! Markdown summary of `acceptance.json` files from one or more result
//! directories. A criterion found in no directory is reported as
//! `MissingSuite`; earlier directories take precedence.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::ReportArgs;
use crate::commands::Run;
use crate::error::{CliError, Result};
use crate::output::Outcome;
use crate::suite::{CriterionResult, CRITERIA};
use crate::Context;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    MissingSuite,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub id: u32,
    pub name: String,
    pub status: Status,
    pub source: Option<PathBuf>,
    pub result: Option<CriterionResult>,
}

struct Found {
    dir: PathBuf,
    criteria: Vec<CriterionResult>,
    files: Vec<String>,
}

fn load(dir: &Path) -> Result<Option<Found>> {
    let path = dir.join("acceptance.json");
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let record: Value = serde_json::from_str(&text).map_err(|e| CliError::input(&path, e))?;
    let criteria = record
        .pointer("/outputs/criteria")
        .cloned()
        .ok_or_else(|| CliError::input(&path, "no outputs.criteria list"))?;
    let criteria: Vec<CriterionResult> = serde_json::from_value(criteria).map_err(|e| CliError::input(&path, e))?;
    let files = record
        .get("files")
        .and_then(|f| serde_json::from_value(f.clone()).ok())
        .unwrap_or_default();
    Ok(Some(Found { dir: dir.to_path_buf(), criteria, files }))
}

/// CSV files named by the records, with their directory.
pub type DataFiles = Vec<(PathBuf, String)>;

pub fn build_rows(dirs: &[PathBuf]) -> Result<(Vec<ReportRow>, DataFiles)> {
    let found: Vec<Found> = dirs.iter().map(|d| load(d)).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let rows = CRITERIA
        .iter()
        .map(|&(id, name, _)| {
            let hit = found.iter().find_map(|f| f.criteria.iter().find(|c| c.id == id).map(|c| (f, c)));
            match hit {
                Some((f, c)) => ReportRow {
                    id,
                    name: name.to_string(),
                    status: if c.passed { Status::Pass } else { Status::Fail },
                    source: Some(f.dir.clone()),
                    result: Some(c.clone()),
                },
                None => ReportRow { id, name: name.to_string(), status: Status::MissingSuite, source: None, result: None },
            }
        })
        .collect();
    let csvs = found
        .iter()
        .flat_map(|f| f.files.iter().filter(|n| n.ends_with(".csv")).map(move |n| (f.dir.clone(), n.clone())))
        .collect();
    Ok((rows, csvs))
}

fn short(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e4) => format!("{x:.3e}"),
            Some(x) if n.is_f64() => format!("{x:.4}"),
            _ => n.to_string(),
        },
        Value::Array(a) if a.len() <= 4 => format!("[{}]", a.iter().map(short).collect::<Vec<_>>().join(", ")),
        Value::Array(a) => format!("[{} values]", a.len()),
        Value::Object(_) => "{…}".into(),
        other => other.to_string(),
    }
}

pub fn render(rows: &[ReportRow], csvs: &[(PathBuf, String)]) -> String {
    let mut md = String::from("# Acceptance report\n\n| # | criterion | status | measured | time (s) |\n|---|---|---|---|---|\n");
    for r in rows {
        let (status, measured, time) = match &r.result {
            Some(c) => {
                let mut m: Vec<String> = c
                    .measured
                    .iter()
                    .filter(|(_, v)| !matches!(v, Value::Array(a) if a.len() > 4) && !v.is_object())
                    .map(|(k, v)| format!("{k} = {}", short(v)))
                    .collect();
                let failed = c.failed_checks();
                if !failed.is_empty() {
                    m.push(format!("failed: {}", failed.join(", ")));
                }
                if let Some(e) = &c.error {
                    m.push(format!("error: {e}"));
                }
                let s = if c.passed { "PASS" } else { "FAIL" };
                (s.to_string(), m.join("; "), format!("{:.2} / {}", c.seconds, c.budget_seconds))
            }
            None => ("MissingSuite".to_string(), String::new(), String::new()),
        };
        let _ = writeln!(md, "| {} | {} | {} | {} | {} |", r.id, r.name, status, measured.replace('|', "\\|"), time);
    }
    let count = |s: Status| rows.iter().filter(|r| r.status == s).count();
    let _ = write!(
        md,
        "\n{} passed, {} failed, {} missing.\n",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::MissingSuite)
    );
    if !csvs.is_empty() {
        md.push_str("\n## Data files\n\n");
        for (dir, name) in csvs {
            let _ = writeln!(md, "- `{}`", dir.join(name).display());
        }
    }
    md
}

pub fn report(ctx: &Context, args: ReportArgs) -> Result<Run> {
    let dirs = if args.dirs.is_empty() { vec![ctx.out.path().to_path_buf()] } else { args.dirs };
    let (rows, csvs) = build_rows(&dirs)?;
    let md = render(&rows, &csvs);
    ctx.out.write_bytes("report.md", md.as_bytes())?;
    let summary: Vec<Value> =
        rows.iter().map(|r| json!({ "id": r.id, "name": r.name, "status": r.status })).collect();
    let outcome = Outcome::new(&json!({ "rows": summary, "markdown": md })).file("report.md");
    Ok((json!({ "dirs": dirs }), outcome))
}
