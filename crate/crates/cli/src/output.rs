//! Result persistence. Every file is written to a temporary sibling and
//! renamed into place, so an interrupted run never leaves a partial file.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

/// `git describe` of the source tree at build time, or the crate version.
pub const VERSION: &str = match option_env!("COUETTE_GIT_DESCRIBE") {
    Some(v) => v,
    None => concat!("v", env!("CARGO_PKG_VERSION")),
};

#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let target = self.root.join(name);
        let mut tmp = NamedTempFile::new_in(&self.root).map_err(|e| CliError::io(&self.root, e))?;
        tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.persist(&target).map_err(|e| CliError::io(&target, e.error))?;
        Ok(target)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        self.write_bytes(name, to_json(value).as_bytes())
    }

    pub fn write_csv(&self, name: &str, table: &Table) -> Result<PathBuf> {
        self.write_bytes(name, &table.to_csv())
    }
}

/// Pretty JSON with keys sorted at every level.
pub fn to_json<T: Serialize>(value: &T) -> String {
    // Value maps are BTreeMaps, so routing through Value sorts struct fields
    let value = serde_json::to_value(value).expect("result types serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
    s.push('\n');
    s
}

/// Shortest round-trip decimal form; non-finite values become `nan`, `inf`
/// or `-inf`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Rows for a CSV file with a header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: &[S]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| num(*v)).collect());
    }

    /// RFC 4180 with CRLF line ends and quoting only where needed.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// What one subcommand produced before it is wrapped into a record.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub outputs: Value,
    pub files: Vec<String>,
    pub checks: BTreeMap<String, bool>,
}

impl Outcome {
    pub fn new<T: Serialize>(outputs: &T) -> Self {
        Self { outputs: serde_json::to_value(outputs).expect("outputs serialize"), ..Self::default() }
    }

    pub fn file(mut self, name: &str) -> Self {
        self.files.push(name.to_string());
        self
    }

    pub fn check(mut self, name: &str, ok: bool) -> Self {
        self.checks.insert(name.to_string(), ok);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub version: String,
    pub config: Value,
    pub wall_time_seconds: f64,
    pub outputs: Value,
    pub files: Vec<String>,
    pub checks: BTreeMap<String, bool>,
}

impl ResultRecord {
    pub fn new(experiment: &str, config: Value, wall_time_seconds: f64, outcome: Outcome) -> Self {
        Self {
            experiment: experiment.to_string(),
            version: VERSION.to_string(),
            config,
            wall_time_seconds,
            outputs: outcome.outputs,
            files: outcome.files,
            checks: outcome.checks,
        }
    }
}
