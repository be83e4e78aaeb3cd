//! TOML run configuration. Global keys sit at the top level, each
//! subcommand reads its own table with keys spelled like its flags:
//!
//! ```toml
//! out = "results"
//! seed = 7
//!
//! [eigen]
//! gamma = 0.05
//! a = 1.0
//!
//! [sweep]
//! experiment = "eigen"
//! gammas = [0.1, 0.05]
//! a = [0.6, 1.0]
//! ```
//!
//! Command-line flags always win over file values.

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    table: toml::Table,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let table = text.parse::<toml::Table>().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(Self { table })
    }

    pub fn from_table(table: toml::Table) -> Self {
        Self { table }
    }

    /// Top-level key.
    pub fn global<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        convert(self.table.get(key), "", key)
    }

    pub fn section<'a>(&'a self, name: &'a str) -> Section<'a> {
        let table = self.table.get(name).and_then(|v| v.as_table());
        Section { name, table }
    }
}

/// Parameters of one subcommand: flag first, then file, then default.
#[derive(Debug, Clone, Copy)]
pub struct Section<'a> {
    name: &'a str,
    table: Option<&'a toml::Table>,
}

impl Section<'_> {
    pub fn get<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => convert(self.table.and_then(|t| t.get(key)), self.name, key),
        }
    }

    pub fn or<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    pub fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.get(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("{}: missing required --{key}", self.name)))
    }

    /// List parameter: a non-empty flag list wins over the file.
    pub fn list<T: DeserializeOwned>(&self, flag: Vec<T>, key: &str) -> Result<Option<Vec<T>>> {
        self.get((!flag.is_empty()).then_some(flag), key)
    }
}

fn convert<T: DeserializeOwned>(value: Option<&toml::Value>, section: &str, key: &str) -> Result<Option<T>> {
    value
        .map(|v| {
            v.clone().try_into().map_err(|e| {
                let at = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
                CliError::Config(format!("{at}: {e}"))
            })
        })
        .transpose()
}
