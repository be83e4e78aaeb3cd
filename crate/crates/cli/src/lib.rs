//! Command-line driver for `couette-core`: configuration, dispatch, result
//! records, sweeps, reports and the acceptance suite.

// `!(x > 0.0)` guards also reject NaN, and index loops mirror the stencils
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod suite;
pub mod sweep;

use std::path::PathBuf;
use std::time::Instant;

use serde_json::{json, Value};

use crate::args::{Cli, Command, SuiteArgs};
use crate::commands::Run;
use crate::config::FileConfig;
use crate::error::{CliError, Result};
use crate::output::{OutputDir, ResultRecord};

/// Resolved global settings shared by all subcommands.
pub struct Context {
    pub out: OutputDir,
    pub seed: u64,
    pub file: FileConfig,
}

impl Context {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let out = match &cli.out {
            Some(p) => p.clone(),
            None => file.global::<PathBuf>("out")?.unwrap_or_else(|| PathBuf::from("results")),
        };
        let seed = match cli.seed {
            Some(s) => s,
            None => file.global("seed")?.unwrap_or(suite::DEFAULT_SEED),
        };
        let threads: Option<usize> = match cli.threads {
            Some(t) => Some(t),
            None => file.global("threads")?,
        };
        if let Some(n) = threads {
            if n == 0 {
                return Err(CliError::Usage("--threads must be at least 1".into()));
            }
            // fails only if the pool already exists, which is harmless
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok(Self { out: OutputDir::create(out)?, seed, file })
    }
}

/// Runs one subcommand and writes `<experiment>.json` (or `acceptance.json`
/// for the suite) into the output directory. `on_line` receives progress
/// lines meant for the terminal.
pub fn run(cli: Cli, on_line: &mut dyn FnMut(&str)) -> Result<ResultRecord> {
    let ctx = Context::resolve(&cli)?;
    let name = cli.command.name();
    let start = Instant::now();
    let (params, outcome) = match cli.command {
        Command::Eigen(a) => commands::eigen(&ctx, a)?,
        Command::Beta(a) => commands::beta(&ctx, a)?,
        Command::GaussianScaling(a) => commands::gaussian_scaling(&ctx, a)?,
        Command::Bifurcate(a) => commands::bifurcate(&ctx, a)?,
        Command::Damp(a) => commands::damp(&ctx, a)?,
        Command::Classify(a) => commands::classify_cmd(&ctx, a)?,
        Command::Window(a) => commands::window(&ctx, a)?,
        Command::HsNorm(a) => commands::hs_norm(&ctx, a)?,
        Command::Sweep(a) => sweep::sweep(&ctx, a)?,
        Command::Report(a) => report::report(&ctx, a)?,
        Command::Suite(a) => run_suite(&ctx, a, on_line)?,
    };
    let config = json!({ "experiment": name, "seed": ctx.seed, "parameters": params });
    let record = ResultRecord::new(name, config, start.elapsed().as_secs_f64(), outcome);
    let file = if name == "suite" { "acceptance.json".to_string() } else { format!("{name}.json") };
    ctx.out.write_json(&file, &record)?;

    if name == "suite" {
        let failed = record.checks.values().filter(|ok| !**ok).count();
        if failed > 0 {
            return Err(CliError::SuiteFailed { failed, total: record.checks.len() });
        }
    }
    Ok(record)
}

fn run_suite(ctx: &Context, args: SuiteArgs, on_line: &mut dyn FnMut(&str)) -> Result<Run> {
    let sec = ctx.file.section("suite");
    let only: Vec<u32> = sec.list(args.only, "only")?.unwrap_or_default();
    if let Some(bad) = only.iter().find(|id| !(1..=10).contains(*id)) {
        return Err(CliError::Usage(format!("suite: no criterion {bad} (1 to 10)")));
    }
    let (results, tables) = suite::run_criteria(ctx.seed, &only, |r| on_line(&r.line()));
    let mut files = Vec::new();
    for (name, table) in &tables {
        ctx.out.write_csv(name, table)?;
        files.push(name.clone());
    }
    Ok((json!({ "only": only }), suite::outcome(&results, files)))
}

/// Record fields that differ between identical runs.
pub fn strip_volatile(mut record: Value) -> Value {
    if let Some(obj) = record.as_object_mut() {
        obj.remove("wall_time_seconds");
    }
    if let Some(criteria) = record.pointer_mut("/outputs/criteria").and_then(|c| c.as_array_mut()) {
        for c in criteria {
            if let Some(obj) = c.as_object_mut() {
                obj.remove("seconds");
            }
        }
    }
    record
}
