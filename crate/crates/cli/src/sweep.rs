//! Parameter sweeps over `(γ, a)` grids. Points run concurrently on a local
//! pool; rows come back in sorted parameter order whatever the parallelism,
//! and a failing point fills its own row instead of stopping the sweep.

use std::f64::consts::PI;

use couette_core::profiles::ShearProfile;
use couette_core::spectral1d::{converged_beta, limit_beta};
use couette_core::stability::{classify, unstable_period_window};
use rayon::prelude::*;
use serde_json::json;

use crate::args::SweepArgs;
use crate::commands::{eigen_point, Run};
use crate::error::{CliError, Result};
use crate::output::{num, Outcome, Table};
use crate::Context;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Eigen,
    Window,
    Classify,
    Beta,
    Convergence,
}

impl Experiment {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "eigen" => Self::Eigen,
            "window" => Self::Window,
            "classify" => Self::Classify,
            "beta" => Self::Beta,
            "convergence" => Self::Convergence,
            other => {
                return Err(CliError::Usage(format!(
                    "sweep: unknown experiment '{other}' (eigen, window, classify, beta, convergence)"
                )))
            }
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::Eigen => "eigen",
            Self::Window => "window",
            Self::Classify => "classify",
            Self::Beta => "beta",
            Self::Convergence => "convergence",
        }
    }

    fn value_columns(self) -> &'static [&'static str] {
        match self {
            Self::Eigen => &["n", "lambda", "beta", "beta_limit", "error", "lower_bound_ok"],
            Self::Window => &["t_min"],
            Self::Classify => &["period", "verdict", "lambda", "threshold", "t_min"],
            Self::Beta => &["beta", "lambda"],
            Self::Convergence => &["beta_gamma", "error", "refinement_change", "n"],
        }
    }

    fn uses_gamma(self) -> bool {
        self != Self::Beta
    }
}

/// One grid point; `gamma` is unused for `beta` sweeps.
#[derive(Debug, Clone, Copy)]
pub struct Point {
    pub gamma: f64,
    pub a: f64,
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn evaluate(exp: Experiment, p: Point, period: f64) -> couette_core::Result<Vec<String>> {
    Ok(match exp {
        Experiment::Eigen => {
            let (s, _) = eigen_point(p.gamma, p.a, None)?;
            vec![
                s.n.to_string(),
                num(s.lambda),
                opt(s.beta),
                opt(s.beta_limit),
                opt(s.error),
                (s.lambda >= -16.0 * p.a * p.a && s.lambda < 0.0).to_string(),
            ]
        }
        Experiment::Window => vec![opt(unstable_period_window(&ShearProfile::erf(p.gamma, p.a)?)?)],
        Experiment::Classify => {
            let v = classify(&ShearProfile::erf(p.gamma, p.a)?, period)?;
            let lambda = v.eigenvalues.iter().map(|e| e.lambda).fold(f64::INFINITY, f64::min);
            vec![num(period), format!("{:?}", v.verdict), num(lambda), num(v.threshold), opt(v.unstable_period_min)]
        }
        Experiment::Beta => {
            let l = limit_beta(p.a)?;
            vec![num(l.beta), num(l.lambda())]
        }
        Experiment::Convergence => {
            let r = converged_beta(p.a, p.gamma, limit_beta(p.a)?.beta)?;
            vec![num(r.beta_gamma), num(r.error), num(r.refinement_change), r.n.to_string()]
        }
    })
}

/// Runs every point with at most `parallelism` workers and returns the
/// aggregate table with the number of failed points.
pub fn run_sweep(exp: Experiment, points: &[Point], period: f64, parallelism: usize) -> Result<(Table, usize)> {
    let mut points = points.to_vec();
    points.sort_by(|p, q| p.gamma.total_cmp(&q.gamma).then(p.a.total_cmp(&q.a)));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {parallelism} workers: {e}")))?;
    let results: Vec<_> = pool.install(|| points.par_iter().map(|&p| evaluate(exp, p, period)).collect());

    let mut header: Vec<&str> = if exp.uses_gamma() { vec!["gamma", "a"] } else { vec!["a"] };
    header.push("status");
    header.extend(exp.value_columns());
    header.push("message");
    let mut table = Table::new(&header);
    let mut failures = 0;
    for (p, res) in points.iter().zip(results) {
        let mut row = if exp.uses_gamma() { vec![num(p.gamma), num(p.a)] } else { vec![num(p.a)] };
        match res {
            Ok(values) => {
                row.push("ok".into());
                row.extend(values);
                row.push(String::new());
            }
            Err(e) => {
                failures += 1;
                row.push("error".into());
                row.extend(exp.value_columns().iter().map(|_| String::new()));
                row.push(e.to_string());
            }
        }
        table.push(row);
    }
    Ok((table, failures))
}

pub fn sweep(ctx: &Context, args: SweepArgs) -> Result<Run> {
    let sec = ctx.file.section("sweep");
    let name: String = sec.require(args.experiment, "experiment")?;
    let exp = Experiment::parse(&name)?;
    let a_values: Vec<f64> = sec
        .list(args.a_values, "a")?
        .ok_or_else(|| CliError::Usage("sweep: missing required --a".into()))?;
    let gammas: Vec<f64> = if exp.uses_gamma() {
        sec.list(args.gammas, "gammas")?.ok_or_else(|| CliError::Usage("sweep: missing required --gammas".into()))?
    } else {
        vec![f64::NAN]
    };
    let period: f64 = sec.or(args.period, "period", 2.0 * PI)?;
    let parallelism: usize = sec.or(args.parallelism, "parallelism", rayon::current_num_threads())?;

    let points: Vec<Point> =
        gammas.iter().flat_map(|&gamma| a_values.iter().map(move |&a| Point { gamma, a })).collect();
    let (table, failures) = run_sweep(exp, &points, period, parallelism)?;
    let file = format!("sweep_{}.csv", exp.name());
    ctx.out.write_csv(&file, &table)?;

    let outcome = Outcome::new(&json!({ "experiment": exp.name(), "points": points.len(), "failures": failures }))
        .file(&file);
    // parallelism only changes scheduling, so it stays out of the echo
    let config = json!({
        "experiment": exp.name(),
        "gammas": exp.uses_gamma().then_some(&gammas),
        "a": a_values,
        "period": (exp == Experiment::Classify).then_some(period),
    });
    Ok((config, outcome))
}
