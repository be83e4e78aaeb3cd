//! One function per subcommand. Each resolves its parameters, runs the
//! owning module and returns the config echo with an [`Outcome`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use couette_core::damping::{fit_series, log_times, velocity_norms, ModalVorticity, NormKind};
use couette_core::profiles::{RayleighPotential, Shear, ShearProfile, TrigShear};
use couette_core::sobolev::{gaussian_hs_scaling, hs_norm_1d, hs_norm_2d, hs_norm_2d_isotropic, Field1D, Field2D};
use couette_core::spectral1d::{limit_beta, limit_beta_general, lowest_eigenpair, DirichletGrid, EigenPair};
use couette_core::stability::{classify, random_near_couette, unstable_period_window};
use couette_core::steady::{
    classify_streamlines, default_bracket, match_period, vorticity, vorticity_distance, SteadyGrid, SteadyProblem,
    SteadyState, DEFAULT_MODES,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, Result};
use crate::output::{num, Outcome, Table};
use crate::Context;

pub type Run = (Value, Outcome);

#[derive(Debug, Clone, Serialize)]
pub struct EigenSummary {
    pub gamma: f64,
    pub a: f64,
    pub n: usize,
    pub spacing: f64,
    pub lambda: f64,
    /// `√(-λ)` when `λ < 0`.
    pub beta: Option<f64>,
    /// Root of `β coth β = 2a` when `a > 1/2`.
    pub beta_limit: Option<f64>,
    pub error: Option<f64>,
    pub residual: f64,
    pub h1_norm: f64,
}

pub fn eigen_point(gamma: f64, a: f64, n: Option<usize>) -> couette_core::Result<(EigenSummary, EigenPair)> {
    let potential = RayleighPotential::new(ShearProfile::erf(gamma, a)?);
    let grid = match n {
        Some(n) => DirichletGrid::new(n)?,
        None => DirichletGrid::with_spacing(gamma / 16.0, 255),
    };
    let pair = lowest_eigenpair(&potential, grid)?;
    let beta = (pair.lambda < 0.0).then(|| (-pair.lambda).sqrt());
    let beta_limit = (a > 0.5).then(|| limit_beta(a)).transpose()?.map(|l| l.beta);
    let summary = EigenSummary {
        gamma,
        a,
        n: grid.len(),
        spacing: grid.spacing(),
        lambda: pair.lambda,
        beta,
        beta_limit,
        error: beta.zip(beta_limit).map(|(b, l)| (b - l).abs()),
        residual: pair.residual,
        h1_norm: pair.h1_norm(),
    };
    Ok((summary, pair))
}

pub fn eigen(ctx: &Context, args: EigenArgs) -> Result<Run> {
    let sec = ctx.file.section("eigen");
    let gamma: f64 = sec.require(args.gamma, "gamma")?;
    let a: f64 = sec.require(args.a, "a")?;
    let n: Option<usize> = sec.get(args.n, "n")?;
    let write_phi = args.write_phi || sec.or(None, "write-phi", false)?;
    let (summary, pair) = eigen_point(gamma, a, n)?;

    let mut outcome = Outcome::new(&summary)
        .check("lambda_negative", summary.lambda < 0.0)
        .check("lambda_lower_bound", summary.lambda >= -16.0 * a * a)
        .check("h1_bound", summary.h1_norm <= 8.0 * a + 1.0);
    if write_phi {
        let mut t = Table::new(&["y", "phi"]);
        for (y, p) in pair.grid.nodes().into_iter().zip(&pair.phi) {
            t.push_nums(&[y, *p]);
        }
        ctx.out.write_csv("eigen_phi.csv", &t)?;
        outcome = outcome.file("eigen_phi.csv");
    }
    Ok((json!({ "gamma": gamma, "a": a, "n": n, "write-phi": write_phi }), outcome))
}

pub fn beta(ctx: &Context, args: BetaArgs) -> Result<Run> {
    let sec = ctx.file.section("beta");
    let a: f64 = sec.require(args.a, "a")?;
    let b0: Option<f64> = sec.get(args.b0, "b0")?;
    let (root, target) = match b0 {
        Some(b0) => (limit_beta_general(b0, a)?, 0.5 * b0 * a),
        None => (limit_beta(a)?, 2.0 * a),
    };
    let b = root.beta;
    let residual = (target - b * b.cosh() / b.sinh()).abs();
    let outcome = Outcome::new(&json!({
        "a": a,
        "beta": b,
        "lambda": root.lambda(),
        "residual": residual,
    }))
    .check("residual", residual <= 1e-12);
    Ok((json!({ "a": a, "b0": b0 }), outcome))
}

pub fn gaussian_scaling(ctx: &Context, args: GaussianArgs) -> Result<Run> {
    let sec = ctx.file.section("gaussian-scaling");
    let s: f64 = sec.require(args.s, "s")?;
    let gammas = sec.list(args.gammas, "gammas")?.unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
    let study = gaussian_hs_scaling(s, &gammas)?;
    let mut t = Table::new(&["gamma", "norm"]);
    for (g, v) in study.gammas.iter().zip(&study.norms) {
        t.push_nums(&[*g, *v]);
    }
    ctx.out.write_csv("gaussian_scaling.csv", &t)?;
    let expected = 1.5 - s;
    let outcome = Outcome::new(&json!({
        "s": s,
        "exponent": study.exponent(),
        "expected_exponent": expected,
        "c_s": study.c_s,
        "fit": study.fit,
        "fitted_points": study.fitted_points,
        "gammas": study.gammas,
        "norms": study.norms,
    }))
    .file("gaussian_scaling.csv")
    .check("exponent", (study.exponent() - expected).abs() <= 0.05);
    Ok((json!({ "s": s, "gammas": gammas }), outcome))
}

#[derive(Debug, Serialize)]
struct BranchRow {
    amplitude: f64,
    alpha_sq: f64,
    period: f64,
    residual: f64,
    range_escape: bool,
    newton_iterations: usize,
    cats_eye: bool,
    eye_half_height: Option<f64>,
    /// `(s, ‖ω - 1‖_{H^s})`.
    vorticity_distance: Vec<(f64, f64)>,
    field_file: String,
}

pub fn bifurcate(ctx: &Context, args: BifurcateArgs) -> Result<Run> {
    let sec = ctx.file.section("bifurcate");
    let gamma: f64 = sec.require(args.gamma, "gamma")?;
    let modes: usize = sec.or(args.modes, "modes", DEFAULT_MODES)?;
    let orders = sec.list(args.orders, "s")?.unwrap_or_default();
    let target: Option<f64> = sec.get(args.match_period, "match-period")?;

    let (config, problem, states, matched) = match target {
        Some(period) => {
            let r: f64 = sec.or(args.amplitude, "amplitude", 1e-4)?;
            let bracket = sec.or(None, "bracket", default_bracket(period))?;
            let m = match_period(gamma, period, r, bracket, modes)?;
            let profile = ShearProfile::erf(gamma, m.a)?;
            let problem = SteadyProblem::new(&profile, m.state.grid)?;
            let (b1, b2) = (limit_beta(bracket.0)?.beta, limit_beta(bracket.1)?.beta);
            let k = 2.0 * PI / period;
            let info = json!({
                "a": m.a,
                "target_period": period,
                "period": m.state.period(),
                "period_error": (m.state.period() - period).abs(),
                "bracket": bracket,
                "bracket_limit_roots": [b1, b2],
                "bracket_brackets_wavenumber": b1 < k && k < b2,
                "scan": m.scan,
                "roots_found": m.roots_found,
                "evaluations": m.evaluations,
            });
            let config = json!({
                "gamma": gamma, "modes": modes, "s": orders,
                "match-period": period, "amplitude": r, "bracket": bracket,
            });
            (config, problem, vec![m.state], Some(info))
        }
        None => {
            let a: f64 = sec.require(args.a, "a")?;
            let steps: usize = sec.or(args.steps, "steps", 8)?;
            let step: f64 = sec.or(args.step, "step", 1e-5)?;
            if steps == 0 || !(step > 0.0) {
                return Err(CliError::Usage("bifurcate: --steps and --step must be positive".into()));
            }
            let profile = ShearProfile::erf(gamma, a)?;
            let problem = SteadyProblem::new(&profile, SteadyGrid::for_profile(&profile, modes)?)?;
            let states = problem.branch(step, steps)?;
            let config = json!({ "gamma": gamma, "a": a, "modes": modes, "s": orders, "steps": steps, "step": step });
            (config, problem, states, None)
        }
    };

    let mut header = vec![
        "amplitude".to_string(),
        "alpha_sq".into(),
        "period".into(),
        "residual".into(),
        "range_escape".into(),
        "cats_eye".into(),
    ];
    header.extend(orders.iter().map(|s| format!("omega_minus_one_h{}", num(*s))));
    let mut table = Table::new(&header);
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for (i, state) in states.iter().enumerate() {
        let report = classify_streamlines(state, problem.profile())?;
        let distances = orders
            .iter()
            .map(|&s| vorticity_distance(&problem, state, s).map(|d| (s, d)))
            .collect::<couette_core::Result<Vec<_>>>()?;
        let name = format!("bifurcate_state_{i:03}.csv");
        ctx.out.write_csv(&name, &field_table(&problem, state))?;
        let mut row = vec![
            num(state.amplitude),
            num(state.alpha_sq),
            num(state.period()),
            num(state.residual),
            state.range_escape.to_string(),
            report.cats_eye.to_string(),
        ];
        row.extend(distances.iter().map(|(_, d)| num(*d)));
        table.push(row);
        rows.push(BranchRow {
            amplitude: state.amplitude,
            alpha_sq: state.alpha_sq,
            period: state.period(),
            residual: state.residual,
            range_escape: state.range_escape,
            newton_iterations: state.newton_iterations,
            cats_eye: report.cats_eye,
            eye_half_height: report.eye_half_height,
            vorticity_distance: distances,
            field_file: name.clone(),
        });
        files.push(name);
    }
    ctx.out.write_csv("bifurcate_branch.csv", &table)?;

    let residual_ok = states.iter().all(|s| s.residual <= couette_core::steady::RESIDUAL_TOLERANCE);
    let mut outcome = Outcome::new(&json!({
        "k0_sq": problem.k0_sq(),
        "grid": { "modes": problem.grid().modes, "ny": problem.grid().y.len(), "spacing": problem.grid().y.spacing() },
        "states": rows,
        "match": matched,
    }))
    .file("bifurcate_branch.csv")
    .check("residual", residual_ok);
    for f in &files {
        outcome = outcome.file(f);
    }
    Ok((config, outcome))
}

/// `ξ, y, ψ, ω` at the collocation nodes.
fn field_table(problem: &SteadyProblem, state: &SteadyState) -> Table {
    let grid = state.grid;
    let omega = vorticity(problem, state);
    let mut t = Table::new(&["xi", "y", "psi", "omega"]);
    for (j, y) in grid.y.nodes().into_iter().enumerate() {
        let psi0 = problem.profile().stream(y);
        for l in 0..grid.modes {
            let i = grid.index(j, l);
            t.push_nums(&[grid.xi(l), y, psi0 + state.phi[i], omega[i]]);
        }
    }
    t
}

#[derive(Debug, Deserialize)]
struct ModeEntry {
    k: i64,
    profile: String,
}

fn load_modes(path: &Path) -> Result<Vec<ModalVorticity>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let entries: Vec<ModeEntry> = serde_json::from_str(&text).map_err(|e| CliError::input(path, e))?;
    if entries.is_empty() {
        return Err(CliError::input(path, "no modes listed"));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    entries
        .into_iter()
        .map(|m| {
            if m.profile.ends_with(".csv") {
                let samples = read_complex_samples(&base.join(&m.profile))?;
                Ok(ModalVorticity::from_samples(m.k, samples)?)
            } else {
                Ok(ModalVorticity::named(m.k, &m.profile)?)
            }
        })
        .collect()
}

/// Columns `re` and optionally `im`, uniform on `[-1, 1]`.
fn read_complex_samples(path: &Path) -> Result<Vec<Complex64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::input(path, e))?;
    let header = reader.headers().map_err(|e| CliError::input(path, e))?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let re = col("re").ok_or_else(|| CliError::input(path, "missing column 're'"))?;
    let im = col("im");
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| CliError::input(path, e))?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i).unwrap_or("").trim().parse().map_err(|e| CliError::input(path, e))
            };
            Ok(Complex64::new(parse(re)?, im.map(parse).transpose()?.unwrap_or(0.0)))
        })
        .collect()
}

fn parse_times(desc: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Usage(format!("--times expects t0:t1:n with 0 < t0 < t1 and n ≥ 2, got '{desc}'"));
    let parts: Vec<&str> = desc.split(':').collect();
    let [t0, t1, n] = parts[..] else { return Err(bad()) };
    let (t0, t1): (f64, f64) = (t0.parse().map_err(|_| bad())?, t1.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if !(t0 > 0.0 && t1 > t0 && t1.is_finite()) || n < 2 {
        return Err(bad());
    }
    Ok(log_times(t0, t1, n))
}

pub fn damp(ctx: &Context, args: DampArgs) -> Result<Run> {
    let sec = ctx.file.section("damp");
    let modes_file: Option<PathBuf> = sec.get(args.modes, "modes")?;
    let times_spec: String = sec.or(args.times, "times", "10:100:12".to_string())?;
    let fit: String = sec.or(args.fit, "fit", "both".to_string())?;
    let kinds = match fit.as_str() {
        "u" => vec![NormKind::U],
        "v" => vec![NormKind::V],
        "both" => vec![NormKind::U, NormKind::V],
        other => return Err(CliError::Usage(format!("--fit must be u, v or both, got '{other}'"))),
    };
    let modes = match &modes_file {
        Some(p) => load_modes(p)?,
        None => vec![ModalVorticity::cosine(1)?],
    };
    let times = parse_times(&times_spec)?;
    let norms =
        times.par_iter().map(|&t| velocity_norms(&modes, t)).collect::<couette_core::Result<Vec<_>>>()?;

    let mut t = Table::new(&["t", "u", "v"]);
    for (time, n) in times.iter().zip(&norms) {
        t.push_nums(&[*time, n.u, n.v]);
    }
    ctx.out.write_csv("damp_norms.csv", &t)?;
    let mut fits = serde_json::Map::new();
    for kind in kinds {
        let series: Vec<f64> = norms.iter().map(|n| kind.pick(n)).collect();
        let f = fit_series(kind, &times, &series)?;
        let key = if kind == NormKind::U { "u" } else { "v" };
        fits.insert(key.into(), json!({
            "exponent": f.exponent,
            "intercept": f.intercept,
            "residual": f.residual,
            "constant": f.constant,
        }));
    }
    let labels: Vec<Value> = modes.iter().map(|m| json!({ "k": m.k(), "profile": m.label() })).collect();
    let outcome = Outcome::new(&json!({ "modes": labels, "fits": fits })).file("damp_norms.csv");
    let config = json!({ "modes": modes_file, "times": times_spec, "fit": fit });
    Ok((config, outcome))
}

/// Parses `couette`, `erf:G:A`, `sine:AMP` or `random:H2`.
pub fn parse_profile(desc: &str, seed: u64) -> Result<Box<dyn Shear>> {
    let parts: Vec<&str> = desc.split(':').collect();
    let float = |s: &str| -> Result<f64> {
        s.parse().map_err(|_| CliError::Usage(format!("bad number '{s}' in profile '{desc}'")))
    };
    Ok(match parts[..] {
        ["couette"] => Box::new(TrigShear::couette()),
        ["erf", g, a] => Box::new(ShearProfile::erf(float(g)?, float(a)?)?),
        ["sine", amp] => Box::new(TrigShear::sine_bump(float(amp)?)),
        ["random", h2] => Box::new(random_near_couette(&mut ChaCha8Rng::seed_from_u64(seed), float(h2)?)?),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown profile '{desc}' (expected couette, erf:G:A, sine:AMP or random:H2)"
            )))
        }
    })
}

pub fn classify_cmd(ctx: &Context, args: ClassifyArgs) -> Result<Run> {
    let sec = ctx.file.section("classify");
    let desc: String = sec.require(args.profile, "profile")?;
    let period: f64 = sec.or(args.period, "period", 2.0 * PI)?;
    let shear = parse_profile(&desc, ctx.seed)?;
    let verdict = classify(shear.as_ref(), period)?;
    Ok((json!({ "profile": desc, "period": period }), Outcome::new(&verdict)))
}

pub fn window(ctx: &Context, args: WindowArgs) -> Result<Run> {
    let sec = ctx.file.section("window");
    let gamma: f64 = sec.require(args.gamma, "gamma")?;
    let a: f64 = sec.require(args.a, "a")?;
    let t_min = unstable_period_window(&ShearProfile::erf(gamma, a)?)?;
    let outcome = Outcome::new(&json!({ "t_min": t_min, "empty": t_min.is_none() }));
    Ok((json!({ "gamma": gamma, "a": a }), outcome))
}

pub fn hs_norm(ctx: &Context, args: HsNormArgs) -> Result<Run> {
    let sec = ctx.file.section("hs-norm");
    let path: PathBuf = sec.require(args.field, "field")?;
    let s: Option<f64> = sec.get(args.s, "s")?;
    let sx: Option<f64> = sec.get(args.sx, "sx")?;
    let sy: Option<f64> = sec.get(args.sy, "sy")?;
    let period: Option<f64> = sec.get(args.period, "period")?;
    let config = json!({ "field": path, "s": s, "sx": sx, "sy": sy, "period": period });

    let columns = read_columns(&path)?;
    let find = |name: &str| columns.iter().find(|(h, _)| h == name).map(|(_, v)| v);
    let outputs = match (find("x"), find("y"), find("value")) {
        (Some(x), Some(y), Some(v)) => {
            let (field, inferred) = grid_field(&path, x, y, v, period)?;
            let norm = match (sx, sy, s) {
                (Some(sx), Some(sy), _) => hs_norm_2d(&field, sx, sy)?,
                (None, None, Some(s)) => hs_norm_2d_isotropic(&field, s)?,
                _ => return Err(CliError::Usage("hs-norm: give --s, or both --sx and --sy".into())),
            };
            json!({ "dims": 2, "nx": field.nx(), "ny": field.ny(), "period": inferred, "norm": norm })
        }
        _ => {
            let s = s.ok_or_else(|| CliError::Usage("hs-norm: missing required --s".into()))?;
            let values = find("u")
                .or_else(|| find("value"))
                .or_else(|| (columns.len() == 1).then(|| &columns[0].1))
                .ok_or_else(|| CliError::input(&path, "expected a 'u' column"))?;
            if let Some(y) = find("y") {
                check_uniform(&path, y, Some((-1.0, 1.0)))?;
            }
            let field = Field1D::from_samples(values.clone())?;
            json!({ "dims": 1, "n": field.len(), "norm": hs_norm_1d(&field, s)? })
        }
    };
    Ok((config, Outcome::new(&outputs)))
}

fn read_columns(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::input(path, e))?;
    let header: Vec<String> =
        reader.headers().map_err(|e| CliError::input(path, e))?.iter().map(|h| h.trim().to_string()).collect();
    let mut cols: Vec<(String, Vec<f64>)> = header.into_iter().map(|h| (h, Vec::new())).collect();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::input(path, e))?;
        for (i, (_, col)) in cols.iter_mut().enumerate() {
            let cell = rec.get(i).unwrap_or("").trim();
            let v = cell
                .parse()
                .map_err(|_| CliError::input(path, format!("row {}: '{cell}' is not a number", line + 2)))?;
            col.push(v);
        }
    }
    Ok(cols)
}

/// Checks that sorted distinct values are uniform, optionally with fixed
/// end points, and returns them.
fn check_uniform(path: &Path, v: &[f64], ends: Option<(f64, f64)>) -> Result<Vec<f64>> {
    let mut u = v.to_vec();
    u.sort_by(f64::total_cmp);
    u.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if u.len() < 2 {
        return Err(CliError::input(path, "coordinate column has fewer than two values"));
    }
    let h = (u[u.len() - 1] - u[0]) / (u.len() - 1) as f64;
    if u.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-6 * h) {
        return Err(CliError::input(path, "coordinates are not uniformly spaced"));
    }
    if let Some((lo, hi)) = ends {
        if (u[0] - lo).abs() > 1e-9 || (u[u.len() - 1] - hi).abs() > 1e-9 {
            return Err(CliError::input(path, format!("y must run from {lo} to {hi}")));
        }
    }
    Ok(u)
}

fn grid_field(path: &Path, x: &[f64], y: &[f64], v: &[f64], period: Option<f64>) -> Result<(Field2D, f64)> {
    let xs = check_uniform(path, x, None)?;
    let ys = check_uniform(path, y, Some((-1.0, 1.0)))?;
    let (nx, ny) = (xs.len(), ys.len());
    if v.len() != nx * ny {
        return Err(CliError::input(path, format!("expected {nx}×{ny} rows, found {}", v.len())));
    }
    let period = period.unwrap_or(nx as f64 * (xs[1] - xs[0]));
    let dx = xs[1] - xs[0];
    let dy = ys[1] - ys[0];
    let mut values = vec![f64::NAN; nx * ny];
    for ((&xv, &yv), &val) in x.iter().zip(y).zip(v) {
        let i = ((xv - xs[0]) / dx).round() as usize;
        let j = ((yv - ys[0]) / dy).round() as usize;
        values[i * ny + j] = val;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(CliError::input(path, "grid has missing points"));
    }
    Ok((Field2D::from_real(nx, ny, period, &values)?, period))
}
