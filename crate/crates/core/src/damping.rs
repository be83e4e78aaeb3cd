//! Linearized inviscid damping around Couette flow.
//!
//! Each `x`-mode of the vorticity is transported exactly,
//! `ω_k(t, y) = ω_k⁰(y) e^{-ikty}`, and the stream function solves
//! `(-d²/dy² + k²) ψ_k = ω_k(t)` with `ψ_k(±1) = 0`. The velocity is
//! `(u, v) = (ψ_y, -ψ_x)`; the period in `x` is `2π`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::loglog_fit;
use crate::linalg::solve_tridiagonal;
use crate::special::gauss_legendre;

/// Largest number of grid intervals a modal solve may use.
pub const MAX_POINTS: usize = 1 << 20;

/// Grid rule: `h · max(|k| t, |k|, 1) ≤ RESOLUTION`.
pub const RESOLUTION: f64 = 0.02;

const PANEL_ORDER: usize = 8;

type Profile = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// One Fourier mode `e^{ikx} ω_k⁰(y)` of the initial vorticity.
#[derive(Clone)]
pub struct ModalVorticity {
    k: i64,
    profile: Profile,
    label: String,
    /// Interior points where `ω_k⁰` may jump; quadrature panels break there.
    breaks: Vec<f64>,
}

impl fmt::Debug for ModalVorticity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModalVorticity").field("k", &self.k).field("label", &self.label).finish()
    }
}

impl ModalVorticity {
    pub fn from_fn<F>(k: i64, label: &str, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        if k == 0 {
            return Err(Error::InvalidInput("the k = 0 mode does not move and is excluded".into()));
        }
        Ok(Self { k, profile: Arc::new(f), label: label.to_string(), breaks: Vec::new() })
    }

    /// `ω_k⁰(y) = cos(πy/2)`.
    pub fn cosine(k: i64) -> Result<Self> {
        Self::from_fn(k, "cosine", |y| Complex64::new((PI * y / 2.0).cos(), 0.0))
    }

    /// `cos(πy/2)` for `y > 0` and zero below: a jump at `y = 0`.
    pub fn step(k: i64) -> Result<Self> {
        let mut mode = Self::from_fn(k, "step", |y| {
            Complex64::new(if y > 0.0 { (PI * y / 2.0).cos() } else { 0.0 }, 0.0)
        })?;
        mode.breaks.push(0.0);
        Ok(mode)
    }

    /// Linear interpolation of samples on the uniform grid over `[-1, 1]`.
    pub fn from_samples(k: i64, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput("need at least two samples".into()));
        }
        let n = samples.len();
        Self::from_fn(k, "sampled", move |y| {
            let t = ((y + 1.0) / 2.0 * (n - 1) as f64).clamp(0.0, (n - 1) as f64);
            let j = (t.floor() as usize).min(n - 2);
            let w = t - j as f64;
            samples[j] * (1.0 - w) + samples[j + 1] * w
        })
    }

    /// Builds a named shape (`cosine` or `step`).
    pub fn named(k: i64, name: &str) -> Result<Self> {
        match name {
            "cosine" => Self::cosine(k),
            "step" => Self::step(k),
            other => Err(Error::InvalidInput(format!("unknown mode shape '{other}'"))),
        }
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        (self.profile)(y)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let p = self.profile.clone();
        Self {
            k: self.k,
            profile: Arc::new(move |y| p(y) * c),
            label: format!("{}*{c}", self.label),
            breaks: self.breaks.clone(),
        }
    }

    /// The free-streamed mode at time `t0`, usable as new initial data.
    pub fn advanced(&self, t0: f64) -> Self {
        let p = self.profile.clone();
        let k = self.k as f64;
        Self {
            k: self.k,
            profile: Arc::new(move |y| p(y) * Complex64::from_polar(1.0, -k * t0 * y)),
            label: format!("{}@{t0}", self.label),
            breaks: self.breaks.clone(),
        }
    }
}

/// `ω_k⁰(y) e^{-ikty}`, the exact solution of `ω_t + y ω_x = 0` for one mode.
pub fn free_stream(mode: &ModalVorticity, t: f64) -> impl Fn(f64) -> Complex64 + '_ {
    let k = mode.k as f64;
    move |y| mode.eval(y) * Complex64::from_polar(1.0, -k * t * y)
}

/// Dirichlet Green's function of `-d²/dy² + k²` on `(-1, 1)`:
/// `sinh k(y_< + 1) sinh k(1 - y_>) / (k sinh 2k)`.
///
/// Evaluated in exponentially scaled form, so it does not overflow for
/// large `|k|`.
pub fn green_function(k: i64, y: f64, y0: f64) -> f64 {
    let k = k.unsigned_abs() as f64;
    assert!(k > 0.0, "Green's function needs k ≠ 0");
    let lo = y.min(y0) + 1.0;
    let hi = 1.0 - y.max(y0);
    let num = (-(-2.0 * k * lo).exp_m1()) * (-(-2.0 * k * hi).exp_m1());
    let den = 2.0 * k * (-(-4.0 * k).exp_m1());
    (k * (lo + hi - 2.0)).exp() * num / den
}

/// Stream function of one mode at time `t` on a uniform grid over `[-1, 1]`
/// (endpoints included).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModalStream {
    pub k: i64,
    pub t: f64,
    pub y: Vec<f64>,
    pub psi: Vec<Complex64>,
}

impl ModalStream {
    pub fn spacing(&self) -> f64 {
        self.y[1] - self.y[0]
    }

    /// `‖ψ_k‖_{L²(-1,1)}` by the trapezoid rule.
    pub fn l2_norm(&self) -> f64 {
        complex_l2(&self.psi, self.spacing())
    }

    /// `‖ψ_k'‖_{L²}` from staggered differences.
    pub fn derivative_l2_norm(&self) -> f64 {
        let h = self.spacing();
        let s: f64 = self.psi.windows(2).map(|w| (w[1] - w[0]).norm_sqr()).sum();
        (s / h).sqrt()
    }

    /// `ψ'` at the cell midpoints.
    pub fn midpoint_derivative(&self) -> Vec<Complex64> {
        let h = self.spacing();
        self.psi.windows(2).map(|w| (w[1] - w[0]) / h).collect()
    }
}

fn complex_l2(v: &[Complex64], h: f64) -> f64 {
    let n = v.len();
    let s: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>() - 0.5 * (v[0].norm_sqr() + v[n - 1].norm_sqr());
    (h * s).sqrt()
}

/// Number of grid intervals (even, so `y = 0` is a node) used for mode `k`
/// at time `t`.
pub fn intervals_for(k: i64, t: f64) -> Result<usize> {
    let scale = (k.unsigned_abs() as f64 * t).max(k.unsigned_abs() as f64).max(1.0);
    let needed = (2.0 * scale / RESOLUTION).ceil() as usize;
    let needed = needed + needed % 2;
    if needed > MAX_POINTS {
        return Err(Error::OscillationUnresolved { needed, cap: MAX_POINTS });
    }
    Ok(needed.max(64))
}

fn grid(intervals: usize) -> Vec<f64> {
    (0..=intervals).map(|j| -1.0 + 2.0 * j as f64 / intervals as f64).collect()
}

/// `ψ_k(t)` by quadrature of the Green's function against the free-streamed
/// vorticity, on the automatically chosen grid.
pub fn modal_stream(mode: &ModalVorticity, t: f64) -> Result<ModalStream> {
    modal_stream_on(mode, t, intervals_for(mode.k, t)?)
}

/// `ψ_k(t)` by Green quadrature on a grid with `intervals` cells.
///
/// With `y_<`/`y_>` split, `ψ = [(1 - e^{-2k(1-y)}) A + (1 - e^{-2k(y+1)}) B] /
/// (2k (1 - e^{-4k}))`, where `A` and `B` are exponentially scaled running
/// integrals accumulated cell by cell from the left and right ends.
pub fn modal_stream_on(mode: &ModalVorticity, t: f64, intervals: usize) -> Result<ModalStream> {
    check_time(t)?;
    let k = mode.k.unsigned_abs() as f64;
    let kw = mode.k as f64;
    let y = grid(intervals);
    let h = 2.0 / intervals as f64;
    let g = |y0: f64| mode.eval(y0) * Complex64::from_polar(1.0, -kw * t * y0);
    let panel_width = if t > 0.0 { PI / (4.0 * k * t) } else { f64::INFINITY };
    let panels = ((h / panel_width).ceil() as usize).max(1);
    let (gx, gw) = gauss_legendre(PANEL_ORDER);

    let cell_integral = |a: f64, b: f64, weight: &dyn Fn(f64) -> f64| {
        let width = (b - a) / panels as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            for (xi, wi) in gx.iter().zip(&gw) {
                let y0 = mid + 0.5 * width * xi;
                s += g(y0) * (0.5 * width * wi * weight(y0));
            }
        }
        s
    };

    let n = y.len();
    let decay = (-k * h).exp();
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n - 1 {
        let right = y[i + 1];
        let w = move |y0: f64| (-k * (right - y0)).exp() * (-(-2.0 * k * (y0 + 1.0)).exp_m1());
        a[i + 1] = a[i] * decay + cell_integral(y[i], right, &w);
    }
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n - 1).rev() {
        let left = y[i];
        let w = move |y0: f64| (-k * (y0 - left)).exp() * (-(-2.0 * k * (1.0 - y0)).exp_m1());
        b[i] = b[i + 1] * decay + cell_integral(left, y[i + 1], &w);
    }
    let den = 2.0 * k * (-(-4.0 * k).exp_m1());
    let psi = y
        .iter()
        .enumerate()
        .map(|(i, &yi)| {
            let wa = -(-2.0 * k * (1.0 - yi)).exp_m1();
            let wb = -(-2.0 * k * (yi + 1.0)).exp_m1();
            (a[i] * wa + b[i] * wb) / den
        })
        .collect();
    Ok(ModalStream { k: mode.k, t, y, psi })
}

/// `ψ_k(t)` by a fourth-order (Numerov) tridiagonal solve of
/// `(-d²/dy² + k²) ψ = ω_k⁰ e^{-ikty}` on the same grid rule.
pub fn modal_stream_direct(mode: &ModalVorticity, t: f64) -> Result<ModalStream> {
    modal_stream_direct_on(mode, t, intervals_for(mode.k, t)?)
}

pub fn modal_stream_direct_on(mode: &ModalVorticity, t: f64, intervals: usize) -> Result<ModalStream> {
    check_time(t)?;
    let k2 = (mode.k as f64).powi(2);
    let y = grid(intervals);
    let h = 2.0 / intervals as f64;
    let h2 = h * h;
    let rhs_fn = free_stream(mode, t);
    let g: Vec<Complex64> = y.iter().map(|&yi| rhs_fn(yi)).collect();
    let m = intervals - 1;
    let off = -(1.0 - h2 * k2 / 12.0);
    let diag = vec![2.0 + 10.0 * h2 * k2 / 12.0; m];
    let offs = vec![off; m];
    let rhs: Vec<Complex64> =
        (1..intervals).map(|j| (g[j - 1] + g[j] * 10.0 + g[j + 1]) * (h2 / 12.0)).collect();
    let inner = solve_tridiagonal(&offs, &diag, &offs, &rhs);
    let mut psi = Vec::with_capacity(intervals + 1);
    psi.push(Complex64::new(0.0, 0.0));
    psi.extend(inner);
    psi.push(Complex64::new(0.0, 0.0));
    Ok(ModalStream { k: mode.k, t, y, psi })
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfRange(format!("time {t} must be finite and non-negative")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityNorms {
    pub u: f64,
    pub v: f64,
}

impl VelocityNorms {
    pub fn total(&self) -> f64 {
        self.u.hypot(self.v)
    }
}

/// `‖u‖` and `‖v‖` over `(0, 2π) × (-1, 1)` for a sum of modes:
/// `‖v‖² = 2π Σ k² ‖ψ_k‖²`, `‖u‖² = 2π Σ ‖ψ_k'‖²`.
pub fn velocity_norms(modes: &[ModalVorticity], t: f64) -> Result<VelocityNorms> {
    if modes.is_empty() {
        return Err(Error::InvalidInput("no modes given".into()));
    }
    let mut order: Vec<usize> = (0..modes.len()).collect();
    order.sort_by_key(|&i| (modes[i].k.unsigned_abs(), modes[i].k));
    let parts = order
        .par_iter()
        .map(|&i| {
            let s = modal_stream(&modes[i], t)?;
            let k2 = (s.k as f64).powi(2);
            Ok((k2 * s.l2_norm().powi(2), s.derivative_l2_norm().powi(2)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut v2, mut u2) = (0.0, 0.0);
    for (v, u) in parts {
        v2 += v;
        u2 += u;
    }
    Ok(VelocityNorms { u: (2.0 * PI * u2).sqrt(), v: (2.0 * PI * v2).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `‖u‖_{L²}`, horizontal velocity.
    U,
    /// `‖v‖_{L²}`, vertical velocity.
    V,
    /// `‖(u, v)‖_{L²}`.
    Velocity,
}

impl NormKind {
    pub fn pick(&self, n: &VelocityNorms) -> f64 {
        match self {
            NormKind::U => n.u,
            NormKind::V => n.v,
            NormKind::Velocity => n.total(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayFit {
    pub kind: NormKind,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// Least-squares slope of `log norm` against `log t`.
    pub exponent: f64,
    pub intercept: f64,
    pub residual: f64,
    /// `max t^{|exponent|} · norm`, the constant in `norm = O(t^{exponent})`.
    pub constant: f64,
}

/// `n` log-spaced times from `t0` to `t1` inclusive.
pub fn log_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && t0 > 0.0 && t1 > t0);
    let r = (t1 / t0).ln();
    (0..n).map(|i| t0 * (r * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Fits a decay exponent to an existing series.
pub fn fit_series(kind: NormKind, times: &[f64], norms: &[f64]) -> Result<DecayFit> {
    if times.len() != norms.len() || times.len() < 2 {
        return Err(Error::InvalidInput("need matching times and norms (≥ 2)".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("times must be strictly increasing".into()));
    }
    if let Some(i) = norms.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::NonPositiveNorm { t: times[i] });
    }
    let fit = loglog_fit(times, norms);
    let constant = times
        .iter()
        .zip(norms)
        .map(|(t, v)| t.powf(fit.slope.abs()) * v)
        .fold(0.0, f64::max);
    Ok(DecayFit {
        kind,
        times: times.to_vec(),
        norms: norms.to_vec(),
        exponent: fit.slope,
        intercept: fit.intercept,
        residual: fit.residual,
        constant,
    })
}

/// Velocity norms at `times` (log-spaced, at least one decade, starting at
/// `t ≥ 5`) with the fitted decay exponent.
pub fn decay_fit(modes: &[ModalVorticity], times: &[f64], kind: NormKind) -> Result<DecayFit> {
    let (first, last) = match (times.first(), times.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::InvalidInput("no times given".into())),
    };
    if first < 5.0 || last < 10.0 * first * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(format!(
            "fit window [{first}, {last}] must start at t ≥ 5 and span a decade"
        )));
    }
    let norms = times
        .par_iter()
        .map(|&t| velocity_norms(modes, t).map(|n| kind.pick(&n)))
        .collect::<Result<Vec<_>>>()?;
    fit_series(kind, times, &norms)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub t: f64,
    /// `‖f_k(t)‖_{L²}` with `f_k(t, y) = t² e^{ikty} ψ_k(t, y)`.
    pub profile_norm: f64,
    /// `‖f_k(t) - f_k(t_prev)‖_{L²}`; zero for the first row.
    pub increment: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub k: i64,
    pub rows: Vec<AsymptoticRow>,
    /// `max t_prev · ‖f_k(t) - f_k(t_prev)‖` over consecutive rows.
    pub cauchy_constant: f64,
    /// Whether the last profile norm exceeds `1e-4`.
    pub nonvanishing: bool,
    /// `f_k` at the last time, sampled on `y`.
    pub y: Vec<f64>,
    pub profile: Vec<Complex64>,
}

/// Tracks `f_k(t) = t² e^{ikty} ψ_k(t)` along increasing times. All times
/// share the grid of the largest one.
pub fn single_mode_asymptotics(mode: &ModalVorticity, times: &[f64]) -> Result<AsymptoticReport> {
    if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) || times[0] <= 0.0 {
        return Err(Error::InvalidInput("times must be positive and strictly increasing".into()));
    }
    let intervals = intervals_for(mode.k, *times.last().unwrap_or(&1.0))?;
    let k = mode.k as f64;
    let profiles = times
        .par_iter()
        .map(|&t| {
            let s = modal_stream_on(mode, t, intervals)?;
            let f: Vec<Complex64> = s
                .y
                .iter()
                .zip(&s.psi)
                .map(|(&y, p)| p * Complex64::from_polar(t * t, k * t * y))
                .collect();
            Ok((s.y, f))
        })
        .collect::<Result<Vec<_>>>()?;
    let h = 2.0 / intervals as f64;
    let mut rows = Vec::with_capacity(times.len());
    let mut cauchy_constant: f64 = 0.0;
    for (i, (&t, (_, f))) in times.iter().zip(&profiles).enumerate() {
        let increment = if i == 0 {
            0.0
        } else {
            let diff: Vec<Complex64> = f.iter().zip(&profiles[i - 1].1).map(|(a, b)| a - b).collect();
            let d = complex_l2(&diff, h);
            cauchy_constant = cauchy_constant.max(times[i - 1] * d);
            d
        };
        rows.push(AsymptoticRow { t, profile_norm: complex_l2(f, h), increment });
    }
    let (y, profile) = profiles.into_iter().last().unwrap_or_default();
    let nonvanishing = rows.last().map(|r| r.profile_norm > 1e-4).unwrap_or(false);
    Ok(AsymptoticReport { k: mode.k, rows, cauchy_constant, nonvanishing, y, profile })
}

/// Random modes `1 ≤ |k| ≤ k_max` with `ω_k⁰(y) = |k|^{-rho} Σ_m c_m
/// m^{-decay} sin(mπ(y+1)/2)`, `c_m` uniform in `[-1, 1]`.
///
/// Small `decay` gives data that is only `L²` in `y`; `rho` sets how fast
/// the mode energies fall off in `k`.
pub fn rough_modes<R: Rng>(rng: &mut R, k_max: i64, y_modes: usize, rho: f64, decay: f64) -> Result<Vec<ModalVorticity>> {
    if k_max < 1 || y_modes < 1 {
        return Err(Error::InvalidInput("need k_max ≥ 1 and at least one y-mode".into()));
    }
    let mut modes = Vec::new();
    for k in 1..=k_max {
        for sign in [1i64, -1] {
            let coeffs: Vec<f64> = (1..=y_modes)
                .map(|m| rng.gen_range(-1.0..1.0) * (m as f64).powf(-decay))
                .collect();
            let amp = (k as f64).powf(-rho);
            modes.push(ModalVorticity::from_fn(sign * k, "rough", move |y| {
                let v: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, c)| c * ((m + 1) as f64 * PI * (y + 1.0) / 2.0).sin())
                    .sum();
                Complex64::new(amp * v, 0.0)
            })?);
        }
    }
    Ok(modes)
}

/// `‖ω(t)‖_{L²((0,2π)×(-1,1))}` for free-streamed modes, on `n` points.
pub fn vorticity_l2(modes: &[ModalVorticity], t: f64, n: usize) -> f64 {
    let h = 2.0 / (n - 1) as f64;
    let total: f64 = modes
        .iter()
        .map(|m| {
            let w = free_stream(m, t);
            let v: Vec<Complex64> = (0..n).map(|j| w(-1.0 + j as f64 * h)).collect();
            complex_l2(&v, h).powi(2)
        })
        .sum();
    (2.0 * PI * total).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn green_function_values() {
        assert!((green_function(1, 0.0, 0.0) - 1f64.tanh() / 2.0).abs() < 1e-15);
        assert_eq!(green_function(3, 1.0, 0.2), 0.0);
        assert!(green_function(3, -1.0, 0.2).abs() < 1e-300);
        assert!((green_function(2, 0.3, -0.4) - green_function(2, -0.4, 0.3)).abs() < 1e-16);
        assert!((green_function(-2, 0.3, -0.4) - green_function(2, 0.3, -0.4)).abs() < 1e-16);
        let g = green_function(400, 0.1, 0.1);
        assert!(g.is_finite() && (g - 1.0 / 800.0).abs() < 1e-12);
    }

    #[test]
    fn green_function_jump_condition() {
        // -∂_y G has a unit jump across y = y0
        let (k, y0, e) = (2, 0.3, 1e-6);
        let d_right = (green_function(k, y0 + 2.0 * e, y0) - green_function(k, y0 + e, y0)) / e;
        let d_left = (green_function(k, y0 - e, y0) - green_function(k, y0 - 2.0 * e, y0)) / e;
        assert!((d_left - d_right - 1.0).abs() < 1e-4);
    }

    #[test]
    fn static_solve_matches_closed_form() {
        // -ψ'' + ψ = cos(πy/2) has ψ = cos(πy/2)/(1 + π²/4)
        let mode = ModalVorticity::cosine(1).unwrap();
        let s = modal_stream(&mode, 0.0).unwrap();
        for (y, p) in s.y.iter().zip(&s.psi) {
            let exact = (PI * y / 2.0).cos() / (1.0 + PI * PI / 4.0);
            assert!((p.re - exact).abs() < 1e-12 && p.im.abs() < 1e-15);
        }
    }

    #[test]
    fn free_stream_is_unimodular() {
        let mode = ModalVorticity::cosine(3).unwrap();
        let w = free_stream(&mode, 7.3);
        for j in 0..20 {
            let y = -1.0 + 0.1 * j as f64;
            assert!((w(y).norm() - mode.eval(y).norm()).abs() < 1e-15);
        }
        assert_eq!(free_stream(&mode, 0.0)(0.4), mode.eval(0.4));
    }

    #[test]
    fn synthetic_series_fit() {
        let t = log_times(10.0, 100.0, 7);
        let v: Vec<f64> = t.iter().map(|t| t.powi(-2)).collect();
        let fit = fit_series(NormKind::V, &t, &v).unwrap();
        assert!((fit.exponent + 2.0).abs() < 1e-12);
        assert!((fit.constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_zero_is_rejected() {
        assert!(ModalVorticity::cosine(0).is_err());
    }
}
