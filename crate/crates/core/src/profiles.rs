//! Shear profiles near Couette flow and their Rayleigh potential.
//!
//! The main family is `U(y) = y + a γ² erf(y/γ)`, a Couette flow with a
//! narrow odd bump of width `γ` at the center of the channel. A general odd
//! mollifier `h` may replace `erf`; it is supplied as a sampled table and
//! interpolated by a natural cubic spline.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{self, FRAC_1_SQRT_PI};
use crate::spline::CubicSpline;

/// Smallest admissible `U'` on the channel.
pub const MIN_SLOPE: f64 = 1e-8;

/// A monotone shear flow `(U(y), 0)` on `[-1, 1]` with analytic derivatives.
pub trait Shear: Send + Sync {
    fn u(&self, y: f64) -> f64;
    fn du(&self, y: f64) -> f64;
    fn d2u(&self, y: f64) -> f64;
    fn d3u(&self, y: f64) -> f64;

    /// Stream function `psi0(y) = \int_0^y U`.
    fn stream(&self, y: f64) -> f64 {
        let panels = ((y.abs() * 400.0).ceil() as usize).max(1);
        special::integrate(|s| self.u(s), 0.0, y, panels, 8)
    }

    /// True when the profile belongs to the odd single-inflection family for
    /// which the instability criterion is known.
    fn single_inflection_family(&self) -> bool {
        false
    }

    /// Characteristic length of the finest feature (for grid selection).
    fn feature_width(&self) -> f64 {
        1.0
    }
}

/// Sampled odd mollifier `h`, stored on `x >= 0` and extended by oddness.
#[derive(Debug, Clone)]
pub struct HTable {
    half: CubicSpline,
    window: f64,
}

impl HTable {
    /// Builds the table from `(x, h(x))` samples. Samples on both sides of
    /// zero are checked for oddness; a one-sided table must contain `h(0) = 0`
    /// or is taken to start at the origin.
    pub fn from_samples(samples: &[(f64, f64)]) -> Result<Self> {
        let mut pts: Vec<(f64, f64)> = samples.to_vec();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        pts.dedup_by(|a, b| a.0 == b.0);
        if pts.len() < 4 {
            return Err(Error::InvalidProfile("h table needs at least 4 samples".into()));
        }
        let scale = pts.iter().fold(0.0_f64, |m, p| m.max(p.1.abs())).max(1e-300);
        let has_negative = pts.iter().any(|p| p.0 < 0.0);
        if has_negative {
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let hs: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let full = CubicSpline::new(xs, hs)?;
            let (lo, hi) = full.domain();
            let reach = hi.min(-lo);
            let mut defect = 0.0_f64;
            for &(x, h) in pts.iter().filter(|p| p.0 >= 0.0 && p.0 <= reach) {
                defect = defect.max((h + full.eval(-x)).abs());
            }
            if defect > 1e-6 * scale {
                return Err(Error::NotOdd { defect });
            }
        }
        let mut half: Vec<(f64, f64)> = pts.into_iter().filter(|p| p.0 >= 0.0).collect();
        match half.first() {
            Some(&(0.0, h0)) => {
                if h0.abs() > 1e-10 * scale {
                    return Err(Error::NotOdd { defect: h0.abs() });
                }
                half[0].1 = 0.0;
            }
            _ => half.insert(0, (0.0, 0.0)),
        }
        if half.len() < 4 {
            return Err(Error::InvalidProfile("h table has too few samples with x >= 0".into()));
        }
        let window = half[half.len() - 1].0;
        let xs = half.iter().map(|p| p.0).collect();
        let hs = half.iter().map(|p| p.1).collect();
        Ok(Self { half: CubicSpline::new(xs, hs)?, window })
    }

    /// Tabulates a closed-form odd function on `[-window, window]`.
    pub fn from_fn<F: Fn(f64) -> f64>(h: F, window: f64, samples: usize) -> Result<Self> {
        let pts: Vec<(f64, f64)> = (0..samples)
            .map(|i| {
                let x = -window + 2.0 * window * i as f64 / (samples - 1) as f64;
                (x, h(x))
            })
            .collect();
        Self::from_samples(&pts)
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    /// `[h, h', h'', h''']` at `x`; constant continuation beyond the window.
    pub fn eval_all(&self, x: f64) -> [f64; 4] {
        let s = x.signum();
        let ax = x.abs();
        if ax >= self.window {
            return [s * self.half.eval(self.window), 0.0, 0.0, 0.0];
        }
        let [h, d1, d2, d3] = self.half.eval_all(ax);
        [s * h, d1, s * d2, d3]
    }

    /// `h''(x)/x`, finite at the origin.
    pub fn d2_over_x(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax >= self.window {
            0.0
        } else if ax == 0.0 {
            self.half.eval_all(0.0)[3]
        } else {
            self.half.eval_all(ax)[2] / ax
        }
    }

    /// `h(x)/x`, finite at the origin.
    pub fn over_x(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax == 0.0 {
            self.half.eval_all(0.0)[1]
        } else {
            self.eval_all(ax)[0] / ax
        }
    }

    fn half_spline(&self) -> &CubicSpline {
        &self.half
    }
}

#[derive(Debug, Clone)]
pub enum ProfileKind {
    Erf,
    GeneralH(Arc<HTable>),
}

/// The family `U(y) = y + a γ² h(y/γ)` with `h = erf` or a tabulated `h`.
#[derive(Debug, Clone)]
pub struct ShearProfile {
    gamma: f64,
    a: f64,
    kind: ProfileKind,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ProfileSummary {
    pub gamma: f64,
    pub a: f64,
    pub min_slope: f64,
}

impl ShearProfile {
    pub fn erf(gamma: f64, a: f64) -> Result<Self> {
        Self::build(gamma, a, ProfileKind::Erf)
    }

    pub fn general_h(gamma: f64, a: f64, table: HTable) -> Result<Self> {
        Self::build(gamma, a, ProfileKind::GeneralH(Arc::new(table)))
    }

    fn build(gamma: f64, a: f64, kind: ProfileKind) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidProfile(format!("gamma must be positive, got {gamma}")));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidProfile(format!("a must be non-negative, got {a}")));
        }
        let profile = Self { gamma, a, kind };
        let min_slope = profile.min_slope();
        if min_slope <= MIN_SLOPE {
            return Err(Error::NotMonotone { min_slope });
        }
        Ok(profile)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// Minimum of `U'` over a grid that resolves the bump.
    pub fn min_slope(&self) -> f64 {
        let n = ((40.0 / self.gamma).ceil() as usize).clamp(2000, 400_000);
        (0..=n)
            .map(|i| self.du(-1.0 + 2.0 * i as f64 / n as f64))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary { gamma: self.gamma, a: self.a, min_slope: self.min_slope() }
    }

    /// `U' - 1`, the deviation of the vorticity from Couette.
    pub fn vorticity_defect(&self, y: f64) -> f64 {
        match &self.kind {
            ProfileKind::Erf => {
                let x = y / self.gamma;
                2.0 * self.a * self.gamma * FRAC_1_SQRT_PI * (-x * x).exp()
            }
            ProfileKind::GeneralH(h) => self.a * self.gamma * h.eval_all(y / self.gamma)[1],
        }
    }

    /// `1 + a γ h(x)/x`, the ratio `U(y)/y` written in the stretched variable.
    fn denominator(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::Erf => 1.0 + self.gamma * self.a * special::lambda(x),
            ProfileKind::GeneralH(h) => 1.0 + self.gamma * self.a * h.over_x(x),
        }
    }

    /// `Q = U''/U` in the factored form; never forms `0/0` at the origin.
    pub fn q(&self, y: f64) -> f64 {
        let x = y / self.gamma;
        match &self.kind {
            ProfileKind::Erf => -4.0 * self.a / self.gamma * special::sigma(x) / self.denominator(x),
            ProfileKind::GeneralH(h) => self.a / self.gamma * h.d2_over_x(x) / self.denominator(x),
        }
    }

    /// `Q'(y)/U(y)`, the second derivative of the steady nonlinearity along
    /// the base flow. Finite at the origin.
    pub fn q_prime_over_u(&self, y: f64) -> f64 {
        let g = self.gamma;
        let x = y / g;
        let d = self.denominator(x);
        match &self.kind {
            ProfileKind::Erf => {
                let s = special::sigma(x);
                // (dQ/dx)/x with Q = -(4a/γ) σ / D
                let dqdx_over_x = -4.0 * self.a / g
                    * (-2.0 * s * d - s * g * self.a * special::lambda_prime_over_x(x))
                    / (d * d);
                dqdx_over_x / (g * g * d)
            }
            ProfileKind::GeneralH(_) => {
                // centred difference of Q; Q is even so Q'(y)/y is regular
                let h = 1e-4 * g;
                if y.abs() < 4.0 * h {
                    let q2 = (self.q(h) - 2.0 * self.q(0.0) + self.q(-h)) / (h * h);
                    q2 / self.du(0.0)
                } else {
                    let dq = (self.q(y + h) - self.q(y - h)) / (2.0 * h);
                    dq / self.u(y)
                }
            }
        }
    }
}

impl Shear for ShearProfile {
    fn u(&self, y: f64) -> f64 {
        let x = y / self.gamma;
        let g2 = self.gamma * self.gamma;
        match &self.kind {
            ProfileKind::Erf => y + self.a * g2 * special::erf(x),
            ProfileKind::GeneralH(h) => y + self.a * g2 * h.eval_all(x)[0],
        }
    }

    fn du(&self, y: f64) -> f64 {
        1.0 + self.vorticity_defect(y)
    }

    fn d2u(&self, y: f64) -> f64 {
        let x = y / self.gamma;
        match &self.kind {
            ProfileKind::Erf => -4.0 * self.a * FRAC_1_SQRT_PI * x * (-x * x).exp(),
            ProfileKind::GeneralH(h) => self.a * h.eval_all(x)[2],
        }
    }

    fn d3u(&self, y: f64) -> f64 {
        let x = y / self.gamma;
        match &self.kind {
            ProfileKind::Erf => {
                -4.0 * self.a * FRAC_1_SQRT_PI / self.gamma * (1.0 - 2.0 * x * x) * (-x * x).exp()
            }
            ProfileKind::GeneralH(h) => self.a / self.gamma * h.eval_all(x)[3],
        }
    }

    fn stream(&self, y: f64) -> f64 {
        match &self.kind {
            ProfileKind::Erf => {
                let x = y / self.gamma;
                let g3 = self.gamma.powi(3);
                0.5 * y * y
                    + self.a * g3 * (x * special::erf(x) + ((-x * x).exp() - 1.0) * FRAC_1_SQRT_PI)
            }
            ProfileKind::GeneralH(_) => {
                let panels = ((y.abs() / self.gamma * 20.0).ceil() as usize).max(1);
                special::integrate(|s| self.u(s), 0.0, y, panels, 8)
            }
        }
    }

    fn single_inflection_family(&self) -> bool {
        self.a > 0.0
    }

    fn feature_width(&self) -> f64 {
        self.gamma
    }
}

/// Evaluates `U` of a shear profile.
pub fn eval_u(profile: &ShearProfile, y: f64) -> f64 {
    profile.u(y)
}

pub fn eval_u_prime(profile: &ShearProfile, y: f64) -> f64 {
    profile.du(y)
}

/// The Rayleigh potential `Q = U''/U` of a shear profile.
#[derive(Debug, Clone)]
pub struct RayleighPotential {
    profile: ShearProfile,
}

impl RayleighPotential {
    pub fn new(profile: ShearProfile) -> Self {
        Self { profile }
    }

    pub fn profile(&self) -> &ShearProfile {
        &self.profile
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.profile.q(y)
    }
}

pub fn eval_q(potential: &RayleighPotential, y: f64) -> f64 {
    potential.eval(y)
}

/// Computes `b0 = -\int h''(x)/x dx` for a tabulated mollifier.
///
/// Returns `(b0, tail_estimate)`. The integral over the table window is
/// exact for the spline interpolant (its `h''` is piecewise linear); the
/// tail beyond the window is bounded by `2 |h'(R)|/R`.
pub fn general_h_b0(table: &HTable) -> Result<(f64, f64)> {
    let spline = table.half_spline();
    let knots = spline.knots();
    let mut integral = 0.0;
    for w in knots.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let m0 = spline.eval_all(x0)[2];
        let m1 = spline.eval_all(x1)[2];
        let slope = (m1 - m0) / (x1 - x0);
        let c0 = m0 - slope * x0;
        integral += slope * (x1 - x0);
        if x0 > 0.0 {
            integral += c0 * (x1 / x0).ln();
        }
    }
    // h''/x is even: the full line is twice the half line
    let b0 = -2.0 * integral;
    let window = table.window();
    let tail = 2.0 * spline.eval_all(window)[1].abs() / window;
    if !(b0 > 0.0) {
        return Err(Error::NonPositiveB0 { b0 });
    }
    Ok((b0, tail))
}

/// `U(y) = y + Σ a_j sin(κ_j y) + Σ b_j cos(κ_j y)`: smooth perturbations of
/// Couette used for stability sweeps.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct TrigShear {
    pub sin_terms: Vec<(f64, f64)>,
    pub cos_terms: Vec<(f64, f64)>,
}

impl TrigShear {
    pub fn couette() -> Self {
        Self::default()
    }

    /// `U = y + amplitude * sin(π y)`.
    pub fn sine_bump(amplitude: f64) -> Self {
        Self { sin_terms: vec![(amplitude, PI)], cos_terms: Vec::new() }
    }

    /// Scales all perturbation amplitudes by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            sin_terms: self.sin_terms.iter().map(|&(a, k)| (a * factor, k)).collect(),
            cos_terms: self.cos_terms.iter().map(|&(b, k)| (b * factor, k)).collect(),
        }
    }

    fn derivative(&self, y: f64, order: u32) -> f64 {
        let mut s = 0.0;
        for &(amp, k) in &self.sin_terms {
            let v = match order % 4 {
                0 => (k * y).sin(),
                1 => (k * y).cos(),
                2 => -(k * y).sin(),
                _ => -(k * y).cos(),
            };
            s += amp * k.powi(order as i32) * v;
        }
        for &(amp, k) in &self.cos_terms {
            let v = match order % 4 {
                0 => (k * y).cos(),
                1 => -(k * y).sin(),
                2 => -(k * y).cos(),
                _ => (k * y).sin(),
            };
            s += amp * k.powi(order as i32) * v;
        }
        s
    }
}

impl Shear for TrigShear {
    fn u(&self, y: f64) -> f64 {
        y + self.derivative(y, 0)
    }
    fn du(&self, y: f64) -> f64 {
        1.0 + self.derivative(y, 1)
    }
    fn d2u(&self, y: f64) -> f64 {
        self.derivative(y, 2)
    }
    fn d3u(&self, y: f64) -> f64 {
        self.derivative(y, 3)
    }
    fn feature_width(&self) -> f64 {
        let kmax = self
            .sin_terms
            .iter()
            .chain(&self.cos_terms)
            .fold(1.0_f64, |m, t| m.max(t.1.abs()));
        (1.0 / kmax).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_is_odd_and_zero_at_origin() {
        let p = ShearProfile::erf(0.1, 1.0).unwrap();
        assert_eq!(p.u(0.0), 0.0);
        for i in 0..1000 {
            let y = -1.0 + 2.0 * (i as f64 + 0.37) / 1000.0;
            assert!((p.u(y) + p.u(-y)).abs() <= 1e-12);
        }
    }

    #[test]
    fn endpoint_value() {
        let p = ShearProfile::erf(0.1, 1.0).unwrap();
        // erf(10) = 1 - 2.09e-45, so U(1) = 1.01 in double precision
        assert!((p.u(1.0) - 1.01).abs() < 1e-15);
        assert!((p.u(-1.0) + p.u(1.0)).abs() < 1e-15);
    }

    #[test]
    fn slope_at_center() {
        let p = ShearProfile::erf(0.1, 1.0).unwrap();
        let expected = 1.0 + 0.2 / PI.sqrt();
        assert!((p.du(0.0) - expected).abs() < 1e-14);
        assert!((expected - 1.11284).abs() < 1e-5);
        let tiny = ShearProfile::erf(0.02, 1.0).unwrap();
        assert!((tiny.du(1.0) - 1.0).abs() < 1e-100);
        assert!((tiny.du(-1.0) - 1.0).abs() < 1e-100);
    }

    #[test]
    fn q_at_origin_matches_formula_and_difference_quotient() {
        let p = ShearProfile::erf(0.1, 1.0).unwrap();
        let sp = PI.sqrt();
        // U''/U -> -(4a/(γ sqrt(pi))) / (1 + 2aγ/sqrt(pi)) as y -> 0
        let expected = -(4.0 / (0.1 * sp)) / (1.0 + 0.1 * 2.0 / sp);
        assert!((p.q(0.0) - expected).abs() < 1e-12);
        assert!((expected + 20.28).abs() < 0.01);
        // U''/U at a small offset
        let y = 1e-6;
        let h = 1e-4;
        let d2 = (p.u(y + h) - 2.0 * p.u(y) + p.u(y - h)) / (h * h);
        assert!((d2 / p.u(y) - expected).abs() < 1e-3 * expected.abs());
    }

    #[test]
    fn q_is_even_and_negative() {
        let p = ShearProfile::erf(0.05, 2.0).unwrap();
        for i in 1..500 {
            let y = i as f64 / 500.0;
            assert_eq!(p.q(y), p.q(-y));
            assert!(p.q(y) <= 0.0);
        }
    }

    #[test]
    fn q_prime_over_u_matches_difference() {
        let p = ShearProfile::erf(0.05, 1.0).unwrap();
        for &y in &[0.0, 0.004, 0.02, 0.07, 0.3] {
            let h = 1e-6;
            let fd = if y == 0.0 {
                (p.q(h) - 2.0 * p.q(0.0) + p.q(-h)) / (h * h) / p.du(0.0)
            } else {
                (p.q(y + h) - p.q(y - h)) / (2.0 * h) / p.u(y)
            };
            let v = p.q_prime_over_u(y);
            assert!((v - fd).abs() < 1e-4 * fd.abs().max(1.0), "y={y}: {v} vs {fd}");
        }
    }

    #[test]
    fn stream_matches_quadrature() {
        let p = ShearProfile::erf(0.05, 1.3).unwrap();
        for &y in &[0.0, 0.01, -0.2, 1.0] {
            let q = special::integrate(|s| p.u(s), 0.0, y, 400, 8);
            assert!((p.stream(y) - q).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(ShearProfile::erf(0.0, 1.0).is_err());
        assert!(ShearProfile::erf(0.1, -1.0).is_err());
        // U' = 1 + a γ h' fails for large negative slope of h
        let table = HTable::from_fn(|x| -x * (-x * x).exp(), 6.0, 241).unwrap();
        assert!(matches!(
            ShearProfile::general_h(0.5, 4.0, table),
            Err(Error::NotMonotone { .. })
        ));
    }

    #[test]
    fn b0_of_erf_is_four() {
        let table = HTable::from_fn(special::erf, 8.0, 1601).unwrap();
        let (b0, tail) = general_h_b0(&table).unwrap();
        assert!((b0 - 4.0).abs() < 1e-4, "b0 = {b0}");
        assert!(tail < 1e-20);
    }

    #[test]
    fn b0_of_gaussian_derivative() {
        // h''/x = (4x^2 - 6) e^{-x^2}  ->  b0 = 4 sqrt(pi)
        let table = HTable::from_fn(|x| x * (-x * x).exp(), 8.0, 1601).unwrap();
        let (b0, _) = general_h_b0(&table).unwrap();
        assert!((b0 - 4.0 * PI.sqrt()).abs() < 1e-3, "b0 = {b0}");
    }

    #[test]
    fn b0_rejects_negative_families() {
        let table = HTable::from_fn(|x| -special::erf(x), 8.0, 801).unwrap();
        assert!(matches!(general_h_b0(&table), Err(Error::NonPositiveB0 { .. })));
    }

    #[test]
    fn even_table_is_rejected() {
        assert!(matches!(
            HTable::from_fn(|x| (-x * x).exp(), 5.0, 101),
            Err(Error::NotOdd { .. })
        ));
    }

    #[test]
    fn tabulated_erf_tracks_closed_form() {
        let table = HTable::from_fn(special::erf, 8.0, 3201).unwrap();
        let tab = ShearProfile::general_h(0.1, 1.0, table).unwrap();
        let exact = ShearProfile::erf(0.1, 1.0).unwrap();
        for &y in &[-0.9, -0.05, 0.0, 0.013, 0.2] {
            assert!((tab.u(y) - exact.u(y)).abs() < 1e-8);
            assert!((tab.du(y) - exact.du(y)).abs() < 1e-6);
            assert!((tab.q(y) - exact.q(y)).abs() < 1e-3 * exact.q(y).abs().max(1e-3));
        }
    }

    #[test]
    fn trig_shear_derivatives() {
        let s = TrigShear { sin_terms: vec![(0.1, PI)], cos_terms: vec![(0.02, 2.0)] };
        let h = 1e-5;
        for &y in &[-0.7, 0.1, 0.9] {
            let fd1 = (s.u(y + h) - s.u(y - h)) / (2.0 * h);
            let fd3 = (s.d2u(y + h) - s.d2u(y - h)) / (2.0 * h);
            assert!((fd1 - s.du(y)).abs() < 1e-8);
            assert!((fd3 - s.d3u(y)).abs() < 1e-6);
        }
    }
}
