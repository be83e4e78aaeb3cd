//! Integer and fractional Sobolev norms on `(-1, 1)`, mixed norms of fields
//! periodic in `x`, and the Hardy quotient.
//!
//! Fractional orders `s = m + σ` use the Sobolev–Slobodeckij (Gagliardo)
//! seminorm of the `m`-th derivative:
//!
//! ```text
//! [v]²_σ = ∫∫ |v(x) - v(y)|² / |x - y|^{1+2σ} dx dy
//! ```
//!
//! The double integral is evaluated by product integration: the squared
//! difference quotient is treated as smooth and the weight `|x - y|^{1-2σ}`
//! is integrated exactly over each pair of grid cells, including the
//! diagonal ones.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{loglog_fit, LineFit};
use crate::special::{gauss_legendre, integrate};

/// Relative change under grid halving above which a norm is rejected.
pub const RESOLUTION_TOLERANCE: f64 = 0.01;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Samples on the uniform grid `y_j = -1 + 2j/(n-1)`, `j = 0..n`, optionally
/// backed by the function they were sampled from.
#[derive(Clone)]
pub struct Field1D {
    values: Vec<f64>,
    exact: Option<Evaluator>,
}

impl fmt::Debug for Field1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field1D")
            .field("n", &self.values.len())
            .field("closed_form", &self.exact.is_some())
            .finish()
    }
}

impl Field1D {
    pub const MIN_SAMPLES: usize = 64;

    pub fn from_samples(values: Vec<f64>) -> Result<Self> {
        if values.len() < Self::MIN_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "a field needs at least {} samples, got {}",
                Self::MIN_SAMPLES,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("field has non-finite samples".into()));
        }
        Ok(Self { values, exact: None })
    }

    /// Samples `f` on `n` nodes and keeps `f` for refinement checks.
    pub fn from_fn<F>(f: F, n: usize) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let values = (0..n).map(|j| f(node(j, n))).collect();
        let mut field = Self::from_samples(values)?;
        field.exact = Some(Arc::new(f));
        Ok(field)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        2.0 / (self.values.len() - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = self.values.len();
        (0..n).map(|j| node(j, n)).collect()
    }

    pub fn has_closed_form(&self) -> bool {
        self.exact.is_some()
    }

    /// Value at `y`: the closed form when present, else linear interpolation.
    pub fn eval(&self, y: f64) -> f64 {
        match &self.exact {
            Some(f) => f(y),
            None => interpolate(&self.values, y),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let values = self.values.iter().map(|v| c * v).collect();
        let exact = self.exact.clone().map(|f| Arc::new(move |y: f64| c * f(y)) as Evaluator);
        Self { values, exact }
    }

    /// Pointwise sum of two fields on the same grid.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::InvalidInput("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        let exact = match (&self.exact, &other.exact) {
            (Some(f), Some(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Some(Arc::new(move |y: f64| f(y) + g(y)) as Evaluator)
            }
            _ => None,
        };
        Ok(Self { values, exact })
    }

    /// The same field on a grid with half the spacing.
    fn refined(&self) -> Self {
        let n = 2 * self.len() - 1;
        match &self.exact {
            Some(f) => Self {
                values: (0..n).map(|j| f(node(j, n))).collect(),
                exact: Some(f.clone()),
            },
            None => Self { values: resample(&self.values, n), exact: None },
        }
    }

    /// The same field on a grid with twice the spacing.
    fn coarsened(&self) -> Vec<f64> {
        resample(&self.values, self.len() / 2 + 1)
    }
}

#[inline]
fn node(j: usize, n: usize) -> f64 {
    -1.0 + 2.0 * j as f64 / (n - 1) as f64
}

fn interpolate(values: &[f64], y: f64) -> f64 {
    let n = values.len();
    let t = ((y + 1.0) / 2.0 * (n - 1) as f64).clamp(0.0, (n - 1) as f64);
    let j = (t.floor() as usize).min(n - 2);
    let w = t - j as f64;
    (1.0 - w) * values[j] + w * values[j + 1]
}

fn resample(values: &[f64], m: usize) -> Vec<f64> {
    (0..m).map(|j| interpolate(values, node(j, m))).collect()
}

fn trapezoid_sq(v: &[f64], h: f64) -> f64 {
    let n = v.len();
    let inner: f64 = v.iter().map(|x| x * x).sum();
    h * (inner - 0.5 * (v[0] * v[0] + v[n - 1] * v[n - 1]))
}

/// Second-order finite-difference derivative (one-sided at the ends).
fn derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    for j in 1..n - 1 {
        d[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
    }
    d
}

/// Gagliardo seminorm squared of samples `v` with spacing `h`, `σ ∈ (0, 1)`.
fn gagliardo_sq(v: &[f64], h: f64, sigma: f64) -> f64 {
    let n = v.len();
    let p = 1.0 - 2.0 * sigma;
    // F'' = |t|^p; W_d = ∫∫ over two cells at offset d of |x - y|^p
    let big_f = |t: f64| t.abs().powf(p + 2.0) / ((p + 1.0) * (p + 2.0));
    let weight = |d: usize| {
        let t = d as f64 * h;
        big_f(t + h) - 2.0 * big_f(t) + big_f((t - h).abs())
    };
    let cell = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };

    let slope = derivative(v, h);
    let diagonal: f64 = (0..n).map(|i| cell(i) * slope[i] * slope[i]).sum::<f64>() * weight(0);

    let off: f64 = (1..n)
        .into_par_iter()
        .map(|d| {
            let dist = d as f64 * h;
            let mut s = 0.0;
            for i in 0..n - d {
                let q = (v[i + d] - v[i]) / dist;
                s += cell(i) * cell(i + d) * q * q;
            }
            s * weight(d)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    diagonal + 2.0 * off
}

/// Splits `s` into its integer part and fractional remainder.
fn split_order(s: f64) -> (usize, f64) {
    let m = s.floor();
    let sigma = s - m;
    if sigma < 1e-12 {
        (m as usize, 0.0)
    } else if 1.0 - sigma < 1e-12 {
        (m as usize + 1, 0.0)
    } else {
        (m as usize, sigma)
    }
}

/// `‖v‖²_{H^s}` for samples with spacing `h`, without any resolution check.
fn hs_sq_raw(v: &[f64], h: f64, s: f64) -> f64 {
    let (m, sigma) = split_order(s);
    let mut total = trapezoid_sq(v, h);
    let mut deriv = v.to_vec();
    for _ in 0..m {
        deriv = derivative(&deriv, h);
        total += trapezoid_sq(&deriv, h);
    }
    if sigma > 0.0 {
        total += gagliardo_sq(&deriv, h, sigma);
    }
    total
}

fn check_order(s: f64) -> Result<()> {
    if !(0.0..=3.0).contains(&s) {
        return Err(Error::OutOfRange(format!("Sobolev order {s} outside [0, 3]")));
    }
    Ok(())
}

fn check_resolution(fine: f64, coarse: f64) -> Result<()> {
    let relative_change = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if relative_change > RESOLUTION_TOLERANCE {
        return Err(Error::UnresolvedField { relative_change });
    }
    Ok(())
}

/// `‖u‖_{H^s(-1,1)}` for `0 ≤ s ≤ 3`.
///
/// The value on the field's own grid is returned after comparing it with a
/// once-refined grid (closed-form fields) or a once-coarsened grid (sampled
/// fields).
pub fn hs_norm_1d(u: &Field1D, s: f64) -> Result<f64> {
    check_order(s)?;
    let norm = hs_sq_raw(&u.values, u.spacing(), s).sqrt();
    let other = if u.has_closed_form() {
        let fine = u.refined();
        hs_sq_raw(&fine.values, fine.spacing(), s).sqrt()
    } else {
        let coarse = u.coarsened();
        hs_sq_raw(&coarse, 2.0 / (coarse.len() - 1) as f64, s).sqrt()
    };
    if norm > 1e-300 {
        check_resolution(norm, other)?;
    }
    Ok(norm)
}

/// Top-order part of the norm: `‖u‖²_{H^s} - ‖u‖²_{L²}` (square-rooted).
pub fn hs_seminorm_1d(u: &Field1D, s: f64) -> Result<f64> {
    let full = hs_norm_1d(u, s)?;
    let l2 = trapezoid_sq(&u.values, u.spacing());
    Ok((full * full - l2).max(0.0).sqrt())
}

/// Samples `γ e^{-(y/γ)²}` finely enough to resolve its width.
pub fn gaussian_field(gamma: f64) -> Result<Field1D> {
    let n = ((64.0 / gamma).ceil() as usize + 1).max(257);
    Field1D::from_fn(move |y| gamma * (-(y / gamma).powi(2)).exp(), n)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianScaling {
    pub s: f64,
    pub gammas: Vec<f64>,
    pub norms: Vec<f64>,
    /// Least-squares fit of `log ‖·‖` against `log γ` over the fitted points.
    pub fit: LineFit,
    /// Number of smallest gammas entering the fit.
    pub fitted_points: usize,
    /// Full-line constant `C_s` from the Fourier-side integral.
    pub c_s: f64,
}

impl GaussianScaling {
    pub fn exponent(&self) -> f64 {
        self.fit.slope
    }
}

/// `C_s` with `‖γ e^{-(y/γ)²}‖_{Ḣ^s(ℝ)} = C_s γ^{3/2-s}`:
/// `C_s² = (1/2) ∫ |ξ|^{2s} e^{-ξ²/2} dξ`.
pub fn gaussian_constant(s: f64) -> f64 {
    // even integrand; tail beyond 40 is below e^{-800}
    let half = integrate(|xi| xi.powf(2.0 * s) * (-0.5 * xi * xi).exp(), 0.0, 40.0, 200, 8);
    half.sqrt()
}

/// Norms of `γ e^{-(y/γ)²}` in `H^s(-1,1)` and their log-log exponent.
///
/// With more than two gammas the largest one is left out of the fit, since
/// it carries the largest truncation effect.
pub fn gaussian_hs_scaling(s: f64, gammas: &[f64]) -> Result<GaussianScaling> {
    if !(0.0..=1.4).contains(&s) {
        return Err(Error::OutOfRange(format!("scaling study needs s in [0, 1.4], got {s}")));
    }
    if gammas.len() < 2 {
        return Err(Error::InvalidInput("scaling study needs at least two gammas".into()));
    }
    if gammas.iter().any(|g| !(*g > 0.0 && *g <= 0.2)) {
        return Err(Error::OutOfRange("gammas must lie in (0, 0.2]".into()));
    }
    let norms = gammas
        .par_iter()
        .map(|&g| gaussian_field(g).and_then(|f| hs_norm_1d(&f, s)))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs: Vec<(f64, f64)> = gammas.iter().copied().zip(norms.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.len() > 2 {
        pairs.pop();
    }
    let (g, v): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(GaussianScaling {
        s,
        gammas: gammas.to_vec(),
        norms,
        fit: loglog_fit(&g, &v),
        fitted_points: g.len(),
        c_s: gaussian_constant(s),
    })
}

/// Complex field on `[0, T) × [-1, 1]`, periodic in `x`. Stored x-major:
/// `values[i * ny + j]` at `x_i = iT/nx`, `y_j = -1 + 2j/(ny-1)`.
#[derive(Debug, Clone)]
pub struct Field2D {
    nx: usize,
    ny: usize,
    period: f64,
    values: Vec<Complex64>,
}

impl Field2D {
    pub fn new(nx: usize, ny: usize, period: f64, values: Vec<Complex64>) -> Result<Self> {
        if nx < 1 || ny < Field1D::MIN_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "field grid {nx}x{ny} too small (need ny ≥ {})",
                Field1D::MIN_SAMPLES
            )));
        }
        if values.len() != nx * ny {
            return Err(Error::InvalidInput("value count does not match the grid".into()));
        }
        if !(period > 0.0) {
            return Err(Error::InvalidInput(format!("period {period} must be positive")));
        }
        Ok(Self { nx, ny, period, values })
    }

    pub fn from_real(nx: usize, ny: usize, period: f64, values: &[f64]) -> Result<Self> {
        Self::new(nx, ny, period, values.iter().map(|v| Complex64::new(*v, 0.0)).collect())
    }

    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(nx: usize, ny: usize, period: f64, f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            let x = period * i as f64 / nx as f64;
            for j in 0..ny {
                values.push(f(x, node(j, ny)));
            }
        }
        Self::new(nx, ny, period, values)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Fourier coefficients `ĥ_k(y)` with `h = Σ e^{2πikx/T} ĥ_k(y)`, as
    /// `(k, samples)` in FFT order.
    pub fn modes(&self) -> Vec<(i64, Vec<Complex64>)> {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(self.nx);
        let mut out = vec![vec![Complex64::new(0.0, 0.0); self.ny]; self.nx];
        let scale = 1.0 / self.nx as f64;
        let mut column = vec![Complex64::new(0.0, 0.0); self.nx];
        for j in 0..self.ny {
            for i in 0..self.nx {
                column[i] = self.values[i * self.ny + j];
            }
            fft.process(&mut column);
            for (k, c) in column.iter().enumerate() {
                out[k][j] = c * scale;
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(k, v)| {
                let signed = if k <= self.nx / 2 { k as i64 } else { k as i64 - self.nx as i64 };
                (signed, v)
            })
            .collect()
    }
}

fn complex_hs_sq(v: &[Complex64], h: f64, s: f64) -> f64 {
    let re: Vec<f64> = v.iter().map(|c| c.re).collect();
    let im: Vec<f64> = v.iter().map(|c| c.im).collect();
    hs_sq_raw(&re, h, s) + hs_sq_raw(&im, h, s)
}

fn coarsen_complex(v: &[Complex64]) -> Vec<Complex64> {
    let re: Vec<f64> = v.iter().map(|c| c.re).collect();
    let im: Vec<f64> = v.iter().map(|c| c.im).collect();
    let m = v.len() / 2 + 1;
    resample(&re, m).into_iter().zip(resample(&im, m)).map(|(a, b)| Complex64::new(a, b)).collect()
}

/// Evaluates `Σ_k weight(k, ĥ_k, h)` over the modes on the field's grid and
/// on the y-coarsened grid. Terms are summed in FFT order after a parallel
/// map, so the result does not depend on the thread count.
fn mode_sum<W>(h: &Field2D, weight: W) -> Result<f64>
where
    W: Fn(f64, &[Complex64], f64) -> f64 + Sync,
{
    let modes = h.modes();
    let fine_h = 2.0 / (h.ny - 1) as f64;
    let terms: Vec<(f64, f64)> = modes
        .par_iter()
        .map(|(k, v)| {
            let kappa = 2.0 * PI * *k as f64 / h.period;
            let coarse = coarsen_complex(v);
            let coarse_h = 2.0 / (coarse.len() - 1) as f64;
            (weight(kappa, v, fine_h), weight(kappa, &coarse, coarse_h))
        })
        .collect();
    let fine: f64 = terms.iter().map(|t| t.0).sum();
    let coarse: f64 = terms.iter().map(|t| t.1).sum();
    if fine > 1e-300 {
        check_resolution(fine.sqrt(), coarse.sqrt())?;
    }
    Ok(fine.sqrt())
}

/// Anisotropic norm `(Σ_k |2πk/T|^{2 s_x} ‖ĥ_k‖²_{H^{s_y}})^{1/2}` over the
/// Fourier coefficients.
///
/// The `k = 0` term has weight zero for `s_x > 0` and one for `s_x = 0`. For
/// `s_x < 0` it is excluded and must vanish.
pub fn hs_norm_2d(h: &Field2D, s_x: f64, s_y: f64) -> Result<f64> {
    check_order(s_y)?;
    if s_x < 0.0 {
        let modes = h.modes();
        let zero = &modes[0].1;
        let mean_norm = complex_hs_sq(zero, 2.0 / (h.ny - 1) as f64, 0.0).sqrt();
        let scale = h.values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        if mean_norm > 1e-10 * scale {
            return Err(Error::ZeroMeanViolation { mean_norm });
        }
    }
    mode_sum(h, |kappa, v, dy| {
        if kappa == 0.0 {
            if s_x == 0.0 {
                complex_hs_sq(v, dy, s_y)
            } else {
                0.0
            }
        } else {
            kappa.abs().powf(2.0 * s_x) * complex_hs_sq(v, dy, s_y)
        }
    })
}

/// Isotropic `H^s((0,T) × (-1,1))` norm, realized as the mode sum
/// `T Σ_k [(1 + κ_k²)^s ‖ĥ_k‖²_{L²} + ‖ĥ_k‖²_{Ḣ^s}]` with `κ_k = 2πk/T`.
///
/// For an `x`-independent field this equals `√T · hs_norm_1d`.
pub fn hs_norm_2d_isotropic(h: &Field2D, s: f64) -> Result<f64> {
    check_order(s)?;
    let t = h.period;
    mode_sum(h, |kappa, v, dy| {
        let l2 = complex_hs_sq(v, dy, 0.0);
        let full = complex_hs_sq(v, dy, s);
        t * ((1.0 + kappa * kappa).powf(s) * l2 + (full - l2))
    })
}

/// Upper end `1/(3/2 - s)` of the admissible Hardy exponents.
pub fn hardy_exponent_limit(s: f64) -> f64 {
    1.0 / (1.5 - s)
}

/// `‖u/(y - y0)‖_{L^p(-1,1)} / ‖u‖_{H^s(-1,1)}` for `u(y0) = 0`.
///
/// Requires `1/2 < s < 3/2` and `1 ≤ p ≤ 1/(3/2 - s)`. The endpoint is
/// admitted: at `(p, s) = (2, 1)` it is the classical Hardy inequality.
///
/// Closed-form fields are integrated by Gauss–Legendre panels split at
/// `y0`. Sampled fields use their piecewise-linear interpolant with `y0`
/// inserted as a node carrying the value zero, so the quotient is constant
/// on the two cells touching `y0`.
pub fn hardy_ratio(u: &Field1D, y0: f64, p: f64, s: f64) -> Result<f64> {
    if !(s > 0.5 && s < 1.5) {
        return Err(Error::OutOfRange(format!("Hardy quotient needs s in (1/2, 3/2), got {s}")));
    }
    if !(p >= 1.0 && p <= hardy_exponent_limit(s) * (1.0 + 1e-12)) {
        return Err(Error::ExponentOutOfRange { p, s });
    }
    if !(-1.0..=1.0).contains(&y0) {
        return Err(Error::OutOfRange(format!("y0 = {y0} outside [-1, 1]")));
    }
    let scale = u.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let at_root = u.eval(y0);
    if at_root.abs() > 1e-10 * scale {
        return Err(Error::NonVanishing { value: at_root });
    }

    let integral = match &u.exact {
        Some(f) => {
            let g = |y: f64| (f(y) / (y - y0)).abs().powf(p);
            let panels = |len: f64| ((len * 64.0).ceil() as usize).max(1);
            let mut total = 0.0;
            if y0 > -1.0 {
                total += integrate(g, -1.0, y0, panels(y0 + 1.0), 8);
            }
            if y0 < 1.0 {
                total += integrate(g, y0, 1.0, panels(1.0 - y0), 8);
            }
            total
        }
        None => {
            let mut pts: Vec<(f64, f64)> = u.nodes().into_iter().zip(u.values.iter().copied()).collect();
            pts.retain(|(y, _)| (y - y0).abs() > 1e-14);
            let at = pts.partition_point(|(y, _)| *y < y0);
            pts.insert(at, (y0, 0.0));
            let (gx, gw) = gauss_legendre(6);
            let mut total = 0.0;
            for w in pts.windows(2) {
                let ((ya, ua), (yb, ub)) = (w[0], w[1]);
                let half = 0.5 * (yb - ya);
                let mid = 0.5 * (ya + yb);
                for (xi, wi) in gx.iter().zip(&gw) {
                    let y = mid + half * xi;
                    let t = (y - ya) / (yb - ya);
                    let val = (1.0 - t) * ua + t * ub;
                    total += half * wi * (val / (y - y0)).abs().powf(p);
                }
            }
            total
        }
    };
    let denominator = hs_norm_1d(u, s)?;
    if denominator <= 0.0 {
        return Err(Error::InvalidInput("field has zero norm".into()));
    }
    Ok(integral.powf(1.0 / p) / denominator)
}

/// Random band-limited field `g(y) - g(y0)` with
/// `g(y) = Σ_{m=1}^{modes} (a_m cos(mπy/2) + b_m sin(mπy/2))/m` and
/// coefficients uniform in `[-1, 1]`.
pub fn band_limited_vanishing<R: Rng>(rng: &mut R, modes: usize, y0: f64, n: usize) -> Result<Field1D> {
    let coeffs: Vec<(f64, f64)> = (0..modes).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let g = move |y: f64| {
        coeffs
            .iter()
            .enumerate()
            .map(|(m, (a, b))| {
                let w = (m + 1) as f64 * PI / 2.0;
                (a * (w * y).cos() + b * (w * y).sin()) / (m + 1) as f64
            })
            .sum::<f64>()
    };
    let shift = g(y0);
    Field1D::from_fn(move |y| g(y) - shift, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field() {
        let u = Field1D::from_fn(|_| 3.0, 101).unwrap();
        for s in [0.0, 0.5, 1.0, 1.3, 2.0] {
            assert!((hs_norm_1d(&u, s).unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-12, "s = {s}");
        }
    }

    #[test]
    fn gagliardo_of_linear_function() {
        // ∫∫_{[-1,1]²} |x-y|^{1-2σ} = 2·2^{3-2σ}/((2-2σ)(3-2σ))
        for sigma in [0.25, 0.5, 0.75] {
            let n = 801;
            let v: Vec<f64> = (0..n).map(|j| node(j, n)).collect();
            let exact = 2.0 * 2f64.powf(3.0 - 2.0 * sigma) / ((2.0 - 2.0 * sigma) * (3.0 - 2.0 * sigma));
            let got = gagliardo_sq(&v, 2.0 / (n - 1) as f64, sigma);
            assert!((got - exact).abs() < 1e-2 * exact, "σ = {sigma}: {got} vs {exact}");
        }
    }

    #[test]
    fn gaussian_l2_norm() {
        let u = gaussian_field(0.1).unwrap();
        let expected = 0.1f64.powf(1.5) * (PI / 2.0).powf(0.25);
        assert!((hs_norm_1d(&u, 0.0).unwrap() - expected).abs() < 1e-8);
    }

    #[test]
    fn gaussian_constant_at_zero() {
        assert!((gaussian_constant(0.0) - (PI / 2.0).powf(0.25)).abs() < 1e-12);
        // C_1² = (1/2)·√(2π)
        assert!((gaussian_constant(1.0).powi(2) - 0.5 * (2.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn single_mode_anisotropic_norm() {
        let phi = |y: f64| (PI * y / 2.0).cos() * (1.0 + 0.3 * y);
        let h = Field2D::from_fn(16, 201, 2.0 * PI, |x, y| Complex64::from_polar(phi(y), x)).unwrap();
        let expected = hs_norm_1d(&Field1D::from_fn(phi, 201).unwrap(), 1.0).unwrap();
        assert!((hs_norm_2d(&h, -1.0, 1.0).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn x_independent_isotropic_norm() {
        let t = 3.0;
        let u = |y: f64| 0.2 * (-(y / 0.3).powi(2)).exp();
        let h = Field2D::from_fn(8, 301, t, |_, y| Complex64::new(u(y), 0.0)).unwrap();
        let one_d = hs_norm_1d(&Field1D::from_fn(u, 301).unwrap(), 1.0).unwrap();
        assert!((hs_norm_2d_isotropic(&h, 1.0).unwrap() - t.sqrt() * one_d).abs() < 1e-10);
        assert!(matches!(hs_norm_2d(&h, -1.0, 0.0), Err(Error::ZeroMeanViolation { .. })));
    }

    #[test]
    fn hardy_linear_example() {
        let u = Field1D::from_fn(|y| y, 201).unwrap();
        let r = hardy_ratio(&u, 0.0, 2.0, 1.0).unwrap();
        assert!((r - (2.0f64 / (8.0 / 3.0)).sqrt()).abs() < 1e-4, "{r}");
        let sampled = Field1D::from_samples(u.values().to_vec()).unwrap();
        let r2 = hardy_ratio(&sampled, 0.0, 2.0, 1.0).unwrap();
        assert!((r2 - r).abs() < 1e-6);
    }

    #[test]
    fn hardy_rejects_bad_input() {
        let u = Field1D::from_fn(|y| y + 0.5, 101).unwrap();
        assert!(matches!(hardy_ratio(&u, 0.0, 2.0, 1.0), Err(Error::NonVanishing { .. })));
        let v = Field1D::from_fn(|y| y, 101).unwrap();
        assert!(matches!(hardy_ratio(&v, 0.0, 2.5, 1.0), Err(Error::ExponentOutOfRange { .. })));
    }

    #[test]
    fn coarse_field_is_flagged() {
        let u = Field1D::from_fn(|y| (-(y / 0.01).powi(2)).exp(), 65).unwrap();
        assert!(matches!(hs_norm_1d(&u, 1.0), Err(Error::UnresolvedField { .. })));
    }
}
