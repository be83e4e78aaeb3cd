//! Linear stability of monotone shear flows from their inflection values.
//!
//! For each inflection point `y_i` the operator `-d²/dy² + U''/(U - U(y_i))`
//! is examined. If every lowest Dirichlet eigenvalue exceeds `-(2π/T)²` the
//! flow is stable to `x`-periodic perturbations of period `T`. For the odd
//! single-inflection family a negative eigenvalue `λ` gives instability for
//! all periods `T > 2π/√(-λ)`. Everything else is left undecided.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{Shear, ShearProfile, TrigShear, MIN_SLOPE};
use crate::sobolev::{hs_norm_1d, Field1D};
use crate::spectral1d::{lowest_eigenpair_sampled, DirichletGrid};

/// Half-width of the zone around an inflection point where the potential is
/// blended into its limit value.
pub const BLEND_RADIUS: f64 = 1e-3;

/// Safety factor applied to the grid-error estimate of each eigenvalue.
pub const MARGIN_FACTOR: f64 = 10.0;

const SCAN_POINTS: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inflection {
    pub y: f64,
    /// Inflection value `U(y)`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InflectionData {
    pub points: Vec<Inflection>,
    /// `U''` vanishes identically (to rounding), as for Couette flow.
    pub degenerate: bool,
}

/// Locates the isolated zeros of `U''` at which it changes sign.
pub fn find_inflections(shear: &dyn Shear) -> Result<InflectionData> {
    let ys: Vec<f64> = (0..SCAN_POINTS).map(|j| -1.0 + 2.0 * j as f64 / (SCAN_POINTS - 1) as f64).collect();
    let slopes: Vec<f64> = ys.iter().map(|&y| shear.du(y)).collect();
    let min_slope = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let max_slope = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(min_slope > MIN_SLOPE || max_slope < -MIN_SLOPE) {
        return Err(Error::NotMonotone { min_slope });
    }

    let curv: Vec<f64> = ys.iter().map(|&y| shear.d2u(y)).collect();
    let scale = curv.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale <= 1e-12 * max_slope.abs().max(1.0) {
        return Ok(InflectionData { points: Vec::new(), degenerate: true });
    }
    let tol = 1e-10 * scale;

    let mut points = Vec::new();
    let mut last: Option<usize> = None;
    for j in 0..ys.len() {
        if curv[j].abs() <= tol {
            continue;
        }
        if let Some(i) = last {
            if curv[i].signum() != curv[j].signum() {
                let y = polish(shear, ys[i], ys[j]);
                points.push(Inflection { y, value: shear.u(y) });
            }
        }
        last = Some(j);
    }
    Ok(InflectionData { points, degenerate: false })
}

/// Bisection on a sign-change bracket of `U''`, then one Newton step.
fn polish(shear: &dyn Shear, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = shear.d2u(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = shear.d2u(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    let d3 = shear.d3u(y);
    if d3 != 0.0 {
        let step = shear.d2u(y) / d3;
        if step.abs() < hi - lo + 1e-15 {
            return y - step;
        }
    }
    y
}

/// `U''(y)/(U(y) - U(y_i))`, with the removable singularity at `y_i`
/// replaced by `U'''(y_i)/U'(y_i)` and blended quadratically within
/// `BLEND_RADIUS`.
pub fn inflection_potential(shear: &dyn Shear, at: &Inflection, y: f64) -> f64 {
    let d = (y - at.y).abs();
    let limit = shear.d3u(at.y) / shear.du(at.y);
    if d >= BLEND_RADIUS {
        return shear.d2u(y) / (shear.u(y) - at.value);
    }
    if d == 0.0 {
        return limit;
    }
    let quotient = shear.d2u(y) / (shear.u(y) - at.value);
    let w = (d / BLEND_RADIUS).powi(2);
    (1.0 - w) * limit + w * quotient
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflectionEigenvalue {
    pub y: f64,
    pub value: f64,
    /// Richardson-extrapolated lowest eigenvalue.
    pub lambda: f64,
    /// Grid-error estimate of `lambda`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub period: f64,
    /// `-(2π/T)²`.
    pub threshold: f64,
    pub degenerate: bool,
    pub eigenvalues: Vec<InflectionEigenvalue>,
    /// Lower end of the unstable-period window `(T_min, ∞)`, when known.
    pub unstable_period_min: Option<f64>,
}

fn eigen_grid(shear: &dyn Shear) -> DirichletGrid {
    DirichletGrid::with_spacing(shear.feature_width() / 16.0, 255)
}

/// Lowest eigenvalue of `-d²/dy² + q` on two nested grids.
fn extrapolated_eigenvalue<F: Fn(f64) -> f64>(q: F, grid: DirichletGrid) -> Result<(f64, f64)> {
    let fine = grid.refined();
    let l0 = lowest_eigenpair_sampled(&grid.sample(&q), grid)?.lambda;
    let l1 = lowest_eigenpair_sampled(&fine.sample(&q), fine)?.lambda;
    Ok(((4.0 * l1 - l0) / 3.0, (l1 - l0).abs() / 3.0))
}

/// Three-valued stability verdict for perturbations of `x`-period `period`.
pub fn classify(shear: &dyn Shear, period: f64) -> Result<StabilityVerdict> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::OutOfRange(format!("period {period} must be positive")));
    }
    let data = find_inflections(shear)?;
    let threshold = -(2.0 * PI / period).powi(2);
    let grid = eigen_grid(shear);

    let eigenvalues = if data.degenerate {
        let (lambda, error) = extrapolated_eigenvalue(|_| 0.0, grid)?;
        vec![InflectionEigenvalue { y: f64::NAN, value: f64::NAN, lambda, error }]
    } else {
        data.points
            .par_iter()
            .map(|p| {
                let (lambda, error) = extrapolated_eigenvalue(|y| inflection_potential(shear, p, y), grid)?;
                Ok(InflectionEigenvalue { y: p.y, value: p.value, lambda, error })
            })
            .collect::<Result<Vec<_>>>()?
    };

    let stable = eigenvalues.iter().all(|e| e.lambda > threshold + MARGIN_FACTOR * e.error);
    let single = shear.single_inflection_family() && !data.degenerate && eigenvalues.len() == 1;
    let unstable_period_min = if single && eigenvalues[0].lambda < 0.0 {
        Some(2.0 * PI / (-eigenvalues[0].lambda).sqrt())
    } else {
        None
    };
    let unstable = single && {
        let e = &eigenvalues[0];
        e.lambda + MARGIN_FACTOR * e.error < threshold
    };
    let verdict = if stable {
        Verdict::Stable
    } else if unstable {
        Verdict::Unstable
    } else {
        Verdict::Indeterminate
    };
    Ok(StabilityVerdict { verdict, period, threshold, degenerate: data.degenerate, eigenvalues, unstable_period_min })
}

/// `T_min = 2π/√(-λ)` for a single-inflection profile, or `None` when the
/// lowest eigenvalue is not negative.
pub fn unstable_period_window(profile: &ShearProfile) -> Result<Option<f64>> {
    let data = find_inflections(profile)?;
    if data.points.len() != 1 {
        return Err(Error::InvalidProfile(format!(
            "expected a single inflection point, found {}",
            data.points.len()
        )));
    }
    let p = data.points[0];
    let (lambda, _) = extrapolated_eigenvalue(|y| inflection_potential(profile, &p, y), eigen_grid(profile))?;
    Ok((lambda < 0.0).then(|| 2.0 * PI / (-lambda).sqrt()))
}

/// `‖U' - 1‖_{H^s(-1,1)}` on a grid of `n` points.
pub fn slope_defect_norm(shear: &dyn Shear, s: f64, n: usize) -> Result<f64> {
    let values = (0..n).map(|j| shear.du(-1.0 + 2.0 * j as f64 / (n - 1) as f64) - 1.0).collect();
    hs_norm_1d(&Field1D::from_samples(values)?, s)
}

/// Random smooth perturbation of Couette flow, rescaled so that
/// `‖U' - 1‖_{H²} = h2_norm`.
pub fn random_near_couette<R: Rng>(rng: &mut R, h2_norm: f64) -> Result<TrigShear> {
    let terms = rng.gen_range(1..=4);
    let mut shear = TrigShear::default();
    for _ in 0..terms {
        let k = PI * rng.gen_range(0.5..3.0);
        let amp = rng.gen_range(-1.0..1.0);
        if rng.gen_bool(0.5) {
            shear.sin_terms.push((amp, k));
        } else {
            shear.cos_terms.push((amp, k));
        }
    }
    let norm = slope_defect_norm(&shear, 2.0, 1025)?;
    if norm == 0.0 {
        return Ok(shear);
    }
    Ok(shear.scaled(h2_norm / norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn couette_is_degenerate_and_stable() {
        let c = TrigShear::couette();
        let d = find_inflections(&c).unwrap();
        assert!(d.degenerate && d.points.is_empty());
        for t in [1.0, 2.0 * PI, 100.0] {
            let v = classify(&c, t).unwrap();
            assert_eq!(v.verdict, Verdict::Stable);
            assert!((v.eigenvalues[0].lambda - PI * PI / 4.0).abs() < 1e-6);
        }
    }

    #[test]
    fn sine_bump_inflection_at_origin() {
        let d = find_inflections(&TrigShear::sine_bump(0.1)).unwrap();
        assert_eq!(d.points.len(), 1);
        assert!(d.points[0].y.abs() < 1e-14);
    }

    #[test]
    fn erf_family_has_one_inflection() {
        for (g, a) in [(0.1, 0.5), (0.05, 1.0), (0.02, 3.0)] {
            let p = ShearProfile::erf(g, a).unwrap();
            let d = find_inflections(&p).unwrap();
            assert_eq!(d.points.len(), 1);
            assert!(d.points[0].y.abs() < 1e-12 && d.points[0].value.abs() < 1e-12);
        }
    }

    #[test]
    fn potential_matches_rayleigh_potential_on_grid() {
        let p = ShearProfile::erf(0.05, 1.0).unwrap();
        let infl = find_inflections(&p).unwrap().points[0];
        let grid = eigen_grid(&p);
        for y in grid.nodes() {
            let a = inflection_potential(&p, &infl, y);
            let b = p.q(y);
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "y = {y}: {a} vs {b}");
        }
    }

    #[test]
    fn backward_flow_is_not_monotone() {
        assert!(matches!(
            find_inflections(&TrigShear::sine_bump(0.5)),
            Err(Error::NotMonotone { .. })
        ));
    }
}
