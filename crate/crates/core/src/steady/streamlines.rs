//! Critical points of `ψ = ψ₀(y) + φ(ξ, y)` and the cat's-eye pattern.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::{Shear, ShearProfile};
use crate::spline::CubicSpline;

use super::SteadyState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriticalKind {
    Saddle,
    Center,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalPoint {
    pub xi: f64,
    pub y: f64,
    pub kind: CriticalKind,
    pub hessian_det: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StreamlineReport {
    pub points: Vec<CriticalPoint>,
    pub cats_eye: bool,
    /// Half the vertical extent of the separatrix above the centre.
    pub eye_half_height: Option<f64>,
}

/// `ψ` with its gradient and Hessian, cosine series in `ξ` and a natural
/// cubic spline per mode in `y`.
struct StreamFunction<'a> {
    profile: &'a ShearProfile,
    modes: Vec<CubicSpline>,
}

impl<'a> StreamFunction<'a> {
    fn new(state: &SteadyState, profile: &'a ShearProfile) -> Result<Self> {
        Ok(Self { profile, modes: mode_splines(state)? })
    }

    /// `[ψ, ψ_ξ, ψ_y, ψ_ξξ, ψ_ξy, ψ_yy]`.
    fn eval(&self, xi: f64, y: f64) -> [f64; 6] {
        let mut out = [self.profile.stream(y), 0.0, self.profile.u(y), 0.0, 0.0, self.profile.du(y)];
        for (k, spline) in self.modes.iter().enumerate() {
            let kf = k as f64;
            let (s, c) = (kf * xi).sin_cos();
            let d = spline.eval_all(y);
            out[0] += d[0] * c;
            out[1] -= kf * d[0] * s;
            out[2] += d[1] * c;
            out[3] -= kf * kf * d[0] * c;
            out[4] -= kf * d[1] * s;
            out[5] += d[2] * c;
        }
        out
    }

    fn critical_point(&self, xi: f64, y: f64) -> Option<(f64, f64)> {
        let (mut xi, mut y) = (xi, y);
        for _ in 0..60 {
            let d = self.eval(xi, y);
            let grad = (d[1], d[2]);
            if grad.0.hypot(grad.1) <= 1e-13 {
                return Some((xi, y));
            }
            let det = d[3] * d[5] - d[4] * d[4];
            if det == 0.0 {
                break;
            }
            let dxi = (d[5] * grad.0 - d[4] * grad.1) / det;
            let dy = (d[3] * grad.1 - d[4] * grad.0) / det;
            xi -= dxi;
            y = (y - dy).clamp(-0.999, 0.999);
            if dxi.hypot(dy) < 1e-15 {
                break;
            }
        }
        let d = self.eval(xi, y);
        (d[1].hypot(d[2]) <= 1e-8).then_some((xi, y))
    }

    /// First `y` beyond `from` in direction `dir` with `ψ(ξ, y) = level`.
    fn level_crossing(&self, xi: f64, from: f64, dir: f64, level: f64, step: f64) -> Option<f64> {
        let g = |y: f64| self.eval(xi, y)[0] - level;
        let mut a = from;
        let ga = g(a);
        loop {
            let b = a + dir * step;
            if b.abs() >= 1.0 {
                return None;
            }
            if g(b).signum() != ga.signum() {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid).signum() == ga.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
            a = b;
        }
    }
}

/// Natural cubic spline through each cosine coefficient `c_k(y)`, with the
/// wall zeros included.
pub(super) fn mode_splines(state: &SteadyState) -> Result<Vec<CubicSpline>> {
    let m = state.grid.modes;
    let grid = state.grid.y;
    let coef = state.coefficients();
    let mut knots = vec![-1.0];
    knots.extend(grid.nodes());
    knots.push(1.0);
    (0..m)
        .map(|k| {
            let mut v = vec![0.0];
            v.extend((0..grid.len()).map(|j| coef[j * m + k]));
            v.push(0.0);
            CubicSpline::new(knots.clone(), v)
        })
        .collect()
}

fn wrap(xi: f64) -> f64 {
    xi.rem_euclid(2.0 * PI)
}

/// Critical points seeded at `(0, 0)` and `(π, 0)`, labelled by the sign of
/// the Hessian determinant.
pub fn classify_streamlines(state: &SteadyState, profile: &ShearProfile) -> Result<StreamlineReport> {
    if state.phi.iter().all(|v| *v == 0.0) {
        return Ok(StreamlineReport { points: Vec::new(), cats_eye: false, eye_half_height: None });
    }
    let psi = StreamFunction::new(state, profile)?;
    let mut points: Vec<CriticalPoint> = Vec::new();
    for seed in [0.0, PI] {
        let Some((xi, y)) = psi.critical_point(seed, 0.0) else { continue };
        let d = psi.eval(xi, y);
        let det = d[3] * d[5] - d[4] * d[4];
        if det.abs() < 1e-12 {
            return Err(Error::DegenerateHessian { xi, y, det });
        }
        let xi = wrap(xi);
        if points.iter().any(|p| (p.xi - xi).abs() < 1e-8 && (p.y - y).abs() < 1e-8) {
            continue;
        }
        let kind = if det < 0.0 { CriticalKind::Saddle } else { CriticalKind::Center };
        points.push(CriticalPoint { xi, y, kind, hessian_det: det, psi: d[0] });
    }

    let saddles: Vec<_> = points.iter().filter(|p| p.kind == CriticalKind::Saddle).collect();
    let centers: Vec<_> = points.iter().filter(|p| p.kind == CriticalKind::Center).collect();
    let cats_eye = saddles.len() == 1
        && centers.len() == 1
        && saddles[0].y.abs() < 0.5
        && centers[0].y.abs() < 0.5
        && ((saddles[0].xi - centers[0].xi).abs() - PI).abs() < 1e-6;

    let eye_half_height = if cats_eye {
        let (s, c) = (saddles[0], centers[0]);
        let step = 0.25 * state.grid.y.spacing();
        let up = psi.level_crossing(c.xi, c.y, 1.0, s.psi, step);
        let down = psi.level_crossing(c.xi, c.y, -1.0, s.psi, step);
        up.zip(down).map(|(u, d)| 0.5 * (u - d))
    } else {
        None
    };
    Ok(StreamlineReport { points, cats_eye, eye_half_height })
}
