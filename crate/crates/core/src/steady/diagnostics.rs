//! Vorticity of computed states and the steady-Euler check.

use std::f64::consts::PI;

use crate::error::Result;
use crate::profiles::Shear;
use crate::sobolev::{hs_norm_2d_isotropic, Field2D};

use super::problem::SteadyProblem;
use super::streamlines::mode_splines;
use super::SteadyState;

/// `ω = α² φ_ξξ + φ_yy + U'` at the interior nodes.
pub fn vorticity(problem: &SteadyProblem, state: &SteadyState) -> Vec<f64> {
    let m = state.grid.modes;
    let xx = problem.d2_xi(&state.phi);
    let yy = problem.d2_y(&state.phi);
    let du: Vec<f64> = state.grid.y.sample(|y| problem.profile().du(y));
    (0..state.phi.len()).map(|i| state.alpha_sq * xx[i] + yy[i] + du[i / m]).collect()
}

/// `ξ`-derivative of collocation values, row by row.
fn d_xi(problem: &SteadyProblem, v: &[f64], m: usize) -> Vec<f64> {
    let colloc = problem.collocation();
    let grid = problem.grid();
    let mut out = vec![0.0; v.len()];
    for (j, row) in v.chunks(m).enumerate() {
        let c = colloc.coefficients(row);
        for l in 0..m {
            let xi = grid.xi(l);
            out[j * m + l] = -(1..m).map(|k| k as f64 * c[k] * (k as f64 * xi).sin()).sum::<f64>();
        }
    }
    out
}

/// `‖α(ψ_y ω_ξ - ψ_ξ ω_y)‖_{L²}` over the nodes at least two cells from the
/// walls. Spectral in `ξ`, centred differences in `y`.
pub fn advection_residual(problem: &SteadyProblem, state: &SteadyState) -> f64 {
    let m = state.grid.modes;
    let ny = state.grid.y.len();
    let h = state.grid.y.spacing();
    let omega = vorticity(problem, state);
    let psi_xi = d_xi(problem, &state.phi, m);
    let omega_xi = d_xi(problem, &omega, m);
    let u: Vec<f64> = state.grid.y.sample(|y| problem.profile().u(y));
    let alpha = state.alpha();
    let mut sum = 0.0;
    for j in 1..ny - 1 {
        for l in 0..m {
            let i = j * m + l;
            let psi_y = u[j] + (state.phi[i + m] - state.phi[i - m]) / (2.0 * h);
            let omega_y = (omega[i + m] - omega[i - m]) / (2.0 * h);
            let adv = alpha * (psi_y * omega_xi[i] - psi_xi[i] * omega_y);
            sum += adv * adv;
        }
    }
    (state.grid.weight() * sum).sqrt()
}

/// `ω - 1` on `[0, T) × [-1, 1]` with `nx` uniform points in `x` and `ny`
/// in `y`, walls included. Uses `ω = U' + f(ψ₀ + φ) - f(ψ₀)`, which equals
/// `Δψ` at converged states; `φ` between nodes comes from cubic splines of
/// its cosine coefficients.
pub fn vorticity_field(problem: &SteadyProblem, state: &SteadyState, nx: usize, ny: usize) -> Result<Field2D> {
    let splines = mode_splines(state)?;
    let f = problem.nonlinearity();
    let profile = problem.profile();
    let mut values = vec![0.0; nx * ny];
    for j in 0..ny {
        let y = -1.0 + 2.0 * j as f64 / (ny - 1) as f64;
        let psi0 = profile.stream(y);
        let base = f.eval(psi0);
        let c: Vec<f64> = splines.iter().map(|s| s.eval(y)).collect();
        for i in 0..nx {
            let xi = 2.0 * PI * i as f64 / nx as f64;
            let phi: f64 = c.iter().enumerate().map(|(k, v)| v * (k as f64 * xi).cos()).sum();
            values[i * ny + j] = profile.du(y) - 1.0 + f.eval(psi0 + phi) - base;
        }
    }
    Field2D::from_real(nx, ny, state.period(), &values)
}

/// `‖ω - 1‖_{H^s((0,T) × (-1,1))}` on a `y` grid with spacing at most `γ/48`,
/// fine enough for the norm's own resolution check up to `s = 2`.
pub fn vorticity_distance(problem: &SteadyProblem, state: &SteadyState, s: f64) -> Result<f64> {
    let cells = ((2.0 * 48.0 / problem.profile().gamma()).ceil() as usize).max(state.grid.y.len() + 1);
    let ny = cells + 1 + cells % 2;
    hs_norm_2d_isotropic(&vorticity_field(problem, state, 2 * state.grid.modes, ny)?, s)
}

/// Residual of `state` transferred to the once-refined grid by spline
/// interpolation of its cosine coefficients.
pub fn refined_residual(problem: &SteadyProblem, state: &SteadyState) -> Result<f64> {
    let fine = problem.regrid(state.grid.refined())?;
    let grid = fine.grid();
    let splines = mode_splines(state)?;
    let colloc = fine.collocation();
    let mut phi = Vec::with_capacity(grid.len());
    for y in grid.y.nodes() {
        let c: Vec<f64> = splines.iter().map(|s| s.eval(y)).collect();
        phi.extend(colloc.values(&c));
    }
    Ok(fine.residual_norm(&phi, state.alpha_sq))
}
