//! Steady cat's-eye states bifurcating from a shear flow.
//!
//! A steady Euler flow with stream function `ψ = ψ₀(y) + φ(αx, y)` solves
//! `Δψ = f(ψ)` where `f` is read off the base flow. In `ξ = αx` the
//! perturbation satisfies `α² φ_ξξ + φ_yy = f(ψ₀ + φ) - f(ψ₀)`, which has the
//! trivial solution for every `α` and a branch leaving it at `α² = -λ`, the
//! lowest Dirichlet eigenvalue of `-d²/dy² + Q`.

mod continuation;
mod diagnostics;
mod nonlinearity;
mod problem;
mod streamlines;

use std::f64::consts::PI;

use serde::Serialize;

pub use continuation::{
    continue_branch, default_bracket, match_period, solve_at_amplitude, PeriodMatch, PeriodSample,
    NEWTON_MAX_HALVINGS, RESIDUAL_TOLERANCE,
};
pub use diagnostics::{advection_residual, refined_residual, vorticity, vorticity_distance, vorticity_field};
pub use nonlinearity::{build_nonlinearity, NonlinearityF, EXTENSION_MARGIN};
pub use problem::{CosineCollocation, SteadyGrid, SteadyProblem, DEFAULT_MODES, MAX_MODES, MIN_MODES};
pub use streamlines::{classify_streamlines, CriticalKind, CriticalPoint, StreamlineReport};

/// One converged point `(φ, α²)` of a bifurcation branch.
#[derive(Clone, Serialize)]
pub struct SteadyState {
    pub grid: SteadyGrid,
    pub alpha_sq: f64,
    /// Coefficient `β` of `φ₀(y) cos ξ` in `φ`.
    pub amplitude: f64,
    /// Values at the collocation nodes, index `j·M + l`.
    pub phi: Vec<f64>,
    /// Weighted `L²` norm of the discrete residual.
    pub residual: f64,
    /// `ψ₀ + φ` reached the extension zone of `f`.
    pub range_escape: bool,
    pub psi_min: f64,
    pub newton_iterations: usize,
}

impl SteadyState {
    pub fn alpha(&self) -> f64 {
        self.alpha_sq.sqrt()
    }

    /// `x`-period `2π/α`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.alpha()
    }

    /// Cosine coefficients `c_k(y_j)`, index `j·M + k`.
    pub fn coefficients(&self) -> Vec<f64> {
        let m = self.grid.modes;
        let colloc = CosineCollocation::new(m);
        self.phi.chunks(m).flat_map(|row| colloc.coefficients(row)).collect()
    }
}

impl std::fmt::Debug for SteadyState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SteadyState")
            .field("grid", &self.grid)
            .field("alpha_sq", &self.alpha_sq)
            .field("amplitude", &self.amplitude)
            .field("phi", &format_args!("[{} values]", self.phi.len()))
            .field("residual", &self.residual)
            .field("range_escape", &self.range_escape)
            .field("psi_min", &self.psi_min)
            .finish()
    }
}
