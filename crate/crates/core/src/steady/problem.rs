//! Discretization of `α² φ_ξξ + φ_yy - (f(ψ₀ + φ) - f(ψ₀)) = 0`.
//!
//! `φ` is even and `2π`-periodic in `ξ`, represented by its values at the
//! cosine collocation points `ξ_l = π(l + 1/2)/M`, and zero at `y = ±1`.
//! Unknown `(j, l)` sits at index `j·M + l`, so the Jacobian is banded with
//! half-bandwidth `M`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::BandedMatrix;
use crate::profiles::{Shear, ShearProfile};
use crate::spectral1d::{lowest_eigenpair_sampled, DirichletGrid};

use super::nonlinearity::{build_nonlinearity, NonlinearityF};

pub const MIN_MODES: usize = 8;
pub const MAX_MODES: usize = 32;
pub const DEFAULT_MODES: usize = 16;

/// Tensor grid: `modes` collocation points in `ξ` times the interior nodes
/// of a Dirichlet grid in `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SteadyGrid {
    pub modes: usize,
    pub y: DirichletGrid,
}

impl SteadyGrid {
    pub fn new(modes: usize, y: DirichletGrid) -> Result<Self> {
        if !(MIN_MODES..=MAX_MODES).contains(&modes) {
            return Err(Error::OutOfRange(format!("{modes} cosine modes, expected {MIN_MODES}..={MAX_MODES}")));
        }
        Ok(Self { modes, y })
    }

    /// Spacing at most `γ/16`, which keeps the branch point within `1e-3`
    /// of the grid-converged eigenvalue.
    pub fn for_profile(profile: &ShearProfile, modes: usize) -> Result<Self> {
        Self::new(modes, DirichletGrid::with_spacing(profile.gamma() / 16.0, 127))
    }

    pub fn refined(&self) -> Self {
        Self { modes: self.modes, y: self.y.refined() }
    }

    pub fn len(&self) -> usize {
        self.modes * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, j: usize, l: usize) -> usize {
        j * self.modes + l
    }

    pub fn xi(&self, l: usize) -> f64 {
        PI * (l as f64 + 0.5) / self.modes as f64
    }

    /// Quadrature weight of one node for integrals over `(0, 2π) × (-1, 1)`.
    pub fn weight(&self) -> f64 {
        2.0 * PI / self.modes as f64 * self.y.spacing()
    }
}

/// Cosine transform pair and second-derivative matrix on the collocation
/// points.
#[derive(Debug, Clone)]
pub struct CosineCollocation {
    m: usize,
    // values -> coefficients, row m
    forward: Vec<f64>,
    // coefficients -> values, row l
    backward: Vec<f64>,
    d2: Vec<f64>,
}

impl CosineCollocation {
    pub fn new(m: usize) -> Self {
        let xi = |l: usize| PI * (l as f64 + 0.5) / m as f64;
        let mut backward = vec![0.0; m * m];
        let mut forward = vec![0.0; m * m];
        for l in 0..m {
            for k in 0..m {
                let c = (k as f64 * xi(l)).cos();
                backward[l * m + k] = c;
                forward[k * m + l] = if k == 0 { 1.0 } else { 2.0 } * c / m as f64;
            }
        }
        let mut d2 = vec![0.0; m * m];
        for l in 0..m {
            for l2 in 0..m {
                d2[l * m + l2] =
                    (0..m).map(|k| -((k * k) as f64) * backward[l * m + k] * forward[k * m + l2]).sum();
            }
        }
        Self { m, forward, backward, d2 }
    }

    pub fn coefficients(&self, values: &[f64]) -> Vec<f64> {
        (0..self.m).map(|k| (0..self.m).map(|l| self.forward[k * self.m + l] * values[l]).sum()).collect()
    }

    pub fn values(&self, coefficients: &[f64]) -> Vec<f64> {
        (0..self.m).map(|l| (0..self.m).map(|k| self.backward[l * self.m + k] * coefficients[k]).sum()).collect()
    }

    pub fn d2(&self, l: usize, l2: usize) -> f64 {
        self.d2[l * self.m + l2]
    }
}

/// Everything fixed along one branch: grid, nonlinearity, base flow on the
/// nodes and the discrete kernel `φ₀(y) cos ξ`.
#[derive(Debug, Clone)]
pub struct SteadyProblem {
    profile: ShearProfile,
    f: Arc<NonlinearityF>,
    grid: SteadyGrid,
    colloc: Arc<CosineCollocation>,
    psi0: Vec<f64>,
    f_psi0: Vec<f64>,
    phi0: Vec<f64>,
    k0_sq: f64,
}

impl SteadyProblem {
    pub fn new(profile: &ShearProfile, grid: SteadyGrid) -> Result<Self> {
        let f = build_nonlinearity(profile)?;
        Self::with_nonlinearity(profile, Arc::new(f), grid)
    }

    pub fn with_nonlinearity(profile: &ShearProfile, f: Arc<NonlinearityF>, grid: SteadyGrid) -> Result<Self> {
        let psi0: Vec<f64> = grid.y.sample(|y| profile.stream(y));
        let f_psi0: Vec<f64> = psi0.iter().map(|&p| f.eval(p)).collect();
        let q: Vec<f64> = psi0.iter().map(|&p| f.derivative(p)).collect();
        let pair = lowest_eigenpair_sampled(&q, grid.y)?;
        if !(pair.lambda < 0.0) {
            return Err(Error::BifurcationNotFound { defect: pair.lambda });
        }
        Ok(Self {
            profile: profile.clone(),
            f,
            grid,
            colloc: Arc::new(CosineCollocation::new(grid.modes)),
            psi0,
            f_psi0,
            phi0: pair.phi,
            k0_sq: -pair.lambda,
        })
    }

    /// Same profile and nonlinearity on another grid.
    pub fn regrid(&self, grid: SteadyGrid) -> Result<Self> {
        Self::with_nonlinearity(&self.profile, self.f.clone(), grid)
    }

    pub fn profile(&self) -> &ShearProfile {
        &self.profile
    }

    pub fn nonlinearity(&self) -> &NonlinearityF {
        &self.f
    }

    pub fn grid(&self) -> SteadyGrid {
        self.grid
    }

    pub fn collocation(&self) -> &CosineCollocation {
        &self.colloc
    }

    pub fn psi0(&self) -> &[f64] {
        &self.psi0
    }

    /// Discrete `-λ`; the branch leaves the trivial solution here.
    pub fn k0_sq(&self) -> f64 {
        self.k0_sq
    }

    /// Discrete eigenfunction, `Δy Σ φ₀² = 1`, positive at the centre.
    pub fn phi0(&self) -> &[f64] {
        &self.phi0
    }

    /// `φ₀(y) cos ξ` on the tensor grid.
    pub fn kernel(&self) -> Vec<f64> {
        let g = self.grid;
        let mut out = vec![0.0; g.len()];
        for j in 0..g.y.len() {
            for l in 0..g.modes {
                out[g.index(j, l)] = self.phi0[j] * g.xi(l).cos();
            }
        }
        out
    }

    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.grid.weight() * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.dot(a, a).sqrt()
    }

    /// `⟨φ, φ₀ cos ξ⟩ / ‖φ₀ cos ξ‖²`.
    pub fn amplitude(&self, phi: &[f64]) -> f64 {
        let e = self.kernel();
        self.dot(phi, &e) / self.dot(&e, &e)
    }

    /// `φ_ξξ` by the collocation matrix.
    pub fn d2_xi(&self, phi: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let m = g.modes;
        let mut out = vec![0.0; g.len()];
        for j in 0..g.y.len() {
            let row = &phi[j * m..(j + 1) * m];
            for l in 0..m {
                out[j * m + l] = (0..m).map(|l2| self.colloc.d2(l, l2) * row[l2]).sum();
            }
        }
        out
    }

    /// `φ_yy` by centred differences with `φ = 0` on the walls.
    pub fn d2_y(&self, phi: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let m = g.modes;
        let ny = g.y.len();
        let inv = 1.0 / (g.y.spacing() * g.y.spacing());
        let mut out = vec![0.0; g.len()];
        for j in 0..ny {
            for l in 0..m {
                let below = if j > 0 { phi[(j - 1) * m + l] } else { 0.0 };
                let above = if j + 1 < ny { phi[(j + 1) * m + l] } else { 0.0 };
                out[j * m + l] = (below - 2.0 * phi[j * m + l] + above) * inv;
            }
        }
        out
    }

    /// `F(φ, α²)` on the tensor grid.
    pub fn residual(&self, phi: &[f64], alpha_sq: f64) -> Vec<f64> {
        let g = self.grid;
        let xx = self.d2_xi(phi);
        let yy = self.d2_y(phi);
        let mut out = vec![0.0; g.len()];
        for j in 0..g.y.len() {
            for l in 0..g.modes {
                let i = g.index(j, l);
                let source = self.f.eval(self.psi0[j] + phi[i]) - self.f_psi0[j];
                out[i] = alpha_sq * xx[i] + yy[i] - source;
            }
        }
        out
    }

    pub fn residual_norm(&self, phi: &[f64], alpha_sq: f64) -> f64 {
        self.norm(&self.residual(phi, alpha_sq))
    }

    /// `∂F/∂φ` as a banded matrix (not yet factored).
    pub fn jacobian(&self, phi: &[f64], alpha_sq: f64) -> BandedMatrix {
        let g = self.grid;
        let m = g.modes;
        let ny = g.y.len();
        let inv = 1.0 / (g.y.spacing() * g.y.spacing());
        let mut jac = BandedMatrix::zeros(g.len(), m, m);
        for j in 0..ny {
            for l in 0..m {
                let i = g.index(j, l);
                for l2 in 0..m {
                    jac.add(i, g.index(j, l2), alpha_sq * self.colloc.d2(l, l2));
                }
                jac.add(i, i, -2.0 * inv - self.f.derivative(self.psi0[j] + phi[i]));
                if j > 0 {
                    jac.add(i, g.index(j - 1, l), inv);
                }
                if j + 1 < ny {
                    jac.add(i, g.index(j + 1, l), inv);
                }
            }
        }
        jac
    }

    /// Minimum of `ψ₀ + φ` and whether it left the core table range.
    pub fn range_escape(&self, phi: &[f64]) -> (f64, f64, bool) {
        let m = self.grid.modes;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut escaped = false;
        for (i, v) in phi.iter().enumerate() {
            let psi = self.psi0[i / m] + v;
            lo = lo.min(psi);
            hi = hi.max(psi);
            escaped |= !self.f.in_core(psi);
        }
        (lo, hi, escaped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collocation_differentiates_cosines_exactly() {
        let m = 12;
        let c = CosineCollocation::new(m);
        for k in 0..m {
            let v: Vec<f64> = (0..m).map(|l| (k as f64 * PI * (l as f64 + 0.5) / m as f64).cos()).collect();
            for l in 0..m {
                let d: f64 = (0..m).map(|l2| c.d2(l, l2) * v[l2]).sum();
                assert!((d + (k * k) as f64 * v[l]).abs() < 1e-10 * (1 + k * k) as f64);
            }
            let coef = c.coefficients(&v);
            for (k2, x) in coef.iter().enumerate() {
                assert!((x - if k2 == k { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
            let back = c.values(&coef);
            assert!(back.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-13));
        }
    }

    #[test]
    fn trivial_branch_has_zero_residual() {
        let p = ShearProfile::erf(0.1, 1.0).unwrap();
        let prob = SteadyProblem::new(&p, SteadyGrid::for_profile(&p, 8).unwrap()).unwrap();
        let r = prob.residual(&vec![0.0; prob.grid().len()], 3.0);
        assert!(r.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn kernel_is_annihilated_at_branch_point() {
        let p = ShearProfile::erf(0.1, 1.0).unwrap();
        let prob = SteadyProblem::new(&p, SteadyGrid::for_profile(&p, 8).unwrap()).unwrap();
        let e = prob.kernel();
        let r = prob.jacobian(&vec![0.0; e.len()], prob.k0_sq()).matvec(&e);
        assert!(prob.norm(&r) < 1e-7, "defect {}", prob.norm(&r));
        assert!((prob.amplitude(&e) - 1.0).abs() < 1e-14);
        assert!((prob.dot(&e, &e) - PI).abs() < 1e-12);
    }
}
