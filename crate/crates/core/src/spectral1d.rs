//! Dirichlet Sturm–Liouville problem `-φ'' + Qφ = λφ` on `(-1, 1)`.
//!
//! The operator is discretized by second-order central differences on a
//! uniform interior grid. The lowest eigenvalue is isolated by Sturm-sequence
//! bisection and its eigenvector recovered by inverse iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{loglog_fit, LineFit};
use crate::linalg::BandedMatrix;
use crate::profiles::RayleighPotential;
use crate::special::beta_coth;

/// Uniform grid of `n` interior points, spacing `2/(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletGrid {
    n: usize,
}

impl DirichletGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_POINTS {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {} interior points, got {n}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { n })
    }

    /// Smallest grid with spacing at most `max_spacing` and at least `n_min`
    /// points.
    pub fn with_spacing(max_spacing: f64, n_min: usize) -> Self {
        let n = ((2.0 / max_spacing).ceil() as usize).saturating_sub(1);
        Self { n: n.max(n_min).max(Self::MIN_POINTS) }
    }

    /// Grid resolving a potential well of width `gamma` (`Δ ≤ γ/4`).
    pub fn resolving(gamma: f64, n_min: usize) -> Self {
        Self::with_spacing(gamma / 4.0, n_min)
    }

    /// The grid with half the spacing.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n + 1 }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 / (self.n as f64 + 1.0)
    }

    pub fn node(&self, j: usize) -> f64 {
        -1.0 + (j as f64 + 1.0) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Index of the node closest to `y = 0`.
    pub fn center_index(&self) -> usize {
        self.n / 2
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.n).map(|j| f(self.node(j))).collect()
    }

    /// Discrete `L²` norm (trapezoid with zero boundary values).
    pub fn l2_norm(&self, v: &[f64]) -> f64 {
        (self.spacing() * v.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    /// Discrete `‖v'‖²` using forward differences including the two boundary
    /// cells.
    pub fn dirichlet_energy(&self, v: &[f64]) -> f64 {
        let h = self.spacing();
        let n = v.len();
        let mut s = v[0] * v[0] + v[n - 1] * v[n - 1];
        for w in v.windows(2) {
            s += (w[1] - w[0]).powi(2);
        }
        s / h
    }
}

/// Symmetric tridiagonal discretization of `-d²/dy² + Q`.
#[derive(Debug, Clone)]
pub struct SturmLiouville {
    grid: DirichletGrid,
    diag: Vec<f64>,
    off: f64,
}

impl SturmLiouville {
    pub fn new(q: &[f64], grid: DirichletGrid) -> Result<Self> {
        if q.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "potential has {} samples for a grid of {}",
                q.len(),
                grid.len()
            )));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("potential has non-finite samples".into()));
        }
        let h2 = grid.spacing().powi(2);
        let diag = q.iter().map(|qj| 2.0 / h2 + qj).collect();
        Ok(Self { grid, diag, off: -1.0 / h2 })
    }

    pub fn grid(&self) -> DirichletGrid {
        self.grid
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let off2 = self.off * self.off;
        let guard = f64::EPSILON * self.off.abs();
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for &dj in &self.diag[1..] {
            let piv = if d.abs() < guard { -guard } else { d };
            d = (dj - x) - off2 / piv;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, d| m.min(*d)) - r;
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, d| m.max(*d)) + r;
        (lo, hi)
    }

    /// The `k`-th eigenvalue (`k = 0` is the lowest) by Sturm bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j] * v[j];
                if j > 0 {
                    s += self.off * v[j - 1];
                }
                if j + 1 < n {
                    s += self.off * v[j + 1];
                }
                s
            })
            .collect()
    }

    /// Eigenvector for an eigenvalue estimate by inverse iteration, followed by
    /// a Rayleigh-quotient update of the eigenvalue.
    pub fn eigenpair_near(&self, lambda: f64) -> Result<EigenPair> {
        let n = self.grid.len();
        let scale = 1.0 + lambda.abs();
        let shift = lambda - 1e-10 * scale;
        let mut m = BandedMatrix::zeros(n, 1, 1);
        for j in 0..n {
            m.add(j, j, self.diag[j] - shift);
            if j > 0 {
                m.add(j, j - 1, self.off);
            }
            if j + 1 < n {
                m.add(j, j + 1, self.off);
            }
        }
        m.factor()?;
        let mut v: Vec<f64> = self.grid.sample(|y| (std::f64::consts::FRAC_PI_2 * y).cos() + 0.1);
        let mut lam = lambda;
        let mut residual = f64::INFINITY;
        for _ in 0..8 {
            v = m.solve(&v);
            let norm = self.grid.l2_norm(&v);
            v.iter_mut().for_each(|x| *x /= norm);
            let av = self.apply(&v);
            lam = self.grid.spacing() * av.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
            let r: Vec<f64> = av.iter().zip(&v).map(|(a, b)| a - lam * b).collect();
            residual = self.grid.l2_norm(&r);
            if residual <= 1e-10 * scale {
                break;
            }
        }
        if !(residual <= 1e-8 * scale) {
            return Err(Error::NoConvergence(format!(
                "inverse iteration residual {residual:e} at λ = {lam}"
            )));
        }
        let c = self.grid.center_index();
        let pivot = if v[c] != 0.0 {
            v[c]
        } else {
            v.iter().copied().fold(0.0_f64, |a, b| if b.abs() > a.abs() { b } else { a })
        };
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        Ok(EigenPair { lambda: lam, phi: v, residual, grid: self.grid })
    }
}

/// Eigenvalue with its `L²`-normalized eigenvector on a Dirichlet grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub phi: Vec<f64>,
    pub residual: f64,
    pub grid: DirichletGrid,
}

impl EigenPair {
    /// Discrete `H¹` norm `(‖φ‖² + ‖φ'‖²)^{1/2}`.
    pub fn h1_norm(&self) -> f64 {
        let l2 = self.grid.l2_norm(&self.phi);
        (l2 * l2 + self.grid.dirichlet_energy(&self.phi)).sqrt()
    }
}

/// Lowest eigenpair for a potential sampled at the grid nodes.
pub fn lowest_eigenpair_sampled(q: &[f64], grid: DirichletGrid) -> Result<EigenPair> {
    let op = SturmLiouville::new(q, grid)?;
    let lambda = op.eigenvalue(0);
    op.eigenpair_near(lambda)
}

/// Lowest eigenpair of `-d²/dy² + Q_{γ,a}`. Fails with `GridTooCoarse` if
/// the grid does not resolve the potential well (`Δ > γ/4`).
pub fn lowest_eigenpair(potential: &RayleighPotential, grid: DirichletGrid) -> Result<EigenPair> {
    let limit = potential.profile().gamma() / 4.0;
    if grid.spacing() > limit {
        return Err(Error::GridTooCoarse { spacing: grid.spacing(), limit });
    }
    lowest_eigenpair_sampled(&grid.sample(|y| potential.eval(y)), grid)
}

/// Lowest eigenpair on the smallest resolving grid with at least `n_min`
/// points.
pub fn lowest_eigenpair_auto(potential: &RayleighPotential, n_min: usize) -> Result<EigenPair> {
    lowest_eigenpair(potential, DirichletGrid::resolving(potential.profile().gamma(), n_min))
}

/// Second-lowest eigenvalue (used to check that the negative eigenvalue is
/// unique).
pub fn second_eigenvalue(q: &[f64], grid: DirichletGrid) -> Result<f64> {
    Ok(SturmLiouville::new(q, grid)?.eigenvalue(1))
}

/// `‖φ'‖² + ∫Qφ²` for a discrete Dirichlet trial function.
pub fn rayleigh_quotient(q: &[f64], phi: &[f64], grid: DirichletGrid) -> Result<f64> {
    if q.len() != grid.len() || phi.len() != grid.len() {
        return Err(Error::InvalidInput("sample count does not match the grid".into()));
    }
    let norm = grid.l2_norm(phi);
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm });
    }
    let potential: f64 = q.iter().zip(phi).map(|(q, p)| q * p * p).sum::<f64>() * grid.spacing();
    Ok(grid.dirichlet_energy(phi) + potential)
}

/// Root of `β coth β = 2a`, the limit of `√(-λ_{γ,a})` as `γ → 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct LimitBeta {
    pub a: f64,
    pub beta: f64,
}

impl LimitBeta {
    /// `λ_a = -β²`.
    pub fn lambda(&self) -> f64 {
        -self.beta * self.beta
    }
}

/// Solves `2a = β coth β` by bisection. Requires `a > 1/2`.
pub fn limit_beta(a: f64) -> Result<LimitBeta> {
    let beta = solve_beta_coth(2.0 * a).map_err(|_| {
        Error::OutOfRange(format!("2a = β coth β has no positive root for a = {a} (need a > 1/2)"))
    })?;
    Ok(LimitBeta { a, beta })
}

/// Solves `b0 a / 2 = β coth β` for a general mollifier with constant `b0`.
pub fn limit_beta_general(b0: f64, a: f64) -> Result<LimitBeta> {
    let beta = solve_beta_coth(0.5 * b0 * a).map_err(|_| {
        Error::OutOfRange(format!("no positive root for b0 a/2 = {} (need a > 2/b0)", 0.5 * b0 * a))
    })?;
    Ok(LimitBeta { a, beta })
}

fn solve_beta_coth(target: f64) -> Result<f64> {
    if !(target > 1.0) || !target.is_finite() {
        return Err(Error::OutOfRange(format!("target {target} must exceed 1")));
    }
    // β coth β is increasing with value 1 at 0 and β coth β > β
    let mut lo = 0.0_f64;
    let mut hi = target + 1.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_coth(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub gamma: f64,
    /// Richardson-extrapolated `√(-λ_{γ,a})`.
    pub beta_gamma: f64,
    /// `|β_{γ,a} - β_a|`.
    pub error: f64,
    /// Change of the extrapolated `√(-λ)` when the grid spacing is halved.
    pub refinement_change: f64,
    /// Finest grid used.
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub a: f64,
    pub beta_limit: f64,
    pub rows: Vec<ConvergenceRow>,
    pub fit: LineFit,
}

/// Grid-converged `√(-λ_{γ,a})` for each `γ`, with the log-log exponent of the
/// error against the limit root.
pub fn convergence_study(a: f64, gammas: &[f64]) -> Result<ConvergenceStudy> {
    let limit = limit_beta(a)?;
    let rows = gammas
        .iter()
        .map(|&gamma| converged_beta(a, gamma, limit.beta))
        .collect::<Result<Vec<_>>>()?;
    if rows.len() < 2 {
        return Err(Error::InvalidInput("convergence study needs at least two gammas".into()));
    }
    let g: Vec<f64> = rows.iter().map(|r| r.gamma).collect();
    let e: Vec<f64> = rows.iter().map(|r| r.error).collect();
    Ok(ConvergenceStudy { a, beta_limit: limit.beta, rows, fit: loglog_fit(&g, &e) })
}

/// Richardson-extrapolated `√(-λ_{γ,a})` from three nested grids.
pub fn converged_beta(a: f64, gamma: f64, beta_limit: f64) -> Result<ConvergenceRow> {
    let potential = RayleighPotential::new(crate::profiles::ShearProfile::erf(gamma, a)?);
    let g0 = DirichletGrid::with_spacing(gamma / 16.0, 64);
    let g1 = g0.refined();
    let g2 = g1.refined();
    let l0 = lowest_eigenpair(&potential, g0)?.lambda;
    let l1 = lowest_eigenpair(&potential, g1)?.lambda;
    let l2 = lowest_eigenpair(&potential, g2)?.lambda;
    let r01 = (4.0 * l1 - l0) / 3.0;
    let r12 = (4.0 * l2 - l1) / 3.0;
    if r12 >= 0.0 {
        return Err(Error::OutOfRange(format!(
            "no negative eigenvalue at γ = {gamma}, a = {a} (λ = {r12})"
        )));
    }
    let beta_gamma = (-r12).sqrt();
    Ok(ConvergenceRow {
        gamma,
        beta_gamma,
        error: (beta_gamma - beta_limit).abs(),
        refinement_change: (beta_gamma - (-r01).max(0.0).sqrt()).abs(),
        n: g2.len(),
    })
}
