//! Newton solves with a scalar side constraint, branch continuation and
//! period matching.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::BandedMatrix;
use crate::profiles::ShearProfile;
use crate::special::beta_coth;

use super::problem::{SteadyGrid, SteadyProblem};
use super::SteadyState;

/// Every returned state satisfies `‖F‖ ≤ RESIDUAL_TOLERANCE`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

pub const NEWTON_MAX_HALVINGS: usize = 8;

const NEWTON_MAX_ITERATIONS: usize = 40;
const NEWTON_TARGET: f64 = 1e-13;
/// Steps taken with the fixed-amplitude constraint before switching to
/// pseudo-arclength.
const FIXED_AMPLITUDE_STEPS: usize = 5;
/// Allowed mismatch between the supplied `k0²` and the discrete one.
const BRANCH_POINT_TOLERANCE: f64 = 1e-3;

/// `c·φ + c_α α² = rhs`.
struct Constraint {
    c_phi: Vec<f64>,
    c_alpha: f64,
    rhs: f64,
}

impl Constraint {
    fn fixed_amplitude(problem: &SteadyProblem, beta: f64) -> Self {
        let w = problem.grid().weight() / PI;
        Self { c_phi: problem.kernel().iter().map(|e| w * e).collect(), c_alpha: 0.0, rhs: beta }
    }

    fn eval(&self, phi: &[f64], alpha_sq: f64) -> f64 {
        dot(&self.c_phi, phi) + self.c_alpha * alpha_sq - self.rhs
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `[J a; cᵀ d] [x; s] = [r; q]` by block elimination with one
/// round of iterative refinement; `lu` is the factored copy of `jac`.
fn bordered_solve(
    jac: &BandedMatrix,
    lu: &BandedMatrix,
    col: &[f64],
    con: &Constraint,
    r: &[f64],
    q: f64,
) -> (Vec<f64>, f64) {
    let z = lu.solve(col);
    let denom = con.c_alpha - dot(&con.c_phi, &z);
    let once = |r: &[f64], q: f64| {
        let y = lu.solve(r);
        let s = (q - dot(&con.c_phi, &y)) / denom;
        let x: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a - s * b).collect();
        (x, s)
    };
    let (mut x, mut s) = once(r, q);
    let ax = jac.matvec(&x);
    let r2: Vec<f64> = r.iter().zip(&ax).zip(col).map(|((ri, ai), ci)| ri - ai - s * ci).collect();
    let q2 = q - dot(&con.c_phi, &x) - con.c_alpha * s;
    let (dx, ds) = once(&r2, q2);
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi += di;
    }
    s += ds;
    (x, s)
}

fn to_state(problem: &SteadyProblem, phi: Vec<f64>, alpha_sq: f64, residual: f64, iterations: usize) -> SteadyState {
    let (psi_min, _, range_escape) = problem.range_escape(&phi);
    SteadyState {
        grid: problem.grid(),
        alpha_sq,
        amplitude: problem.amplitude(&phi),
        phi,
        residual,
        range_escape,
        psi_min,
        newton_iterations: iterations,
    }
}

/// Damped Newton on `F(φ, α²) = 0` together with the constraint.
fn newton(
    problem: &SteadyProblem,
    mut phi: Vec<f64>,
    mut alpha_sq: f64,
    con: &Constraint,
    last_good: Option<&SteadyState>,
) -> Result<SteadyState> {
    let diverged = |residual: f64| Error::NewtonDiverged {
        amplitude: con.rhs,
        residual,
        last_good: last_good.cloned().map(Box::new),
    };
    let merit = |f: &[f64], g: f64| problem.dot(f, f) + g * g;

    let mut f = problem.residual(&phi, alpha_sq);
    let mut g = con.eval(&phi, alpha_sq);
    for it in 0..NEWTON_MAX_ITERATIONS {
        let res = problem.norm(&f);
        if res <= NEWTON_TARGET && g.abs() <= NEWTON_TARGET {
            return Ok(to_state(problem, phi, alpha_sq, res, it));
        }
        let jac = problem.jacobian(&phi, alpha_sq);
        let mut lu = jac.clone();
        lu.factor().map_err(|_| diverged(res))?;
        let col = problem.d2_xi(&phi);
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let (dphi, dalpha) = bordered_solve(&jac, &lu, &col, con, &rhs, -g);

        let current = merit(&f, g);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let trial: Vec<f64> = phi.iter().zip(&dphi).map(|(p, d)| p + t * d).collect();
            let trial_alpha = alpha_sq + t * dalpha;
            let tf = problem.residual(&trial, trial_alpha);
            let tg = con.eval(&trial, trial_alpha);
            if merit(&tf, tg) < current {
                phi = trial;
                alpha_sq = trial_alpha;
                f = tf;
                g = tg;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no decrease left: either at the rounding floor or stuck
            return if res <= RESIDUAL_TOLERANCE && g.abs() <= RESIDUAL_TOLERANCE {
                Ok(to_state(problem, phi, alpha_sq, res, it))
            } else {
                Err(diverged(res))
            };
        }
    }
    let res = problem.norm(&f);
    if res <= RESIDUAL_TOLERANCE && g.abs() <= RESIDUAL_TOLERANCE {
        Ok(to_state(problem, phi, alpha_sq, res, NEWTON_MAX_ITERATIONS))
    } else {
        Err(diverged(res))
    }
}

/// `k0²` supplied by the caller must match the discrete branch point.
fn check_branch_point(problem: &SteadyProblem, k0_sq: f64) -> Result<()> {
    let e = problem.kernel();
    let zero = vec![0.0; e.len()];
    let defect = problem.norm(&problem.jacobian(&zero, k0_sq).matvec(&e)) / problem.norm(&e);
    if !(defect <= BRANCH_POINT_TOLERANCE * (1.0 + k0_sq.abs())) {
        return Err(Error::BifurcationNotFound { defect });
    }
    Ok(())
}

impl SteadyProblem {
    /// `n_steps` states at amplitudes `step, 2·step, ...` (signed), starting
    /// from the discrete branch point. The first few use the amplitude as
    /// the constraint, the rest pseudo-arclength along the secant.
    pub fn branch(&self, step: f64, n_steps: usize) -> Result<Vec<SteadyState>> {
        if !(step != 0.0) || !step.is_finite() {
            return Err(Error::OutOfRange(format!("continuation step {step} must be finite and nonzero")));
        }
        let e = self.kernel();
        let mut states: Vec<SteadyState> = Vec::with_capacity(n_steps);
        // (φ, α²) of the two previous points, trivial solution first
        let mut prev = (vec![0.0; e.len()], self.k0_sq());
        let mut prev2: Option<(Vec<f64>, f64)> = None;
        for i in 1..=n_steps {
            let beta = i as f64 * step;
            let (guess, guess_alpha, con) = match &prev2 {
                Some(p2) if i > FIXED_AMPLITUDE_STEPS => {
                    let dphi: Vec<f64> = prev.0.iter().zip(&p2.0).map(|(a, b)| a - b).collect();
                    let dalpha = prev.1 - p2.1;
                    let ds = (self.dot(&dphi, &dphi) / PI + dalpha * dalpha).sqrt();
                    let w = self.grid().weight() / PI / ds;
                    let c_phi: Vec<f64> = dphi.iter().map(|d| w * d).collect();
                    let c_alpha = dalpha / ds;
                    let rhs = dot(&c_phi, &prev.0) + c_alpha * prev.1 + ds;
                    let (g, ga) = extrapolate(&prev, p2, 1.0);
                    (g, ga, Constraint { c_phi, c_alpha, rhs })
                }
                _ => {
                    let (g, ga) = match &prev2 {
                        None => (e.iter().map(|v| beta * v).collect(), self.k0_sq()),
                        Some(p2) => extrapolate(&prev, p2, 1.0),
                    };
                    (g, ga, Constraint::fixed_amplitude(self, beta))
                }
            };
            let state = newton(self, guess, guess_alpha, &con, states.last())?;
            if let Some(last) = states.last() {
                if !(state.amplitude.abs() > last.amplitude.abs()) {
                    return Err(Error::NoConvergence(format!(
                        "branch turned back at amplitude {} after {}",
                        state.amplitude, last.amplitude
                    )));
                }
            }
            prev2 = Some(std::mem::replace(&mut prev, (state.phi.clone(), state.alpha_sq)));
            states.push(state);
        }
        Ok(states)
    }

    /// Single state at amplitude `beta`, reached by `substeps` equal
    /// fixed-amplitude steps from the branch point.
    pub fn state_at(&self, beta: f64, substeps: usize) -> Result<SteadyState> {
        let substeps = substeps.max(1);
        let e = self.kernel();
        let mut prev = (vec![0.0; e.len()], self.k0_sq());
        let mut prev2: Option<(Vec<f64>, f64)> = None;
        let mut last: Option<SteadyState> = None;
        for i in 1..=substeps {
            let b = beta * i as f64 / substeps as f64;
            let (g, ga) = match &prev2 {
                None => (e.iter().map(|v| b * v).collect(), self.k0_sq()),
                Some(p2) => extrapolate(&prev, p2, 1.0),
            };
            let state = newton(self, g, ga, &Constraint::fixed_amplitude(self, b), last.as_ref())?;
            prev2 = Some(std::mem::replace(&mut prev, (state.phi.clone(), state.alpha_sq)));
            last = Some(state);
        }
        Ok(last.expect("at least one substep"))
    }
}

fn extrapolate(p1: &(Vec<f64>, f64), p0: &(Vec<f64>, f64), t: f64) -> (Vec<f64>, f64) {
    let phi = p1.0.iter().zip(&p0.0).map(|(a, b)| a + t * (a - b)).collect();
    (phi, p1.1 + t * (p1.1 - p0.1))
}

/// Branch of `profile` with nonlinearity `f` on the default grid.
pub fn continue_branch(
    f: std::sync::Arc<super::NonlinearityF>,
    profile: &ShearProfile,
    k0_sq: f64,
    step: f64,
    n_steps: usize,
) -> Result<Vec<SteadyState>> {
    let grid = SteadyGrid::for_profile(profile, super::DEFAULT_MODES)?;
    let problem = SteadyProblem::with_nonlinearity(profile, f, grid)?;
    check_branch_point(&problem, k0_sq)?;
    problem.branch(step, n_steps)
}

/// State of the `(γ, a)` erf profile at amplitude `r` on the default grid.
pub fn solve_at_amplitude(gamma: f64, a: f64, r: f64, modes: usize) -> Result<(SteadyProblem, SteadyState)> {
    let profile = ShearProfile::erf(gamma, a)?;
    let problem = SteadyProblem::new(&profile, SteadyGrid::for_profile(&profile, modes)?)?;
    let state = problem.state_at(r, 4)?;
    Ok((problem, state))
}

/// Limit-profile bracket `a₁ < a₂` with `β_{a₁} < 2π/T < β_{a₂}`, where
/// `β coth β = 2a`. The lower end sits just below the limit root; since
/// finite `γ` lowers the eigenvalue magnitude, the matched `a` lies above it.
pub fn default_bracket(target_period: f64) -> (f64, f64) {
    let k = 2.0 * PI / target_period;
    (0.5 * beta_coth(0.95 * k), 0.5 * beta_coth(2.0 * k))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PeriodSample {
    pub a: f64,
    /// `∞` when the profile has no branch point.
    pub period: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodMatch {
    pub gamma: f64,
    pub a: f64,
    pub target_period: f64,
    pub bracket: (f64, f64),
    /// Coarse scan of `T(a)` across the bracket.
    pub scan: Vec<PeriodSample>,
    /// Sign changes of `T(a) - target` seen in the scan.
    pub roots_found: usize,
    pub state: SteadyState,
    pub evaluations: usize,
}

const SCAN_INTERVALS: usize = 6;

/// Finds `a` with `T(γ, a; r) = target_period` by bisection over `a`.
pub fn match_period(
    gamma: f64,
    target_period: f64,
    r: f64,
    bracket: (f64, f64),
    modes: usize,
) -> Result<PeriodMatch> {
    let (a1, a2) = bracket;
    if !(a1 < a2) || !(target_period > 0.0) {
        return Err(Error::OutOfRange(format!("bracket ({a1}, {a2}) or period {target_period} invalid")));
    }
    let period_at = |a: f64| -> Result<(f64, Option<SteadyState>)> {
        match solve_at_amplitude(gamma, a, r, modes) {
            Ok((_, s)) => Ok((s.period(), Some(s))),
            Err(Error::BifurcationNotFound { .. }) => Ok((f64::INFINITY, None)),
            Err(e) => Err(e),
        }
    };

    let mut evaluations = 0;
    let mut scan = Vec::with_capacity(SCAN_INTERVALS + 1);
    for i in 0..=SCAN_INTERVALS {
        let a = a1 + (a2 - a1) * i as f64 / SCAN_INTERVALS as f64;
        scan.push(PeriodSample { a, period: period_at(a)?.0 });
        evaluations += 1;
    }
    let (t_low, t_high) = (scan[0].period, scan[SCAN_INTERVALS].period);
    if (t_low - target_period).signum() == (t_high - target_period).signum() {
        return Err(Error::BracketInvalid { t_low, t_high, target: target_period });
    }
    let changes: Vec<usize> = (0..SCAN_INTERVALS)
        .filter(|&i| (scan[i].period - target_period).signum() != (scan[i + 1].period - target_period).signum())
        .collect();

    let i = changes[0];
    let (mut lo, mut hi) = (scan[i].a, scan[i + 1].a);
    let lo_sign = (scan[i].period - target_period).signum();
    let tol = 1e-7 * target_period;
    let mut best: Option<(f64, SteadyState)> = None;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let (t, state) = period_at(mid)?;
        evaluations += 1;
        if let Some(state) = state {
            if (t - target_period).abs() <= tol {
                best = Some((mid, state));
                break;
            }
        }
        if (t - target_period).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let (a, state) = best.ok_or_else(|| Error::NoConvergence("period bisection did not reach tolerance".into()))?;
    Ok(PeriodMatch {
        gamma,
        a,
        target_period,
        bracket,
        scan,
        roots_found: changes.len(),
        state,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_straddles_limit_root() {
        let (a1, a2) = default_bracket(2.0 * PI);
        let b1 = crate::spectral1d::limit_beta(a1).unwrap().beta;
        let b2 = crate::spectral1d::limit_beta(a2).unwrap().beta;
        assert!(b1 < 1.0 && 1.0 < b2);
    }

    #[test]
    fn mismatched_branch_point_is_rejected() {
        let p = ShearProfile::erf(0.1, 1.0).unwrap();
        let f = std::sync::Arc::new(super::super::build_nonlinearity(&p).unwrap());
        let r = continue_branch(f, &p, 1.0, 1e-4, 1);
        assert!(matches!(r, Err(Error::BifurcationNotFound { .. })));
    }
}
