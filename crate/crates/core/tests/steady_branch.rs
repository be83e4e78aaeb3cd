use std::f64::consts::PI;

use couette_core::fit::loglog_fit;
use couette_core::profiles::{RayleighPotential, Shear, ShearProfile};
use couette_core::sobolev::hs_norm_1d;
use couette_core::sobolev::Field1D;
use couette_core::spectral1d::{limit_beta, lowest_eigenpair, DirichletGrid};
use couette_core::steady::*;
use couette_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn problem(gamma: f64, a: f64) -> SteadyProblem {
    let p = ShearProfile::erf(gamma, a).unwrap();
    SteadyProblem::new(&p, SteadyGrid::for_profile(&p, DEFAULT_MODES).unwrap()).unwrap()
}

fn remainder_ratio(prob: &SteadyProblem, s: &SteadyState) -> f64 {
    let e = prob.kernel();
    let rem: Vec<f64> = s.phi.iter().zip(&e).map(|(p, k)| p - s.amplitude * k).collect();
    prob.norm(&rem) / (s.amplitude.abs() * prob.norm(&e))
}

/// Richardson-extrapolated `λ` from two grids finer than the steady grid.
fn converged_lambda(gamma: f64, a: f64) -> f64 {
    let pot = RayleighPotential::new(ShearProfile::erf(gamma, a).unwrap());
    let g = DirichletGrid::with_spacing(gamma / 64.0, 255);
    let l0 = lowest_eigenpair(&pot, g).unwrap().lambda;
    let l1 = lowest_eigenpair(&pot, g.refined()).unwrap().lambda;
    (4.0 * l1 - l0) / 3.0
}

#[test]
fn residual_vanishes_quadratically_along_kernel() {
    let prob = problem(0.05, 1.0);
    let e = prob.kernel();
    let r = |eps: f64| {
        let phi: Vec<f64> = e.iter().map(|v| eps * v).collect();
        prob.residual_norm(&phi, prob.k0_sq())
    };
    let (r1, r2) = (r(1e-6), r(5e-7));
    assert!(r1 < 1e-6);
    assert!((r1 / r2 - 4.0).abs() < 0.2, "ratio {}", r1 / r2);
}

#[test]
fn jacobian_matches_finite_differences() {
    let prob = problem(0.1, 1.0);
    let state = prob.state_at(1e-4, 2).unwrap();
    let jac = prob.jacobian(&state.phi, state.alpha_sq);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let d: Vec<f64> = (0..state.phi.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h = 1e-7;
        let shifted = |t: f64| {
            let p: Vec<f64> = state.phi.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            prob.residual(&p, state.alpha_sq)
        };
        let (fp, fm) = (shifted(h), shifted(-h));
        let fd: Vec<f64> = fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let jd = jac.matvec(&d);
        let err: Vec<f64> = fd.iter().zip(&jd).map(|(a, b)| a - b).collect();
        let rel = prob.norm(&err) / prob.norm(&jd);
        assert!(rel < 1e-6, "relative mismatch {rel:e}");
    }
}

#[test]
fn branch_leaves_trivial_solution_along_kernel() {
    let prob = problem(0.05, 1.0);
    let mut ratios = Vec::new();
    let mut curvature = Vec::new();
    for step in [2e-5, 1e-5, 5e-6] {
        let branch = prob.branch(step, 8).unwrap();
        for pair in branch.windows(2) {
            assert!(pair[1].amplitude > pair[0].amplitude);
        }
        for s in &branch {
            assert!(s.residual <= RESIDUAL_TOLERANCE);
            assert!(s.alpha_sq <= prob.k0_sq());
        }
        let first = &branch[0];
        assert!((first.amplitude - step).abs() < 1e-15);
        ratios.push(remainder_ratio(&prob, first));
        // pitchfork: α² - k0² = -cβ² + O(β⁴), so |α² - k0²| ≤ C|β| with room
        curvature.push((prob.k0_sq() - first.alpha_sq) / (step * step));
    }
    assert!(curvature.iter().all(|c| *c > 0.0));
    assert!((curvature[2] / curvature[0] - 1.0).abs() < 0.05, "{curvature:?}");
    assert!(ratios[0] <= 0.1);
    for w in ratios.windows(2) {
        assert!(w[1] <= 0.6 * w[0], "{ratios:?}");
    }
    let lambda = converged_lambda(0.05, 1.0);
    let smallest = prob.branch(5e-6, 1).unwrap();
    assert!((smallest[0].alpha_sq + lambda).abs() < 1e-3);
}

#[test]
fn arclength_and_fixed_amplitude_agree() {
    let prob = problem(0.05, 1.0);
    let branch = prob.branch(1e-5, 9).unwrap();
    // the last states come from pseudo-arclength; re-solve at their
    // amplitudes with the amplitude constraint
    for s in &branch[6..] {
        let direct = prob.state_at(s.amplitude, 4).unwrap();
        assert!((direct.alpha_sq - s.alpha_sq).abs() < 1e-9);
    }
}

#[test]
fn certificate_on_refined_grid() {
    let prob = problem(0.05, 1.0);
    for s in prob.branch(1e-5, 3).unwrap() {
        assert!(refined_residual(&prob, &s).unwrap() <= 1e-6);
    }
}

#[test]
fn opposite_amplitudes_differ_by_half_period_shift() {
    let prob = problem(0.05, 1.0);
    let up = prob.state_at(3e-5, 2).unwrap();
    let down = prob.state_at(-3e-5, 2).unwrap();
    assert!((up.alpha_sq - down.alpha_sq).abs() < 1e-10);
    let (cu, cd) = (up.coefficients(), down.coefficients());
    let m = up.grid.modes;
    let scale = cu.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    for (i, (a, b)) in cu.iter().zip(&cd).enumerate() {
        let sign = if (i % m).is_multiple_of(2) { 1.0 } else { -1.0 };
        assert!((a - sign * b).abs() < 1e-9 * scale);
    }
}

#[test]
fn cats_eye_structure_and_separatrix_scaling() {
    let p = ShearProfile::erf(0.05, 1.0).unwrap();
    let prob = problem(0.05, 1.0);
    let mut betas = Vec::new();
    let mut heights = Vec::new();
    for beta in [4e-5, 2e-5, 1e-5, 5e-6] {
        let s = prob.state_at(beta, 2).unwrap();
        let rep = classify_streamlines(&s, &p).unwrap();
        assert!(rep.cats_eye);
        let saddle = rep.points.iter().find(|c| c.kind == CriticalKind::Saddle).unwrap();
        let center = rep.points.iter().find(|c| c.kind == CriticalKind::Center).unwrap();
        // φ₀(0) > 0 and ψ₀ has a minimum at y = 0: the crest of the
        // perturbation at ξ = 0 makes the saddle
        assert!(saddle.xi.abs() < 1e-9 && (center.xi - PI).abs() < 1e-9);
        assert!(saddle.y.abs() < 1e-3 && center.y.abs() < 1e-3);
        betas.push(beta);
        heights.push(rep.eye_half_height.unwrap());
    }
    let fit = loglog_fit(&betas, &heights);
    assert!((fit.slope - 0.5).abs() < 0.05, "slope {}", fit.slope);

    let mut down = prob.state_at(-1e-5, 2).unwrap();
    let rep = classify_streamlines(&down, &p).unwrap();
    let saddle = rep.points.iter().find(|c| c.kind == CriticalKind::Saddle).unwrap();
    assert!(rep.cats_eye && (saddle.xi - PI).abs() < 1e-9);

    down.phi.iter_mut().for_each(|v| *v = 0.0);
    let flat = classify_streamlines(&down, &p).unwrap();
    assert!(!flat.cats_eye && flat.points.is_empty());
}

#[test]
fn period_matching_at_two_pi() {
    let target = 2.0 * PI;
    let bracket = default_bracket(target);
    let m = match_period(0.05, target, 1e-4, bracket, DEFAULT_MODES).unwrap();
    assert!((m.state.period() - target).abs() <= 1e-6 * target);
    assert!(m.a > bracket.0 && m.a < bracket.1);
    assert!(limit_beta(bracket.0).unwrap().beta < 1.0 && limit_beta(bracket.1).unwrap().beta > 1.0);
    assert!(m.scan[0].period > target && m.scan.last().unwrap().period < target);
    assert_eq!(m.roots_found, 1);
    // finite γ lowers √(-λ) below β_a, so the matched a exceeds the limit root
    assert!(m.a > 0.657);

    let err = match_period(0.05, target, 1e-4, (0.9, 1.0), DEFAULT_MODES).unwrap_err();
    assert!(matches!(err, Error::BracketInvalid { .. }));
}

#[test]
fn small_amplitude_period_tends_to_linear_value() {
    let prob = problem(0.05, 0.8);
    let linear = 2.0 * PI / prob.k0_sq().sqrt();
    let mut gaps = Vec::new();
    for r in [4e-5, 2e-5, 1e-5] {
        gaps.push((prob.state_at(r, 2).unwrap().period() - linear).abs());
    }
    assert!(gaps[2] < 1e-3 && gaps[1] < gaps[0] && gaps[2] < gaps[1]);
}

#[test]
fn advection_residual_converges_at_second_order() {
    let p = ShearProfile::erf(0.05, 0.8).unwrap();
    let mut grid = SteadyGrid::for_profile(&p, DEFAULT_MODES).unwrap();
    let mut hs = Vec::new();
    let mut res = Vec::new();
    for _ in 0..3 {
        let prob = SteadyProblem::new(&p, grid).unwrap();
        let s = prob.state_at(1e-4, 3).unwrap();
        hs.push(grid.y.spacing());
        res.push(advection_residual(&prob, &s));
        grid = grid.refined();
    }
    let fit = loglog_fit(&hs, &res);
    assert!(fit.slope >= 1.5, "order {}", fit.slope);
}

#[test]
fn vorticity_distance_tracks_shear_part() {
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    for gamma in [0.1, 0.05, 0.025] {
        let (prob, state) = solve_at_amplitude(gamma, 1.0, 1e-5, DEFAULT_MODES).unwrap();
        let d1 = vorticity_distance(&prob, &state, 1.0).unwrap();
        let p = ShearProfile::erf(gamma, 1.0).unwrap();
        let shear = Field1D::from_fn(move |y| p.du(y) - 1.0, 8001).unwrap();
        let base = state.period().sqrt() * hs_norm_1d(&shear, 1.0).unwrap();
        assert!((d1 - base).abs() < 0.01 * base, "{d1} vs {base}");
        s1.push(d1);
        s2.push(vorticity_distance(&prob, &state, 2.0).unwrap());
    }
    assert!(s1[1] < s1[0] && s1[2] < s1[1]);
    assert!(s2[1] > s2[0] && s2[2] > s2[1]);
}

#[test]
fn trivial_state_distance_is_pure_shear() {
    let (prob, mut state) = solve_at_amplitude(0.05, 1.0, 1e-5, DEFAULT_MODES).unwrap();
    state.phi.iter_mut().for_each(|v| *v = 0.0);
    let p = ShearProfile::erf(0.05, 1.0).unwrap();
    let d = vorticity_distance(&prob, &state, 1.0).unwrap();
    let field = vorticity_field(&prob, &state, 8, 4801).unwrap();
    let ny = field.ny();
    let column: Vec<f64> = field.values()[..ny].iter().map(|c| c.re).collect();
    let base = state.period().sqrt() * hs_norm_1d(&Field1D::from_samples(column).unwrap(), 1.0).unwrap();
    assert!((d - base).abs() < 1e-3 * base);
    assert!((field.values()[ny / 2].re - (p.du(0.0) - 1.0)).abs() < 1e-12);
}

#[test]
fn newton_failure_reports_last_good_state() {
    let prob = problem(0.05, 1.0);
    match prob.state_at(2e-3, 4) {
        Err(Error::NewtonDiverged { last_good: Some(s), .. }) => {
            assert!(s.residual <= RESIDUAL_TOLERANCE && s.amplitude > 0.0)
        }
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn branch_rejects_foreign_branch_point() {
    let p = ShearProfile::erf(0.05, 1.0).unwrap();
    let f = std::sync::Arc::new(build_nonlinearity(&p).unwrap());
    let lambda = converged_lambda(0.05, 1.0);
    let ok = continue_branch(f.clone(), &p, -lambda, 1e-5, 2).unwrap();
    assert_eq!(ok.len(), 2);
    assert!(matches!(continue_branch(f, &p, 2.0, 1e-5, 2), Err(Error::BifurcationNotFound { .. })));
}
