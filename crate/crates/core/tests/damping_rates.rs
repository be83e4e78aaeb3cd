use couette_core::damping::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_diff(a: &ModalStream, b: &ModalStream) -> f64 {
    a.psi.iter().zip(&b.psi).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn smooth_mode_decay_rates() {
    let modes = vec![ModalVorticity::cosine(1).unwrap()];
    let times = log_times(10.0, 100.0, 9);
    let u = decay_fit(&modes, &times, NormKind::U).unwrap();
    let v = decay_fit(&modes, &times, NormKind::V).unwrap();
    println!("u {} v {}", u.exponent, v.exponent);
    assert!((-1.1..=-0.9).contains(&u.exponent));
    assert!((-2.1..=-1.9).contains(&v.exponent));

    let long = log_times(10.0, 1000.0, 9);
    let u2 = decay_fit(&modes, &long, NormKind::U).unwrap();
    let v2 = decay_fit(&modes, &long, NormKind::V).unwrap();
    println!("long u {} v {}", u2.exponent, v2.exponent);
    assert!((u2.exponent + 1.0).abs() <= 0.5 * (u.exponent + 1.0).abs() + 1e-3);
    assert!((v2.exponent + 2.0).abs() <= 0.5 * (v.exponent + 2.0).abs() + 1e-3);
}

#[test]
fn green_and_direct_solves_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in [1, 2, 5] {
        let mode = ModalVorticity::cosine(k).unwrap();
        for _ in 0..6 {
            let t: f64 = rng.gen_range(0.0..100.0);
            let g = modal_stream(&mode, t).unwrap();
            let d = modal_stream_direct(&mode, t).unwrap();
            let diff = max_diff(&g, &d);
            assert!(diff <= 1e-8, "k = {k}, t = {t}: {diff:e}");
            assert_eq!(g.psi[0], Complex64::new(0.0, 0.0));
            assert!(g.psi.last().unwrap().norm() < 1e-15);
        }
    }
}

#[test]
fn asymptotic_profile_converges_to_scaled_vorticity() {
    let mode = ModalVorticity::cosine(1).unwrap();
    let r = single_mode_asymptotics(&mode, &[10.0, 20.0, 40.0, 80.0]).unwrap();
    for row in &r.rows {
        println!("{} {} {}", row.t, row.profile_norm, row.increment);
    }
    println!("C = {}", r.cauchy_constant);
    assert!(r.nonvanishing);
    // increments shrink like 1/t
    for w in r.rows.windows(2).skip(1) {
        assert!(w[1].increment <= 0.75 * w[0].increment);
    }
    // limit profile is ω_k⁰/k²
    let h = r.y[1] - r.y[0];
    let err: f64 = r
        .y
        .iter()
        .zip(&r.profile)
        .map(|(y, f)| (f - Complex64::new((std::f64::consts::PI * y / 2.0).cos(), 0.0)).norm_sqr())
        .sum::<f64>()
        * h;
    assert!(err.sqrt() < 2.0 * r.cauchy_constant / 80.0, "{}", err.sqrt());
}

#[test]
fn asymptotics_are_linear_and_time_shift_consistent() {
    let mode = ModalVorticity::cosine(1).unwrap();
    let base = single_mode_asymptotics(&mode, &[40.0, 80.0]).unwrap();
    let doubled = single_mode_asymptotics(&mode.scaled(2.0), &[40.0, 80.0]).unwrap();
    assert!((doubled.rows[1].profile_norm - 2.0 * base.rows[1].profile_norm).abs() < 1e-10);

    let t0 = 15.0;
    let shifted = mode.advanced(t0);
    let a = modal_stream_on(&mode, 80.0, 8000).unwrap();
    let b = modal_stream_on(&shifted, 80.0 - t0, 8000).unwrap();
    assert!(max_diff(&a, &b) < 1e-12);
}

#[test]
fn poincare_and_parseval() {
    let mode = ModalVorticity::cosine(2).unwrap();
    for t in [0.0, 3.0, 30.0] {
        let s = modal_stream(&mode, t).unwrap();
        let n = velocity_norms(std::slice::from_ref(&mode), t).unwrap();
        let expected_v = 2.0 * (2.0 * std::f64::consts::PI).sqrt() * s.l2_norm();
        assert!((n.v - expected_v).abs() < 1e-12 * expected_v);
        // ‖∇v‖² = 2π(k⁴‖ψ‖² + k²‖ψ'‖²)
        let grad_v_sq = 2.0 * std::f64::consts::PI * (16.0 * s.l2_norm().powi(2) + 4.0 * s.derivative_l2_norm().powi(2));
        assert!(grad_v_sq >= (std::f64::consts::PI / 2.0).powi(2) * n.v * n.v);
    }
}

#[test]
fn transport_preserves_vorticity_norm() {
    let modes = vec![ModalVorticity::cosine(1).unwrap(), ModalVorticity::step(-3).unwrap()];
    let w0 = vorticity_l2(&modes, 0.0, 2001);
    for t in [1.0, 10.0, 100.0] {
        assert!((vorticity_l2(&modes, t, 2001) - w0).abs() < 1e-12 * w0);
    }
}

#[test]
fn jump_data_decays_more_slowly() {
    let modes = vec![ModalVorticity::step(1).unwrap()];
    let times = log_times(10.0, 100.0, 7);
    let v = decay_fit(&modes, &times, NormKind::V).unwrap();
    let u = decay_fit(&modes, &times, NormKind::U).unwrap();
    println!("step: v {} u {} u-norms {:?}", v.exponent, u.exponent, u.norms);
    assert!(v.exponent <= -0.9 && v.exponent >= -2.1);
    assert!(u.norms.last().unwrap() < u.norms.first().unwrap());
}

#[test]
fn rough_data_velocity_decays() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let modes = rough_modes(&mut rng, 4, 24, 1.0, 0.6).unwrap();
    let times = [0.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0];
    let norms: Vec<f64> = times.iter().map(|&t| velocity_norms(&modes, t).unwrap().total()).collect();
    println!("{norms:?}");
    assert!(norms[3..].windows(2).all(|w| w[1] < w[0]));
    assert!(*norms.last().unwrap() < 0.1 * norms[0]);
}

#[test]
fn oscillation_cap_is_enforced() {
    let mode = ModalVorticity::cosine(100).unwrap();
    assert!(matches!(modal_stream(&mode, 1e4), Err(couette_core::Error::OscillationUnresolved { .. })));
}
