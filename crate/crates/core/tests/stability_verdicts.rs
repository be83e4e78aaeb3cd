use std::f64::consts::PI;

use couette_core::profiles::ShearProfile;
use couette_core::spectral1d::limit_beta;
use couette_core::stability::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn erf_profile_is_unstable_at_two_pi() {
    let p = ShearProfile::erf(0.05, 1.0).unwrap();
    let v = classify(&p, 2.0 * PI).unwrap();
    assert_eq!(v.verdict, Verdict::Unstable);
    let t_min = unstable_period_window(&p).unwrap().unwrap();
    // at γ = 0.05 the root √(-λ) ≈ 1.651 still sits well below the γ → 0
    // limit 1.915, so T_min lies above 2π/β_1
    let predicted = 2.0 * PI / limit_beta(1.0).unwrap().beta;
    assert!(t_min > predicted && t_min < 1.25 * predicted, "{t_min}");
    assert!((t_min - 2.0 * PI / 1.650_733_8).abs() < 1e-4);
    assert!((v.unstable_period_min.unwrap() - t_min).abs() < 1e-9);
}

#[test]
fn verdict_is_monotone_in_period() {
    let p = ShearProfile::erf(0.05, 1.0).unwrap();
    let t_min = unstable_period_window(&p).unwrap().unwrap();
    let mut seen_unstable = false;
    for i in 0..12 {
        let t = 0.5 + 0.75 * i as f64;
        let v = classify(&p, t).unwrap().verdict;
        if seen_unstable {
            assert_eq!(v, Verdict::Unstable, "T = {t}");
        }
        if v == Verdict::Unstable {
            seen_unstable = true;
            assert!(t > t_min);
        }
        if t < t_min * 0.9 {
            assert_ne!(v, Verdict::Unstable);
        }
    }
    assert!(seen_unstable);
}

#[test]
fn window_shrinks_with_amplitude_and_vanishes_below_half() {
    let windows: Vec<f64> = [0.8, 1.0, 2.0]
        .iter()
        .map(|&a| unstable_period_window(&ShearProfile::erf(0.02, a).unwrap()).unwrap().unwrap())
        .collect();
    assert!(windows.windows(2).all(|w| w[1] < w[0]));
    assert!(unstable_period_window(&ShearProfile::erf(0.02, 0.4).unwrap()).unwrap().is_none());
}

#[test]
fn small_h2_perturbations_are_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..20 {
        let shear = random_near_couette(&mut rng, 0.008).unwrap();
        let norm = slope_defect_norm(&shear, 2.0, 2049).unwrap();
        assert!(norm <= 0.01, "profile {i}: {norm}");
        let v = classify(&shear, 2.0 * PI).unwrap();
        assert_eq!(v.verdict, Verdict::Stable, "profile {i}: {:?}", v.eigenvalues);
    }
}

#[test]
fn mild_erf_profile_is_stable() {
    // ‖U' - 1‖_{H²} ≈ 0.203 for (0.3, 0.05) and ≈ 0.0081 for (0.3, 0.002)
    let tiny = ShearProfile::erf(0.3, 0.002).unwrap();
    assert!(slope_defect_norm(&tiny, 2.0, 2049).unwrap() <= 0.01);
    for a in [0.002, 0.05] {
        let p = ShearProfile::erf(0.3, a).unwrap();
        for t in [1.0, 5.0, 20.0] {
            assert_eq!(classify(&p, t).unwrap().verdict, Verdict::Stable, "a = {a}, T = {t}");
        }
    }
}
