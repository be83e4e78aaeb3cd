use couette_core::sobolev::gaussian_hs_scaling;

#[test]
fn gaussian_exponents_track_three_halves_minus_s() {
    for s in [0.0, 0.5, 1.0] {
        let r = gaussian_hs_scaling(s, &[0.1, 0.05, 0.025]).unwrap();
        println!("s={s} exp={} norms={:?}", r.exponent(), r.norms);
        assert!((r.exponent() - (1.5 - s)).abs() <= 0.05, "s = {s}: {}", r.exponent());
    }
}

#[test]
fn exponent_collapses_near_critical_order() {
    let r = gaussian_hs_scaling(1.4, &[0.1, 0.05, 0.025]).unwrap();
    println!("s=1.4 exp={}", r.exponent());
    assert!((r.exponent() - 0.1).abs() <= 0.05);
}
