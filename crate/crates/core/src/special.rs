//! Special functions used by the erf shear family, plus Gauss–Legendre rules.

use std::f64::consts::PI;

/// `1/sqrt(pi)`.
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Error function, accurate to about one ulp.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Gaussian bump `sigma(x) = exp(-x^2)/sqrt(pi)`.
#[inline]
pub fn sigma(x: f64) -> f64 {
    FRAC_1_SQRT_PI * (-x * x).exp()
}

/// `Lambda(x) = erf(x)/x`, with `Lambda(0) = 2/sqrt(pi)`.
///
/// Below `|x| < 1e-3` the Taylor series is summed instead of forming the
/// quotient.
pub fn lambda(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        // 2/sqrt(pi) * (1 - x^2/3 + x^4/10 - x^6/42)
        2.0 * FRAC_1_SQRT_PI * (1.0 - x2 / 3.0 + x2 * x2 / 10.0 - x2 * x2 * x2 / 42.0)
    } else {
        erf(x) / x
    }
}

/// `Lambda'(x)/x`, finite at the origin (value `-4/(3 sqrt(pi))`).
pub fn lambda_prime_over_x(x: f64) -> f64 {
    if x.abs() < 0.5 {
        // sum_{n>=1} (-1)^n 2n x^{2n-2} / (n! (2n+1)), times 2/sqrt(pi)
        let x2 = x * x;
        let mut term_pow = 1.0; // x^{2n-2}
        let mut fact = 1.0; // n!
        let mut sum = 0.0;
        for n in 1..30 {
            let nf = n as f64;
            fact *= nf;
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            let term = sign * 2.0 * nf * term_pow / (fact * (2.0 * nf + 1.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            term_pow *= x2;
        }
        2.0 * FRAC_1_SQRT_PI * sum
    } else {
        (2.0 * FRAC_1_SQRT_PI * x * (-x * x).exp() - erf(x)) / (x * x * x)
    }
}

/// `beta * coth(beta)`, continuous at zero.
pub fn beta_coth(beta: f64) -> f64 {
    if beta.abs() < 1e-4 {
        let b2 = beta * beta;
        1.0 + b2 / 3.0 - b2 * b2 / 45.0
    } else {
        beta / beta.tanh()
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre quadrature of `f` over `[a, b]` on `panels`
/// equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(mid + 0.5 * h * xi);
        }
        total += 0.5 * h * s;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn erf_series(x: f64) -> f64 {
        // Maclaurin series, fine for |x| <= 2
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        for n in 1..200 {
            term *= -x2 / n as f64;
            let t = term / (2 * n + 1) as f64;
            sum += t;
            if t.abs() < 1e-20 {
                break;
            }
        }
        2.0 * FRAC_1_SQRT_PI * sum
    }

    #[test]
    fn erf_matches_series() {
        for i in 0..=40 {
            let x = -2.0 + 0.1 * i as f64;
            assert!((erf(x) - erf_series(x)).abs() < 1e-15, "x = {x}");
        }
    }

    #[test]
    fn lambda_is_continuous_at_threshold() {
        let x = 0.999_999e-3;
        assert!((lambda(x) - erf(x) / x).abs() < 1e-15);
        assert!((lambda(0.0) - 2.0 * FRAC_1_SQRT_PI).abs() < 1e-16);
    }

    #[test]
    fn lambda_prime_branches_agree() {
        for &x in &[0.49, 0.4999, 0.5, 0.5001] {
            let h = 1e-5;
            let fd = (lambda(x + h) - lambda(x - h)) / (2.0 * h) / x;
            assert!((lambda_prime_over_x(x) - fd).abs() < 1e-8, "x = {x}");
        }
        assert!((lambda_prime_over_x(0.0) + 4.0 / 3.0 * FRAC_1_SQRT_PI).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
