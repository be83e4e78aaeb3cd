//! The vorticity function `f` with `Δψ = f(ψ)` along the base shear flow.
//!
//! Along the base flow `ψ₀'' = U'`, so `f(ψ₀(y)) = U'(y)`; differentiating
//! gives `f'(ψ₀) = U''/U = Q` and `f''(ψ₀) = Q'/U`. The table is built in the
//! parameter `y ∈ [0, 1]` and interpolated in `ψ` by quintic Hermite pieces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::{Shear, ShearProfile};

const MIN_NODES: usize = 2001;

/// Fraction of the core range used as the blending margin on each side.
pub const EXTENSION_MARGIN: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct NonlinearityF {
    psi: Vec<f64>,
    f: Vec<f64>,
    df: Vec<f64>,
    d2f: Vec<f64>,
    margin: f64,
}

/// Value, first and second derivative.
pub type Jet = [f64; 3];

pub fn build_nonlinearity(profile: &ShearProfile) -> Result<NonlinearityF> {
    let samples = 64;
    let odd_defect = (0..=samples)
        .map(|i| {
            let y = i as f64 / samples as f64;
            (profile.u(y) + profile.u(-y)).abs()
        })
        .fold(0.0_f64, f64::max);
    if odd_defect > 1e-12 {
        return Err(Error::NotOdd { defect: odd_defect });
    }

    let n = MIN_NODES.max((40.0 / profile.gamma()).ceil() as usize + 1);
    let ys: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let psi: Vec<f64> = ys.iter().map(|&y| profile.stream(y)).collect();
    if psi.windows(2).any(|w| !(w[1] > w[0])) || ys[1..].iter().any(|&y| !(profile.u(y) > 0.0)) {
        let min_slope = ys[1..].iter().map(|&y| profile.u(y) / y).fold(f64::INFINITY, f64::min);
        return Err(Error::NotMonotone { min_slope });
    }
    let f = ys.iter().map(|&y| profile.du(y)).collect();
    let df = ys.iter().map(|&y| profile.q(y)).collect();
    let d2f = ys.iter().map(|&y| profile.q_prime_over_u(y)).collect();
    let margin = EXTENSION_MARGIN * (psi[n - 1] - psi[0]);
    Ok(NonlinearityF { psi, f, df, d2f, margin })
}

impl NonlinearityF {
    /// Core range `[ψ₀(0), ψ₀(±1)]`.
    pub fn range(&self) -> (f64, f64) {
        (self.psi[0], self.psi[self.psi.len() - 1])
    }

    /// Support of the extended function.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.range();
        (lo - self.margin, hi + self.margin)
    }

    pub fn in_core(&self, psi: f64) -> bool {
        let (lo, hi) = self.range();
        psi >= lo && psi <= hi
    }

    pub fn eval(&self, psi: f64) -> f64 {
        self.jet(psi)[0]
    }

    pub fn derivative(&self, psi: f64) -> f64 {
        self.jet(psi)[1]
    }

    pub fn jet(&self, psi: f64) -> Jet {
        let (lo, hi) = self.range();
        if psi < lo {
            self.extension(0, lo - psi, -1.0)
        } else if psi > hi {
            self.extension(self.psi.len() - 1, psi - hi, 1.0)
        } else {
            self.interior(psi)
        }
    }

    fn interior(&self, psi: f64) -> Jet {
        let n = self.psi.len();
        let i = match self.psi.binary_search_by(|v| v.total_cmp(&psi)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let h = self.psi[i + 1] - self.psi[i];
        let t = (psi - self.psi[i]) / h;
        let b = quintic_basis(t);
        let c = [
            self.f[i],
            self.f[i + 1],
            self.df[i] * h,
            self.df[i + 1] * h,
            self.d2f[i] * h * h,
            self.d2f[i + 1] * h * h,
        ];
        let mut out = [0.0; 3];
        for (d, row) in b.iter().enumerate() {
            out[d] = row.iter().zip(&c).map(|(x, y)| x * y).sum::<f64>() / h.powi(d as i32);
        }
        out
    }

    /// Second-order Taylor polynomial at the edge node times a quintic blend
    /// that falls from 1 to 0 over the margin with two vanishing derivatives
    /// at both ends.
    fn extension(&self, node: usize, dist: f64, dir: f64) -> Jet {
        if dist >= self.margin {
            return [0.0; 3];
        }
        let (f0, f1, f2) = (self.f[node], self.df[node], self.d2f[node]);
        let d = dir * dist;
        let p = [f0 + f1 * d + 0.5 * f2 * d * d, f1 + f2 * d, f2];
        let s = dist / self.margin;
        let bw = [
            1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s),
            -30.0 * s * s * (1.0 - s) * (1.0 - s) * dir / self.margin,
            -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (self.margin * self.margin),
        ];
        [
            p[0] * bw[0],
            p[1] * bw[0] + p[0] * bw[1],
            p[2] * bw[0] + 2.0 * p[1] * bw[1] + p[0] * bw[2],
        ]
    }
}

/// Rows: value, first and second derivative in `t` of the six quintic
/// Hermite basis functions ordered `(v0, v1, d0, d1, s0, s1)`.
fn quintic_basis(t: f64) -> [[f64; 6]; 3] {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    [
        [
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
            0.5 * (t3 - 2.0 * t4 + t5),
        ],
        [
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
            0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4),
        ],
        [
            -60.0 * t + 180.0 * t2 - 120.0 * t3,
            60.0 * t - 180.0 * t2 + 120.0 * t3,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
            0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3),
            0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3),
        ],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::FRAC_1_SQRT_PI;

    #[test]
    fn couette_gives_constant_one() {
        let f = build_nonlinearity(&ShearProfile::erf(0.1, 0.0).unwrap()).unwrap();
        let (lo, hi) = f.range();
        assert!(lo.abs() < 1e-15 && (hi - 0.5).abs() < 1e-14);
        for i in 0..=50 {
            let p = 0.5 * i as f64 / 50.0;
            assert!((f.eval(p) - 1.0).abs() < 1e-13);
            assert!(f.derivative(p).abs() < 1e-12);
        }
    }

    #[test]
    fn reproduces_base_vorticity_and_potential() {
        let profile = ShearProfile::erf(0.05, 1.0).unwrap();
        let f = build_nonlinearity(&profile).unwrap();
        assert!((f.eval(0.0) - (1.0 + 2.0 * 0.05 * FRAC_1_SQRT_PI)).abs() < 1e-14);
        for i in 0..=997 {
            let y = -1.0 + 2.0 * i as f64 / 997.0;
            let psi = profile.stream(y);
            assert!((f.eval(psi) - profile.du(y)).abs() < 1e-8, "y = {y}");
            if y.abs() >= 1e-3 {
                let q = profile.q(y);
                assert!((f.derivative(psi) - q).abs() < 1e-6 * q.abs().max(1.0), "y = {y}");
            }
        }
    }

    #[test]
    fn chain_rule_at_half() {
        let profile = ShearProfile::erf(0.05, 1.0).unwrap();
        let f = build_nonlinearity(&profile).unwrap();
        let p = profile.stream(0.5);
        let h = 1e-5;
        let fd = (f.eval(p + h) - f.eval(p - h)) / (2.0 * h);
        assert!((fd - profile.q(0.5)).abs() < 1e-6);
    }

    #[test]
    fn extension_is_c2_and_compact() {
        let profile = ShearProfile::erf(0.1, 1.0).unwrap();
        let f = build_nonlinearity(&profile).unwrap();
        let (lo, hi) = f.range();
        for edge in [lo, hi] {
            let inside = f.jet(if edge == lo { edge + 1e-12 } else { edge - 1e-12 });
            let outside = f.jet(if edge == lo { edge - 1e-12 } else { edge + 1e-12 });
            for d in 0..3 {
                assert!((inside[d] - outside[d]).abs() < 1e-6 * inside[d].abs().max(1.0));
            }
        }
        let (a, b) = f.support();
        assert!((b - a - 2.0 * (hi - lo)).abs() < 1e-12);
        assert_eq!(f.jet(a - 1e-9), [0.0; 3]);
        assert_eq!(f.jet(b + 1e-9), [0.0; 3]);
        // derivative tables agree with finite differences in the extension
        let p = lo - 0.3 * (a - lo).abs();
        let h = 1e-6;
        let j = f.jet(p);
        assert!((j[1] - (f.eval(p + h) - f.eval(p - h)) / (2.0 * h)).abs() < 1e-4 * j[1].abs().max(1.0));
        assert!((j[2] - (f.derivative(p + h) - f.derivative(p - h)) / (2.0 * h)).abs() < 1e-4 * j[2].abs().max(1.0));
    }
}
