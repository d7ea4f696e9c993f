//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn uniform(r: &mut StdRng, lo: f64, hi: f64) -> f64 {
    r.random_range(lo..hi)
}

/// Log-uniform sample on [lo, hi].
pub fn log_uniform(r: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (r.random_range(lo.ln()..hi.ln())).exp()
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

/// 20-point Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration
/// on P₂₀.
pub fn gauss_legendre_20() -> Vec<(f64, f64)> {
    let n = 20;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite 20-point Gauss–Legendre sum of f over consecutive breakpoints.
pub fn gl_sum(f: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
    let rule = gauss_legendre_20();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        total += h * rule.iter().map(|&(x, wt)| wt * f(m + h * x)).sum::<f64>();
    }
    total
}

/// Breakpoints on [0, w_max] with panels no wider than `fine` below `knee`,
/// growing geometrically beyond it but never wider than `osc` (a fraction of
/// the oscillation period).
pub fn panels(fine: f64, knee: f64, w_max: f64, osc: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = 0.0;
    while x < w_max {
        let h = if x < knee { fine } else { (0.1 * x).max(fine) };
        x = (x + h.min(osc)).min(w_max);
        b.push(x);
    }
    b
}

/// ξ(t) = (1/π)∫ J(ω)(coth(βω/2) cos ωt + i sin ωt) dω truncated at `w_max`,
/// with J supplied as a closure. β = ∞ uses coth = 1.
pub fn xi_oracle(j: impl Fn(f64) -> f64, beta: f64, t: f64, scale: f64, w_max: f64) -> Complex64 {
    let coth = |w: f64| if beta.is_infinite() { 1.0 } else { 1.0 / (0.5 * beta * w).tanh() };
    let osc = if t.abs() > 0.0 { 0.25 * PI / t.abs() } else { f64::INFINITY };
    let b = panels(scale / 40.0, 8.0 * scale, w_max, osc);
    let re = gl_sum(|w| if w == 0.0 { 0.0 } else { j(w) * coth(w) * (w * t).cos() }, &b);
    let im = gl_sum(|w| j(w) * (w * t).sin(), &b);
    Complex64::new(re, im) / PI
}

/// Trapezoid rule for f on [a, b] with n intervals.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + h * i as f64)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}
