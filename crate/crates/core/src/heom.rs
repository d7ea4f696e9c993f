//! Matsubara-truncation certificates for Lorentzian-sum baths.
//!
//! Truncating the Matsubara series after N terms leaves the real, decaying
//! remainder
//!
//! Δξ_N(t) = −(π/β) Σᵢ pᵢ Σ_{k>N} ν_k e^{−ν_k t} / D_ik,
//! D_ik = (Ωᵢ²+Γᵢ²−ν_k²)² + 4Ωᵢ²ν_k²,
//!
//! whose integral ∫|Δξ_N| feeds the strong bound with η = 0. Coupling is
//! absorbed into the weights pᵢ throughout, so relative errors are
//! e^{γ t} − 1.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::DeltaXi;
use crate::correlation::{lorentzian_denominator, matsubara_frequency, matsubara_tail_bound, XiValue};
use crate::density::{LorentzianTerm, SpectralDensity};
use crate::error::{Error, Result};

/// Largest Matsubara index summed before giving up on a tail certificate.
pub const MAX_MATSUBARA_INDEX: usize = 50_000_000;
/// Upper limit of the minimal-N search.
pub const MAX_SEARCH_N: usize = 100_000;

/// Lorentzian-sum bath at inverse temperature β, coupling absorbed into p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzianBath {
    pub terms: Vec<LorentzianTerm>,
    pub beta: f64,
}

impl LorentzianBath {
    pub fn new(terms: Vec<LorentzianTerm>, beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Config(format!("beta must be finite and > 0, got {beta}")));
        }
        SpectralDensity::LorentzianSum { terms: terms.clone() }.validate()?;
        Ok(LorentzianBath { terms, beta })
    }

    pub fn density(&self) -> SpectralDensity {
        SpectralDensity::LorentzianSum { terms: self.terms.clone() }
    }

    /// (pᵢ, Ωᵢ, Γᵢ) triples.
    fn weighted(&self) -> Vec<(f64, f64, f64)> {
        self.terms.iter().map(|l| (l.p, l.omega, l.gamma)).collect()
    }

    fn max_radius(&self) -> f64 {
        self.terms.iter().map(|l| l.omega.hypot(l.gamma)).fold(0.0, f64::max)
    }
}

/// The fitted three-Lorentzian bath of the Meier–Tannor ohmic benchmark.
///
/// Rows give pᵢ in units of Ω⁴ and Ωᵢ, Γᵢ in units of Ω, with Ω = 15ε/4 and
/// ε = 1. With these units the sum approximates (π/2) ω e^{−ω/Ω}; the
/// absorbed weights multiply by λ² = 4ξ = 0.4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeierTannorModel;

impl MeierTannorModel {
    pub const ROWS: [(f64, f64, f64); 3] =
        [(12.0677, 0.2378, 2.2593), (-19.9762, 0.0888, 5.4377), (0.1834, 0.0482, 0.8099)];
    pub const CUTOFF: f64 = 15.0 / 4.0;
    pub const XI: f64 = 0.1;
    pub const LAMBDA_SQ: f64 = 4.0 * Self::XI;
    pub const T_MAX: f64 = 30.0;

    /// Terms of the fitted density itself (no coupling).
    pub fn fitted_terms() -> Vec<LorentzianTerm> {
        let w = Self::CUTOFF;
        Self::ROWS
            .iter()
            .map(|&(p, o, g)| LorentzianTerm { p: p * w.powi(4), omega: o * w, gamma: g * w })
            .collect()
    }

    /// Terms with λ² absorbed into pᵢ, as used for certificates.
    pub fn absorbed_terms() -> Vec<LorentzianTerm> {
        Self::fitted_terms()
            .into_iter()
            .map(|l| LorentzianTerm { p: l.p * Self::LAMBDA_SQ, ..l })
            .collect()
    }

    pub fn bath(beta: f64) -> Result<LorentzianBath> {
        LorentzianBath::new(Self::absorbed_terms(), beta)
    }

    /// Target ohmic density with the same cutoff: (π/2) ω e^{−ω/Ω}.
    pub fn target_density() -> SpectralDensity {
        SpectralDensity::ohmic(0.5, Self::CUTOFF)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Moment {
    /// ν e^{−νt}/D, the summand of Δξ.
    Xi,
    /// e^{−νt}/D, the summand of its antiderivative.
    Anti,
}

/// Certified bound on Σ_{k>K} e^{−ν_k t}/D_k (requires ν_K ≥ 2√R).
fn anti_tail_bound(beta: f64, center: f64, width: f64, last: usize, t: f64) -> Option<f64> {
    if last == 0 {
        return None;
    }
    let nu = matsubara_frequency(beta, last);
    if nu < 2.0 * center.hypot(width) {
        return None;
    }
    let k = last as f64;
    Some(16.0 / 9.0 * (beta / (2.0 * PI)).powi(4) * (-nu * t).exp() / (3.0 * k.powi(3)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TailSum {
    value: f64,
    /// Certified bound on what was left out.
    bound: f64,
    last: usize,
}

/// Σᵢ wᵢ Σ_{k=N+1}^{K} (moment summand), K grown until `done(partial, bound)`.
fn tail_sum(
    bath: &LorentzianBath,
    n: usize,
    t: f64,
    moment: Moment,
    abs_weights: bool,
    mut done: impl FnMut(f64, f64) -> bool,
) -> Result<TailSum> {
    let beta = bath.beta;
    let min_last = ((bath.max_radius() * beta / PI).ceil() as usize).max(n + 1);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut k = n;
    let mut chunk = 64usize;
    loop {
        let end = (k + chunk).min(MAX_MATSUBARA_INDEX);
        for j in k + 1..=end {
            let nu = matsubara_frequency(beta, j);
            let e = (-nu * t).exp();
            if e == 0.0 {
                continue;
            }
            let f = if moment == Moment::Xi { nu * e } else { e };
            for l in &bath.terms {
                let w = if abs_weights { l.p.abs() } else { l.p };
                let x = w * f / lorentzian_denominator(l.omega, l.gamma, nu);
                // Neumaier summation
                let s = sum + x;
                comp += if sum.abs() >= x.abs() { (sum - s) + x } else { (x - s) + sum };
                sum = s;
            }
        }
        k = end;
        let partial = sum + comp;
        let bound = if k >= min_last {
            bath.terms
                .iter()
                .map(|l| {
                    let b = match moment {
                        Moment::Xi => matsubara_tail_bound(beta, l.omega, l.gamma, k, t),
                        Moment::Anti => anti_tail_bound(beta, l.omega, l.gamma, k, t),
                    };
                    l.p.abs() * b.unwrap_or(f64::INFINITY)
                })
                .sum()
        } else {
            f64::INFINITY
        };
        if bound.is_finite() && done(partial, bound) {
            return Ok(TailSum { value: partial, bound, last: k });
        }
        if k >= MAX_MATSUBARA_INDEX {
            return Err(Error::TailNotCertifiable(format!(
                "Matsubara remainder at t = {t} not below target after {k} terms"
            )));
        }
        chunk = (chunk + chunk / 2).min(1 << 20);
    }
}

/// Δξ_N(t) summed to a certified relative accuracy `rel` (or absolute
/// `floor`), returned with its error bound.
pub fn delta_xi_truncation_to(bath: &LorentzianBath, n: usize, t: f64, rel: f64, floor: f64) -> Result<XiValue> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite and ≥ 0, got {t}")));
    }
    let pre = PI / bath.beta;
    let s = tail_sum(bath, n, t, Moment::Xi, false, |p, b| b <= (rel * p.abs()).max(floor / pre))?;
    Ok(XiValue { value: Complex64::new(-pre * s.value, 0.0), error: pre * s.bound })
}

/// Δξ_N(t) to about 1e-12 relative accuracy.
pub fn delta_xi_truncation(bath: &LorentzianBath, n: usize, t: f64) -> Result<XiValue> {
    delta_xi_truncation_to(bath, n, t, 1e-12, 0.0)
}

/// Δξ_N(t) with the Matsubara sum cut at index `last`, plus the certified
/// bound on the omitted remainder (`+inf` when not certifiable).
pub fn delta_xi_truncation_partial(bath: &LorentzianBath, n: usize, last: usize, t: f64) -> (f64, f64) {
    let pre = PI / bath.beta;
    let mut value = 0.0;
    for k in (n + 1..=last).rev() {
        let nu = matsubara_frequency(bath.beta, k);
        for l in &bath.terms {
            value += l.p * nu * (-nu * t).exp() / lorentzian_denominator(l.omega, l.gamma, nu);
        }
    }
    let bound: f64 = bath
        .terms
        .iter()
        .map(|l| l.p.abs() * matsubara_tail_bound(bath.beta, l.omega, l.gamma, last, t).unwrap_or(f64::INFINITY))
        .sum();
    (-pre * value, pre * bound)
}

/// Largest R/ν_{N+1}² (R = Ω² + Γ²) for which Matsubara tails are summed as
/// a power series in 1/ν² instead of full sum minus head.
const SERIES_RATIO: f64 = 1.0 / 16.0;

/// Σᵢ wᵢ Σ_{k>N} 1/D_ik with its error bound, from
/// 1/D = ν⁻⁴ Σ_m a_m ν^{−2m}, where Σ_m a_m u^m = 1/(1 + 2(Ω²−Γ²)u + R²u²),
/// and Σ_{k>N} ν_k^{−s} = (β/2π)^s ζ(s, N+1). Weights are combined per power
/// so mixed signs cancel before the zeta factors multiply. `None` unless
/// ν_{N+1}² ≥ R/SERIES_RATIO for every term.
fn tail_series(terms: &[(f64, f64, f64)], beta: f64, n: usize) -> Option<(f64, f64)> {
    let nu1 = matsubara_frequency(beta, n + 1);
    let r_max = terms.iter().map(|&(_, c, w)| c * c + w * w).fold(0.0, f64::max);
    if r_max > SERIES_RATIO * nu1 * nu1 {
        return None;
    }
    let q = Complex64::new((n + 1) as f64, 0.0);
    let scale = beta / (2.0 * PI);
    let mut a: Vec<(f64, f64)> = terms.iter().map(|_| (1.0, 0.0)).collect();
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut first = 0.0;
    for m in 0..45usize {
        let s = 2 * m as u32 + 4;
        // ζ(s, q) = ψ⁽ˢ⁻¹⁾(q)/(s−1)! for even s
        let fact: f64 = (1..s).map(f64::from).product();
        let zeta = crate::special::polygamma(s - 1, q).ok()?.re / fact;
        let z = scale.powi(s as i32) * zeta;
        let (mut coeff, mut envelope) = (0.0, 0.0);
        for (i, &(w, c, g)) in terms.iter().enumerate() {
            let (cur, prev) = a[i];
            coeff += w * cur;
            let r = c * c + g * g;
            envelope += w.abs() * (m + 1) as f64 * r.powi(m as i32);
            let next = if m == 0 { -2.0 * (c * c - g * g) } else { -2.0 * (c * c - g * g) * cur - r * r * prev };
            a[i] = (next, cur);
        }
        let x = coeff * z;
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
        if m == 0 {
            first = envelope * z;
        }
        // Envelope terms shrink at least by 2·SERIES_RATIO per step.
        let rest = envelope * z * 2.0 * SERIES_RATIO / (1.0 - 2.0 * SERIES_RATIO);
        if rest <= 1e-17 * first {
            return Some((sum + comp, rest + 1e-15 * first));
        }
    }
    None
}

/// Σ_{k>N} 2/D_k for one Lorentzian. Far tails use the 1/ν² series; closer
/// in, the exact full sum minus the first N terms, with sinh/cosh entering
/// only through overflow-free ratios.
pub fn exact_matsubara_bracket(center: f64, width: f64, beta: f64, n: usize) -> f64 {
    if let Some((v, _)) = tail_series(&[(2.0, center, width)], beta, n) {
        return v;
    }
    let r = center * center + width * width;
    let (x, y) = (beta * center, beta * width);
    let s = if x < 20.0 {
        // cosh x − cos y = 2 sinh²(x/2) + 2 sin²(y/2)
        let den = 2.0 * ((0.5 * x).sinh().powi(2) + (0.5 * y).sin().powi(2));
        (x * y.sin() + y * x.sinh()) / (4.0 * center * width * r * den)
    } else {
        let e = (-x).exp();
        let sech = 2.0 * e / (1.0 + e * e);
        let tanh = (1.0 - e * e) / (1.0 + e * e);
        (x * y.sin() * sech + y * tanh) / (4.0 * center * width * r * (1.0 - y.cos() * sech))
    };
    let head: f64 = (1..=n).rev().map(|k| 2.0 / lorentzian_denominator(center, width, matsubara_frequency(beta, k))).sum();
    -1.0 / (r * r) + s - head
}

/// Analytic γ_N = (π/2β) Σᵢ |pᵢ| Σ_{k>N} 2/D_ik, i.e. ∫|Δξ_N| after the
/// triangle inequality over terms.
pub fn gamma_analytic(bath: &LorentzianBath, n: usize) -> f64 {
    let pre = PI / (2.0 * bath.beta);
    pre * bath
        .terms
        .iter()
        .map(|l| l.p.abs() * exact_matsubara_bracket(l.omega, l.gamma, bath.beta, n).max(0.0))
        .sum::<f64>()
}

/// F_N(t) = (π/β) Σᵢ pᵢ Σ_{k>N} e^{−ν_k t}/D_ik, so F' = Δξ_N and F(∞) = 0.
fn antiderivative(bath: &LorentzianBath, n: usize, t: f64, rel: f64) -> Result<(f64, f64)> {
    let pre = PI / bath.beta;
    if t == 0.0 {
        if let Some((v, e)) = tail_series(&bath.weighted(), bath.beta, n) {
            return Ok((pre * v, pre * e));
        }
        let v: f64 = bath.terms.iter().map(|l| l.p * exact_matsubara_bracket(l.omega, l.gamma, bath.beta, n)).sum();
        let mag: f64 = bath.terms.iter().map(|l| l.p.abs() / (l.omega.powi(2) + l.gamma.powi(2)).powi(2)).sum();
        return Ok((0.5 * pre * v, 1e-14 * pre * mag));
    }
    let s = tail_sum(bath, n, t, Moment::Anti, false, |p, b| b <= rel * p.abs() + 1e-300)?;
    Ok((pre * s.value, pre * s.bound))
}

/// Numeric ∫₀^∞ |Δξ_N(t)| dt with its error budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaNumeric {
    /// Upper estimate: head + errors + tail.
    pub gamma: f64,
    pub head: f64,
    pub error: f64,
    pub tail: f64,
    pub horizon: f64,
    pub zeros: Vec<f64>,
}

const SIGN_GRID: usize = 800;

/// Numeric γ_N from the exact antiderivative: on each panel between
/// consecutive sign changes of Δξ_N, ∫|Δξ_N| = |F(b) − F(a)|. The part
/// beyond the horizon T is bounded by e^{−ν_{N+1}T} times the analytic γ_N.
pub fn gamma_numeric(bath: &LorentzianBath, n: usize, rel_tol: f64) -> Result<GammaNumeric> {
    let nu1 = matsubara_frequency(bath.beta, n + 1);
    if single_signed_beyond(bath, n) {
        // No sign changes at any t: ∫|Δξ_N| = |F(0)|.
        let (v, e) = antiderivative(bath, n, 0.0, rel_tol)?;
        return Ok(GammaNumeric { gamma: v.abs() + e, head: v.abs(), error: e, tail: 0.0, horizon: f64::INFINITY, zeros: Vec::new() });
    }
    let horizon = 40.0 / nu1;
    let zeros = sign_changes(bath, n, horizon)?;
    let mut breaks = vec![0.0];
    breaks.extend(&zeros);
    breaks.push(horizon);
    let rel = rel_tol.clamp(1e-15, 1e-6);
    let mut values = Vec::with_capacity(breaks.len());
    let mut error = 0.0;
    for &b in &breaks {
        let (v, e) = antiderivative(bath, n, b, rel)?;
        values.push(v);
        error += 2.0 * e;
    }
    let head: f64 = values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let tail = (-nu1 * horizon).exp() * gamma_analytic(bath, n);
    Ok(GammaNumeric { gamma: head + error + tail, head, error, tail, horizon, zeros })
}

/// True when every Matsubara coefficient Σᵢ pᵢ/D_ik, k > N, provably has
/// the sign of Σᵢ pᵢ. With u = 1/ν² ≤ 1/ν_{N+1}², ν⁴/D_ik = 1/(1 + δ) where
/// |δ| ≤ δᵢ = 2|Ω²−Γ²|u + R²u².
fn single_signed_beyond(bath: &LorentzianBath, n: usize) -> bool {
    let nu1 = matsubara_frequency(bath.beta, n + 1);
    let u = 1.0 / (nu1 * nu1);
    let mut spread = 0.0;
    for l in &bath.terms {
        let (c2, g2) = (l.omega * l.omega, l.gamma * l.gamma);
        let d = 2.0 * (c2 - g2).abs() * u + (c2 + g2).powi(2) * u * u;
        if d >= 0.5 {
            return false;
        }
        spread += l.p.abs() * d / (1.0 - d);
    }
    let total: f64 = bath.terms.iter().map(|l| l.p).sum();
    total.abs() > spread * (1.0 + 1e-12)
}

/// Sign changes of Δξ_N on (0, T], located on a geometric grid and refined
/// by bisection. Only the sign matters here, so sums stop once it is certain.
fn sign_changes(bath: &LorentzianBath, n: usize, horizon: f64) -> Result<Vec<f64>> {
    let sign = |t: f64| -> Result<f64> {
        let s = tail_sum(bath, n, t, Moment::Xi, false, |p, b| b < 0.5 * p.abs() || b < 1e-300)?;
        Ok(s.value.signum())
    };
    let nu1 = matsubara_frequency(bath.beta, n + 1);
    let t0 = 1e-3 / nu1;
    let ratio = (horizon / t0).powf(1.0 / (SIGN_GRID - 1) as f64);
    let grid: Vec<f64> = (0..SIGN_GRID).map(|i| t0 * ratio.powi(i as i32)).collect();
    let mut zeros = Vec::new();
    let mut prev = (grid[0], sign(grid[0])?);
    for &t in &grid[1..] {
        let s = sign(t)?;
        if s != prev.1 && s != 0.0 && prev.1 != 0.0 {
            let (mut lo, mut hi) = (prev.0, t);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sign(mid)? == prev.1 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        prev = (t, s);
    }
    Ok(zeros)
}

/// Δξ_N as a bound source: real, exponentially decaying, sup at t = 0.
#[derive(Debug, Clone)]
pub struct TruncationTail {
    bath: LorentzianBath,
    n: usize,
    sup: f64,
    gamma_analytic: f64,
}

impl TruncationTail {
    pub fn new(bath: LorentzianBath, n: usize) -> Result<Self> {
        let pre = PI / bath.beta;
        let s = tail_sum(&bath, n, 0.0, Moment::Xi, true, |p, b| b <= 1e-6 * p.abs())?;
        let sup = pre * (s.value + s.bound);
        let gamma_analytic = gamma_analytic(&bath, n);
        Ok(TruncationTail { bath, n, sup, gamma_analytic })
    }

    pub fn bath(&self) -> &LorentzianBath {
        &self.bath
    }

    pub fn order(&self) -> usize {
        self.n
    }
}

impl DeltaXi for TruncationTail {
    fn eval(&self, t: f64) -> Result<XiValue> {
        delta_xi_truncation_to(&self.bath, self.n, t.abs(), 1e-10, 1e-13 * self.sup)
    }
    fn is_zero(&self) -> bool {
        self.bath.terms.iter().all(|l| l.p == 0.0)
    }
    fn is_real(&self) -> bool {
        true
    }
    fn tail_bounds(&self, horizon: f64) -> Option<(f64, f64)> {
        let nu1 = matsubara_frequency(self.bath.beta, self.n + 1);
        Some(((-nu1 * horizon).exp() * self.gamma_analytic, 0.0))
    }
    fn certified_sup(&self) -> Option<f64> {
        Some(self.sup)
    }
    fn decay_time(&self) -> f64 {
        1.0 / matsubara_frequency(self.bath.beta, self.n + 1)
    }
    fn resolution(&self) -> f64 {
        0.05 / matsubara_frequency(self.bath.beta, self.n + 1)
    }
    fn describe(&self) -> String {
        format!("Matsubara truncation remainder (N = {}, beta = {})", self.n, self.bath.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMethod {
    Analytic,
    Numeric,
}

impl std::str::FromStr for GammaMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(GammaMethod::Analytic),
            "numeric" => Ok(GammaMethod::Numeric),
            other => Err(Error::Config(format!("unknown gamma method '{other}' (expected analytic|numeric)"))),
        }
    }
}

/// Truncation certificate at order N and target time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationCert {
    pub bath: LorentzianBath,
    pub n: usize,
    pub t_target: f64,
    pub gamma_analytic: f64,
    pub gamma_numeric: f64,
    pub numeric: GammaNumeric,
    pub rel_bound_analytic: f64,
    pub rel_bound_numeric: f64,
}

pub fn certify(bath: &LorentzianBath, n: usize, t_target: f64, rel_tol: f64) -> Result<TruncationCert> {
    if !(t_target > 0.0) || !t_target.is_finite() {
        return Err(Error::Config(format!("t_target must be finite and > 0, got {t_target}")));
    }
    let ga = gamma_analytic(bath, n);
    let numeric = gamma_numeric(bath, n, rel_tol)?;
    Ok(TruncationCert {
        bath: bath.clone(),
        n,
        t_target,
        gamma_analytic: ga,
        gamma_numeric: numeric.gamma,
        rel_bound_analytic: (ga * t_target).exp_m1(),
        rel_bound_numeric: (numeric.gamma * t_target).exp_m1(),
        numeric,
    })
}

/// Smallest N with e^{γ_N t} − 1 ≤ target, by linear scan from N = 0.
pub fn min_n_for_error(bath: &LorentzianBath, t_target: f64, target: f64, method: GammaMethod, rel_tol: f64) -> Result<usize> {
    if !(target > 0.0) {
        return Err(Error::Config(format!("error target must be > 0, got {target}")));
    }
    for n in 0..=MAX_SEARCH_N {
        let gamma = match method {
            GammaMethod::Analytic => gamma_analytic(bath, n),
            GammaMethod::Numeric => gamma_numeric(bath, n, rel_tol)?.gamma,
        };
        if (gamma * t_target).exp_m1() <= target {
            return Ok(n);
        }
    }
    Err(Error::SearchBudgetExceeded(MAX_SEARCH_N))
}

/// One row of the Meier–Tannor truncation table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub beta: f64,
    pub n: usize,
    pub analytic_percent: f64,
    pub numeric_percent: f64,
    pub n_analytic: usize,
    pub n_numeric: usize,
}

/// (εβ, N) pairs at which the benchmark simulations were declared converged.
pub const TABLE_POINTS: [(f64, usize); 3] = [(0.4, 2), (1.4, 7), (10.0, 48)];
pub const TABLE_TARGET: f64 = 0.2;

pub fn table_row(beta: f64, n: usize, rel_tol: f64) -> Result<TableRow> {
    let bath = MeierTannorModel::bath(beta)?;
    let cert = certify(&bath, n, MeierTannorModel::T_MAX, rel_tol)?;
    Ok(TableRow {
        beta,
        n,
        analytic_percent: 100.0 * cert.rel_bound_analytic,
        numeric_percent: 100.0 * cert.rel_bound_numeric,
        n_analytic: min_n_for_error(&bath, MeierTannorModel::T_MAX, TABLE_TARGET, GammaMethod::Analytic, rel_tol)?,
        n_numeric: min_n_for_error(&bath, MeierTannorModel::T_MAX, TABLE_TARGET, GammaMethod::Numeric, rel_tol)?,
    })
}

pub fn reproduce_table(rel_tol: f64) -> Result<Vec<TableRow>> {
    TABLE_POINTS.iter().map(|&(b, n)| table_row(b, n, rel_tol)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(p: f64, beta: f64) -> LorentzianBath {
        LorentzianBath::new(vec![LorentzianTerm { p, omega: 1.3, gamma: 0.6 }], beta).unwrap()
    }

    #[test]
    fn bracket_matches_brute_force() {
        for &(c, w, b) in &[(1.3, 0.6, 0.7), (0.89, 8.47, 1.4), (0.18, 3.04, 10.0), (0.33, 20.4, 10.0), (30.0, 2.0, 3.0)] {
            for n in [0, 2, 9] {
                let k_max = 2_000_000;
                let direct: f64 = (n + 1..=k_max).rev().map(|k| 2.0 / lorentzian_denominator(c, w, matsubara_frequency(b, k))).sum();
                let tail = 2.0 * anti_tail_bound(b, c, w, k_max, 0.0).unwrap();
                let exact = exact_matsubara_bracket(c, w, b, n);
                assert!(exact >= direct - 1e-9 * direct && exact <= direct + tail + 1e-9 * direct, "{c} {w} {b} {n}: {exact} vs {direct}");
            }
        }
    }

    #[test]
    fn series_and_closed_form_agree_where_both_apply() {
        for &(c, w, b) in &[(1.3f64, 0.6f64, 0.7f64), (3.0, 1.1, 1.4), (0.5, 2.0, 10.0)] {
            let r = c * c + w * w;
            let n0 = (4.0 * r.sqrt() * b / (2.0 * PI)).ceil() as usize;
            for n in n0..n0 + 4 {
                let (series, err) = tail_series(&[(2.0, c, w)], b, n).unwrap();
                let x = (b * c, b * w);
                let s = (x.0 * x.1.sin() + x.1 * x.0.sinh()) / (4.0 * c * w * r * (x.0.cosh() - x.1.cos()));
                let head: f64 = (1..=n).map(|k| 2.0 / lorentzian_denominator(c, w, matsubara_frequency(b, k))).sum();
                let closed = -1.0 / (r * r) + s - head;
                assert!((series - closed).abs() <= 1e-9 * series + err, "{c} {w} {b} {n}: {series} vs {closed}");
            }
        }
    }

    #[test]
    fn far_tail_keeps_full_relative_accuracy() {
        let (c, w, b) = (1.3, 0.6, 1.4);
        for n in [1_000, 20_000] {
            let k_max = 400 * n;
            let direct: f64 = (n + 1..=k_max).rev().map(|k| 2.0 / lorentzian_denominator(c, w, matsubara_frequency(b, k))).sum();
            let tail = 2.0 * anti_tail_bound(b, c, w, k_max, 0.0).unwrap();
            let v = exact_matsubara_bracket(c, w, b, n);
            assert!((v - direct - 0.5 * tail).abs() <= 0.5 * tail + 1e-12 * v, "N={n}: {v} vs {direct}");
        }
    }

    #[test]
    fn single_signed_fast_path_matches_grid_route() {
        let bath = MeierTannorModel::bath(0.4).unwrap();
        let mut checked = 0;
        for n in 0..6 {
            if !single_signed_beyond(&bath, n) {
                continue;
            }
            checked += 1;
            let fast = gamma_numeric(&bath, n, 1e-12).unwrap();
            assert!(fast.zeros.is_empty() && fast.horizon.is_infinite());
            let nu1 = matsubara_frequency(bath.beta, n + 1);
            let grid = sign_changes(&bath, n, 40.0 / nu1).unwrap();
            assert!(grid.is_empty());
            let (f0, _) = antiderivative(&bath, n, 0.0, 1e-12).unwrap();
            let (fh, _) = antiderivative(&bath, n, 40.0 / nu1, 1e-12).unwrap();
            assert!(((f0 - fh).abs() - fast.head).abs() <= 1e-10 * fast.head);
        }
        assert!(checked > 0);
        assert!(single_signed_beyond(&MeierTannorModel::bath(10.0).unwrap(), 5_000));
    }

    #[test]
    fn partial_sum_matches_brute_force_at_origin() {
        let bath = single(1.0, 1.4);
        let (v, bound) = delta_xi_truncation_partial(&bath, 2, 10_000, 0.0);
        let mut direct = 0.0;
        for k in 3..=10_000 {
            let nu = matsubara_frequency(1.4, k);
            direct += nu / lorentzian_denominator(1.3, 0.6, nu);
        }
        direct *= -PI / 1.4;
        assert!((v - direct).abs() <= 1e-12 * direct.abs());
        let full = delta_xi_truncation(&bath, 2, 0.0).unwrap();
        assert!((full.value.re - v).abs() <= bound + full.error);
    }

    #[test]
    fn single_positive_lorentzian_is_negative_and_decreasing_in_magnitude() {
        let bath = single(2.0, 1.0);
        let mut last = f64::INFINITY;
        for i in 0..40 {
            let x = delta_xi_truncation(&bath, 3, 0.05 * i as f64).unwrap().value.re;
            assert!(x < 0.0);
            assert!(x.abs() < last);
            last = x.abs();
        }
    }

    #[test]
    fn numeric_equals_analytic_without_sign_changes() {
        let bath = single(2.0, 1.0);
        for n in [0, 1, 5] {
            let g = gamma_numeric(&bath, n, 1e-13).unwrap();
            let a = gamma_analytic(&bath, n);
            assert!(g.zeros.is_empty());
            assert!((g.gamma - a).abs() <= 1e-6 * a, "n={n}: {} vs {a}", g.gamma);
        }
    }

    #[test]
    fn table_i_fit_approximates_target() {
        let fit = SpectralDensity::LorentzianSum { terms: MeierTannorModel::fitted_terms() };
        let target = MeierTannorModel::target_density();
        let w = MeierTannorModel::CUTOFF;
        let mut worst: f64 = 0.0;
        for i in 0..=1000 {
            let x = 10.0 * w * i as f64 / 1000.0;
            worst = worst.max((fit.eval(x).unwrap() - target.eval(x).unwrap()).abs());
        }
        let peak = target.eval(w).unwrap();
        assert!(worst < 0.02 * peak, "worst residual {worst}");
    }

    #[test]
    fn analytic_table_values() {
        for (&(b, n), pct) in TABLE_POINTS.iter().zip([27.94, 62.39, 111.69]) {
            let bath = MeierTannorModel::bath(b).unwrap();
            let v = 100.0 * (gamma_analytic(&bath, n) * MeierTannorModel::T_MAX).exp_m1();
            assert!((v - pct).abs() <= 0.05, "beta={b}: {v}");
        }
    }

    #[test]
    fn truncation_tail_is_real_with_sup_at_origin() {
        let t = TruncationTail::new(single(1.0, 2.0), 1).unwrap();
        let x0 = t.eval(0.0).unwrap().value.re.abs();
        assert!(t.certified_sup().unwrap() >= x0);
        assert!(t.certified_sup().unwrap() <= x0 * (1.0 + 1e-5));
        assert_eq!(t.eval(0.3).unwrap().value.im, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(LorentzianBath::new(vec![], 0.0).is_err());
        assert!(min_n_for_error(&single(1.0, 1.0), 1.0, 0.0, GammaMethod::Analytic, 1e-12).is_err());
        assert!(delta_xi_truncation(&single(1.0, 1.0), 0, -1.0).is_err());
    }
}
