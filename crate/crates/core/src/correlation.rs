//! Bath correlation functions
//!
//! ξ_J(t) = ∫₀^∞ (dω/π) J(ω) (coth(βω/2) cos ωt + i sin ωt)
//!
//! evaluated in closed form where one exists and by oscillatory quadrature
//! otherwise. All closed forms use the same J conventions as
//! [`crate::density`], in particular the π/2 prefactor of the Lorentzian shape.

use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{Component, SpectralDensity};
use crate::error::{Error, Result};
use crate::quad::{fourier_half_line, QuadConfig, Tolerance, Trig};
use crate::special::{coth_complex, polygamma, thermal_factor};

/// Bath description: density, inverse temperature (`f64::INFINITY` for T = 0)
/// and the system-side coupling prefactor λ².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub density: SpectralDensity,
    pub beta: f64,
    pub lambda_sq: f64,
}

impl BathSpec {
    pub fn new(density: SpectralDensity, beta: f64, lambda_sq: f64) -> Result<Self> {
        let spec = BathSpec { density, beta, lambda_sq };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.density.validate()?;
        validate_beta(self.beta)?;
        if !(self.lambda_sq >= 0.0) || !self.lambda_sq.is_finite() {
            return Err(Error::Config(format!("lambda_sq must be finite and ≥ 0, got {}", self.lambda_sq)));
        }
        Ok(())
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_infinite()
    }
}

pub(crate) fn validate_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && !beta.is_nan() {
        Ok(())
    } else {
        Err(Error::Config(format!("beta must be > 0 (or +inf), got {beta}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubohmicLimit {
    ZeroTemperature,
    InfiniteTemperature,
}

/// How a correlation-function value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CorrelationMethod {
    ClosedFormOhmic,
    ClosedFormSuperohmic { exponent: u32 },
    SubohmicLimit { limit: SubohmicLimit },
    /// `matsubara_terms: None` means the term count is chosen per time point
    /// from the certified tail bound.
    ClosedFormLorentzian { matsubara_terms: Option<usize> },
    DeltaModeAnalytic,
    Quadrature { abs_tol: f64, rel_tol: f64 },
}

/// Requested evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    #[default]
    Auto,
    Closed,
    Quadrature,
}

impl FromStr for MethodChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(MethodChoice::Auto),
            "closed" => Ok(MethodChoice::Closed),
            "quadrature" => Ok(MethodChoice::Quadrature),
            other => Err(Error::Config(format!("unknown method '{other}' (expected closed|quadrature|auto)"))),
        }
    }
}

/// Correlation value with an absolute error bound on |ξ − value|.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct XiValue {
    pub value: Complex64,
    pub error: f64,
}

impl XiValue {
    fn scaled(self, a: f64) -> Self {
        XiValue { value: self.value * a, error: self.error * a.abs() }
    }
}

impl std::ops::AddAssign for XiValue {
    fn add_assign(&mut self, o: XiValue) {
        self.value += o.value;
        self.error += o.error;
    }
}

// Relative accuracy assigned to closed forms built on `polygamma`.
const CLOSED_FORM_REL: f64 = 1e-13;

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite, got {t}")))
    }
}

/// ξ(t) for J(ω) = π ωⁿ e^{−ω/Ω} (n = 1 is the ohmic case), returned with
/// the magnitude of its largest constituent for error accounting.
fn power_law_closed(n: u32, cutoff: f64, beta: f64, t: f64) -> Result<(Complex64, f64)> {
    check_time(t)?;
    if !(cutoff > 0.0) {
        return Err(Error::Domain(format!("cutoff must be > 0, got {cutoff}")));
    }
    validate_beta(beta).map_err(|e| Error::Domain(e.to_string()))?;
    let n_fact = factorial(n);
    if beta.is_infinite() {
        // ∫ ωⁿ e^{−ω/Ω} e^{iωt} dω = n! Ωⁿ⁺¹ / (1 − iΩt)ⁿ⁺¹
        let v = n_fact * cutoff.powi(n as i32 + 1) * Complex64::new(1.0, -cutoff * t).powu(n + 1).inv();
        return Ok((v, v.norm()));
    }
    let z = Complex64::new(1.0, cutoff * t) / (beta * cutoff);
    let thermal = 2.0 * polygamma(n, z)?.re / (-beta).powi(n as i32 + 1);
    let vacuum = -n_fact * (Complex64::new(0.0, -cutoff) / Complex64::new(cutoff * t, -1.0)).powu(n + 1);
    Ok((thermal + vacuum, thermal.abs().max(vacuum.norm())))
}

/// ξ(t) for the ohmic density J(ω) = π ω e^{−ω/Ω}.
///
/// `beta = f64::INFINITY` gives the zero-temperature limit Ω²/(1 − iΩt)².
pub fn xi_ohmic_closed(cutoff: f64, beta: f64, t: f64) -> Result<Complex64> {
    power_law_closed(1, cutoff, beta, t).map(|(v, _)| v)
}

/// ξ(t) for J(ω) = π ωⁿ e^{−ω/Ω}, obtained by differentiating the ohmic
/// result n − 1 times with respect to −1/Ω.
pub fn xi_superohmic_closed(n: u32, cutoff: f64, beta: f64, t: f64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain("superohmic exponent must be ≥ 1".into()));
    }
    power_law_closed(n, cutoff, beta, t).map(|(v, _)| v)
}

/// Zero- and infinite-temperature limits of ξ(t) for J(ω) = π √ω e^{−ω/Ω}.
///
/// The infinite-temperature form keeps the leading 1/β term of the real part
/// and the temperature-independent imaginary part; `beta` is required there.
pub fn xi_subohmic_limit(cutoff: f64, t: f64, limit: SubohmicLimit, beta: Option<f64>) -> Result<Complex64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("subohmic limits need finite t ≥ 0, got {t}")));
    }
    if !(cutoff > 0.0) {
        return Err(Error::Domain(format!("cutoff must be > 0, got {cutoff}")));
    }
    let x2 = (cutoff * t).powi(2);
    let phase = 1.5 * (cutoff * t).atan();
    // (√π/2) Ω^{3/2} (1 − iΩt)^{−3/2}
    let amp = 0.5 * (PI * cutoff.powi(3)).sqrt() / (1.0 + x2).powf(0.75);
    match limit {
        SubohmicLimit::ZeroTemperature => Ok(Complex64::from_polar(amp, phase)),
        SubohmicLimit::InfiniteTemperature => {
            let beta = beta.ok_or_else(|| Error::Domain("infinite-temperature limit requires beta".into()))?;
            if !(beta > 0.0) || !beta.is_finite() {
                return Err(Error::Domain(format!("beta must be finite and > 0, got {beta}")));
            }
            let re = (2.0 * PI * cutoff * (1.0 + (1.0 + x2).sqrt()) / (1.0 + x2)).sqrt() / beta;
            Ok(Complex64::new(re, amp * phase.sin()))
        }
    }
}

/// ν_k = 2πk/β.
pub fn matsubara_frequency(beta: f64, k: usize) -> f64 {
    2.0 * PI * k as f64 / beta
}

/// (Ω² + Γ² − ν²)² + 4Ω²ν²
pub fn lorentzian_denominator(center: f64, width: f64, nu: f64) -> f64 {
    let r = center * center + width * width;
    (r - nu * nu).powi(2) + 4.0 * center * center * nu * nu
}

/// Certified bound on Σ_{k>K} ν_k e^{−ν_k t} / D_k for one Lorentzian.
///
/// Requires ν_K ≥ 2√(Ω²+Γ²); then D_k ≥ (9/16)ν_k⁴ for all k > K and the sum
/// is majorized by (16/9)(β/2π)³ e^{−ν_K t} ∫_K^∞ x⁻³ dx.
pub fn matsubara_tail_bound(beta: f64, center: f64, width: f64, last: usize, t: f64) -> Option<f64> {
    if last == 0 || !beta.is_finite() {
        return None;
    }
    let nu_last = matsubara_frequency(beta, last);
    let radius = (center * center + width * width).sqrt();
    if nu_last < 2.0 * radius {
        return None;
    }
    let k = last as f64;
    let scale = beta / (2.0 * PI);
    Some(16.0 / 9.0 * scale.powi(3) * (-nu_last * t.max(0.0)).exp() / (2.0 * k * k))
}

/// Truncated Matsubara series with its certified remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatsubaraSum {
    pub beta: f64,
    pub terms: usize,
    /// Upper bound on the omitted tail; `+inf` when no certificate applies.
    pub tail_bound: f64,
}

impl MatsubaraSum {
    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.terms).map(move |k| matsubara_frequency(self.beta, k))
    }
}

const MAX_MATSUBARA_TERMS: usize = 4_000_000;

/// Σ_{k=1}^{K} ν_k e^{−ν_k t}/D_k, summed smallest terms first.
fn matsubara_series(beta: f64, center: f64, width: f64, terms: usize, t: f64) -> f64 {
    (1..=terms)
        .rev()
        .map(|k| {
            let nu = matsubara_frequency(beta, k);
            nu * (-nu * t).exp() / lorentzian_denominator(center, width, nu)
        })
        .sum()
}

/// ξ(t) for J = J_L(ω; Ω, Γ) (π/2 prefactor included) at finite β with the
/// Matsubara series cut after `terms` terms.
///
/// Returns the value and the Matsubara bookkeeping; the tail bound applies to
/// the returned value, i.e. |ξ_exact − value| ≤ tail_bound.
pub fn xi_lorentzian_closed(center: f64, width: f64, beta: f64, t: f64, terms: usize) -> Result<(Complex64, MatsubaraSum)> {
    check_time(t)?;
    if !(center > 0.0 && width > 0.0) {
        return Err(Error::Domain(format!("Lorentzian needs Ω, Γ > 0, got Ω={center}, Γ={width}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("Lorentzian closed form needs finite β > 0, got {beta}")));
    }
    let c = coth_complex(Complex64::new(0.5 * beta * center, 0.5 * beta * width));
    let phase = Complex64::from_polar(1.0, center * t);
    let envelope = (-width * t).exp() / (4.0 * center * width);
    // (e^{−Γt}/8ΩΓ)[c e^{iΩt} + c̄ e^{−iΩt} + 2i sin Ωt]
    let main = envelope * Complex64::new((c * phase).re, (center * t).sin());
    let prefactor = 2.0 / beta;
    let series = matsubara_series(beta, center, width, terms, t);
    let value = FRAC_PI_2 * (main - prefactor * series);
    let tail = matsubara_tail_bound(beta, center, width, terms, t)
        .map(|b| FRAC_PI_2 * prefactor * b)
        .unwrap_or(f64::INFINITY);
    Ok((value, MatsubaraSum { beta, terms, tail_bound: tail }))
}

/// Smallest certified Matsubara truncation (grown geometrically) with tail ≤
/// `abs_target` for a unit-weight Lorentzian at time t.
pub fn matsubara_terms_for(center: f64, width: f64, beta: f64, t: f64, abs_target: f64) -> usize {
    let radius = (center * center + width * width).sqrt();
    let mut k = ((2.0 * radius * beta / (2.0 * PI)).ceil() as usize).max(1);
    loop {
        let b = matsubara_tail_bound(beta, center, width, k, t).map(|b| FRAC_PI_2 * 2.0 / beta * b);
        match b {
            Some(b) if b <= abs_target => return k,
            _ if k >= MAX_MATSUBARA_TERMS => return k,
            _ => k = (k + k / 4 + 1).min(MAX_MATSUBARA_TERMS),
        }
    }
}

/// ξ(t) = (κ/π)(coth(βω₀/2) cos ω₀t + i sin ω₀t) for J = κ δ(ω − ω₀).
pub fn xi_delta_mode(kappa: f64, omega0: f64, beta: f64, t: f64) -> Complex64 {
    let c = thermal_factor(beta, omega0);
    Complex64::new(c * (omega0 * t).cos(), (omega0 * t).sin()) * (kappa / PI)
}

fn continuous_value(components: &[Component], omega: f64) -> f64 {
    components.iter().filter_map(|c| c.eval(omega).ok()).sum()
}

/// Quadrature of the defining integral for a delta-free component list.
pub(crate) fn quadrature_components(components: &[Component], beta: f64, t: f64, tol: Tolerance) -> Result<XiValue> {
    check_time(t)?;
    if components.iter().any(|c| matches!(c, Component::Delta { .. })) {
        return Err(Error::DeltaNotEvaluable);
    }
    if components.is_empty() {
        return Ok(XiValue::default());
    }
    let scale = 4.0 * components.iter().map(Component::frequency_scale).fold(0.0, f64::max);
    let cfg = QuadConfig::new(tol);
    let re = fourier_half_line(
        |w| {
            if w <= 0.0 {
                0.0
            } else {
                continuous_value(components, w) * thermal_factor(beta, w) / PI
            }
        },
        t,
        Trig::Cos,
        scale,
        &cfg,
    )?;
    let im = fourier_half_line(|w| if w <= 0.0 { 0.0 } else { continuous_value(components, w) / PI }, t, Trig::Sin, scale, &cfg)?;
    Ok(XiValue { value: Complex64::new(re.value, im.value), error: re.error + im.error })
}

/// ξ_J(t) by direct quadrature of its frequency integral, accurate to `tol`.
///
/// Negative t is accepted and evaluates the same integral, so
/// ξ(−t) = ξ(t)* can be checked directly.
pub fn xi_quadrature(spec: &BathSpec, t: f64, tol: Tolerance) -> Result<XiValue> {
    spec.validate()?;
    quadrature_components(&spec.density.components(), spec.beta, t, tol)
}

/// Which route a single component takes under a given choice.
pub fn component_method(c: &Component, beta: f64, choice: MethodChoice, tol: Tolerance) -> Result<CorrelationMethod> {
    let quad = CorrelationMethod::Quadrature { abs_tol: tol.abs, rel_tol: tol.rel };
    if let Component::Delta { .. } = c {
        return Ok(CorrelationMethod::DeltaModeAnalytic);
    }
    if choice == MethodChoice::Quadrature {
        return Ok(quad);
    }
    let closed = match *c {
        Component::PowerLaw { exponent: 1, .. } => Some(CorrelationMethod::ClosedFormOhmic),
        Component::PowerLaw { exponent, .. } => Some(CorrelationMethod::ClosedFormSuperohmic { exponent }),
        Component::Subohmic { .. } if beta.is_infinite() => {
            Some(CorrelationMethod::SubohmicLimit { limit: SubohmicLimit::ZeroTemperature })
        }
        Component::Lorentzian { .. } if beta.is_finite() => {
            Some(CorrelationMethod::ClosedFormLorentzian { matsubara_terms: None })
        }
        _ => None,
    };
    match (closed, choice) {
        (Some(m), _) => Ok(m),
        (None, MethodChoice::Closed) => Err(Error::MethodUnavailable(format!(
            "no closed form for {c:?} at beta = {beta}"
        ))),
        (None, _) => Ok(quad),
    }
}

/// ξ(t) of one weighted component via the given route.
pub fn component_xi(c: &Component, beta: f64, t: f64, method: CorrelationMethod, tol: Tolerance) -> Result<XiValue> {
    match (method, *c) {
        (CorrelationMethod::DeltaModeAnalytic, Component::Delta { weight, omega0 }) => {
            check_time(t)?;
            let v = xi_delta_mode(weight, omega0, beta, t);
            Ok(XiValue { value: v, error: 4.0 * f64::EPSILON * v.norm() })
        }
        (CorrelationMethod::ClosedFormOhmic | CorrelationMethod::ClosedFormSuperohmic { .. }, Component::PowerLaw { exponent, weight, cutoff }) => {
            let (v, mag) = power_law_closed(exponent, cutoff, beta, t)?;
            Ok(XiValue { value: v, error: CLOSED_FORM_REL * mag }.scaled(weight))
        }
        (CorrelationMethod::SubohmicLimit { limit }, Component::Subohmic { weight, cutoff }) => {
            let b = if beta.is_finite() { Some(beta) } else { None };
            let v = xi_subohmic_limit(cutoff, t.abs(), limit, b)?;
            let v = if t < 0.0 { v.conj() } else { v };
            Ok(XiValue { value: v, error: CLOSED_FORM_REL * v.norm() }.scaled(weight))
        }
        (CorrelationMethod::ClosedFormLorentzian { matsubara_terms }, Component::Lorentzian { weight, center, width }) => {
            let scale = FRAC_PI_2 / (4.0 * center * width);
            let target = tol.abs.max(tol.rel * scale * weight.abs()) / weight.abs();
            let terms = matsubara_terms.unwrap_or_else(|| matsubara_terms_for(center, width, beta, t.abs(), target));
            let (v, m) = xi_lorentzian_closed(center, width, beta, t.abs(), terms)?;
            let v = if t < 0.0 { v.conj() } else { v };
            Ok(XiValue { value: v, error: m.tail_bound + CLOSED_FORM_REL * scale }.scaled(weight))
        }
        (CorrelationMethod::Quadrature { abs_tol, rel_tol }, comp) => {
            quadrature_components(&[comp], beta, t, Tolerance::new(abs_tol, rel_tol))
        }
        (m, comp) => Err(Error::MethodUnavailable(format!("{m:?} cannot evaluate {comp:?}"))),
    }
}

/// Evaluable ξ(t) for a bath, with the method chosen per component.
#[derive(Debug, Clone)]
pub struct CorrelationFn {
    spec: BathSpec,
    components: Vec<Component>,
    methods: Vec<CorrelationMethod>,
    choice: MethodChoice,
    tol: Tolerance,
}

impl CorrelationFn {
    pub fn new(spec: BathSpec, choice: MethodChoice, tol: Tolerance) -> Result<Self> {
        spec.validate()?;
        let components = spec.density.components();
        let methods = components
            .iter()
            .map(|c| component_method(c, spec.beta, choice, tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(CorrelationFn { spec, components, methods, choice, tol })
    }

    pub fn spec(&self) -> &BathSpec {
        &self.spec
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Route taken by each flattened component, in the order of [`Self::components`].
    pub fn methods(&self) -> &[CorrelationMethod] {
        &self.methods
    }

    /// True when every component is evaluated without quadrature.
    pub fn is_closed_form(&self) -> bool {
        !self.methods.iter().any(|m| matches!(m, CorrelationMethod::Quadrature { .. }))
    }

    pub fn eval(&self, t: f64) -> Result<XiValue> {
        let beta = self.spec.beta;
        let mut total = XiValue::default();
        if self.choice == MethodChoice::Quadrature {
            let (deltas, rest): (Vec<Component>, Vec<Component>) =
                self.components.iter().partition(|c| matches!(c, Component::Delta { .. }));
            total += quadrature_components(&rest, beta, t, self.tol)?;
            for d in &deltas {
                total += component_xi(d, beta, t, CorrelationMethod::DeltaModeAnalytic, self.tol)?;
            }
            return Ok(total);
        }
        for (c, m) in self.components.iter().zip(&self.methods) {
            total += component_xi(c, beta, t, *m, self.tol)?;
        }
        Ok(total)
    }
}
