//! Error bounds on |Δ⟨Ô(t)⟩| under a spectral-density variation ΔJ.
//!
//! With Δξ = ξ_J − ξ_{J₀} and prefactor λ² (replaced by 1 when the coupling is
//! absorbed into ΔJ):
//!
//! - general: ‖Ô‖(exp(λ² D(t)) − 1), D(t) = ∫₀^t (t−s)|Δξ(s)| ds
//! - weak:    ‖Ô‖(exp(λ² C t²/2) − 1), C ≥ sup|Δξ|
//! - strong:  ‖Ô‖(exp(λ²(γ+η) t) − 1), γ = ∫|Re Δξ|, η = ∫|Im Δξ|
//!
//! Every quadrature error is added before exponentiation, so reported values
//! stay upper bounds.

use std::cell::Cell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::correlation::{BathSpec, CorrelationFn, MethodChoice, XiValue};
use crate::density::{Component, SpectralDensity};
use crate::error::{Error, Result};
use crate::jet::{x_coth_x, Jet};
use crate::quad::{integrate_from_zero_sqrt, integrate_pieces, integrate_to_infinity, Estimate, QuadConfig, Tolerance};
use crate::special::thermal_factor;

/// Horizon multiplier applied to the slowest decay time.
pub const HORIZON_DECAY_TIMES: f64 = 50.0;
/// Safety factor applied to grid maxima of |Δξ|.
pub const SUP_SAFETY: f64 = 1.05;

const MAX_GRID: usize = 20_000;
const MIN_GRID: usize = 16;

/// A correlation difference Δξ(t) together with what is known about its decay.
pub trait DeltaXi: Send + Sync + fmt::Debug {
    fn eval(&self, t: f64) -> Result<XiValue>;

    fn is_zero(&self) -> bool;

    /// Δξ(t) is real for all t (then η = 0).
    fn is_real(&self) -> bool {
        false
    }

    /// Δξ contains an undamped oscillation and cannot be integrable.
    fn never_decays(&self) -> bool {
        false
    }

    /// Certified (∫_T^∞ |Re Δξ|, ∫_T^∞ |Im Δξ|), when a decay certificate exists.
    fn tail_bounds(&self, horizon: f64) -> Option<(f64, f64)>;

    /// Analytic upper bound on sup_t |Δξ(t)|.
    fn certified_sup(&self) -> Option<f64>;

    /// Slowest decay time; sets the default horizon.
    fn decay_time(&self) -> f64;

    /// Shortest time scale of variation; sets the zero-search grid spacing.
    fn resolution(&self) -> f64;

    fn describe(&self) -> String;
}

/// Constants M with |Re Δξ(t)| ≤ M_re/t² and |Im Δξ(t)| ≤ M_im/t².
#[derive(Debug, Clone, Copy, PartialEq)]
struct PowerTail {
    re: f64,
    im: f64,
}

/// Δξ = ξ_{ΔJ} for a variation given as a spectral density.
#[derive(Debug, Clone)]
pub struct DensityVariation {
    delta_j: SpectralDensity,
    beta: f64,
    corr: CorrelationFn,
    tail: Option<PowerTail>,
    sup: f64,
}

impl DensityVariation {
    pub fn new(delta_j: SpectralDensity, beta: f64, tol: Tolerance) -> Result<Self> {
        let corr = CorrelationFn::new(BathSpec::new(delta_j.clone(), beta, 1.0)?, MethodChoice::Auto, tol)?;
        let comps = corr.components().to_vec();
        let tail = power_tail(&comps, beta, tol)?;
        let sup = spectral_sup(&comps, beta, tol)?;
        Ok(DensityVariation { delta_j, beta, corr, tail, sup })
    }

    pub fn density(&self) -> &SpectralDensity {
        &self.delta_j
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn components(&self) -> &[Component] {
        self.corr.components()
    }
}

/// g_c = ΔJ coth(βω/2)/π and g_s = ΔJ/π as jets, built from ΔJ/ω so the
/// ω coth(βω/2) factor stays smooth at the origin.
fn transform_jets(comps: &[Component], beta: f64, omega: f64) -> Option<(Jet, Jet)> {
    let w = Jet::variable(omega);
    let mut reduced = Jet::constant(0.0);
    for c in comps {
        reduced = reduced + c.reduced_jet(w)?;
    }
    let g_s = (reduced * w).scale(1.0 / PI);
    let g_c = if beta.is_infinite() {
        g_s
    } else {
        (reduced * x_coth_x(w.scale(0.5 * beta))).scale(2.0 / (beta * PI))
    };
    Some((g_c, g_s))
}

fn half_line_upper(mut f: impl FnMut(f64) -> f64, split: f64, tol: Tolerance) -> Result<f64> {
    let cfg = QuadConfig::new(tol);
    let head = integrate_from_zero_sqrt(&mut f, split, &cfg)?;
    let tail = integrate_to_infinity(&mut f, split, &cfg)?;
    Ok(head.upper() + tail.upper())
}

// Two integrations by parts of the Fourier integrals; valid for smooth ΔJ
// with ΔJ(0) = 0 and ΔJ/ω regular at the origin.
fn power_tail(comps: &[Component], beta: f64, tol: Tolerance) -> Result<Option<PowerTail>> {
    if comps.is_empty() || comps.iter().any(|c| c.reduced_jet(Jet::variable(1.0)).is_none()) {
        return Ok(None);
    }
    let split = comps.iter().map(Component::frequency_scale).fold(0.0, f64::max);
    let tol = Tolerance::new(tol.abs, tol.rel.max(1e-10));
    let jets = |w: f64| transform_jets(comps, beta, w).expect("delta-free");
    let d0 = jets(0.0).0.d1.abs();
    let re = d0 + half_line_upper(|w| jets(w).0.d2.abs(), split, tol)?;
    let im = half_line_upper(|w| jets(w).1.d2.abs(), split, tol)?;
    Ok(Some(PowerTail { re, im }))
}

// |Δξ(t)| ≤ |∫ΔJ coth/π| + i|∫ΔJ/π| ≤ √(A² + B²) for the continuous part and
// |κ|coth(βω₀/2)/π for each delta mode.
fn spectral_sup(comps: &[Component], beta: f64, tol: Tolerance) -> Result<f64> {
    let continuous: Vec<Component> = comps.iter().copied().filter(|c| !matches!(c, Component::Delta { .. })).collect();
    let mut sup = 0.0;
    if !continuous.is_empty() {
        let split = continuous.iter().map(Component::frequency_scale).fold(0.0, f64::max);
        let j = |w: f64| -> f64 { continuous.iter().filter_map(|c| c.eval(w).ok()).sum::<f64>().abs() / PI };
        let tol = Tolerance::new(tol.abs, tol.rel.max(1e-10));
        let a = half_line_upper(|w| if w <= 0.0 { 0.0 } else { j(w) * thermal_factor(beta, w) }, split, tol)?;
        let b = half_line_upper(|w| if w <= 0.0 { 0.0 } else { j(w) }, split, tol)?;
        sup += a.hypot(b);
    }
    for c in comps {
        if let Component::Delta { weight, omega0 } = *c {
            sup += weight.abs() / PI * thermal_factor(beta, omega0);
        }
    }
    Ok(sup)
}

impl DeltaXi for DensityVariation {
    fn eval(&self, t: f64) -> Result<XiValue> {
        self.corr.eval(t)
    }

    fn is_zero(&self) -> bool {
        self.components().is_empty()
    }

    fn never_decays(&self) -> bool {
        self.components().iter().any(|c| matches!(c, Component::Delta { .. }))
    }

    fn tail_bounds(&self, horizon: f64) -> Option<(f64, f64)> {
        if self.is_zero() {
            return Some((0.0, 0.0));
        }
        let tail = self.tail?;
        if !(horizon > 0.0) {
            return None;
        }
        Some((tail.re / horizon, tail.im / horizon))
    }

    fn certified_sup(&self) -> Option<f64> {
        Some(self.sup)
    }

    fn decay_time(&self) -> f64 {
        let thermal = if self.beta.is_finite() { self.beta / PI } else { 0.0 };
        self.components().iter().map(Component::decay_time).fold(thermal, f64::max)
    }

    fn resolution(&self) -> f64 {
        let f = self.components().iter().map(Component::frequency_scale).fold(0.0, f64::max);
        if f > 0.0 {
            PI / (2.0 * f)
        } else {
            1.0
        }
    }

    fn describe(&self) -> String {
        format!("density variation ({} components, beta = {})", self.components().len(), self.beta)
    }
}

type XiEval = dyn Fn(f64) -> Result<XiValue> + Send + Sync;

/// Δξ supplied directly as a function of time. Without a tail certificate
/// the integrability status stays undetermined.
#[derive(Clone)]
pub struct ClosureXi {
    f: Arc<XiEval>,
    real: bool,
    decay_time: f64,
    resolution: f64,
    tail: Option<(f64, f64)>,
    sup: Option<f64>,
}

impl fmt::Debug for ClosureXi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosureXi").field("real", &self.real).field("decay_time", &self.decay_time).finish()
    }
}

impl ClosureXi {
    pub fn new(f: impl Fn(f64) -> Result<XiValue> + Send + Sync + 'static, decay_time: f64, resolution: f64) -> Self {
        ClosureXi { f: Arc::new(f), real: false, decay_time, resolution, tail: None, sup: None }
    }

    pub fn real(mut self) -> Self {
        self.real = true;
        self
    }

    /// Declares |Re Δξ(t)| ≤ re/t² and |Im Δξ(t)| ≤ im/t².
    pub fn with_power_tail(mut self, re: f64, im: f64) -> Self {
        self.tail = Some((re, im));
        self
    }

    pub fn with_sup(mut self, sup: f64) -> Self {
        self.sup = Some(sup);
        self
    }
}

impl DeltaXi for ClosureXi {
    fn eval(&self, t: f64) -> Result<XiValue> {
        (self.f)(t)
    }
    fn is_zero(&self) -> bool {
        false
    }
    fn is_real(&self) -> bool {
        self.real
    }
    fn tail_bounds(&self, horizon: f64) -> Option<(f64, f64)> {
        self.tail.map(|(re, im)| (re / horizon, im / horizon))
    }
    fn certified_sup(&self) -> Option<f64> {
        self.sup
    }
    fn decay_time(&self) -> f64 {
        self.decay_time
    }
    fn resolution(&self) -> f64 {
        self.resolution
    }
    fn describe(&self) -> String {
        "user-supplied correlation difference".into()
    }
}

/// Variation to be bounded: Δξ source, λ², ‖Ô‖ and whether λ² is already
/// absorbed into ΔJ.
#[derive(Debug, Clone)]
pub struct VariationSpec {
    pub source: Arc<dyn DeltaXi>,
    pub lambda_sq: f64,
    pub observable_norm: f64,
    pub coupling_absorbed: bool,
}

impl VariationSpec {
    pub fn new(source: Arc<dyn DeltaXi>, lambda_sq: f64) -> Result<Self> {
        if !(lambda_sq >= 0.0) || !lambda_sq.is_finite() {
            return Err(Error::Config(format!("lambda_sq must be finite and ≥ 0, got {lambda_sq}")));
        }
        Ok(VariationSpec { source, lambda_sq, observable_norm: 1.0, coupling_absorbed: false })
    }

    pub fn from_density(delta_j: SpectralDensity, beta: f64, lambda_sq: f64, tol: Tolerance) -> Result<Self> {
        VariationSpec::new(Arc::new(DensityVariation::new(delta_j, beta, tol)?), lambda_sq)
    }

    pub fn with_observable_norm(mut self, norm: f64) -> Result<Self> {
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Config(format!("observable_norm must be finite and > 0, got {norm}")));
        }
        self.observable_norm = norm;
        Ok(self)
    }

    pub fn absorbed(mut self) -> Self {
        self.coupling_absorbed = true;
        self
    }

    /// λ² as it enters the exponent.
    pub fn exponent_prefactor(&self) -> f64 {
        if self.coupling_absorbed {
            1.0
        } else {
            self.lambda_sq
        }
    }

    pub fn default_horizon(&self) -> f64 {
        let d = self.source.decay_time();
        if d.is_finite() && d > 0.0 {
            HORIZON_DECAY_TIMES * d
        } else {
            HORIZON_DECAY_TIMES * self.source.resolution()
        }
    }
}

/// Status of the absolute-integrability condition ∫|Δξ| < ∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConditionStatus {
    /// `c` is a certified upper estimate of ∫₀^∞ |Δξ|.
    Satisfied { c: f64 },
    NotSatisfied,
    Undetermined,
}

/// Evaluation bookkeeping shared by the integrators below.
struct Tracker<'a> {
    source: &'a dyn DeltaXi,
    max_err: Cell<f64>,
    evals: Cell<usize>,
    failure: Cell<Option<Error>>,
}

#[derive(Debug, Clone, Copy)]
enum Part {
    Re,
    Im,
    Norm,
}

impl<'a> Tracker<'a> {
    fn new(source: &'a dyn DeltaXi) -> Self {
        Tracker { source, max_err: Cell::new(0.0), evals: Cell::new(0), failure: Cell::new(None) }
    }

    fn value(&self, t: f64, part: Part) -> f64 {
        self.evals.set(self.evals.get() + 1);
        match self.source.eval(t) {
            Ok(x) => {
                if x.error > self.max_err.get() {
                    self.max_err.set(x.error);
                }
                match part {
                    Part::Re => x.value.re,
                    Part::Im => x.value.im,
                    Part::Norm => x.value.norm(),
                }
            }
            Err(e) => {
                let prev = self.failure.take();
                self.failure.set(prev.or(Some(e)));
                0.0
            }
        }
    }

    fn check(&self) -> Result<()> {
        match self.failure.take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn uniform_grid(a: f64, b: f64, resolution: f64) -> Vec<f64> {
    let n = (((b - a) / resolution).ceil() as usize).clamp(MIN_GRID, MAX_GRID);
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

/// Grid on [a, b] refined by every sign change of `part`, located by bisection.
fn split_at_zeros(tr: &Tracker, part: Part, a: f64, b: f64) -> Result<Vec<f64>> {
    let grid = uniform_grid(a, b, tr.source.resolution());
    let vals: Vec<f64> = grid.iter().map(|&t| tr.value(t, part)).collect();
    tr.check()?;
    let mut breaks = vec![grid[0]];
    for i in 0..grid.len() - 1 {
        let (mut lo, mut hi) = (grid[i], grid[i + 1]);
        let (flo, fhi) = (vals[i], vals[i + 1]);
        if flo * fhi < 0.0 {
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = tr.value(mid, part);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            tr.check()?;
            breaks.push(0.5 * (lo + hi));
        }
        breaks.push(grid[i + 1]);
    }
    breaks.dedup();
    Ok(breaks)
}

/// Upper estimate of ∫_a^b w(s)|part(Δξ(s))| ds with panels split at zeros.
/// `weight` must be nonnegative with max `w_max` on [a, b].
fn abs_integral(
    tr: &Tracker,
    part: Part,
    a: f64,
    b: f64,
    weight: impl Fn(f64) -> f64,
    w_max: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    if b <= a {
        return Ok(Estimate::default());
    }
    let breaks = match part {
        Part::Norm => uniform_grid(a, b, tr.source.resolution()),
        _ => split_at_zeros(tr, part, a, b)?,
    };
    let before = tr.max_err.get();
    let mut est = integrate_pieces(|s| weight(s) * tr.value(s, part).abs(), &breaks, &QuadConfig::new(tol))?;
    tr.check()?;
    // Pointwise evaluation error of Δξ, integrated over the panel.
    est.error += tr.max_err.get().max(before) * w_max * (b - a);
    est.evals = tr.evals.get();
    Ok(est)
}

/// γ, η and their parts: head quadrature on [0, T] plus certified tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaEta {
    /// Upper estimate of ∫₀^∞ |Re Δξ| (head + tail); head only when not certified.
    pub gamma: f64,
    /// Upper estimate of ∫₀^∞ |Im Δξ|.
    pub eta: f64,
    pub gamma_head: f64,
    pub eta_head: f64,
    pub gamma_tail: f64,
    pub eta_tail: f64,
    pub horizon: f64,
    pub evals: usize,
    /// False when the tail beyond the horizon has no certificate.
    pub certified: bool,
}

fn gamma_eta_impl(v: &VariationSpec, tol: Tolerance, horizon: Option<f64>, require_tail: bool) -> Result<GammaEta> {
    let src = v.source.as_ref();
    let horizon = horizon.unwrap_or_else(|| v.default_horizon());
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Config(format!("horizon must be finite and > 0, got {horizon}")));
    }
    let zero = GammaEta {
        gamma: 0.0,
        eta: 0.0,
        gamma_head: 0.0,
        eta_head: 0.0,
        gamma_tail: 0.0,
        eta_tail: 0.0,
        horizon,
        evals: 0,
        certified: true,
    };
    if src.is_zero() {
        return Ok(zero);
    }
    let tails = if src.never_decays() { None } else { src.tail_bounds(horizon) };
    if require_tail && tails.is_none() {
        return Err(Error::NoTailCertificate(src.describe()));
    }
    let tr = Tracker::new(src);
    let g = abs_integral(&tr, Part::Re, 0.0, horizon, |_| 1.0, 1.0, tol)?;
    let e = if src.is_real() {
        Estimate::default()
    } else {
        abs_integral(&tr, Part::Im, 0.0, horizon, |_| 1.0, 1.0, tol)?
    };
    let (gt, et) = tails.unwrap_or((0.0, 0.0));
    let et = if src.is_real() { 0.0 } else { et };
    Ok(GammaEta {
        gamma: g.upper() + gt,
        eta: e.upper() + et,
        gamma_head: g.upper(),
        eta_head: e.upper(),
        gamma_tail: gt,
        eta_tail: et,
        horizon,
        evals: tr.evals.get(),
        certified: tails.is_some(),
    })
}

/// Certified γ = ∫₀^∞ |Re Δξ| and η = ∫₀^∞ |Im Δξ|.
///
/// Fails with `NoTailCertificate` when the part beyond the horizon cannot be
/// bounded; [`gamma_eta_truncated`] returns the horizon-limited estimate.
pub fn gamma_eta(v: &VariationSpec, tol: Tolerance, horizon: Option<f64>) -> Result<GammaEta> {
    gamma_eta_impl(v, tol, horizon, true)
}

/// γ and η over [0, T] only, flagged uncertified when no tail bound exists.
pub fn gamma_eta_truncated(v: &VariationSpec, tol: Tolerance, horizon: Option<f64>) -> Result<GammaEta> {
    gamma_eta_impl(v, tol, horizon, false)
}

/// Classifies ∫₀^∞ |Δξ| < ∞ and certifies c when possible.
pub fn check_integrability(v: &VariationSpec, horizon: Option<f64>, tol: Tolerance) -> ConditionStatus {
    let src = v.source.as_ref();
    if src.is_zero() {
        return ConditionStatus::Satisfied { c: 0.0 };
    }
    if src.never_decays() {
        return ConditionStatus::NotSatisfied;
    }
    let horizon = horizon.unwrap_or_else(|| v.default_horizon());
    let Some((tr_re, tr_im)) = src.tail_bounds(horizon) else {
        return ConditionStatus::Undetermined;
    };
    let tr = Tracker::new(src);
    let part = if src.is_real() { Part::Re } else { Part::Norm };
    match abs_integral(&tr, part, 0.0, horizon, |_| 1.0, 1.0, tol) {
        Ok(head) => {
            let tail = if src.is_real() { tr_re } else { tr_re + tr_im };
            ConditionStatus::Satisfied { c: head.upper() + tail }
        }
        Err(_) => ConditionStatus::Undetermined,
    }
}

/// ‖Ô‖(exp(λ²(γ+η)t) − 1)
pub fn strong_bound(v: &VariationSpec, gamma: f64, eta: f64, t: f64) -> f64 {
    v.observable_norm * (v.exponent_prefactor() * (gamma + eta) * t).exp_m1()
}

/// ‖Ô‖(exp(λ² C t²/2) − 1)
pub fn weak_bound(v: &VariationSpec, c: f64, t: f64) -> f64 {
    v.observable_norm * (0.5 * v.exponent_prefactor() * c * t * t).exp_m1()
}

/// ‖Ô‖(exp(λ² c t) − 1) using c ≥ ∫|Δξ| directly instead of γ + η.
pub fn direct_bound(v: &VariationSpec, c: f64, t: f64) -> f64 {
    v.observable_norm * (v.exponent_prefactor() * c * t).exp_m1()
}

/// Upper estimates of D(t) = ∫₀^t (t−s)|Δξ(s)| ds on an ascending grid
/// starting at or after 0. Accumulated panel by panel so no cancellation
/// occurs: D(t') = D(t) + (t'−t)·∫₀^t|Δξ| + ∫_t^{t'} (t'−s)|Δξ|.
pub fn general_exponents(v: &VariationSpec, times: &[f64], tol: Tolerance) -> Result<Vec<f64>> {
    check_grid(times)?;
    let src = v.source.as_ref();
    if src.is_zero() {
        return Ok(vec![0.0; times.len()]);
    }
    let part = if src.is_real() { Part::Re } else { Part::Norm };
    let tr = Tracker::new(src);
    let mut out = Vec::with_capacity(times.len());
    let (mut prev, mut area, mut d) = (0.0, 0.0, 0.0);
    for &t in times {
        if t > prev {
            let len = t - prev;
            let i1 = abs_integral(&tr, part, prev, t, |_| 1.0, 1.0, tol)?;
            let i2 = abs_integral(&tr, part, prev, t, |s| (t - s).max(0.0), len, tol)?;
            d += len * area + i2.upper();
            area += i1.upper();
            prev = t;
        }
        out.push(d);
    }
    Ok(out)
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("time grid must be finite, ≥ 0 and ascending".into()));
    }
    Ok(())
}

/// ‖Ô‖(exp(λ² D(t)) − 1) at a single time.
pub fn general_bound(v: &VariationSpec, t: f64, tol: Tolerance) -> Result<f64> {
    let d = general_exponents(v, &[t], tol)?[0];
    Ok(v.observable_norm * (v.exponent_prefactor() * d).exp_m1())
}

/// Grid estimate of sup|Δξ| on [0, T] plus the analytic bound when known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupEstimate {
    pub grid_max: f64,
    /// `grid_max` inflated by [`SUP_SAFETY`]; not a certified bound.
    pub inflated: f64,
    pub certified: Option<f64>,
}

impl SupEstimate {
    /// Constant for the weak bound and whether it is certified.
    pub fn constant(&self) -> (f64, bool) {
        match self.certified {
            Some(c) => (c, true),
            None => (self.inflated, false),
        }
    }
}

pub fn sup_estimate(src: &dyn DeltaXi, horizon: f64, grid: usize) -> Result<SupEstimate> {
    let n = grid.max(2);
    let mut m: f64 = 0.0;
    for i in 0..n {
        let t = horizon * i as f64 / (n - 1) as f64;
        let x = src.eval(t)?;
        m = m.max(x.value.norm() + x.error);
    }
    Ok(SupEstimate { grid_max: m, inflated: SUP_SAFETY * m, certified: src.certified_sup() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundKind {
    General,
    Weak { c: f64, c_certified: bool },
    Strong { gamma: f64, eta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub horizon: f64,
    pub evals: usize,
}

/// One bound curve B(t) with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub curve: Vec<(f64, f64)>,
    pub condition: ConditionStatus,
    /// Strong bound with c = ∫|Δξ| in place of γ + η, when c is certified.
    pub c_direct: Option<Vec<(f64, f64)>>,
    pub certified: bool,
    pub metadata: ReportMetadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindSelection {
    General,
    Weak,
    Strong,
    #[default]
    All,
}

impl std::str::FromStr for KindSelection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(KindSelection::General),
            "weak" => Ok(KindSelection::Weak),
            "strong" => Ok(KindSelection::Strong),
            "all" => Ok(KindSelection::All),
            other => Err(Error::Config(format!("unknown bound kind '{other}' (expected general|weak|strong|all)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundRequest {
    pub times: Vec<f64>,
    pub tol: Tolerance,
    pub horizon: Option<f64>,
    pub sup_grid: usize,
    pub kinds: KindSelection,
}

/// Bound curves for a variation. Kinds that cannot be produced (strong
/// without integrability) are skipped; the weak bound falls back to a grid
/// supremum flagged uncertified.
pub fn bound_reports(v: &VariationSpec, req: &BoundRequest) -> Result<Vec<BoundReport>> {
    check_grid(&req.times)?;
    let horizon = req.horizon.unwrap_or_else(|| v.default_horizon());
    let condition = check_integrability(v, Some(horizon), req.tol);
    let meta = |evals| ReportMetadata { abs_tol: req.tol.abs, rel_tol: req.tol.rel, horizon, evals };
    let want = |k: KindSelection| req.kinds == KindSelection::All || req.kinds == k;
    let mut out = Vec::new();

    if want(KindSelection::General) {
        let d = general_exponents(v, &req.times, req.tol)?;
        let curve = req.times.iter().zip(&d).map(|(&t, &d)| (t, v.observable_norm * (v.exponent_prefactor() * d).exp_m1())).collect();
        out.push(BoundReport { kind: BoundKind::General, curve, condition, c_direct: None, certified: true, metadata: meta(0) });
    }
    if want(KindSelection::Weak) {
        let sup = sup_estimate(v.source.as_ref(), horizon, req.sup_grid)?;
        let (c, certified) = sup.constant();
        let curve = req.times.iter().map(|&t| (t, weak_bound(v, c, t))).collect();
        out.push(BoundReport {
            kind: BoundKind::Weak { c, c_certified: certified },
            curve,
            condition,
            c_direct: None,
            certified,
            metadata: meta(req.sup_grid),
        });
    }
    if want(KindSelection::Strong) && !v.source.never_decays() {
        let ge = gamma_eta_truncated(v, req.tol, Some(horizon))?;
        let curve = req.times.iter().map(|&t| (t, strong_bound(v, ge.gamma, ge.eta, t))).collect();
        let c_direct = match condition {
            ConditionStatus::Satisfied { c } => Some(req.times.iter().map(|&t| (t, direct_bound(v, c, t))).collect()),
            _ => None,
        };
        out.push(BoundReport {
            kind: BoundKind::Strong { gamma: ge.gamma, eta: ge.eta },
            curve,
            condition,
            c_direct,
            certified: ge.certified,
            metadata: meta(ge.evals),
        });
    }
    Ok(out)
}
