//! Parametric spectral densities J(ω) and their linear algebra.
//!
//! A [`SpectralDensity`] is the user-facing, serializable description. Every
//! density flattens into a list of weighted [`Component`]s with like terms
//! merged, which is what the correlation and bound code consumes.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// One antisymmetrized Lorentzian term p·J_L(ω; Ω, Γ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianTerm {
    pub p: f64,
    pub omega: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub coeff: f64,
    pub density: SpectralDensity,
}

/// Spectral density of a bosonic bath, defined for ω ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralDensity {
    /// prefactor · π · ω · e^{−ω/cutoff}
    Ohmic { prefactor: f64, cutoff: f64 },
    /// prefactor · π · ωⁿ · e^{−ω/cutoff}, n ≥ 2
    Superohmic { exponent: u32, prefactor: f64, cutoff: f64 },
    /// prefactor · π · √ω · e^{−ω/cutoff}
    Subohmic { prefactor: f64, cutoff: f64 },
    /// Σ pᵢ · (π/2)·ω / (((ω+Ωᵢ)²+Γᵢ²)((ω−Ωᵢ)²+Γᵢ²))
    LorentzianSum { terms: Vec<LorentzianTerm> },
    /// κ · δ(ω − ω₀)
    DeltaMode { kappa: f64, omega0: f64 },
    Combination { parts: Vec<Part> },
}

/// Flattened, weighted building block of a density. Weights may be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    /// weight · π · ωⁿ · e^{−ω/cutoff}; n = 1 is the ohmic case.
    PowerLaw { exponent: u32, weight: f64, cutoff: f64 },
    /// weight · π · √ω · e^{−ω/cutoff}
    Subohmic { weight: f64, cutoff: f64 },
    /// weight · J_L(ω; center, width)
    Lorentzian { weight: f64, center: f64, width: f64 },
    /// weight · δ(ω − omega0)
    Delta { weight: f64, omega0: f64 },
}

/// Antisymmetrized Lorentzian J_L(ω; Ω, Γ) including the π/2 prefactor.
pub fn lorentzian_shape(omega: f64, center: f64, width: f64) -> f64 {
    let plus = (omega + center).powi(2) + width * width;
    let minus = (omega - center).powi(2) + width * width;
    FRAC_PI_2 * omega / (plus * minus)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite, got {v}")))
    }
}

impl SpectralDensity {
    pub fn zero() -> Self {
        SpectralDensity::Combination { parts: Vec::new() }
    }

    pub fn ohmic(prefactor: f64, cutoff: f64) -> Self {
        SpectralDensity::Ohmic { prefactor, cutoff }
    }

    pub fn lorentzian(p: f64, omega: f64, gamma: f64) -> Self {
        SpectralDensity::LorentzianSum { terms: vec![LorentzianTerm { p, omega, gamma }] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralDensity::Ohmic { prefactor, cutoff } | SpectralDensity::Subohmic { prefactor, cutoff } => {
                check_positive("prefactor", *prefactor)?;
                check_positive("cutoff", *cutoff)
            }
            SpectralDensity::Superohmic { exponent, prefactor, cutoff } => {
                if *exponent < 2 {
                    return Err(Error::Config(format!("superohmic exponent must be ≥ 2, got {exponent}")));
                }
                check_positive("prefactor", *prefactor)?;
                check_positive("cutoff", *cutoff)
            }
            SpectralDensity::LorentzianSum { terms } => {
                for t in terms {
                    check_finite("p", t.p)?;
                    check_positive("omega", t.omega)?;
                    check_positive("gamma", t.gamma)?;
                }
                Ok(())
            }
            SpectralDensity::DeltaMode { kappa, omega0 } => {
                check_finite("kappa", *kappa)?;
                check_positive("omega0", *omega0)
            }
            SpectralDensity::Combination { parts } => {
                for p in parts {
                    check_finite("coeff", p.coeff)?;
                    p.density.validate()?;
                }
                Ok(())
            }
        }
    }

    /// a·J as a combination.
    pub fn scaled(&self, a: f64) -> Self {
        SpectralDensity::Combination { parts: vec![Part { coeff: a, density: self.clone() }] }
    }

    /// a·J + b·K.
    pub fn linear(a: f64, j: &SpectralDensity, b: f64, k: &SpectralDensity) -> Self {
        SpectralDensity::Combination {
            parts: vec![Part { coeff: a, density: j.clone() }, Part { coeff: b, density: k.clone() }],
        }
    }

    /// Flattened components with like terms merged and zero weights dropped,
    /// in order of first appearance.
    pub fn components(&self) -> Vec<Component> {
        let mut raw = Vec::new();
        self.push_components(1.0, &mut raw);
        let mut merged: Vec<Component> = Vec::new();
        for c in raw {
            match merged.iter_mut().find(|m| m.same_shape(&c)) {
                Some(m) => m.add_weight(c.weight()),
                None => merged.push(c),
            }
        }
        merged.retain(|c| c.weight() != 0.0);
        merged
    }

    fn push_components(&self, coeff: f64, out: &mut Vec<Component>) {
        match self {
            SpectralDensity::Ohmic { prefactor, cutoff } => out.push(Component::PowerLaw {
                exponent: 1,
                weight: coeff * prefactor,
                cutoff: *cutoff,
            }),
            SpectralDensity::Superohmic { exponent, prefactor, cutoff } => out.push(Component::PowerLaw {
                exponent: *exponent,
                weight: coeff * prefactor,
                cutoff: *cutoff,
            }),
            SpectralDensity::Subohmic { prefactor, cutoff } => {
                out.push(Component::Subohmic { weight: coeff * prefactor, cutoff: *cutoff })
            }
            SpectralDensity::LorentzianSum { terms } => out.extend(terms.iter().map(|t| Component::Lorentzian {
                weight: coeff * t.p,
                center: t.omega,
                width: t.gamma,
            })),
            SpectralDensity::DeltaMode { kappa, omega0 } => {
                out.push(Component::Delta { weight: coeff * kappa, omega0: *omega0 })
            }
            SpectralDensity::Combination { parts } => {
                for p in parts {
                    p.density.push_components(coeff * p.coeff, out);
                }
            }
        }
    }

    pub fn has_delta(&self) -> bool {
        self.components().iter().any(|c| matches!(c, Component::Delta { .. }))
    }

    pub fn is_zero(&self) -> bool {
        self.components().is_empty()
    }

    /// Pointwise J(ω), evaluated term by term in the nested structure.
    pub fn eval(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!("spectral densities are defined for ω ≥ 0, got {omega}")));
        }
        match self {
            SpectralDensity::Ohmic { prefactor, cutoff } => Ok(prefactor * PI * omega * (-omega / cutoff).exp()),
            SpectralDensity::Superohmic { exponent, prefactor, cutoff } => {
                Ok(prefactor * PI * omega.powi(*exponent as i32) * (-omega / cutoff).exp())
            }
            SpectralDensity::Subohmic { prefactor, cutoff } => Ok(prefactor * PI * omega.sqrt() * (-omega / cutoff).exp()),
            SpectralDensity::LorentzianSum { terms } => {
                Ok(terms.iter().map(|t| t.p * lorentzian_shape(omega, t.omega, t.gamma)).sum())
            }
            SpectralDensity::DeltaMode { .. } => Err(Error::DeltaNotEvaluable),
            SpectralDensity::Combination { parts } => {
                let mut s = 0.0;
                for p in parts {
                    s += p.coeff * p.density.eval(omega)?;
                }
                Ok(s)
            }
        }
    }
}

/// ΔJ = J − J₀.
pub fn difference(j: &SpectralDensity, j0: &SpectralDensity) -> SpectralDensity {
    SpectralDensity::linear(1.0, j, -1.0, j0)
}

/// Pointwise J(ω) of a component list.
pub fn eval_components(components: &[Component], omega: f64) -> Result<f64> {
    let mut s = 0.0;
    for c in components {
        s += c.eval(omega)?;
    }
    Ok(s)
}

impl Component {
    pub fn weight(&self) -> f64 {
        match *self {
            Component::PowerLaw { weight, .. }
            | Component::Subohmic { weight, .. }
            | Component::Lorentzian { weight, .. }
            | Component::Delta { weight, .. } => weight,
        }
    }

    fn add_weight(&mut self, w: f64) {
        match self {
            Component::PowerLaw { weight, .. }
            | Component::Subohmic { weight, .. }
            | Component::Lorentzian { weight, .. }
            | Component::Delta { weight, .. } => *weight += w,
        }
    }

    pub fn with_weight(mut self, w: f64) -> Self {
        match &mut self {
            Component::PowerLaw { weight, .. }
            | Component::Subohmic { weight, .. }
            | Component::Lorentzian { weight, .. }
            | Component::Delta { weight, .. } => *weight = w,
        }
        self
    }

    fn same_shape(&self, o: &Component) -> bool {
        match (*self, *o) {
            (Component::PowerLaw { exponent: a, cutoff: c, .. }, Component::PowerLaw { exponent: b, cutoff: d, .. }) => {
                a == b && c == d
            }
            (Component::Subohmic { cutoff: c, .. }, Component::Subohmic { cutoff: d, .. }) => c == d,
            (
                Component::Lorentzian { center: a, width: b, .. },
                Component::Lorentzian { center: c, width: d, .. },
            ) => a == c && b == d,
            (Component::Delta { omega0: a, .. }, Component::Delta { omega0: b, .. }) => a == b,
            _ => false,
        }
    }

    pub fn eval(&self, omega: f64) -> Result<f64> {
        match *self {
            Component::PowerLaw { exponent, weight, cutoff } => {
                Ok(weight * PI * omega.powi(exponent as i32) * (-omega / cutoff).exp())
            }
            Component::Subohmic { weight, cutoff } => Ok(weight * PI * omega.sqrt() * (-omega / cutoff).exp()),
            Component::Lorentzian { weight, center, width } => Ok(weight * lorentzian_shape(omega, center, width)),
            Component::Delta { .. } => Err(Error::DeltaNotEvaluable),
        }
    }

    /// Jet of J(ω)/ω. `None` where J/ω is singular at the origin (subohmic)
    /// or not a function (delta).
    pub fn reduced_jet(&self, omega: Jet) -> Option<Jet> {
        match *self {
            Component::PowerLaw { exponent, weight, cutoff } => {
                let decay = omega.scale(-1.0 / cutoff).exp();
                Some((omega.powi(exponent as i32 - 1) * decay).scale(weight * PI))
            }
            Component::Lorentzian { weight, center, width } => {
                let w2 = width * width;
                let plus = (omega + center).powi(2) + w2;
                let minus = (omega + (-center)).powi(2) + w2;
                Some((plus * minus).recip().scale(weight * FRAC_PI_2))
            }
            Component::Subohmic { .. } | Component::Delta { .. } => None,
        }
    }

    /// Characteristic frequency beyond which the density is in its decaying tail.
    pub fn frequency_scale(&self) -> f64 {
        match *self {
            Component::PowerLaw { exponent, cutoff, .. } => (exponent as f64 + 1.0) * cutoff,
            Component::Subohmic { cutoff, .. } => cutoff,
            Component::Lorentzian { center, width, .. } => center + width,
            Component::Delta { omega0, .. } => omega0,
        }
    }

    /// Slowest intrinsic decay time of the component's correlation function
    /// (temperature effects excluded).
    pub fn decay_time(&self) -> f64 {
        match *self {
            Component::PowerLaw { cutoff, .. } | Component::Subohmic { cutoff, .. } => 1.0 / cutoff,
            Component::Lorentzian { width, .. } => 1.0 / width,
            Component::Delta { .. } => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meier_tannor_ohmic() -> SpectralDensity {
        SpectralDensity::ohmic(0.5, 15.0 / 4.0)
    }

    #[test]
    fn ohmic_value_at_cutoff() {
        let v = meier_tannor_ohmic().eval(15.0 / 4.0).unwrap();
        let expected = FRAC_PI_2 * 3.75 * (-1.0f64).exp();
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn every_variant_vanishes_at_zero() {
        let ds = [
            SpectralDensity::ohmic(1.0, 2.0),
            SpectralDensity::Superohmic { exponent: 3, prefactor: 1.0, cutoff: 2.0 },
            SpectralDensity::Subohmic { prefactor: 1.0, cutoff: 2.0 },
            SpectralDensity::lorentzian(-3.0, 1.0, 0.5),
        ];
        for d in &ds {
            assert_eq!(d.eval(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn delta_and_negative_frequency_errors() {
        let d = SpectralDensity::DeltaMode { kappa: 1.0, omega0: 2.0 };
        assert_eq!(d.eval(1.0), Err(Error::DeltaNotEvaluable));
        assert!(matches!(SpectralDensity::ohmic(1.0, 1.0).eval(-0.1), Err(Error::Domain(_))));
        let mixed = SpectralDensity::linear(1.0, &SpectralDensity::ohmic(1.0, 1.0), 1.0, &d);
        assert!(mixed.has_delta());
        assert_eq!(mixed.eval(0.3), Err(Error::DeltaNotEvaluable));
    }

    #[test]
    fn self_difference_is_zero() {
        let j = SpectralDensity::linear(
            2.0,
            &SpectralDensity::Subohmic { prefactor: 0.3, cutoff: 1.0 },
            1.0,
            &SpectralDensity::lorentzian(1.0, 2.0, 0.4),
        );
        let d = difference(&j, &j);
        assert!(d.is_zero());
        for k in 0..50 {
            assert_eq!(d.eval(0.1 * k as f64).unwrap(), 0.0);
        }
    }

    #[test]
    fn ohmic_difference_on_grid() {
        let a = SpectralDensity::ohmic(0.7, 2.0);
        let b = SpectralDensity::ohmic(0.2, 5.0);
        let d = difference(&a, &b);
        for k in 0..1000 {
            let w = 0.02 * k as f64;
            let direct = 0.7 * PI * w * (-w / 2.0).exp() - 0.2 * PI * w * (-w / 5.0).exp();
            assert!((d.eval(w).unwrap() - direct).abs() <= 4.0 * f64::EPSILON * direct.abs().max(1.0));
        }
    }

    #[test]
    fn components_merge_like_terms() {
        let j = SpectralDensity::Combination {
            parts: vec![
                Part { coeff: 1.0, density: SpectralDensity::ohmic(1.0, 2.0) },
                Part { coeff: 0.5, density: SpectralDensity::ohmic(1.0, 2.0) },
                Part { coeff: 1.0, density: SpectralDensity::lorentzian(1.0, 1.0, 1.0) },
            ],
        };
        let c = j.components();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0], Component::PowerLaw { exponent: 1, weight: 1.5, cutoff: 2.0 });
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(SpectralDensity::ohmic(1.0, 0.0).validate().is_err());
        assert!(SpectralDensity::ohmic(-1.0, 1.0).validate().is_err());
        assert!(SpectralDensity::Superohmic { exponent: 1, prefactor: 1.0, cutoff: 1.0 }.validate().is_err());
        assert!(SpectralDensity::lorentzian(-2.0, 1.0, 1.0).validate().is_ok());
        assert!(SpectralDensity::lorentzian(1.0, 1.0, -1.0).validate().is_err());
        assert!(SpectralDensity::DeltaMode { kappa: -1.0, omega0: 1.0 }.validate().is_ok());
    }

    #[test]
    fn reduced_jet_matches_density_over_omega() {
        let comps = [
            Component::PowerLaw { exponent: 2, weight: 0.3, cutoff: 1.5 },
            Component::Lorentzian { weight: -2.0, center: 0.7, width: 0.4 },
        ];
        for c in &comps {
            for &w in &[0.1, 1.0, 4.0] {
                let j = c.reduced_jet(Jet::variable(w)).unwrap();
                assert!((j.v - c.eval(w).unwrap() / w).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn schema_field_names() {
        let j: SpectralDensity = serde_json::from_str(
            r#"{"kind":"combination","parts":[
                {"coeff":1.0,"density":{"kind":"superohmic","exponent":3,"prefactor":0.1,"cutoff":2.0}},
                {"coeff":-1.0,"density":{"kind":"lorentzian_sum","terms":[{"p":1.0,"omega":2.0,"gamma":0.5}]}},
                {"coeff":0.5,"density":{"kind":"delta_mode","kappa":0.2,"omega0":1.0}}]}"#,
        )
        .unwrap();
        assert_eq!(j.components().len(), 3);
        assert!(serde_json::from_str::<SpectralDensity>(r#"{"kind":"ohmic","prefactor":1,"cutof":1}"#).is_err());
    }
}
