//! Run configuration: a JSON document describing baths, variations,
//! truncation certificates, grids and tolerances.
//!
//! Inverse temperatures accept a number or the string `"inf"` (T = 0).
//! Densities may be given inline or as `{"file": "path.json"}`, resolved
//! relative to the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::density::{difference, LorentzianTerm, SpectralDensity};
use crate::error::{Error, Result};
use crate::quad::Tolerance;
use crate::{bounds::KindSelection, correlation::MethodChoice};

mod beta_serde {
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(b: &f64, s: S) -> Result<S::Ok, S::Error> {
        if b.is_infinite() {
            Repr::Text("inf".into()).serialize(s)
        } else {
            Repr::Num(*b).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" || t == "infinity" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(de::Error::custom(format!("beta must be a number or \"inf\", got \"{t}\""))),
        }
    }
}

/// Density given inline or by reference to a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DensityRef {
    File { file: PathBuf },
    Inline(SpectralDensity),
}

impl DensityRef {
    pub fn resolve(&self, base: Option<&Path>) -> Result<SpectralDensity> {
        match self {
            DensityRef::Inline(d) => Ok(d.clone()),
            DensityRef::File { file } => {
                let path = match base {
                    Some(b) if file.is_relative() => b.join(file),
                    _ => file.clone(),
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Config(format!("cannot read density file {}: {e}", path.display())))?;
                let d: SpectralDensity = serde_json::from_str(&text)?;
                Ok(d)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub density: DensityRef,
    #[serde(with = "beta_serde")]
    pub beta: f64,
    #[serde(default = "one")]
    pub lambda_sq: f64,
}

/// A variation, either as ΔJ directly or as approximation − reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<DensityRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<DensityRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approximation: Option<DensityRef>,
    #[serde(with = "beta_serde")]
    pub beta: f64,
    #[serde(default = "one")]
    pub lambda_sq: f64,
    #[serde(default = "one")]
    pub observable_norm: f64,
    #[serde(default)]
    pub coupling_absorbed: bool,
}

impl VariationConfig {
    pub fn delta_density(&self, base: Option<&Path>) -> Result<SpectralDensity> {
        match (&self.delta, &self.reference, &self.approximation) {
            (Some(d), None, None) => d.resolve(base),
            (None, Some(r), Some(a)) => Ok(difference(&a.resolve(base)?, &r.resolve(base)?)),
            _ => Err(Error::Config(
                "variation needs either `delta` or both `reference` and `approximation`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    /// Lorentzian terms with coupling absorbed; omitted means the built-in
    /// Meier–Tannor fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<LorentzianTerm>>,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default = "default_t_target")]
    pub t_target: f64,
    #[serde(default = "default_error_target")]
    pub error_target: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Sampling grid; with log spacing `min` must be > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    pub fn linear(min: f64, max: f64, points: usize) -> Self {
        Grid { min, max, points, spacing: Spacing::Linear }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.min.is_finite()
            && self.max.is_finite()
            && self.min >= 0.0
            && self.max > self.min
            && self.points >= 2
            && (self.spacing == Spacing::Linear || self.min > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "grid needs max > min ≥ 0 (min > 0 for log spacing) and points ≥ 2, got {self:?}"
            )))
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = self.points - 1;
        Ok((0..=n)
            .map(|i| {
                let f = i as f64 / n as f64;
                match (i, self.spacing) {
                    (0, _) => self.min,
                    (i, _) if i == n => self.max,
                    (_, Spacing::Linear) => self.min + (self.max - self.min) * f,
                    (_, Spacing::Log) => self.min * (self.max / self.min).powf(f),
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub abs: f64,
    pub rel: f64,
}

impl From<ToleranceConfig> for Tolerance {
    fn from(t: ToleranceConfig) -> Self {
        Tolerance::new(t.abs, t.rel)
    }
}

fn one() -> f64 {
    1.0
}

fn default_t_target() -> f64 {
    30.0
}

fn default_error_target() -> f64 {
    0.2
}

/// Top-level configuration. Each subcommand reads the blocks it needs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variation: Option<VariationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationConfig>,
    /// Time grid for correlation and bound curves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Grid>,
    /// Frequency grid for density evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindSelection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Directory used to resolve relative density file references.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = RunConfig::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.times {
            g.validate()?;
        }
        if let Some(g) = &self.frequencies {
            g.validate()?;
        }
        if let Some(t) = &self.tolerance {
            if !(t.abs > 0.0 && t.rel > 0.0) {
                return Err(Error::Config(format!("tolerances must be > 0, got {t:?}")));
            }
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::Config(format!("horizon must be finite and > 0, got {h}")));
            }
        }
        Ok(())
    }

    pub fn tol(&self) -> Tolerance {
        self.tolerance.map(Tolerance::from).unwrap_or_default()
    }

    pub fn base(&self) -> Option<&Path> {
        self.base_dir.as_deref()
    }
}
