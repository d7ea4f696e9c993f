//! Bath correlation functions and certified error bounds for approximate
//! spectral densities in the spin-boson model.
//!
//! - [`density`]: parametric J(ω) and their linear combinations
//! - [`correlation`]: ξ_J(t) in closed form or by oscillatory quadrature
//! - [`bounds`]: general, weak and strong bounds on observable errors
//! - [`heom`]: Matsubara-truncation certificates for Lorentzian baths
//! - [`config`], [`table`], [`cli`]: configuration, CSV output, subcommands

pub mod bounds;
pub mod cli;
pub mod config;
pub mod correlation;
pub mod density;
pub mod error;
pub mod heom;
pub mod jet;
pub mod quad;
pub mod special;
pub mod table;

pub use bounds::{ConditionStatus, DeltaXi, VariationSpec};
pub use correlation::{BathSpec, CorrelationFn, CorrelationMethod, MethodChoice, XiValue};
pub use density::{Component, SpectralDensity};
pub use error::{Error, Result};
pub use quad::Tolerance;
