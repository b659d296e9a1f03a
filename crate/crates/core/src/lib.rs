//! Langmuir birth-death processes.
//!
//! A Langmuir birth-death (LBD) chain lives on `0..=N` with linear
//! adsorption/desorption rates plus a noise term that vanishes at the
//! boundary (models M1, M2, M3). This crate provides:
//!
//! * [`model`]: model specifications and rate functions, plus the map from
//!   physical Langmuir constants `(d1, x, d2, C)` to `(c1, c2, c3)`;
//! * [`stationary`]: the exact stationary pmf by detailed balance, scaled
//!   moments, boundary masses and `Δ_N`;
//! * [`limit`]: the limit laws of `X_N / N` (LIG, reflected LIG, Beta),
//!   `Δ∞`, the incomplete-gamma sum and the gamma steady state of the
//!   boundary-free SDE;
//! * [`simulate`]: Gillespie simulation with occupation-time estimates and
//!   Euler-Maruyama paths of the stochastic Langmuir equation;
//! * [`convergence`]: distances and errors between the exact laws and
//!   their limits over a grid of `N`.
//!
//! ```
//! use lbd::model::{ModelId, ModelSpec};
//! use lbd::stationary::{stationary_pmf, boundary_masses};
//!
//! let spec = ModelSpec::new(ModelId::M1, 2.0, 1.0, 1.0, 1).unwrap();
//! let pmf = stationary_pmf(&spec).unwrap();
//! let (p0, p1) = boundary_masses(&pmf);
//! assert!((p0 - 1.0 / 3.0).abs() < 1e-14 && (p1 - 2.0 / 3.0).abs() < 1e-14);
//! ```

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod convergence;
pub mod error;
pub mod export;
pub mod limit;
pub mod model;
pub mod simulate;
pub mod special;
pub mod stationary;

pub use error::{LbdError, Result};
pub use limit::{LigParams, LimitLaw};
pub use model::{ModelId, ModelSpec, PhysicalParams};
pub use stationary::Pmf;

/// Crate version recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
