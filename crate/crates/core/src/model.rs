//! Langmuir birth-death models and their rate functions.
//!
//! A model lives on the states `0..=N` with
//!
//! ```text
//! b(k) = c1 (N - k) + C(k, N)
//! d(k) = c2 k       + C(k, N)
//! ```
//!
//! where the noise term `C` is one of three forms:
//!
//! | model | `C(k, N)`           | boundary                |
//! |-------|---------------------|-------------------------|
//! | M1    | `c3 N k`            | `C(N, N) = 0`           |
//! | M2    | `c3 N (N - k)`      | `C(0, N) = 0`           |
//! | M3    | `c3 k (N - k)`      | vanishes at both ends   |
//!
//! `c3 = 0` gives the plain linear chain whose stationary law is
//! `Binomial(N, c1 / (c1 + c2))`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param_err, LbdError, Result};

/// Physical constants of the stochastic Langmuir equation with linear noise
/// `g(u) = C d1 x u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Forward adsorption rate constant.
    pub d1: f64,
    /// Target concentration.
    pub x: f64,
    /// Desorption rate constant.
    pub d2: f64,
    /// Noise amplitude.
    #[serde(rename = "C")]
    pub c: f64,
}

impl PhysicalParams {
    pub fn new(d1: f64, x: f64, d2: f64, c: f64) -> Result<Self> {
        for (name, v) in [("d1", d1), ("x", x), ("d2", d2), ("C", c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(param_err(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(Self { d1, x, d2, c })
    }

    /// Model constants `(c1, c2, c3) = (d1 x, d2, C d1 x / 2)`.
    pub fn model_constants(&self) -> (f64, f64, f64) {
        let c1 = self.d1 * self.x;
        (c1, self.d2, self.c * c1 / 2.0)
    }

    /// Inverse of [`model_constants`](Self::model_constants) with `x = 1`.
    ///
    /// The SDE only depends on `d1 x`, so this loses nothing for simulation.
    pub fn from_model_constants(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        if !(c3 > 0.0) {
            return Err(param_err("c3 must be > 0 to recover a noise amplitude"));
        }
        Self::new(c1, 1.0, c2, 2.0 * c3 / c1)
    }
}

/// Map physical Langmuir parameters to `(c1, c2, c3)`.
pub fn map_physical_params(p: &PhysicalParams) -> Result<(f64, f64, f64)> {
    let p = PhysicalParams::new(p.d1, p.x, p.d2, p.c)?;
    Ok(p.model_constants())
}

/// Which noise term the chain carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelId {
    M1,
    M2,
    M3,
}

impl ModelId {
    pub const ALL: [ModelId; 3] = [ModelId::M1, ModelId::M2, ModelId::M3];
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelId::M1 => "M1",
            ModelId::M2 => "M2",
            ModelId::M3 => "M3",
        };
        f.write_str(s)
    }
}

impl FromStr for ModelId {
    type Err = LbdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "M1" | "1" => Ok(ModelId::M1),
            "M2" | "2" => Ok(ModelId::M2),
            "M3" | "3" => Ok(ModelId::M3),
            _ => Err(param_err(format!("unknown model '{s}', expected M1, M2 or M3"))),
        }
    }
}

/// A validated model: identity, constants and state-space size.
///
/// Fields are private so that every instance satisfies `c1 > 0`, `c2 > 0`,
/// `c3 >= 0` and `N >= 1`; rate evaluation then needs no checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelSpec", into = "RawModelSpec")]
pub struct ModelSpec {
    model: ModelId,
    c1: f64,
    c2: f64,
    c3: f64,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct RawModelSpec {
    model: ModelId,
    c1: f64,
    c2: f64,
    c3: f64,
    #[serde(rename = "N")]
    n: usize,
}

impl TryFrom<RawModelSpec> for ModelSpec {
    type Error = LbdError;

    fn try_from(r: RawModelSpec) -> Result<Self> {
        ModelSpec::new(r.model, r.c1, r.c2, r.c3, r.n)
    }
}

impl From<ModelSpec> for RawModelSpec {
    fn from(s: ModelSpec) -> Self {
        RawModelSpec { model: s.model, c1: s.c1, c2: s.c2, c3: s.c3, n: s.n }
    }
}

impl ModelSpec {
    pub fn new(model: ModelId, c1: f64, c2: f64, c3: f64, n: usize) -> Result<Self> {
        if !(c1.is_finite() && c1 > 0.0) {
            return Err(param_err(format!("c1 must be finite and > 0, got {c1}")));
        }
        if !(c2.is_finite() && c2 > 0.0) {
            return Err(param_err(format!("c2 must be finite and > 0, got {c2}")));
        }
        if !(c3.is_finite() && c3 >= 0.0) {
            return Err(param_err(format!("c3 must be finite and >= 0, got {c3}")));
        }
        if n == 0 {
            return Err(param_err("N must be >= 1"));
        }
        Ok(Self { model, c1, c2, c3, n })
    }

    /// Build a model from physical parameters through [`map_physical_params`].
    pub fn from_physical(model: ModelId, p: &PhysicalParams, n: usize) -> Result<Self> {
        let (c1, c2, c3) = map_physical_params(p)?;
        Self::new(model, c1, c2, c3, n)
    }

    pub fn model(&self) -> ModelId {
        self.model
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn c3(&self) -> f64 {
        self.c3
    }
    pub fn n(&self) -> usize {
        self.n
    }

    /// Same constants, different state-space size.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.model, self.c1, self.c2, self.c3, n)
    }

    /// Limit-law parameters `(a, b) = (c1 / c3, (c1 + c2) / c3)`.
    pub fn limit_params(&self) -> Result<(f64, f64)> {
        limit_params(self.c1, self.c2, self.c3)
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k > self.n {
            Err(LbdError::Index { k, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Noise term `C(k, N)`.
    pub fn noise_term(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        Ok(self.noise_unchecked(k))
    }

    pub fn birth_rate(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        Ok(self.birth_unchecked(k))
    }

    pub fn death_rate(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        Ok(self.death_unchecked(k))
    }

    #[inline]
    pub(crate) fn noise_unchecked(&self, k: usize) -> f64 {
        let n = self.n;
        let (kf, nf) = (k as f64, n as f64);
        match self.model {
            ModelId::M1 if k < n => self.c3 * nf * kf,
            ModelId::M2 if k > 0 => self.c3 * nf * (nf - kf),
            ModelId::M3 => self.c3 * kf * (nf - kf),
            _ => 0.0,
        }
    }

    #[inline]
    pub(crate) fn birth_unchecked(&self, k: usize) -> f64 {
        self.c1 * (self.n - k) as f64 + self.noise_unchecked(k)
    }

    #[inline]
    pub(crate) fn death_unchecked(&self, k: usize) -> f64 {
        self.c2 * k as f64 + self.noise_unchecked(k)
    }
}

/// `(a, b) = (c1 / c3, (c1 + c2) / c3)`; requires `c3 > 0`.
pub fn limit_params(c1: f64, c2: f64, c3: f64) -> Result<(f64, f64)> {
    if !(c3 > 0.0) {
        return Err(param_err("limit parameters need c3 > 0"));
    }
    Ok((c1 / c3, (c1 + c2) / c3))
}
