//! Limit laws of the scaled stationary distributions.
//!
//! * M1: `LIG(a, b)`, a gamma density truncated to `(0, 1)` mixed with an
//!   atom at 1 of weight `π_{a,b}`.
//! * M2: `1 - Z` is `LIG(b - a, b)`, so the atom sits at 0.
//! * M3: `Beta(a, b - a)`.
//!
//! with `a = c1 / c3` and `b = (c1 + c2) / c3`.

use rand::distributions::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};
use crate::model::{ModelId, PhysicalParams};
use crate::special::{ln_beta, ln_gamma, lower_incomplete_gamma, regularized_gamma_p, regularized_incomplete_beta};

/// Bisection tolerance, in `x`, for inverting the truncated gamma cdf.
pub const QUANTILE_TOL: f64 = 1e-12;

/// Parameters of `LIG(α, β)`; requires `β > α > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LigParams {
    pub alpha: f64,
    pub beta: f64,
}

impl LigParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && alpha > 0.0 && beta > alpha) {
            return Err(param_err(format!("LIG needs beta > alpha > 0, got alpha = {alpha}, beta = {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    /// `ln Γ(α, β) + ln(β - α) + β - α ln β`, i.e. `-ln Δ∞`.
    fn log_odds_continuous(&self) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        ln_lower_gamma(a, b) + (b - a).ln() + b - a * b.ln()
    }

    /// `P(α, βx) / P(α, β)`: cdf of the truncated gamma part.
    pub fn truncated_gamma_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        regularized_gamma_p(self.alpha, self.beta * x) / regularized_gamma_p(self.alpha, self.beta)
    }

    /// Density `β^α x^{α-1} e^{-βx} / Γ(α, β)` on `(0, 1)`.
    pub fn truncated_gamma_pdf(&self, x: f64) -> f64 {
        if !(x > 0.0 && x < 1.0) {
            return 0.0;
        }
        let (a, b) = (self.alpha, self.beta);
        (a * b.ln() + (a - 1.0) * x.ln() - b * x - ln_lower_gamma(a, b)).exp()
    }

    /// Inverse of [`truncated_gamma_cdf`](Self::truncated_gamma_cdf) by bisection.
    pub fn truncated_gamma_quantile(&self, q: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let target = q.clamp(0.0, 1.0) * regularized_gamma_p(self.alpha, self.beta);
        while hi - lo > QUANTILE_TOL {
            let mid = 0.5 * (lo + hi);
            if regularized_gamma_p(self.alpha, self.beta * mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn ln_lower_gamma(z: f64, x: f64) -> f64 {
    // ln γ(z, x) = ln Γ(z) + ln P(z, x); P stays well inside f64 range here
    ln_gamma(z) + regularized_gamma_p(z, x).ln()
}

/// Atom weight `π_{α,β} = β^α / (β^α + Γ(α, β)(β - α) e^β)`.
pub fn lig_pi(p: &LigParams) -> f64 {
    1.0 / (1.0 + p.log_odds_continuous().exp())
}

/// cdf of `LIG(α, β)`, right-continuous.
pub fn lig_cdf(p: &LigParams, x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        (1.0 - lig_pi(p)) * p.truncated_gamma_cdf(x)
    }
}

/// `P(Z < x)`; differs from [`lig_cdf`] only at `x = 1`.
pub fn lig_cdf_left(p: &LigParams, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x > 1.0 {
        1.0
    } else {
        (1.0 - lig_pi(p)) * p.truncated_gamma_cdf(x)
    }
}

/// `(1 - π) f_{α,β}(x)`: density of the absolutely continuous part.
pub fn lig_pdf_continuous_part(p: &LigParams, x: f64) -> f64 {
    (1.0 - lig_pi(p)) * p.truncated_gamma_pdf(x)
}

/// `E[Z^m]` via `E Z^{m+1} = ((m + α)/β) E Z^m - (m/β) π`.
pub fn lig_moment(p: &LigParams, m: usize) -> f64 {
    lig_moments(p, m)[m]
}

/// `E[Z^j]` for `j = 0..=max_m`.
pub fn lig_moments(p: &LigParams, max_m: usize) -> Vec<f64> {
    let pi = lig_pi(p);
    let mut out = Vec::with_capacity(max_m + 1);
    let mut mu = 1.0;
    out.push(mu);
    for m in 0..max_m {
        let mf = m as f64;
        mu = (mf + p.alpha) / p.beta * mu - mf / p.beta * pi;
        out.push(mu);
    }
    out
}

/// Draw `count` variates from `LIG(α, β)`.
///
/// The atom is emitted as exactly `1.0`; continuous draws invert the
/// truncated gamma cdf by bisection. Deterministic in `(seed, count)`.
pub fn lig_sample(p: &LigParams, count: usize, seed: u64) -> Vec<f64> {
    let pi = lig_pi(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let pick: f64 = Open01.sample(&mut rng);
            let u: f64 = Open01.sample(&mut rng);
            if pick < pi {
                1.0
            } else {
                p.truncated_gamma_quantile(u)
            }
        })
        .collect()
}

fn check_beta(a: f64, c: f64) -> Result<()> {
    if !(a.is_finite() && c.is_finite() && a > 0.0 && c > 0.0) {
        return Err(param_err(format!("Beta needs a > 0 and c > 0, got ({a}, {c})")));
    }
    Ok(())
}

/// `E[X^m]` for `X ~ Beta(a, c)` via `μ_{j+1} = (j + a)/(j + a + c) μ_j`.
pub fn beta_moment(a: f64, c: f64, m: usize) -> Result<f64> {
    check_beta(a, c)?;
    let b = a + c;
    Ok((0..m).fold(1.0, |mu, j| mu * (j as f64 + a) / (j as f64 + b)))
}

pub fn beta_cdf(a: f64, c: f64, x: f64) -> Result<f64> {
    check_beta(a, c)?;
    regularized_incomplete_beta(a, c, x)
}

pub fn beta_pdf(a: f64, c: f64, x: f64) -> Result<f64> {
    check_beta(a, c)?;
    if !(x > 0.0 && x < 1.0) {
        return Ok(0.0);
    }
    Ok(((a - 1.0) * x.ln() + (c - 1.0) * (1.0 - x).ln() - ln_beta(a, c)).exp())
}

/// The three limit laws, each exposing a cdf on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LimitLaw {
    /// `Z ~ LIG(a, b)`, atom at 1.
    LigAtTop(LigParams),
    /// `1 - Z ~ LIG(b - a, b)`; holds the reflected parameters, atom at 0.
    LigReflected(LigParams),
    /// `Z ~ Beta(a, c)` with `c = b - a`.
    BetaLaw { a: f64, c: f64 },
}

/// Limit law of `X_N / N` for the given model.
pub fn limit_law_for(model: ModelId, a: f64, b: f64) -> Result<LimitLaw> {
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(param_err(format!("limit law needs b > a > 0, got a = {a}, b = {b}")));
    }
    Ok(match model {
        ModelId::M1 => LimitLaw::LigAtTop(LigParams::new(a, b)?),
        ModelId::M2 => LimitLaw::LigReflected(LigParams::new(b - a, b)?),
        ModelId::M3 => LimitLaw::BetaLaw { a, c: b - a },
    })
}

impl LimitLaw {
    /// `P(Z <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            LimitLaw::LigAtTop(p) => lig_cdf(p, x),
            LimitLaw::LigReflected(p) => 1.0 - lig_cdf_left(p, 1.0 - x),
            LimitLaw::BetaLaw { a, c } => regularized_incomplete_beta(*a, *c, x).unwrap_or(f64::NAN),
        }
    }

    /// `P(Z < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match self {
            LimitLaw::LigAtTop(p) => lig_cdf_left(p, x),
            LimitLaw::LigReflected(p) => 1.0 - lig_cdf(p, 1.0 - x),
            LimitLaw::BetaLaw { .. } => self.cdf(x),
        }
    }

    /// Density of the absolutely continuous part.
    pub fn pdf_continuous(&self, x: f64) -> f64 {
        match self {
            LimitLaw::LigAtTop(p) => lig_pdf_continuous_part(p, x),
            LimitLaw::LigReflected(p) => lig_pdf_continuous_part(p, 1.0 - x),
            LimitLaw::BetaLaw { a, c } => beta_pdf(*a, *c, x).unwrap_or(f64::NAN),
        }
    }

    /// Location and weight of the point mass, if any.
    pub fn atom(&self) -> Option<(f64, f64)> {
        match self {
            LimitLaw::LigAtTop(p) => Some((1.0, lig_pi(p))),
            LimitLaw::LigReflected(p) => Some((0.0, lig_pi(p))),
            LimitLaw::BetaLaw { .. } => None,
        }
    }

    /// `E[Z^j]` for `j = 0..=max_m`.
    pub fn moments(&self, max_m: usize) -> Vec<f64> {
        match self {
            LimitLaw::LigAtTop(p) => lig_moments(p, max_m),
            LimitLaw::LigReflected(p) => {
                // E(1 - W)^m by binomial expansion
                let w = lig_moments(p, max_m);
                (0..=max_m)
                    .map(|m| {
                        let mut binom = 1.0;
                        let mut acc = 0.0;
                        for (j, wj) in w.iter().enumerate().take(m + 1) {
                            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                            acc += sign * binom * wj;
                            binom = binom * (m - j) as f64 / (j + 1) as f64;
                        }
                        acc
                    })
                    .collect()
            }
            LimitLaw::BetaLaw { a, c } => (0..=max_m).map(|m| beta_moment(*a, *c, m).unwrap_or(f64::NAN)).collect(),
        }
    }

    /// Short label without commas, safe as a CSV field.
    pub fn name(&self) -> String {
        match self {
            LimitLaw::LigAtTop(p) => format!("LIG({} {})", p.alpha, p.beta),
            LimitLaw::LigReflected(p) => format!("1-LIG({} {})", p.alpha, p.beta),
            LimitLaw::BetaLaw { a, c } => format!("Beta({a} {c})"),
        }
    }
}

/// Limit of `Δ_N`: `b^a / ((b - a) e^b Γ(a, b))`.
///
/// Satisfies `lig_pi(a, b) = Δ∞ / (1 + Δ∞)`.
pub fn delta_infinity(a: f64, b: f64) -> Result<f64> {
    let p = LigParams::new(a, b)?;
    Ok((-p.log_odds_continuous()).exp())
}

/// `N^{-α_N} Σ_{k=0}^{N} Γ(α_N + k)/k! (1 - β_N/N)^k`, evaluated in log space.
///
/// Convergence to [`lemma2_limit`] additionally needs `α_N ↓ α` with
/// `(α_N - α) log N → 0`; that condition is on the caller's sequence and is
/// not checked here.
pub fn lemma2_partial_sum(alpha_n: f64, beta_n: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(param_err("N must be >= 1"));
    }
    let nf = n as f64;
    if !(alpha_n > 0.0 && alpha_n.is_finite()) {
        return Err(param_err(format!("alpha_N must be > 0, got {alpha_n}")));
    }
    if !(beta_n > 0.0 && beta_n < nf) {
        return Err(param_err(format!("beta_N must lie in (0, N), got {beta_n} with N = {n}")));
    }
    let ln_r = (-beta_n / nf).ln_1p();
    let ln_scale = -alpha_n * nf.ln();
    let ln_g0 = ln_gamma(alpha_n);
    let mut sum = 0.0;
    // ln Γ(α + k) - ln k! accumulated as a running sum of ln((α + j)/(j + 1))
    let mut ln_ratio = ln_g0;
    for k in 0..=n {
        sum += (ln_ratio + k as f64 * ln_r + ln_scale).exp();
        let kf = k as f64;
        ln_ratio += ((alpha_n + kf) / (kf + 1.0)).ln();
    }
    Ok(sum)
}

/// `β^{-α} Γ(α, β) = ∫₀¹ x^{α-1} e^{-βx} dx`.
pub fn lemma2_limit(alpha: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(param_err(format!("beta must be > 0, got {beta}")));
    }
    Ok(lower_incomplete_gamma(alpha, beta)? * beta.powf(-alpha))
}

/// Stationary gamma law of the boundary-free stochastic Langmuir equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSteadyState {
    pub shape: f64,
    pub rate: f64,
}

impl GammaSteadyState {
    /// `shape = 2/C`, `rate = 2 (d1 x + d2) / (C d1 x)`.
    pub fn from_physical(p: &PhysicalParams) -> Self {
        let dx = p.d1 * p.x;
        Self { shape: 2.0 / p.c, rate: 2.0 * (dx + p.d2) / (p.c * dx) }
    }

    pub fn pdf(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        if u == 0.0 {
            return match self.shape.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => self.rate,
                _ => 0.0,
            };
        }
        let (k, r) = (self.shape, self.rate);
        (k * r.ln() + (k - 1.0) * u.ln() - r * u - ln_gamma(k)).exp()
    }

    pub fn cdf(&self, u: f64) -> f64 {
        regularized_gamma_p(self.shape, self.rate * u)
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }
}

/// Normalized stationary density of the boundary-free SDE at `u`.
pub fn gamma_steady_density(p: &PhysicalParams, u: f64) -> f64 {
    GammaSteadyState::from_physical(p).pdf(u)
}
