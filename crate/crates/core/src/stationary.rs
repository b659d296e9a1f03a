//! Exact stationary distribution of a birth-death chain on `0..=N`.
//!
//! The chain is reversible, so the stationary pmf satisfies detailed balance
//! `p(k+1) d(k+1) = p(k) b(k)`. Unnormalized log-weights are the cumulative
//! sums of `ln b(k) - ln d(k+1)`; probabilities follow by log-sum-exp.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{param_err, LbdError, Result};
use crate::export::{fmt_real, write_table};
use crate::model::ModelSpec;

/// Probability mass function on `0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    log_weights: Vec<f64>,
    probs: Vec<f64>,
}

impl Pmf {
    /// Normalize a vector of log-weights.
    pub fn from_log_weights(log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.len() < 2 {
            return Err(param_err("a pmf needs at least two states"));
        }
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(param_err("log-weights must contain a finite maximum"));
        }
        let lse = max + log_weights.iter().map(|w| (w - max).exp()).sum::<f64>().ln();
        let probs = log_weights.iter().map(|w| (w - lse).exp()).collect();
        Ok(Self { log_weights, probs })
    }

    /// Wrap explicit probabilities; they are renormalized to sum to one.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(param_err("probabilities must be finite and >= 0"));
        }
        Self::from_log_weights(probs.iter().map(|p| p.ln()).collect())
    }

    /// Largest state `N`.
    pub fn n(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn n_states(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// `P(X <= k)` for every `k`.
    pub fn cdf(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    /// CSV with columns `k, prob, k_over_N, log_weight`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let n = self.n() as f64;
        let rows = self
            .probs
            .iter()
            .zip(&self.log_weights)
            .enumerate()
            .map(|(k, (p, lw))| vec![k.to_string(), fmt_real(*p), fmt_real(k as f64 / n), fmt_real(*lw)]);
        write_table(w, &["k", "prob", "k_over_N", "log_weight"], rows)
    }
}

/// Stationary pmf of the chain described by `spec`.
pub fn stationary_pmf(spec: &ModelSpec) -> Result<Pmf> {
    let n = spec.n();
    let mut log_weights = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    log_weights.push(acc);
    for k in 0..n {
        let b = spec.birth_unchecked(k);
        let d = spec.death_unchecked(k + 1);
        if !(d > 0.0) {
            return Err(LbdError::Irreducible(format!("death rate vanishes at state {}", k + 1)));
        }
        if !(b > 0.0) {
            return Err(LbdError::Irreducible(format!("birth rate vanishes at state {k}")));
        }
        acc += b.ln() - d.ln();
        log_weights.push(acc);
    }
    Pmf::from_log_weights(log_weights)
}

/// Moments of the scaled variable `X / N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    /// `raw[m] = E[(X/N)^m]` for `m = 0..=order`.
    pub raw: Vec<f64>,
}

impl MomentSet {
    pub fn order(&self) -> usize {
        self.raw.len() - 1
    }
}

/// `E[(X/N)^m]` for `m = 0..=order`, accumulated in scaled form.
pub fn scaled_moments(pmf: &Pmf, order: usize) -> MomentSet {
    let n = pmf.n() as f64;
    let mut raw = vec![0.0; order + 1];
    for (k, p) in pmf.probs().iter().enumerate() {
        let x = k as f64 / n;
        let mut pow = *p;
        for r in raw.iter_mut() {
            *r += pow;
            pow *= x;
        }
    }
    raw[0] = 1.0;
    MomentSet { raw }
}

/// `(P(X = 0), P(X = N))`.
pub fn boundary_masses(pmf: &Pmf) -> (f64, f64) {
    let p = pmf.probs();
    (p[0], p[p.len() - 1])
}

/// `Δ_N = [p(N-1) b(N-1) / d(N)] / Σ_{k<N} p(k)`, so that
/// `p(N) = Δ_N / (Δ_N + 1)`.
pub fn delta_n(spec: &ModelSpec) -> Result<f64> {
    let pmf = stationary_pmf(spec)?;
    delta_n_from_pmf(spec, &pmf)
}

/// [`delta_n`] reusing an already computed pmf of the same spec.
pub fn delta_n_from_pmf(spec: &ModelSpec, pmf: &Pmf) -> Result<f64> {
    let n = spec.n();
    if pmf.n() != n {
        return Err(param_err(format!("pmf has N = {}, spec has N = {n}", pmf.n())));
    }
    let d_top = spec.death_unchecked(n);
    if !(d_top > 0.0) {
        return Err(LbdError::DegenerateBoundary(format!("d(N) = {d_top}")));
    }
    let p = pmf.probs();
    let below: f64 = p[..n].iter().sum();
    Ok(p[n - 1] * spec.birth_unchecked(n - 1) / d_top / below)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelId;
    use approx::assert_relative_eq;

    fn spec(model: ModelId, c1: f64, c2: f64, c3: f64, n: usize) -> ModelSpec {
        ModelSpec::new(model, c1, c2, c3, n).unwrap()
    }

    fn assert_probs(pmf: &Pmf, expect: &[f64]) {
        assert_eq!(pmf.n_states(), expect.len());
        for (p, e) in pmf.probs().iter().zip(expect) {
            assert_relative_eq!(*p, *e, epsilon = 1e-14);
        }
    }

    #[test]
    fn small_examples() {
        let third = 1.0 / 3.0;
        assert_probs(&stationary_pmf(&spec(ModelId::M3, 1.0, 1.0, 1.0, 2)).unwrap(), &[third; 3]);
        assert_probs(&stationary_pmf(&spec(ModelId::M1, 2.0, 1.0, 1.0, 1)).unwrap(), &[third, 2.0 * third]);
        let binom: Vec<f64> = [1.0, 4.0, 6.0, 4.0, 1.0].iter().map(|c| c / 16.0).collect();
        for m in ModelId::ALL {
            assert_probs(&stationary_pmf(&spec(m, 1.0, 1.0, 0.0, 4)).unwrap(), &binom);
        }
    }

    #[test]
    fn moments_examples() {
        let uniform = Pmf::from_probs(&[1.0, 1.0, 1.0]).unwrap();
        let m = scaled_moments(&uniform, 3);
        assert_eq!(m.order(), 3);
        assert_eq!(m.raw[0], 1.0);
        assert_relative_eq!(m.raw[1], 0.5, epsilon = 1e-15);
        for n in [3, 17, 200] {
            let pmf = stationary_pmf(&spec(ModelId::M1, 1.0, 1.0, 2.5, n)).unwrap();
            assert_relative_eq!(scaled_moments(&pmf, 1).raw[1], 0.5, max_relative = 1e-12);
        }
        let z = scaled_moments(&uniform, 0);
        assert_eq!(z.raw, vec![1.0]);
    }

    #[test]
    fn boundary_examples() {
        let uniform = Pmf::from_probs(&[1.0, 1.0, 1.0]).unwrap();
        let (p0, pn) = boundary_masses(&uniform);
        assert_relative_eq!(p0, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(pn, 1.0 / 3.0, epsilon = 1e-15);
        let (p0, pn) = boundary_masses(&stationary_pmf(&spec(ModelId::M1, 2.0, 1.0, 1.0, 1)).unwrap());
        assert_relative_eq!(p0, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(pn, 2.0 / 3.0, epsilon = 1e-15);
        let (p0, pn) = boundary_masses(&stationary_pmf(&spec(ModelId::M3, 1.0, 1.0, 1.0, 2)).unwrap());
        assert_relative_eq!(p0, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(pn, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn delta_examples() {
        let s = spec(ModelId::M1, 2.0, 1.0, 1.0, 1);
        assert_relative_eq!(delta_n(&s).unwrap(), 2.0, epsilon = 1e-14);
        for s in [
            spec(ModelId::M1, 1.0, 1.0, 1.0, 300),
            spec(ModelId::M2, 0.5, 2.0, 1.0, 40),
            spec(ModelId::M3, 2.0, 0.5, 0.5, 77),
        ] {
            let pmf = stationary_pmf(&s).unwrap();
            let d = delta_n_from_pmf(&s, &pmf).unwrap();
            assert!((d / (d + 1.0) - boundary_masses(&pmf).1).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_rejects_mismatched_pmf() {
        let s = spec(ModelId::M1, 1.0, 1.0, 1.0, 5);
        let pmf = stationary_pmf(&s.with_n(6).unwrap()).unwrap();
        assert!(delta_n_from_pmf(&s, &pmf).is_err());
    }

    #[test]
    fn large_n_stays_normalized() {
        let pmf = stationary_pmf(&spec(ModelId::M1, 1.0, 1.0, 1.0, 1_000_000)).unwrap();
        let total: f64 = pmf.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(pmf.probs().iter().all(|p| *p >= 0.0));
    }

    #[test]
    fn pmf_validation() {
        assert!(Pmf::from_probs(&[1.0]).is_err());
        assert!(Pmf::from_probs(&[0.5, -0.1, 0.6]).is_err());
        assert!(Pmf::from_probs(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn csv_layout() {
        let pmf = stationary_pmf(&spec(ModelId::M3, 1.0, 1.0, 1.0, 2)).unwrap();
        let mut buf = Vec::new();
        pmf.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "k,prob,k_over_N,log_weight");
        assert_eq!(lines.len(), 4);
        let cols: Vec<_> = lines[2].split(',').collect();
        assert_eq!(cols[0], "1");
        assert_relative_eq!(cols[1].parse::<f64>().unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(cols[2].parse::<f64>().unwrap(), 0.5);
    }
}
