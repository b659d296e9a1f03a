//! Numerical checks that the scaled stationary law `Y_N = X_N / N`
//! approaches its limit: Kolmogorov distances, boundary atoms, `Δ_N` and
//! scaled moments over a grid of `N`.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, LbdError, Result};
use crate::export::{fmt_opt, fmt_real, write_table};
use crate::limit::{delta_infinity, limit_law_for, GammaSteadyState, LimitLaw};
use crate::model::{limit_params, ModelId, ModelSpec};
use crate::special::ln_gamma;
use crate::stationary::{boundary_masses, delta_n_from_pmf, scaled_moments, stationary_pmf, Pmf};

/// Dyadic default grid.
pub const DEFAULT_GRID: [usize; 5] = [250, 500, 1000, 2000, 4000];

/// Number of moments reported per row.
pub const REPORT_MOMENTS: usize = 4;

/// Largest moment order accepted by [`moment_convergence`].
pub const MAX_MOMENT_ORDER: usize = 15;

/// A cdf that may have jumps at known locations.
pub trait MixedCdf {
    fn cdf(&self, x: f64) -> f64;
    fn cdf_left(&self, x: f64) -> f64;
    fn jumps(&self) -> Vec<f64>;
}

impl MixedCdf for LimitLaw {
    fn cdf(&self, x: f64) -> f64 {
        LimitLaw::cdf(self, x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        LimitLaw::cdf_left(self, x)
    }
    fn jumps(&self) -> Vec<f64> {
        self.atom().map(|(x, _)| vec![x]).unwrap_or_default()
    }
}

impl MixedCdf for GammaSteadyState {
    fn cdf(&self, x: f64) -> f64 {
        GammaSteadyState::cdf(self, x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        GammaSteadyState::cdf(self, x)
    }
    fn jumps(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Per-atom gaps `(|F_N(k/N) - G(k/N)|, |F_N((k-1)/N) - G((k/N)^-)|)`.
pub fn cdf_gaps(pmf: &Pmf, law: &impl MixedCdf) -> Vec<(f64, f64)> {
    let n = pmf.n() as f64;
    let mut prev = 0.0;
    pmf.cdf()
        .into_iter()
        .enumerate()
        .map(|(k, f)| {
            let x = k as f64 / n;
            let gaps = ((f - law.cdf(x)).abs(), (prev - law.cdf_left(x)).abs());
            prev = f;
            gaps
        })
        .collect()
}

/// `sup_x |F_N(x) - G(x)|` for the cdf `F_N` of `Y_N`.
///
/// Between atoms of `Y_N` the empirical cdf is flat and `G` monotone, so
/// the supremum is attained at an atom or just left of one.
pub fn kolmogorov_distance(pmf: &Pmf, law: &impl MixedCdf) -> f64 {
    cdf_gaps(pmf, law).into_iter().map(|(a, b)| a.max(b)).fold(0.0, f64::max)
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `law`.
pub fn ks_statistic(samples: &[f64], law: &impl MixedCdf) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // ties share one step of the empirical cdf
        let x = xs[i];
        let mut j = i + 1;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        d = d.max((j as f64 / n - law.cdf(x)).abs());
        d = d.max((i as f64 / n - law.cdf_left(x)).abs());
        i = j;
    }
    for j in law.jumps() {
        let below = xs.partition_point(|x| *x < j) as f64 / n;
        let at = xs.partition_point(|x| *x <= j) as f64 / n;
        d = d.max((below - law.cdf_left(j)).abs()).max((at - law.cdf(j)).abs());
    }
    d
}

/// `½ Σ |p - q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(param_err(format!("length mismatch: {} vs {}", p.len(), q.len())));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `Γ(α + k) / (k! k^{α - 1})`, which tends to 1 as `k → ∞`.
pub fn gauss_ratio(alpha: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(param_err("k must be >= 1"));
    }
    if !(alpha > 0.0) {
        return Err(param_err(format!("alpha must be > 0, got {alpha}")));
    }
    let kf = k as f64;
    Ok((ln_gamma(alpha + kf) - ln_gamma(kf + 1.0) - (alpha - 1.0) * kf.ln()).exp())
}

/// `a_N = c1 N / (c3 N - c1)`.
pub fn a_n(c1: f64, c3: f64, n: usize) -> f64 {
    let nf = n as f64;
    c1 * nf / (c3 * nf - c1)
}

/// `b_N = (c1 + c2) N / (c3 N + c2)`.
pub fn b_n(c1: f64, c2: f64, c3: f64, n: usize) -> f64 {
    let nf = n as f64;
    (c1 + c2) * nf / (c3 * nf + c2)
}

/// `Δ_N` for M1 by the gamma-function route:
///
/// ```text
/// Δ_N = (b - a + N)/((b - a) N) · Γ(N + a_N)/(N! N^{a_N - 1}) · (1 - b_N/N)^N
///       / (N^{-a_N} Σ_{k<N} Γ(k + a_N)/k! (1 - b_N/N)^k)
/// ```
///
/// An algebraic alternative to [`crate::stationary::delta_n`]; needs
/// `c3 N > c1`.
pub fn delta_n_gamma_form(c1: f64, c2: f64, c3: f64, n: usize) -> Result<f64> {
    let (a, b) = limit_params(c1, c2, c3)?;
    let nf = n as f64;
    if !(c3 * nf > c1) {
        return Err(param_err(format!("gamma form needs c3 N > c1 (N = {n})")));
    }
    let an = a_n(c1, c3, n);
    let ln_r = (-b_n(c1, c2, c3, n) / nf).ln_1p();
    // ln of the terms Γ(k + a_N)/k! r^k, k = 0..N
    let mut ln_terms = Vec::with_capacity(n + 1);
    let mut ln_ratio = ln_gamma(an);
    for k in 0..=n {
        let kf = k as f64;
        ln_terms.push(ln_ratio + kf * ln_r);
        ln_ratio += ((an + kf) / (kf + 1.0)).ln();
    }
    let top = ln_terms[n];
    let below = &ln_terms[..n];
    let max = below.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ln_sum = max + below.iter().map(|t| (t - max).exp()).sum::<f64>().ln();
    let ln_prefactor = ((b - a + nf) / ((b - a) * nf)).ln() + nf.ln();
    Ok((ln_prefactor + top - ln_sum).exp())
}

/// A model with a grid of state-space sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub model: ModelId,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub grid: Vec<usize>,
}

impl Sweep {
    pub fn new(model: ModelId, c1: f64, c2: f64, c3: f64, grid: Vec<usize>) -> Result<Self> {
        ModelSpec::new(model, c1, c2, c3, 1)?;
        limit_params(c1, c2, c3)?;
        if grid.is_empty() {
            return Err(param_err("N grid is empty"));
        }
        if grid[0] == 0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(param_err("N grid must be positive and strictly increasing"));
        }
        Ok(Self { model, c1, c2, c3, grid })
    }

    pub fn limit_params(&self) -> (f64, f64) {
        (self.c1 / self.c3, (self.c1 + self.c2) / self.c3)
    }

    pub fn limit_law(&self) -> Result<LimitLaw> {
        let (a, b) = self.limit_params();
        limit_law_for(self.model, a, b)
    }

    pub fn spec(&self, n: usize) -> Result<ModelSpec> {
        ModelSpec::new(self.model, self.c1, self.c2, self.c3, n)
    }

    /// Apply `f` to every `(spec, pmf)` on the grid in parallel, keeping
    /// grid order.
    fn map_rows<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&ModelSpec, &Pmf) -> Result<T> + Sync,
    {
        self.grid
            .par_iter()
            .map(|&n| {
                let spec = self.spec(n)?;
                let pmf = stationary_pmf(&spec)?;
                f(&spec, &pmf)
            })
            .collect()
    }
}

/// Boundary atom versus its limiting weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomRow {
    pub n: usize,
    pub p_boundary: f64,
    pub target: f64,
    pub abs_err: f64,
}

/// `p(N)` (M1) or `p(0)` (M2) against the LIG atom weight.
pub fn atom_convergence(sweep: &Sweep) -> Result<Vec<AtomRow>> {
    let (_, target) = match sweep.limit_law()? {
        law @ (LimitLaw::LigAtTop(_) | LimitLaw::LigReflected(_)) => law.atom().expect("LIG has an atom"),
        LimitLaw::BetaLaw { .. } => {
            return Err(LbdError::NotApplicable("M3 limit has no atom".into()));
        }
    };
    let top = sweep.model == ModelId::M1;
    sweep.map_rows(|spec, pmf| {
        let (p0, pn) = boundary_masses(pmf);
        let p_boundary = if top { pn } else { p0 };
        Ok(AtomRow { n: spec.n(), p_boundary, target, abs_err: (p_boundary - target).abs() })
    })
}

/// Scaled moments `m = 1..=max_m` against the limit law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub n: usize,
    pub exact: Vec<f64>,
    pub limit: Vec<f64>,
    pub abs_err: Vec<f64>,
}

pub fn moment_convergence(sweep: &Sweep, max_m: usize) -> Result<Vec<MomentRow>> {
    if max_m > MAX_MOMENT_ORDER {
        return Err(param_err(format!("max_m must be <= {MAX_MOMENT_ORDER}")));
    }
    let limit = sweep.limit_law()?.moments(max_m)[1..].to_vec();
    sweep.map_rows(|spec, pmf| {
        let exact = scaled_moments(pmf, max_m).raw[1..].to_vec();
        let abs_err = exact.iter().zip(&limit).map(|(x, y)| (x - y).abs()).collect();
        Ok(MomentRow { n: spec.n(), exact, limit: limit.clone(), abs_err })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub n: usize,
    pub delta_n: f64,
    pub delta_inf: f64,
    pub abs_err: f64,
    /// `p(N)` from the same pmf, equal to `Δ_N / (1 + Δ_N)`.
    pub p_top: f64,
}

/// `Δ_N` from the exact pmf against its limit. M1 only.
pub fn delta_convergence(sweep: &Sweep) -> Result<Vec<DeltaRow>> {
    if sweep.model != ModelId::M1 {
        return Err(LbdError::NotApplicable(format!("Δ_N targets the M1 boundary, got {}", sweep.model)));
    }
    let (a, b) = sweep.limit_params();
    let delta_inf = delta_infinity(a, b)?;
    sweep.map_rows(|spec, pmf| {
        let d = delta_n_from_pmf(spec, pmf)?;
        Ok(DeltaRow {
            n: spec.n(),
            delta_n: d,
            delta_inf,
            abs_err: (d - delta_inf).abs(),
            p_top: boundary_masses(pmf).1,
        })
    })
}

/// One `N` of a convergence report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub kolmogorov: f64,
    /// `|p(N) - π|` (M1) or `|p(0) - π_{b-a,b}|` (M2).
    pub atom_err: Option<f64>,
    /// `|Δ_N - Δ∞|` (M1).
    pub delta_err: Option<f64>,
    /// `|E Y_N^m - E Z^m|`, `m = 1..=4`.
    pub moment_errs: [f64; REPORT_MOMENTS],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub model: ModelId,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub a: f64,
    pub b: f64,
    pub rows: Vec<ConvergenceRow>,
}

pub const REPORT_HEADER: [&str; 14] =
    ["model", "c1", "c2", "c3", "a", "b", "N", "ks", "atom_err", "delta_err", "m1_err", "m2_err", "m3_err", "m4_err"];

impl ConvergenceReport {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let rows = self.rows.iter().map(|r| {
            let mut row = vec![
                self.model.to_string(),
                fmt_real(self.c1),
                fmt_real(self.c2),
                fmt_real(self.c3),
                fmt_real(self.a),
                fmt_real(self.b),
                r.n.to_string(),
                fmt_real(r.kolmogorov),
                fmt_opt(r.atom_err),
                fmt_opt(r.delta_err),
            ];
            row.extend(r.moment_errs.iter().map(|e| fmt_real(*e)));
            row
        });
        write_table(w, &REPORT_HEADER, rows)
    }
}

/// Full report over the sweep grid; rows are computed in parallel.
pub fn convergence_report(sweep: &Sweep) -> Result<ConvergenceReport> {
    let law = sweep.limit_law()?;
    let (a, b) = sweep.limit_params();
    let limit_moments = law.moments(REPORT_MOMENTS);
    let atom = law.atom();
    let delta_inf = match sweep.model {
        ModelId::M1 => Some(delta_infinity(a, b)?),
        _ => None,
    };
    let rows = sweep.map_rows(|spec, pmf| {
        let (p0, pn) = boundary_masses(pmf);
        let atom_err = atom.map(|(loc, w)| (if loc == 1.0 { pn } else { p0 } - w).abs());
        let delta_err = match delta_inf {
            Some(d) => Some((delta_n_from_pmf(spec, pmf)? - d).abs()),
            None => None,
        };
        let exact = scaled_moments(pmf, REPORT_MOMENTS);
        let mut moment_errs = [0.0; REPORT_MOMENTS];
        for (m, e) in moment_errs.iter_mut().enumerate() {
            *e = (exact.raw[m + 1] - limit_moments[m + 1]).abs();
        }
        Ok(ConvergenceRow { n: spec.n(), kolmogorov: kolmogorov_distance(pmf, &law), atom_err, delta_err, moment_errs })
    })?;
    Ok(ConvergenceReport { model: sweep.model, c1: sweep.c1, c2: sweep.c2, c3: sweep.c3, a, b, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::LigParams;
    use crate::stationary::delta_n;
    use approx::assert_relative_eq;

    fn unit_sweep(model: ModelId, grid: &[usize]) -> Sweep {
        Sweep::new(model, 1.0, 1.0, 1.0, grid.to_vec()).unwrap()
    }

    #[test]
    fn discretized_law_has_zero_gap_at_atoms() {
        let law = limit_law_for(ModelId::M1, 1.0, 2.0).unwrap();
        let n = 50;
        let probs: Vec<f64> = (0..=n)
            .map(|k| {
                let x = k as f64 / n as f64;
                let prev = if k == 0 { 0.0 } else { law.cdf((k - 1) as f64 / n as f64) };
                law.cdf(x) - prev
            })
            .collect();
        let pmf = Pmf::from_probs(&probs).unwrap();
        for (at, _) in cdf_gaps(&pmf, &law) {
            assert!(at < 1e-14);
        }
    }

    #[test]
    fn uniform_staircase_distance() {
        let law = limit_law_for(ModelId::M3, 1.0, 2.0).unwrap();
        for n in [4, 10, 99] {
            let pmf = Pmf::from_probs(&vec![1.0; n + 1]).unwrap();
            let d = kolmogorov_distance(&pmf, &law);
            assert!(d <= 1.0 / (n as f64 + 1.0) + 1e-14);
            assert_relative_eq!(d, 1.0 / (n as f64 + 1.0), max_relative = 1e-10);
        }
    }

    #[test]
    fn ks_statistic_handles_atoms() {
        let law = LimitLaw::LigAtTop(LigParams::new(1.0, 2.0).unwrap());
        // all mass exactly at 1 sees only the continuous part mismatch
        let d = ks_statistic(&[1.0; 10], &law);
        assert_relative_eq!(d, law.cdf_left(1.0), epsilon = 1e-14);
        let g = GammaSteadyState { shape: 1.0, rate: 2.0 };
        let d = ks_statistic(&[0.0, 10.0], &g);
        assert_relative_eq!(d, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn total_variation_basics() {
        assert_eq!(total_variation(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
        assert!(total_variation(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn gauss_ratio_examples() {
        for k in [1, 7, 1000] {
            assert_eq!(gauss_ratio(1.0, k).unwrap(), 1.0);
            assert_relative_eq!(gauss_ratio(2.0, k).unwrap(), (k as f64 + 1.0) / k as f64, max_relative = 1e-12);
        }
        let errs: Vec<f64> = [10, 100, 1000].iter().map(|k| (gauss_ratio(0.5, *k).unwrap() - 1.0).abs()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(gauss_ratio(0.5, 0).is_err());
    }

    #[test]
    fn gamma_form_matches_pmf_route() {
        for (c1, c2, c3) in [(1.0, 1.0, 1.0), (2.0, 3.0, 1.0), (0.5, 2.0, 1.5)] {
            for n in [5, 60, 700] {
                let spec = ModelSpec::new(ModelId::M1, c1, c2, c3, n).unwrap();
                let exact = delta_n(&spec).unwrap();
                let gamma = delta_n_gamma_form(c1, c2, c3, n).unwrap();
                assert_relative_eq!(exact, gamma, max_relative = 1e-9);
            }
        }
        assert!(delta_n_gamma_form(2.0, 1.0, 1.0, 2).is_err());
    }

    #[test]
    fn sweep_validation() {
        assert!(Sweep::new(ModelId::M1, 1.0, 1.0, 1.0, vec![]).is_err());
        assert!(Sweep::new(ModelId::M1, 1.0, 1.0, 1.0, vec![10, 10]).is_err());
        assert!(Sweep::new(ModelId::M1, 1.0, 1.0, 0.0, vec![10]).is_err());
        assert!(Sweep::new(ModelId::M1, 1.0, 1.0, 1.0, vec![0, 10]).is_err());
    }

    #[test]
    fn atom_targets() {
        let rows = atom_convergence(&unit_sweep(ModelId::M1, &[50])).unwrap();
        assert_relative_eq!(rows[0].target, 0.238_405_844_044_235_1, max_relative = 1e-12);
        let rows = atom_convergence(&unit_sweep(ModelId::M2, &[50])).unwrap();
        assert_relative_eq!(rows[0].target, 0.238_405_844_044_235_1, max_relative = 1e-12);
        assert!(matches!(atom_convergence(&unit_sweep(ModelId::M3, &[50])), Err(LbdError::NotApplicable(_))));
    }

    #[test]
    fn moment_rows() {
        for model in ModelId::ALL {
            for row in moment_convergence(&unit_sweep(model, &[10, 100]), 3).unwrap() {
                assert!(row.abs_err[0] <= 1e-10);
                assert_eq!(row.exact.len(), 3);
            }
        }
        let rows = moment_convergence(&unit_sweep(ModelId::M1, &[250, 4000]), 2).unwrap();
        assert_relative_eq!(rows[0].limit[1], 0.380_797_077_977_882_44, max_relative = 1e-12);
        assert!(rows[1].abs_err[1] < rows[0].abs_err[1]);
        let rows = moment_convergence(&unit_sweep(ModelId::M3, &[250, 4000]), 2).unwrap();
        assert_relative_eq!(rows[0].limit[1], 1.0 / 3.0, epsilon = 1e-15);
        assert!(moment_convergence(&unit_sweep(ModelId::M1, &[10]), 16).is_err());
    }

    #[test]
    fn delta_rows() {
        let rows = delta_convergence(&unit_sweep(ModelId::M1, &[20, 200])).unwrap();
        for r in &rows {
            assert_relative_eq!(r.delta_inf, 0.313_035_285_499_331_3, max_relative = 1e-12);
            assert!((r.delta_n / (1.0 + r.delta_n) - r.p_top).abs() < 1e-12);
        }
        assert!(matches!(delta_convergence(&unit_sweep(ModelId::M2, &[20])), Err(LbdError::NotApplicable(_))));
    }

    #[test]
    fn report_shape() {
        let rep = convergence_report(&unit_sweep(ModelId::M3, &[20, 40])).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.rows.iter().all(|r| r.atom_err.is_none() && r.delta_err.is_none()));
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), REPORT_HEADER.join(","));
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 14);
    }
}
