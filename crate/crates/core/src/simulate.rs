//! Stochastic simulation.
//!
//! * Gillespie direct method for the birth-death chain, with an
//!   occupation-time estimator of its stationary law.
//! * Euler-Maruyama (Itô) integration of the boundary-free stochastic
//!   Langmuir equation `du = [d1x - (d1x + d2) u] dt + sqrt(g(u)) dW` with
//!   `g(u) = C d1 x u`.
//!
//! All randomness comes from a seeded ChaCha8 stream, so a run is a pure
//! function of its inputs.

use std::io::{self, Write};

use rand::distributions::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, LbdError, Result};
use crate::export::{fmt_real, write_table};
use crate::model::{ModelSpec, PhysicalParams};

/// Name recorded in output metadata for the generator behind every run.
pub const RNG_NAME: &str = "chacha8";

/// Stored trajectories are capped at this many events.
pub const MAX_STORED_EVENTS: usize = 10_000_000;

/// Default burn-in as a fraction of the simulated time.
pub const DEFAULT_BURN_IN_FRACTION: f64 = 0.2;

pub const SDE_SCHEME: &str = "euler-maruyama-ito";

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws in the open interval (0, 1).
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    Open01.sample(rng)
}

/// A jump path of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `(time, state)` pairs; the first is `(0, k0)`.
    pub events: Vec<(f64, usize)>,
    /// End of the observation window.
    pub t_end: f64,
    /// Largest state of the chain.
    pub n: usize,
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let rows = self.events.iter().map(|(t, k)| vec![fmt_real(*t), k.to_string()]);
        write_table(w, &["time", "state"], rows)
    }
}

/// Run the direct method and hand every event, starting with `(0, k0)`, to
/// `on_event`.
fn ssa_drive<F>(spec: &ModelSpec, k0: usize, t_max: f64, seed: u64, mut on_event: F) -> Result<()>
where
    F: FnMut(f64, usize) -> Result<()>,
{
    let n = spec.n();
    if k0 > n {
        return Err(LbdError::Index { k: k0, n });
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(param_err(format!("t_max must be finite and > 0, got {t_max}")));
    }
    let mut rng = rng(seed);
    let mut t = 0.0;
    let mut k = k0;
    on_event(t, k)?;
    loop {
        let b = spec.birth_unchecked(k);
        let d = spec.death_unchecked(k);
        let total = b + d;
        if !(total > 0.0) {
            return Err(LbdError::Degenerate(k));
        }
        t += -uniform(&mut rng).ln() / total;
        if t > t_max {
            return Ok(());
        }
        // rates vanish outward at 0 and N, so k stays in range
        if uniform(&mut rng) * total < b {
            k += 1;
        } else {
            k -= 1;
        }
        on_event(t, k)?;
    }
}

/// Simulate the chain on `[0, t_max]` from `k0`, storing every event.
///
/// Fails with [`LbdError::TooManyEvents`] past [`MAX_STORED_EVENTS`]; use
/// [`gillespie_occupation`] for long runs.
pub fn gillespie_run(spec: &ModelSpec, k0: usize, t_max: f64, seed: u64) -> Result<Trajectory> {
    let mut events = Vec::new();
    ssa_drive(spec, k0, t_max, seed, |t, k| {
        if events.len() >= MAX_STORED_EVENTS {
            return Err(LbdError::TooManyEvents(MAX_STORED_EVENTS));
        }
        events.push((t, k));
        Ok(())
    })?;
    Ok(Trajectory { events, t_end: t_max, n: spec.n() })
}

/// Occupation-time estimate of the stationary law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPmf {
    pub probs: Vec<f64>,
    /// Discarded initial time.
    pub t_burn: f64,
    /// Time accumulated into `probs`.
    pub t_used: f64,
}

impl EmpiricalPmf {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let n = (self.probs.len() - 1) as f64;
        let rows =
            self.probs.iter().enumerate().map(|(k, p)| vec![k.to_string(), fmt_real(*p), fmt_real(k as f64 / n)]);
        write_table(w, &["k", "prob", "k_over_N"], rows)
    }
}

/// Streams events into per-state holding times after a burn-in.
struct OccupationAccumulator {
    burn_in: f64,
    time_in: Vec<f64>,
    last: Option<(f64, usize)>,
}

impl OccupationAccumulator {
    fn new(n: usize, burn_in: f64) -> Self {
        Self { burn_in, time_in: vec![0.0; n + 1], last: None }
    }

    fn hold_until(&mut self, t: f64) {
        if let Some((t0, k)) = self.last {
            let start = t0.max(self.burn_in);
            if t > start {
                self.time_in[k] += t - start;
            }
        }
    }

    fn push(&mut self, t: f64, k: usize) {
        self.hold_until(t);
        self.last = Some((t, k));
    }

    fn finish(mut self, t_end: f64) -> EmpiricalPmf {
        self.hold_until(t_end);
        let t_used = t_end - self.burn_in;
        let probs = self.time_in.iter().map(|x| x / t_used).collect();
        EmpiricalPmf { probs, t_burn: self.burn_in, t_used }
    }
}

fn check_window(burn_in: f64, t_end: f64) -> Result<()> {
    if !(burn_in >= 0.0 && burn_in < t_end) {
        return Err(LbdError::Window { burn_in, t_end });
    }
    Ok(())
}

/// `probs[k]` = time spent in `k` after `burn_in`, over `t_end - burn_in`.
pub fn occupation_pmf(traj: &Trajectory, burn_in: f64) -> Result<EmpiricalPmf> {
    check_window(burn_in, traj.t_end)?;
    let mut acc = OccupationAccumulator::new(traj.n, burn_in);
    for &(t, k) in &traj.events {
        acc.push(t, k);
    }
    Ok(acc.finish(traj.t_end))
}

/// Same estimate as `occupation_pmf(gillespie_run(..))` without storing the
/// path; memory is `O(N)` regardless of the event count.
pub fn gillespie_occupation(spec: &ModelSpec, k0: usize, t_max: f64, burn_in: f64, seed: u64) -> Result<EmpiricalPmf> {
    check_window(burn_in, t_max)?;
    let mut acc = OccupationAccumulator::new(spec.n(), burn_in);
    ssa_drive(spec, k0, t_max, seed, |t, k| {
        acc.push(t, k);
        Ok(())
    })?;
    Ok(acc.finish(t_max))
}

/// Independent replicas, one per seed, run in parallel; output order
/// follows `seeds`.
pub fn gillespie_replicas(
    spec: &ModelSpec,
    k0: usize,
    t_max: f64,
    burn_in: f64,
    seeds: &[u64],
) -> Result<Vec<EmpiricalPmf>> {
    seeds.par_iter().map(|&s| gillespie_occupation(spec, k0, t_max, burn_in, s)).collect()
}

/// Pool replicas, weighting each by its accumulated time.
pub fn aggregate_occupation(parts: &[EmpiricalPmf]) -> Result<EmpiricalPmf> {
    let first = parts.first().ok_or_else(|| param_err("nothing to aggregate"))?;
    let len = first.probs.len();
    if parts.iter().any(|p| p.probs.len() != len) {
        return Err(param_err("replicas have different state spaces"));
    }
    let t_used: f64 = parts.iter().map(|p| p.t_used).sum();
    let probs = (0..len).map(|k| parts.iter().map(|p| p.probs[k] * p.t_used).sum::<f64>() / t_used).collect();
    let t_burn = parts.iter().map(|p| p.t_burn).sum();
    Ok(EmpiricalPmf { probs, t_burn, t_used })
}

/// Linear drift and linear noise: `du = (production - decay u) dt + sqrt(noise u) dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdeModel {
    pub production: f64,
    pub decay: f64,
    pub noise: f64,
}

impl SdeModel {
    pub fn from_physical(p: &PhysicalParams) -> Self {
        let dx = p.d1 * p.x;
        Self { production: dx, decay: dx + p.d2, noise: p.c * dx }
    }

    /// `g ≡ 0`: the deterministic Langmuir equation.
    pub fn deterministic(d1x: f64, d2: f64) -> Self {
        Self { production: d1x, decay: d1x + d2, noise: 0.0 }
    }

    /// Solution of the noiseless equation from `u0`.
    pub fn deterministic_solution(&self, u0: f64, t: f64) -> f64 {
        let eq = self.production / self.decay;
        eq + (u0 - eq) * (-self.decay * t).exp()
    }
}

/// A discretized SDE path on the uniform grid `0, dt, 2dt, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdePath {
    pub dt: f64,
    pub values: Vec<f64>,
    pub scheme: String,
}

impl SdePath {
    pub fn duration(&self) -> f64 {
        self.dt * (self.values.len() - 1) as f64
    }

    /// Values at times `>= burn_in`.
    pub fn after(&self, burn_in: f64) -> Result<&[f64]> {
        check_window(burn_in, self.duration())?;
        let start = ((burn_in / self.dt).ceil() as usize).min(self.values.len() - 1);
        Ok(&self.values[start..])
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let rows = self.values.iter().enumerate().map(|(i, u)| vec![fmt_real(i as f64 * self.dt), fmt_real(*u)]);
        write_table(w, &["time", "u"], rows)
    }
}

/// Box-Muller pairs; no rejection loop.
struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    fn new(seed: u64) -> Self {
        Self { rng: rng(seed), spare: None }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * uniform(&mut self.rng).ln()).sqrt();
        let theta = std::f64::consts::TAU * uniform(&mut self.rng);
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Euler-Maruyama path of the stochastic Langmuir equation.
pub fn euler_maruyama(p: &PhysicalParams, u0: f64, dt: f64, t_max: f64, seed: u64) -> Result<SdePath> {
    euler_maruyama_model(&SdeModel::from_physical(p), u0, dt, t_max, seed)
}

/// Euler-Maruyama with `round(t_max / dt)` steps.
///
/// The state is clamped at 0 after every step so that `g` is only evaluated
/// on its nonnegative domain. There is no upper boundary.
pub fn euler_maruyama_model(m: &SdeModel, u0: f64, dt: f64, t_max: f64, seed: u64) -> Result<SdePath> {
    if !(u0 >= 0.0 && u0.is_finite()) {
        return Err(param_err(format!("u0 must be finite and >= 0, got {u0}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(param_err(format!("dt must be finite and > 0, got {dt}")));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(param_err(format!("t_max must be finite and >= 0, got {t_max}")));
    }
    let steps = (t_max / dt).round() as usize;
    let sqrt_dt = dt.sqrt();
    let mut normals = NormalStream::new(seed);
    let mut values = Vec::with_capacity(steps + 1);
    let mut u = u0;
    values.push(u);
    for _ in 0..steps {
        let drift = m.production - m.decay * u;
        let diffusion = (m.noise * u).max(0.0).sqrt();
        let xi = if m.noise > 0.0 { normals.next() } else { 0.0 };
        u = (u + drift * dt + diffusion * sqrt_dt * xi).max(0.0);
        values.push(u);
    }
    Ok(SdePath { dt, values, scheme: SDE_SCHEME.to_string() })
}

/// Equal-width histogram normalized as a density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + i as f64 * w, self.lo + (i + 1) as f64 * w)
    }

    /// Bin-wise mass `density * width`.
    pub fn masses(&self) -> Vec<f64> {
        let w = self.width();
        self.density.iter().map(|d| d * w).collect()
    }

    pub fn write_csv<W: Write>(&self, w: &mut W, reference: Option<&dyn Fn(f64) -> f64>) -> io::Result<()> {
        let mut header = vec!["bin_lo", "bin_hi", "count", "density"];
        if reference.is_some() {
            header.push("reference_density");
        }
        let rows = (0..self.counts.len()).map(|i| {
            let (a, b) = self.edges(i);
            let mut row = vec![fmt_real(a), fmt_real(b), self.counts[i].to_string(), fmt_real(self.density[i])];
            if let Some(f) = reference {
                row.push(fmt_real(f(0.5 * (a + b))));
            }
            row
        });
        write_table(w, &header, rows)
    }
}

/// Histogram of the values of `path` after `burn_in` on `[0, max]`.
pub fn sde_stationary_histogram(path: &SdePath, burn_in: f64, bins: usize) -> Result<Histogram> {
    if bins == 0 {
        return Err(param_err("bins must be >= 1"));
    }
    let values = path.after(burn_in)?;
    let max = values.iter().copied().fold(0.0_f64, f64::max);
    let hi = if max > 0.0 { max } else { 1.0 };
    let width = hi / bins as f64;
    let mut counts = vec![0u64; bins];
    for &u in values {
        let i = ((u / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = values.len() as f64;
    let density = counts.iter().map(|c| *c as f64 / total / width).collect();
    Ok(Histogram { lo: 0.0, hi, counts, density })
}
