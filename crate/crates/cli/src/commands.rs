use lbd::convergence::{convergence_report, Sweep, DEFAULT_GRID, MAX_MOMENT_ORDER};
use lbd::export::{fmt_real, write_table};
use lbd::limit::{delta_infinity, lemma2_limit, lemma2_partial_sum, limit_law_for, GammaSteadyState, LimitLaw};
use lbd::model::{limit_params, map_physical_params};
use lbd::simulate::{
    aggregate_occupation, euler_maruyama_model, gillespie_replicas, gillespie_run, sde_stationary_histogram, SdeModel,
    DEFAULT_BURN_IN_FRACTION, RNG_NAME, SDE_SCHEME,
};
use lbd::stationary::stationary_pmf;
use lbd::{ModelId, ModelSpec, PhysicalParams};
use serde_json::{json, Map, Value};

use crate::args::{ChainArgs, ConvergeArgs, Lemma2Args, LimitArgs, Mode, ParamArgs, SimulateArgs};
use crate::error::{CliError, CliResult};
use crate::output::{Meta, Output};

pub const DEFAULT_MOMENTS: usize = 4;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_BINS: usize = 50;
pub const DEFAULT_LEMMA2_GRID: [usize; 4] = [100, 1_000, 10_000, 100_000];

fn require<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::param(format!("missing --{flag}")))
}

/// Constants as given, either directly or through the physical map.
struct Constants {
    c1: f64,
    c2: f64,
    c3: f64,
    physical: Option<PhysicalParams>,
}

impl Constants {
    fn resolve(p: &ParamArgs) -> CliResult<Self> {
        let direct = p.c1.is_some() || p.c2.is_some() || p.c3.is_some();
        let physical = p.d1.is_some() || p.x.is_some() || p.d2.is_some() || p.c.is_some();
        match (direct, physical) {
            (true, true) => Err(CliError::param("give either --c1/--c2/--c3 or --d1/--x/--d2/--C, not both")),
            (false, true) => {
                let pp = PhysicalParams::new(
                    require(p.d1, "d1")?,
                    require(p.x, "x")?,
                    require(p.d2, "d2")?,
                    require(p.c, "C")?,
                )?;
                let (c1, c2, c3) = map_physical_params(&pp)?;
                Ok(Self { c1, c2, c3, physical: Some(pp) })
            }
            _ => Ok(Self {
                c1: require(p.c1, "c1")?,
                c2: require(p.c2, "c2")?,
                c3: require(p.c3, "c3")?,
                physical: None,
            }),
        }
    }

    fn record(&self, m: &mut Map<String, Value>) {
        m.insert("c1".into(), json!(self.c1));
        m.insert("c2".into(), json!(self.c2));
        m.insert("c3".into(), json!(self.c3));
        if let Some(p) = &self.physical {
            m.insert("physical".into(), serde_json::to_value(p).expect("serializes"));
        }
    }
}

fn chain_spec(a: &ChainArgs) -> CliResult<(ModelSpec, Map<String, Value>)> {
    let model = require(a.model, "model")?;
    let n = require(a.n, "N")?;
    let k = Constants::resolve(&a.params)?;
    let spec = ModelSpec::new(model, k.c1, k.c2, k.c3, n)?;
    let mut rec = Map::new();
    rec.insert("model".into(), json!(model));
    k.record(&mut rec);
    rec.insert("N".into(), json!(n));
    Ok((spec, rec))
}

fn table(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to memory cannot fail");
    buf
}

fn columns(body: &[u8]) -> Vec<String> {
    let header = body.split(|b| *b == b'\n').next().unwrap_or_default();
    String::from_utf8_lossy(header).split(',').map(str::to_string).collect()
}

fn output(command: &'static str, body: Vec<u8>, parameters: Map<String, Value>) -> Output {
    let meta = Meta {
        command,
        version: lbd::VERSION,
        parameters: Value::Object(parameters),
        seed: None,
        rng: None,
        scheme: None,
        columns: columns(&body),
    };
    Output { body, meta }
}

pub fn rates(a: &ChainArgs) -> CliResult<Output> {
    let (spec, rec) = chain_spec(a)?;
    let mut rows = Vec::with_capacity(spec.n() + 1);
    for k in 0..=spec.n() {
        rows.push(vec![
            k.to_string(),
            fmt_real(spec.birth_rate(k)?),
            fmt_real(spec.death_rate(k)?),
            fmt_real(spec.noise_term(k)?),
        ]);
    }
    let body = table(|w| write_table(w, &["k", "birth", "death", "noise"], rows));
    Ok(output("rates", body, rec))
}

pub fn stationary(a: &ChainArgs) -> CliResult<Output> {
    let (spec, rec) = chain_spec(a)?;
    let pmf = stationary_pmf(&spec)?;
    Ok(output("stationary", table(|w| pmf.write_csv(w)), rec))
}

pub fn limit(a: &LimitArgs) -> CliResult<Output> {
    let model = require(a.model, "model")?;
    let mut rec = Map::new();
    rec.insert("model".into(), json!(model));
    let (la, lb) = if a.a.is_some() || a.b.is_some() {
        let p = &a.params;
        let constants_given = [p.c1, p.c2, p.c3, p.d1, p.x, p.d2, p.c].iter().any(Option::is_some);
        if constants_given {
            return Err(CliError::param("give either --a/--b or model constants, not both"));
        }
        (require(a.a, "a")?, require(a.b, "b")?)
    } else {
        let k = Constants::resolve(&a.params)?;
        k.record(&mut rec);
        limit_params(k.c1, k.c2, k.c3)?
    };
    rec.insert("a".into(), json!(la));
    rec.insert("b".into(), json!(lb));
    let law = limit_law_for(model, la, lb)?;

    if let Some(points) = a.points {
        if points == 0 {
            return Err(CliError::param("--points must be >= 1"));
        }
        rec.insert("points".into(), json!(points));
        let rows = (0..=points).map(|i| {
            let x = i as f64 / points as f64;
            vec![fmt_real(x), fmt_real(law.cdf(x)), fmt_real(law.cdf_left(x)), fmt_real(law.pdf_continuous(x))]
        });
        let body = table(|w| write_table(w, &["x", "cdf", "cdf_left", "density"], rows));
        return Ok(output("limit", body, rec));
    }

    let max_m = a.moments.unwrap_or(DEFAULT_MOMENTS);
    if max_m > MAX_MOMENT_ORDER {
        return Err(CliError::param(format!("--moments must be <= {MAX_MOMENT_ORDER}")));
    }
    rec.insert("moments".into(), json!(max_m));
    let mut rows = vec![
        vec!["model".to_string(), model.to_string()],
        vec!["law".to_string(), law.name()],
        vec!["a".to_string(), fmt_real(la)],
        vec!["b".to_string(), fmt_real(lb)],
    ];
    if let Some((loc, w)) = law.atom() {
        rows.push(vec!["atom_location".to_string(), fmt_real(loc)]);
        rows.push(vec!["atom_weight".to_string(), fmt_real(w)]);
    }
    if let LimitLaw::LigAtTop(_) = law {
        rows.push(vec!["delta_inf".to_string(), fmt_real(delta_infinity(la, lb)?)]);
    }
    for (m, mu) in law.moments(max_m).iter().enumerate().skip(1) {
        rows.push(vec![format!("mu{m}"), fmt_real(*mu)]);
    }
    let body = table(|w| write_table(w, &["quantity", "value"], rows));
    Ok(output("limit", body, rec))
}

pub fn simulate(a: &SimulateArgs) -> CliResult<Output> {
    let mode = require(a.mode, "mode")?;
    let t_max = require(a.t_max, "t-max")?;
    let burn_in = a.burn_in.unwrap_or(DEFAULT_BURN_IN_FRACTION * t_max);
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let trajectory = a.trajectory.unwrap_or(false);

    let mut out = match mode {
        Mode::Ssa => {
            if a.u0.is_some() || a.dt.is_some() || a.bins.is_some() {
                return Err(CliError::param("--u0, --dt and --bins apply to --mode sde only"));
            }
            let (spec, mut rec) = chain_spec(&a.chain)?;
            let n = spec.n();
            let k0 = a.k0.unwrap_or_else(|| (n as f64 * spec.c1() / (spec.c1() + spec.c2())).round() as usize);
            if k0 > n {
                return Err(CliError::param(format!("--k0 must be <= N = {n}")));
            }
            let replicas = a.replicas.unwrap_or(1);
            if replicas == 0 {
                return Err(CliError::param("--replicas must be >= 1"));
            }
            rec.insert("mode".into(), json!("ssa"));
            rec.insert("k0".into(), json!(k0));
            rec.insert("t_max".into(), json!(t_max));
            if trajectory {
                if replicas != 1 {
                    return Err(CliError::param("--trajectory writes a single path; use --replicas 1"));
                }
                rec.insert("trajectory".into(), json!(true));
                let traj = gillespie_run(&spec, k0, t_max, seed)?;
                output("simulate", table(|w| traj.write_csv(w)), rec)
            } else {
                let seeds: Vec<u64> = (0..replicas as u64).map(|i| seed.wrapping_add(i)).collect();
                rec.insert("burn_in".into(), json!(burn_in));
                rec.insert("replicas".into(), json!(replicas));
                let parts = gillespie_replicas(&spec, k0, t_max, burn_in, &seeds)?;
                let pooled = aggregate_occupation(&parts)?;
                output("simulate", table(|w| pooled.write_csv(w)), rec)
            }
        }
        Mode::Sde => {
            if a.chain.model.is_some() || a.chain.n.is_some() || a.k0.is_some() || a.replicas.is_some() {
                return Err(CliError::param("--model, --N, --k0 and --replicas apply to --mode ssa only"));
            }
            let k = Constants::resolve(&a.chain.params)?;
            let physical = match k.physical {
                Some(p) => p,
                None => PhysicalParams::from_model_constants(k.c1, k.c2, k.c3)?,
            };
            let sde = SdeModel::from_physical(&physical);
            let u0 = a.u0.unwrap_or(sde.production / sde.decay);
            let dt = a.dt.unwrap_or(DEFAULT_DT);
            let mut rec = Map::new();
            rec.insert("mode".into(), json!("sde"));
            rec.insert("physical".into(), serde_json::to_value(physical).expect("serializes"));
            rec.insert("u0".into(), json!(u0));
            rec.insert("dt".into(), json!(dt));
            rec.insert("t_max".into(), json!(t_max));
            let path = euler_maruyama_model(&sde, u0, dt, t_max, seed)?;
            let mut out = if trajectory {
                rec.insert("trajectory".into(), json!(true));
                output("simulate", table(|w| path.write_csv(w)), rec)
            } else {
                let bins = a.bins.unwrap_or(DEFAULT_BINS);
                rec.insert("burn_in".into(), json!(burn_in));
                rec.insert("bins".into(), json!(bins));
                let hist = sde_stationary_histogram(&path, burn_in, bins)?;
                let gamma = GammaSteadyState::from_physical(&physical);
                let density = |u: f64| gamma.pdf(u);
                output("simulate", table(|w| hist.write_csv(w, Some(&density))), rec)
            };
            out.meta.scheme = Some(SDE_SCHEME);
            out
        }
    };
    out.meta.seed = Some(seed);
    out.meta.rng = Some(RNG_NAME);
    Ok(out)
}

pub fn converge(a: &ConvergeArgs) -> CliResult<Output> {
    let model: ModelId = require(a.model, "model")?;
    let k = Constants::resolve(&a.params)?;
    let grid = a.grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec());
    let sweep = Sweep::new(model, k.c1, k.c2, k.c3, grid.clone())?;
    let report = convergence_report(&sweep)?;
    let mut rec = Map::new();
    rec.insert("model".into(), json!(model));
    k.record(&mut rec);
    rec.insert("grid".into(), json!(grid));
    Ok(output("converge", table(|w| report.write_csv(w)), rec))
}

pub fn lemma2(a: &Lemma2Args) -> CliResult<Output> {
    let alpha = require(a.alpha, "alpha")?;
    let beta = require(a.beta, "beta")?;
    let grid = a.grid.clone().unwrap_or_else(|| DEFAULT_LEMMA2_GRID.to_vec());
    if grid.is_empty() {
        return Err(CliError::param("--grid must not be empty"));
    }
    let target = lemma2_limit(alpha, beta)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &n in &grid {
        let s = lemma2_partial_sum(alpha, beta, n)?;
        rows.push(vec![n.to_string(), fmt_real(s), fmt_real(target), fmt_real((s - target).abs())]);
    }
    let body = table(|w| write_table(w, &["N", "partial_sum", "limit", "abs_err"], rows));
    let mut rec = Map::new();
    rec.insert("alpha".into(), json!(alpha));
    rec.insert("beta".into(), json!(beta));
    rec.insert("grid".into(), json!(grid));
    Ok(output("lemma2", body, rec))
}
