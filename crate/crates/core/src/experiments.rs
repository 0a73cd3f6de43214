//! Monte Carlo harness: one [`TrialRecord`] per sampled polynomial, aggregated
//! per degree and compared against the theoretical tail curves.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::{global_cond_bracket, local_cond, DEFAULT_MAX_GRID, DEFAULT_REL_TOL};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::oracle::{numeric_roots, DEFAULT_TOL};
use crate::poly::IntPolynomial;
use crate::random::RandomModel;
use crate::regions::{ceil_lg, disk_family, rho_upper_bound, MEMBERSHIP_MARGIN};
use crate::solver::isolate_unit;

pub const DEFAULT_SEED: u64 = 0x5eed_0f_de5c;
pub const DEFAULT_INSTANCE_CONSTANT: f64 = 64.0;

/// Redraw offset for degenerate samples (degree < 2).
const REDRAW_STRIDE: u64 = 1 << 48;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub d: usize,
    pub degree: usize,
    pub model: String,
    pub node_count: usize,
    pub depth: usize,
    pub max_width: usize,
    pub root_count: usize,
    pub cond_lower: f64,
    #[serde(with = "crate::condition::serde_inf")]
    pub cond_upper: f64,
    #[serde(with = "crate::condition::serde_inf")]
    pub cond_at_zero: f64,
    #[serde(with = "crate::condition::serde_inf")]
    pub rho_bound: f64,
    pub rho_min: usize,
    pub rho_max: usize,
    #[serde(skip)]
    pub wall_time: f64,
}

impl TrialRecord {
    /// `⌈lg(12 d U)⌉ + 2`, or `None` when the bracket is unbounded.
    pub fn depth_bound(&self) -> Option<usize> {
        self.cond_upper
            .is_finite()
            .then(|| (12.0 * self.degree as f64 * self.cond_upper).log2().ceil() as usize + 2)
    }

    /// `node_count / (max(1, ϱ̂)² · max(1, lg U) · lg² d)`; `+∞` when `U = ∞`.
    pub fn instance_ratio(&self) -> f64 {
        if !self.cond_upper.is_finite() {
            return f64::INFINITY;
        }
        let rho = self.rho_max.max(1) as f64;
        let lg_cond = self.cond_upper.log2().max(1.0);
        let lg_d = (self.d as f64).log2();
        self.node_count as f64 / (rho * rho * lg_cond * lg_d * lg_d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub experiment: String,
    pub model: RandomModel,
    pub d_list: Vec<usize>,
    pub tau: u64,
    pub trials: usize,
    pub seed: u64,
    pub timing: bool,
}

/// Distribution of one column at one degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub d: usize,
    pub column: String,
    pub mean: f64,
    pub median: f64,
    pub q90: f64,
    pub q99: f64,
    pub min: f64,
    pub max: f64,
}

/// Empirical survival `P(X ≥ t)` against a theoretical upper curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub d: usize,
    pub quantity: String,
    pub t: f64,
    pub empirical: f64,
    pub theoretical: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ReportConfig,
    pub rows: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
    pub tail: Vec<TailPoint>,
    pub extras: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub pass: Option<bool>,
}

/// Summary written next to the CSV: everything except the rows.
#[derive(Serialize)]
struct Summary<'a> {
    config: &'a ReportConfig,
    aggregates: &'a [Aggregate],
    tail: &'a [TailPoint],
    extras: &'a BTreeMap<String, f64>,
    warnings: &'a [String],
    pass: Option<bool>,
}

pub const CSV_HEADER: &[&str] = &[
    "trial_index",
    "d",
    "degree",
    "model",
    "node_count",
    "depth",
    "max_width",
    "root_count",
    "cond_lower",
    "cond_upper",
    "cond_at_zero",
    "rho_bound",
    "rho_min",
    "rho_max",
];

impl ExperimentReport {
    pub fn rows_for(&self, d: usize) -> impl Iterator<Item = &TrialRecord> {
        self.rows.iter().filter(move |r| r.d == d)
    }

    pub fn aggregate(&self, d: usize, column: &str) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.d == d && a.column == column)
    }

    /// One row per trial; `wall_time` is appended only when timing is on.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = CSV_HEADER.to_vec();
        if self.config.timing {
            header.push("wall_time");
        }
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![
                r.trial_index.to_string(),
                r.d.to_string(),
                r.degree.to_string(),
                r.model.clone(),
                r.node_count.to_string(),
                r.depth.to_string(),
                r.max_width.to_string(),
                r.root_count.to_string(),
                r.cond_lower.to_string(),
                r.cond_upper.to_string(),
                r.cond_at_zero.to_string(),
                r.rho_bound.to_string(),
                r.rho_min.to_string(),
                r.rho_max.to_string(),
            ];
            if self.config.timing {
                rec.push(r.wall_time.to_string());
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn summary_json(&self) -> Result<String> {
        let s = Summary {
            config: &self.config,
            aggregates: &self.aggregates,
            tail: &self.tail,
            extras: &self.extras,
            warnings: &self.warnings,
            pass: self.pass,
        };
        serde_json::to_string_pretty(&s).map_err(|e| Error::Io(e.to_string()))
    }
}

impl ExperimentReport {
    /// Concatenates single-degree reports; extras keys gain a `[d]` suffix.
    pub fn merge(reports: Vec<ExperimentReport>) -> Option<ExperimentReport> {
        let mut iter = reports.into_iter();
        let mut out = iter.next()?;
        let suffix = |rep: &ExperimentReport| {
            let d = rep.config.d_list.first().copied().unwrap_or(0);
            rep.extras
                .clone()
                .into_iter()
                .map(|(k, v)| {
                    if k.contains('[') {
                        (k, v)
                    } else {
                        (format!("{k}[{d}]"), v)
                    }
                })
                .collect::<BTreeMap<_, _>>()
        };
        out.extras = suffix(&out);
        for rep in iter {
            let extras = suffix(&rep);
            out.config.d_list.extend(rep.config.d_list);
            out.rows.extend(rep.rows);
            out.aggregates.extend(rep.aggregates);
            out.tail.extend(rep.tail);
            out.extras.extend(extras);
            out.warnings.extend(rep.warnings);
            out.pass = match (out.pass, rep.pass) {
                (Some(a), Some(b)) => Some(a && b),
                (a, b) => a.or(b),
            };
        }
        Some(out)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for the trials at degree `d`.
pub fn degree_seed(seed: u64, d: usize) -> u64 {
    splitmix(seed ^ splitmix(d as u64))
}

/// The polynomial of trial `index` at degree `d`, redrawn while degenerate.
pub fn trial_polynomial(model: &RandomModel, seed: u64, index: u64) -> IntPolynomial {
    let mut attempt = 0;
    loop {
        let f = model.sample(seed, index.wrapping_add(attempt * REDRAW_STRIDE));
        if f.degree() >= 2 {
            return f;
        }
        attempt += 1;
    }
}

/// All measurements for one polynomial.
pub fn measure(f: &IntPolynomial, d: usize, model: &str, trial_index: u64) -> Result<TrialRecord> {
    let t0 = Instant::now();
    let iso = isolate_unit(f)?;
    let bracket = global_cond_bracket(f, DEFAULT_REL_TOL, DEFAULT_MAX_GRID)?;
    let cond_at_zero = local_cond(f, &Dyadic::zero())?;
    let rho_bound = rho_upper_bound(f)?;
    let roots = numeric_roots(f, DEFAULT_TOL).or_else(|_| numeric_roots(f, 1e-8))?;
    let range = disk_family(f.degree())?.count(&roots.roots, MEMBERSHIP_MARGIN);
    Ok(TrialRecord {
        trial_index,
        d,
        degree: f.degree(),
        model: model.to_string(),
        node_count: iso.trace.node_count,
        depth: iso.trace.depth,
        max_width: iso.trace.max_width(),
        root_count: iso.root_count(),
        cond_lower: bracket.lower,
        cond_upper: bracket.upper,
        cond_at_zero,
        rho_bound,
        rho_min: range.min,
        rho_max: range.max,
        wall_time: t0.elapsed().as_secs_f64(),
    })
}

/// Runs `trials` trials at each degree; rows sorted by `(d, trial_index)`.
pub fn run_trials(
    model: &RandomModel,
    d_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    if trials < 1 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(trials * d_list.len());
    for &d in d_list {
        if d < 2 {
            return Err(Error::DegreeTooSmall { degree: d, min: 2 });
        }
        let m = model.with_degree(d)?;
        let s = degree_seed(seed, d);
        let batch: Result<Vec<TrialRecord>> = (0..trials as u64)
            .into_par_iter()
            .map(|i| measure(&trial_polynomial(&m, s, i), d, m.name(), i))
            .collect();
        rows.extend(batch?);
    }
    Ok(rows)
}

/// Nearest-rank quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn aggregate(d: usize, column: &str, values: &[f64]) -> Aggregate {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Aggregate {
        d,
        column: column.to_string(),
        mean: mean(values),
        median: quantile(&sorted, 0.5),
        q90: quantile(&sorted, 0.9),
        q99: quantile(&sorted, 0.99),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    }
}

type Column = (&'static str, fn(&TrialRecord) -> f64);

const COLUMNS: &[Column] = &[
    ("node_count", |r| r.node_count as f64),
    ("depth", |r| r.depth as f64),
    ("max_width", |r| r.max_width as f64),
    ("root_count", |r| r.root_count as f64),
    ("cond_lower", |r| r.cond_lower),
    ("cond_upper", |r| r.cond_upper),
    ("rho_bound", |r| r.rho_bound),
    ("rho_max", |r| r.rho_max as f64),
];

fn aggregates(rows: &[TrialRecord], d_list: &[usize], timing: bool) -> Vec<Aggregate> {
    let mut out = Vec::new();
    for &d in d_list {
        let rs: Vec<&TrialRecord> = rows.iter().filter(|r| r.d == d).collect();
        for (name, get) in COLUMNS {
            let v: Vec<f64> = rs.iter().map(|r| get(r)).collect();
            out.push(aggregate(d, name, &v));
        }
        if timing {
            let v: Vec<f64> = rs.iter().map(|r| r.wall_time).collect();
            out.push(aggregate(d, "wall_time", &v));
        }
    }
    out
}

fn report(
    experiment: &str,
    model: &RandomModel,
    d_list: &[usize],
    trials: usize,
    seed: u64,
    timing: bool,
    rows: Vec<TrialRecord>,
) -> ExperimentReport {
    let config = ReportConfig {
        experiment: experiment.to_string(),
        model: model.clone(),
        d_list: d_list.to_vec(),
        tau: model.tau_bound(),
        trials,
        seed,
        timing,
    };
    let aggregates = aggregates(&rows, d_list, timing);
    ExperimentReport {
        config,
        rows,
        aggregates,
        tail: vec![],
        extras: BTreeMap::new(),
        warnings: vec![],
        pass: None,
    }
}

fn survival(values: &[f64], t: f64) -> f64 {
    values.iter().filter(|&&v| v >= t).count() as f64 / values.len() as f64
}

/// Node counts and depths per degree, with the depth check against the
/// certified condition bracket.
pub fn run_steps_scaling(
    model: &RandomModel,
    d_list: &[usize],
    trials: usize,
    seed: u64,
    timing: bool,
) -> Result<ExperimentReport> {
    let rows = run_trials(model, d_list, trials, seed)?;
    let mut rep = report("steps", model, d_list, trials, seed, timing, rows);
    let mut all_ok = true;
    for &d in d_list {
        let lg = (d as f64).log2();
        rep.extras.insert(format!("lg3d[{d}]"), lg.powi(3));
        let mean_nodes = rep
            .aggregate(d, "node_count")
            .map(|a| a.mean)
            .unwrap_or(f64::NAN);
        rep.extras.insert(
            format!("mean_nodes_over_lg3d[{d}]"),
            mean_nodes / lg.powi(3),
        );
        let (mut violations, mut unbounded) = (0usize, 0usize);
        for r in rep.rows_for(d) {
            match r.depth_bound() {
                Some(b) if r.depth > b => violations += 1,
                Some(_) => {}
                None => unbounded += 1,
            }
        }
        all_ok &= violations == 0;
        rep.extras
            .insert(format!("depth_violations[{d}]"), violations as f64);
        rep.extras
            .insert(format!("unbounded_brackets[{d}]"), unbounded as f64);
    }
    if let (Some(&first), Some(&last)) = (d_list.first(), d_list.last()) {
        let a = rep
            .aggregate(first, "node_count")
            .map(|a| a.mean)
            .unwrap_or(f64::NAN);
        let b = rep
            .aggregate(last, "node_count")
            .map(|a| a.mean)
            .unwrap_or(f64::NAN);
        rep.extras
            .insert("mean_nodes_ratio_last_first".into(), b / a);
    }
    rep.pass = Some(all_ok);
    Ok(rep)
}

/// Default grid: `t = 2^1, 2^2, …, 2^{τ+1}`.
pub fn default_t_grid(tau: u64) -> Vec<f64> {
    (1..=tau as i32 + 1).map(|k| 2f64.powi(k)).collect()
}

/// Survival of `cond_ℝ` (lower bracket) against `min(1, 32 d⁴ e^{2u} / t)`
/// and of `cond(f, 0)` against `min(1, 16 d³ e^{2u} / t²)`.
pub fn run_cond_tail(
    model: &RandomModel,
    d: usize,
    trials: usize,
    t_grid: &[f64],
    seed: u64,
    timing: bool,
) -> Result<ExperimentReport> {
    let m = model.with_degree(d)?;
    let tau = m.tau_bound();
    let top = 2f64.powi(tau as i32 + 1);
    if let Some(t) = t_grid.iter().find(|&&t| !(t > 1.0 && t <= top)) {
        return Err(Error::InvalidArgument(format!(
            "t = {t} outside (1, 2^(tau+1)]"
        )));
    }
    let rows = run_trials(&m, &[d], trials, seed)?;
    let mut rep = report("cond-tail", &m, &[d], trials, seed, timing, rows);
    let u = m.uniformity().value;
    let df = d as f64;
    let global: Vec<f64> = rep.rows.iter().map(|r| r.cond_lower).collect();
    let local: Vec<f64> = rep.rows.iter().map(|r| r.cond_at_zero).collect();
    for &t in t_grid {
        let empirical = survival(&global, t);
        let theoretical = (32.0 * df.powi(4) * (2.0 * u).exp() / t).min(1.0);
        rep.tail.push(TailPoint {
            d,
            quantity: "cond_global".into(),
            t,
            empirical,
            theoretical,
            pass: empirical <= theoretical,
        });
        // the local bound is stated for t ≤ 2^τ
        if t <= 2f64.powi(tau as i32) {
            let empirical = survival(&local, t);
            let theoretical = (16.0 * df.powi(3) * (2.0 * u).exp() / (t * t)).min(1.0);
            rep.tail.push(TailPoint {
                d,
                quantity: "cond_local_at_0".into(),
                t,
                empirical,
                theoretical,
                pass: empirical <= theoretical,
            });
        }
    }
    rep.pass = Some(rep.tail.iter().all(|p| p.pass));
    Ok(rep)
}

/// Survival of `ϱ(f)` against `min(1, 44 d² (2N+1) e^u e^{-t/(2N+1)})` for
/// `t ≤ τ(2N+1)`, plus moments compared with the `lg² d` scale.
pub fn run_rho_check(
    model: &RandomModel,
    d: usize,
    trials: usize,
    seed: u64,
    timing: bool,
) -> Result<ExperimentReport> {
    let m = model.with_degree(d)?;
    let rows = run_trials(&m, &[d], trials, seed)?;
    let mut rep = report("rho", &m, &[d], trials, seed, timing, rows);
    let u = m.uniformity().value;
    let tau = m.tau_bound();
    let df = d as f64;
    let k = 2.0 * ceil_lg(d) as f64 + 1.0;
    let required = 10.0 * (std::f64::consts::E * df).ln() + 2.0 * u;
    if (tau as f64) < required {
        rep.warnings.push(format!(
            "tau = {tau} below 10 ln(ed) + 2u = {required:.2}; moment scale not guaranteed"
        ));
    }
    let rho: Vec<f64> = rep.rows.iter().map(|r| r.rho_max as f64).collect();
    let t_max = (tau as f64 * k).floor() as usize;
    for t in 1..=t_max {
        let t = t as f64;
        let empirical = survival(&rho, t);
        let theoretical = (44.0 * df * df * k * u.exp() * (-t / k).exp()).min(1.0);
        rep.tail.push(TailPoint {
            d,
            quantity: "rho".into(),
            t,
            empirical,
            theoretical,
            pass: empirical <= theoretical,
        });
    }
    let lg2 = df.log2().powi(2);
    let m1 = mean(&rho);
    let m2 = mean(&rho.iter().map(|x| x * x).collect::<Vec<_>>());
    let bounds: Vec<f64> = rep.rows.iter().map(|r| r.rho_bound).collect();
    rep.extras.insert("rho_mean".into(), m1);
    rep.extras.insert("rho_second_moment".into(), m2);
    rep.extras.insert("fitted_c_mean".into(), m1 / lg2);
    rep.extras.insert("fitted_c_second".into(), m2.sqrt() / lg2);
    rep.extras.insert("rho_bound_mean".into(), mean(&bounds));
    let consistent = m1 <= mean(&bounds);
    rep.pass = Some(rep.tail.iter().all(|p| p.pass) && consistent);
    Ok(rep)
}

/// Distribution of [`TrialRecord::instance_ratio`]; passes when its 99th
/// percentile is below `constant`.
pub fn run_instance_bound(
    model: &RandomModel,
    d: usize,
    trials: usize,
    seed: u64,
    constant: f64,
    timing: bool,
) -> Result<ExperimentReport> {
    let m = model.with_degree(d)?;
    let rows = run_trials(&m, &[d], trials, seed)?;
    let mut rep = report("instance", &m, &[d], trials, seed, timing, rows);
    let ratios: Vec<f64> = rep.rows.iter().map(TrialRecord::instance_ratio).collect();
    let agg = aggregate(d, "instance_ratio", &ratios);
    let p99 = agg.q99;
    rep.aggregates.push(agg);
    rep.extras.insert("ratio_p99".into(), p99);
    rep.extras.insert("constant".into(), constant);
    rep.pass = Some(p99 < constant);
    Ok(rep)
}
