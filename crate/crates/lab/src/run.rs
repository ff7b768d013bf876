//! Experiment pipelines. Each returns its embedded report, raw tables and checks.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use smoothlab_core::fluxcalc::FluxExpr;
use smoothlab_core::nonlinearity::{
    check_definitions, d_f_global, directions_with_family, fit_alpha_empirical, worst_direction, AlphaOptions,
    IndexOptions, NonlinIndex, NonlinearityReport,
};
use smoothlab_core::profile::{
    backward_shock_time, mean_value, shock_time, solve_characteristics, solve_entropy_fv, FvOptions, ProfileField,
    ProfileFlux,
};
use smoothlab_core::sobolev::{seminorm_periodic_1d, seminorm_spacetime, BoxOptions, VarKernel};
use smoothlab_core::tolerances::{NEGATIVE_TIME_FRACTION, SHOCK_SAFETY, WORST_FAMILY_STATES};
use smoothlab_core::wave::{
    cancellation_ratio_at, cancellation_summary, CancellationRow, SmoothingPlan, SmoothingRow, WaveSetup, WkbPlan,
    WkbRow, CANCELLATION_CELLS,
};

use crate::config::{ExperimentConfig, Kind};
use crate::output::{cache_load, cache_store, write_outputs};
use crate::record::{config_hash, Check, RunRecord, RunResults, Table};
use crate::LabError;

/// Absolute slope tolerance of the α fit.
pub const ALPHA_SLOPE_TOL: f64 = 0.05;
/// Relative slope tolerance of the 1-D Sobolev scaling.
pub const SOBOLEV_SLOPE_REL_TOL: f64 = 0.05;
/// Relative slope tolerance of the space-time Sobolev scaling.
pub const SPACETIME_SLOPE_REL_TOL: f64 = 0.1;
/// Slack below the theoretical WKB order.
pub const WKB_ORDER_SLACK: f64 = 0.2;
/// WKB errors at or below this level are rounding: the expansion is exact.
pub const WKB_ROUNDING_FLOOR: f64 = 1e-12;
/// Largest allowed ratio between consecutive cancellation ratios.
pub const CANCELLATION_FACTOR: f64 = 0.9;
/// Relative gap allowed between the finite-volume blowup time and `T*`.
pub const BLOWUP_REL_TOL: f64 = 0.05;
pub const MASS_TOL: f64 = 1e-10;
pub const MAX_PRINCIPLE_TOL: f64 = 1e-12;
/// Default evaluation time as a fraction of `T₀` for WKB and smoothing runs.
pub const DEFAULT_T_FRACTION: f64 = 0.4;
/// Default evaluation time of the cancellation run.
pub const DEFAULT_CANCELLATION_TIME: f64 = 0.5;
/// Factors of `α_sup` probed by the smoothing-bound run, with the expected verdicts.
pub const SMOOTHING_FACTORS: [(f64, bool); 3] = [(0.75, true), (1.0, true), (1.5, false)];
/// The bounded verdict needs a slope of at least `-SMOOTHING_SLOPE_TOL`.
pub const SMOOTHING_SLOPE_TOL: f64 = 0.1;
/// Time frames and θ samples of the space-time trajectory.
pub const SPACETIME_FRAMES: usize = 65;
pub const SPACETIME_THETA: usize = 1024;

type Output = (Value, Vec<Table>, Vec<(String, Check)>);

fn numeric(context: &str) -> impl Fn(smoothlab_core::Error) -> LabError + '_ {
    move |source| LabError::Numeric { context: context.to_string(), source }
}

fn config_err(field: &str) -> impl Fn(smoothlab_core::Error) -> LabError + '_ {
    move |e| LabError::Config { field: field.to_string(), msg: e.to_string() }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// Run a validated config, reusing a cached result with the same hash when `SMOOTHLAB_CACHE` is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunRecord, LabError> {
    config.validate()?;
    let hash = config_hash(config);
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    if let Some(mut run) = cache_load(&hash) {
        run.config = config.clone();
        return Ok(RunRecord { timestamp, cached: true, run });
    }
    let work = || -> Result<Output, LabError> {
        match config.kind {
            Kind::AnalyzeFlux => analyze_flux(config),
            Kind::FitAlpha => fit_alpha(config),
            Kind::Profile => profile(config),
            Kind::WkbSweep => wkb(config),
            Kind::Cancellation => cancellation(config),
            Kind::SobolevScaling => sobolev(config),
            Kind::SmoothingBound => smoothing_bound(config),
        }
    };
    let (results, tables, checks) = match config.threads {
        Some(n) => {
            rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| LabError::Io(e.into()))?.install(work)?
        }
        None => work()?,
    };
    let run = RunResults::new(config, results, tables, checks);
    cache_store(&run)?;
    Ok(RunRecord { timestamp, cached: false, run })
}

/// Run and write the configured formats under `config.out`.
pub fn execute(config: &ExperimentConfig) -> Result<(RunRecord, Vec<PathBuf>), LabError> {
    let record = run_experiment(config)?;
    let files = write_outputs(&config.out, &record, &config.formats)?;
    Ok((record, files))
}

fn index_code(k: NonlinIndex) -> f64 {
    k.finite().map_or(-1.0, f64::from)
}

fn global_index(config: &ExperimentConfig, flux: &FluxExpr) -> Result<NonlinearityReport, LabError> {
    d_f_global(flux, config.m, &IndexOptions::for_dim(flux.dim())).map_err(numeric("index search"))
}

fn index_table(report: &NonlinearityReport) -> Table {
    let mut t = Table::new("index", &["u", "d_f"]);
    for &(u, k) in &report.samples {
        t.push(vec![u, index_code(k)]);
    }
    t
}

fn analyze_flux(config: &ExperimentConfig) -> Result<Output, LabError> {
    let (flux, expected) = config.resolve_flux()?;
    let report = global_index(config, &flux)?;
    let defs = check_definitions(&flux, config.m).map_err(numeric("definition checks"))?;
    let worst = match report.d_f {
        NonlinIndex::Finite(k) => Some(worst_direction(&flux, report.argmax, k).map_err(numeric("worst direction"))?),
        NonlinIndex::Infinite => None,
    };
    let bounds = report.d_f.finite().map(|k| {
        let a = 1.0 / f64::from(k);
        json!({ "lower": a / (1.0 + 2.0 * a), "upper": a })
    });
    let results = json!({
        "report": to_value(&report),
        "definitions": to_value(&defs),
        "worst_direction": to_value(&worst),
        "smoothing_exponent_bounds": bounds,
    });
    let mut checks = Vec::new();
    if let Some(e) = expected {
        checks.push((
            "catalog index".to_string(),
            Check::Index { table: "index".into(), col: "d_f".into(), expected: e.finite() },
        ));
    }
    Ok((results, vec![index_table(&report)], checks))
}

fn fit_alpha(config: &ExperimentConfig) -> Result<Output, LabError> {
    let (flux, _) = config.resolve_flux()?;
    let report = global_index(config, &flux)?;
    let mut opts = AlphaOptions::default();
    if let Some(d) = &config.deltas {
        opts.deltas = d.clone();
    }
    let dirs = directions_with_family(&flux, config.m, report.d_f, WORST_FAMILY_STATES, &opts.deltas, config.seed)
        .map_err(numeric("directions"))?;
    let fit = fit_alpha_empirical(&flux, config.m, &dirs, &opts).map_err(numeric("α fit"))?;
    let mut t = Table::new("alpha", &["delta", "measure", "direction"]).plotted(&["measure"]);
    for r in &fit.maxima {
        t.push(vec![r.delta, r.measure, r.direction_index as f64]);
    }
    let mut checks = Vec::new();
    if let Some(k) = report.d_f.finite() {
        let a = 1.0 / f64::from(k);
        checks.push((
            format!("slope within {ALPHA_SLOPE_TOL} of 1/d_F = {a:.4}"),
            Check::Slope {
                table: "alpha".into(),
                x: "delta".into(),
                y: "measure".into(),
                lo: Some(a - ALPHA_SLOPE_TOL),
                hi: Some(a + ALPHA_SLOPE_TOL),
            },
        ));
    }
    let results =
        json!({ "d_f": to_value(&report.d_f), "alpha_sup": to_value(&report.alpha_sup), "fit": to_value(&fit) });
    Ok((results, vec![t], checks))
}

fn setup(config: &ExperimentConfig) -> Result<WaveSetup, LabError> {
    let (flux, _) = config.resolve_flux()?;
    let v = config.direction(flux.dim());
    WaveSetup::new(flux, config.m, config.ubar, v, config.gamma, config.initial.clone(), config.eps.clone())
        .map_err(config_err("setup"))
}

fn eval_time(config: &ExperimentConfig, setup: &WaveSetup) -> Result<f64, LabError> {
    if let Some(t) = config.t_eval {
        return Ok(t);
    }
    let t0 = WkbPlan::uniform_time(setup).map_err(numeric("uniform pre-shock time"))?;
    if !t0.is_finite() {
        return Err(LabError::Config { field: "t_eval".into(), msg: "no shock forms; give t_eval explicitly".into() });
    }
    Ok(config.t_fraction.unwrap_or(DEFAULT_T_FRACTION) * t0)
}

fn profile(config: &ExperimentConfig) -> Result<Output, LabError> {
    let u0 = &config.initial;
    let psis: Vec<(f64, ProfileFlux)> = match config.profile_flux {
        Some(l) => vec![(0.0, ProfileFlux::limit(l.b, l.q))],
        None => {
            let s = setup(config)?;
            let mut v = vec![(0.0, s.limit_psi().map_err(config_err("setup"))?)];
            for &e in &s.eps {
                v.push((e, s.psi(e).map_err(config_err("setup"))?));
            }
            v
        }
    };
    let init = ProfileField::from_initial(u0, config.cells);
    let (lo, hi) = init.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
    let m0 = mean_value(&init);

    let rows = psis
        .par_iter()
        .map(|(eps, psi)| -> Result<Value, LabError> {
            let smooth = u0.is_smooth();
            let ts = if smooth { shock_time(psi, u0).map_err(numeric("shock time"))? } else { None };
            let tb = if smooth { backward_shock_time(psi, u0).map_err(numeric("backward shock time"))? } else { None };
            let times: Vec<f64> = config.profile_times.iter().map(|f| f * ts.unwrap_or(1.0)).collect();
            let tr = solve_entropy_fv(psi, &init, &times, &FvOptions::default()).map_err(numeric("finite volumes"))?;
            let drift = tr.frames.iter().map(|f| (mean_value(f) - m0).abs()).fold(0.0, f64::max);
            let excess = tr
                .frames
                .iter()
                .flat_map(|f| f.values.iter())
                .map(|&u| (lo - u).max(u - hi).max(0.0))
                .fold(0.0, f64::max);
            let delta = match (config.negative_time, ts) {
                (Some(d), _) => d,
                (None, Some(t)) => NEGATIVE_TIME_FRACTION * t,
                (None, None) => 0.0,
            };
            let backward =
                if smooth && delta > 0.0 { solve_characteristics(psi, u0, -delta, config.cells).ok() } else { None };
            Ok(json!({
                "eps": eps,
                "psi": psi.describe(),
                "t_star": ts,
                "t_back": tb,
                "blowup_time": tr.blowup_time,
                "steps": tr.steps,
                "mass_drift": drift,
                "max_principle_excess": excess,
                "negative_time": delta,
                "negative_time_ok": backward.is_some() || delta == 0.0,
                "frames": tr.frames.iter().map(|f| json!({
                    "t": f.t,
                    "min": f.values.iter().copied().fold(f64::INFINITY, f64::min),
                    "max": f.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    "mean": mean_value(f),
                })).collect::<Vec<_>>(),
            }))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let num = |r: &Value, k: &str| r[k].as_f64();
    let mut conserve =
        Table::new("profile", &["eps", "mass_drift", "max_principle_excess", "steps", "negative_time_failed"]);
    let mut shock = Table::new("shock", &["eps", "t_star", "blowup_time"]);
    for r in &rows {
        conserve.push(vec![
            num(r, "eps").unwrap_or(0.0),
            num(r, "mass_drift").unwrap_or(f64::MAX),
            num(r, "max_principle_excess").unwrap_or(f64::MAX),
            num(r, "steps").unwrap_or(0.0),
            if r["negative_time_ok"].as_bool() == Some(true) { 0.0 } else { 1.0 },
        ]);
        if let Some(ts) = num(r, "t_star") {
            shock.push(vec![num(r, "eps").unwrap_or(0.0), ts, num(r, "blowup_time").unwrap_or(-1.0)]);
        }
    }
    let mut checks = vec![
        (
            "mass conservation".to_string(),
            Check::Small { table: "profile".into(), col: "mass_drift".into(), tol: MASS_TOL },
        ),
        (
            "maximum principle".to_string(),
            Check::Small { table: "profile".into(), col: "max_principle_excess".into(), tol: MAX_PRINCIPLE_TOL },
        ),
        (
            "negative-time extension".to_string(),
            Check::Small { table: "profile".into(), col: "negative_time_failed".into(), tol: 0.0 },
        ),
    ];
    let mut tables = vec![conserve];
    if !shock.rows.is_empty() {
        checks.push((
            format!("blowup time within {:.0}% of T*", 100.0 * BLOWUP_REL_TOL),
            Check::Relative { table: "shock".into(), a: "blowup_time".into(), b: "t_star".into(), tol: BLOWUP_REL_TOL },
        ));
        tables.push(shock);
    }
    Ok((json!({ "runs": rows }), tables, checks))
}

fn wkb(config: &ExperimentConfig) -> Result<Output, LabError> {
    let s = setup(config)?;
    let t = eval_time(config, &s)?;
    let plan = WkbPlan::new(&s, t, config.norm).map_err(numeric("WKB plan"))?;
    let rows = s
        .eps
        .par_iter()
        .map(|&eps| Ok(WkbRow { eps, error: plan.error(eps).map_err(numeric("WKB error"))? }))
        .collect::<Result<Vec<_>, LabError>>()?;
    let sweep = plan.finish(rows);
    let mut table = Table::new("wkb", &["eps", "error"]).plotted(&["error"]);
    for r in &sweep.rows {
        table.push(vec![r.eps, r.error]);
    }
    let order = 1.0 + s.r();
    let checks = vec![(
        format!("error order at least {:.2}", order - WKB_ORDER_SLACK),
        Check::Order {
            table: "wkb".into(),
            x: "eps".into(),
            y: "error".into(),
            lo: order - WKB_ORDER_SLACK,
            floor: WKB_ROUNDING_FLOOR,
        },
    )];
    Ok((json!({ "sweep": to_value(&sweep), "theory_order": order, "q": s.q }), vec![table], checks))
}

fn cancellation(config: &ExperimentConfig) -> Result<Output, LabError> {
    let s = setup(config)?;
    if s.compatible().map_err(numeric("compatibility"))? {
        return Err(LabError::Config {
            field: "v".into(),
            msg: "the setup is compatible; cancellation needs a^(j)(ū)·v ≠ 0 for some j < q".into(),
        });
    }
    let t = config.t_eval.unwrap_or(DEFAULT_CANCELLATION_TIME);
    let rows = s
        .eps
        .par_iter()
        .map(|&eps| {
            let ratio = cancellation_ratio_at(&s, eps, t, CANCELLATION_CELLS).map_err(numeric("cancellation ratio"))?;
            Ok(CancellationRow { eps, ratio })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let sweep = cancellation_summary(&s, t, rows).map_err(numeric("cancellation summary"))?;
    let mut table = Table::new("cancellation", &["eps", "ratio"]).plotted(&["ratio"]);
    for r in &sweep.rows {
        table.push(vec![r.eps, r.ratio]);
    }
    let checks = vec![(
        format!("ratio shrinks by {CANCELLATION_FACTOR} per halving"),
        Check::Decreasing { table: "cancellation".into(), col: "ratio".into(), factor: CANCELLATION_FACTOR },
    )];
    Ok((json!({ "sweep": to_value(&sweep) }), vec![table], checks))
}

fn sobolev(config: &ExperimentConfig) -> Result<Output, LabError> {
    if config.spacetime {
        return sobolev_spacetime(config);
    }
    let n = config.cells;
    let samples: Vec<f64> = (0..n).map(|j| config.initial.value(j as f64 / n as f64)).collect();
    let (a, p, gamma, reg) = (config.half_width, config.p, config.gamma, config.regularity);
    let kernel = VarKernel::new(&samples, p).map_err(config_err("initial"))?;
    let lp_mean = samples.iter().map(|x| x.abs().powf(p)).sum::<f64>() / n as f64;
    let mut tables = Vec::new();
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for &s in &config.s {
        let c = kernel.constants(s, reg).map_err(numeric("sandwich constants"))?;
        let results = config
            .eps
            .par_iter()
            .map(|&e| seminorm_periodic_1d(&samples, s, p, a, e.powf(gamma), 0.0, reg).map_err(numeric("semi-norm")))
            .collect::<Result<Vec<_>, _>>()?;
        let name = format!("sobolev-s{s}");
        let mut t = Table::new(name.clone(), &["epsilon", "seminorm", "lp_norm", "total", "lower", "upper", "error"])
            .plotted(&["seminorm", "lower", "upper"]);
        for (&e, r) in config.eps.iter().zip(&results) {
            let eta = e.powf(gamma);
            let lp = (2.0 * a * lp_mean).powf(1.0 / p);
            let lower = ((2.0 * a - 1.0).max(0.0) * c.d_one.powf(p)).powf(1.0 / p) * eta.powf(-s);
            let upper = ((2.0 * a + 1.0) * c.d_inf.powf(p)).powf(1.0 / p) * eta.powf(-s);
            t.push(vec![e, r.value, lp, lp + r.value, lower, upper, r.error_estimate]);
        }
        let target = -s * gamma;
        checks.push((
            format!("s = {s}: slope within {:.0}% of {target:.4}", 100.0 * SOBOLEV_SLOPE_REL_TOL),
            Check::Slope {
                table: name.clone(),
                x: "epsilon".into(),
                y: "seminorm".into(),
                lo: Some(target * (1.0 + SOBOLEV_SLOPE_REL_TOL)),
                hi: Some(target * (1.0 - SOBOLEV_SLOPE_REL_TOL)),
            },
        ));
        checks.push((
            format!("s = {s}: values inside the sandwich"),
            Check::Within { table: name, col: "seminorm".into(), lo_col: "lower".into(), hi_col: "upper".into() },
        ));
        tables.push(t);
        reports.push(json!({ "s": s, "constants": to_value(&c), "results": to_value(&results) }));
    }
    Ok((json!({ "runs": reports }), tables, checks))
}

/// `U(t, x/ε^γ)` over `[-A, A]²` in `(t, x)`, with `U` from characteristics on both sides of `t = 0`.
fn sobolev_spacetime(config: &ExperimentConfig) -> Result<Output, LabError> {
    let u0 = &config.initial;
    if !u0.is_smooth() {
        return Err(LabError::Config { field: "initial".into(), msg: "the space-time path needs C¹ data".into() });
    }
    let l = config.profile_flux.unwrap_or(crate::config::LimitFlux { b: 0.5, q: 1 });
    let psi = ProfileFlux::limit(l.b, l.q);
    let ts = shock_time(&psi, u0).map_err(numeric("shock time"))?.unwrap_or(f64::INFINITY);
    let tb = backward_shock_time(&psi, u0).map_err(numeric("backward shock time"))?.unwrap_or(f64::INFINITY);
    let delta = config.negative_time.unwrap_or(NEGATIVE_TIME_FRACTION * ts).min(SHOCK_SAFETY * tb);
    let a = config.half_width;
    if !(2.0 * a <= delta && 2.0 * a < SHOCK_SAFETY * ts) {
        return Err(LabError::Config {
            field: "half_width".into(),
            msg: format!("the box needs 2A ≤ {delta:.4e} (negative-time extension) and 2A < 0.95 T*"),
        });
    }
    let (t_lo, t_hi) = (-2.0 * a, 2.0 * a);
    let dt = (t_hi - t_lo) / (SPACETIME_FRAMES - 1) as f64;
    let frames = (0..SPACETIME_FRAMES)
        .into_par_iter()
        .map(|k| solve_characteristics(&psi, u0, t_lo + k as f64 * dt, SPACETIME_THETA).map_err(numeric("trajectory")))
        .collect::<Result<Vec<_>, _>>()?;
    let at = |t: f64, theta: f64| {
        let y = ((t - t_lo) / dt).clamp(0.0, (SPACETIME_FRAMES - 1) as f64);
        let k = (y.floor() as usize).min(SPACETIME_FRAMES - 2);
        let w = y - k as f64;
        (1.0 - w) * frames[k].interpolate(theta) + w * frames[k + 1].interpolate(theta)
    };
    let gamma = config.gamma;
    let mut tables = Vec::new();
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for &s in &config.s {
        let results = config
            .eps
            .par_iter()
            .map(|&e| {
                let eta = e.powf(gamma);
                let f = |t: f64, x: f64| at(t, x / eta);
                let opts = BoxOptions { levels: 12, order: 4, resolution: [f64::INFINITY, eta] };
                seminorm_spacetime(&f, (t_lo, t_hi), s, config.p, 0.0, 0.0, a, &opts)
                    .map_err(numeric("space-time semi-norm"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let name = format!("spacetime-s{s}");
        let mut t = Table::new(name.clone(), &["epsilon", "seminorm", "error"]).plotted(&["seminorm"]);
        for (&e, r) in config.eps.iter().zip(&results) {
            t.push(vec![e, r.value, r.error_estimate]);
        }
        let target = -s * gamma;
        checks.push((
            format!("s = {s}: slope within {:.0}% of {target:.4}", 100.0 * SPACETIME_SLOPE_REL_TOL),
            Check::Slope {
                table: name,
                x: "epsilon".into(),
                y: "seminorm".into(),
                lo: Some(target * (1.0 + SPACETIME_SLOPE_REL_TOL)),
                hi: Some(target * (1.0 - SPACETIME_SLOPE_REL_TOL)),
            },
        ));
        tables.push(t);
        reports.push(json!({ "s": s, "results": to_value(&results) }));
    }
    let results = json!({ "psi": psi.describe(), "t_star": ts, "negative_time": delta, "runs": reports });
    Ok((results, tables, checks))
}

fn smoothing_bound(config: &ExperimentConfig) -> Result<Output, LabError> {
    let (flux, _) = config.resolve_flux()?;
    let report = global_index(config, &flux)?;
    let k = match report.d_f {
        NonlinIndex::Finite(k) if k >= 2 => k,
        other => {
            return Err(LabError::Config {
                field: "flux".into(),
                msg: format!("smoothing-bound needs 2 ≤ d_F < ∞, got d_F = {other}"),
            })
        }
    };
    let alpha = 1.0 / f64::from(k);
    let dir = worst_direction(&flux, config.ubar, k).map_err(numeric("worst direction"))?;
    let mut v: Vec<f64> = dir.xi.iter().map(|&x| if x.abs() < 1e-12 { 0.0 } else { x }).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let gamma = f64::from(k);
    let setup =
        WaveSetup::new(flux, config.m, config.ubar, v.clone(), gamma, config.initial.clone(), config.eps.clone())
            .map_err(config_err("setup"))?;
    let t = eval_time(config, &setup)?;
    let mut tables = Vec::new();
    let mut checks = Vec::new();
    let mut sweeps = Vec::new();
    for (factor, bounded) in SMOOTHING_FACTORS {
        let s = factor * alpha;
        let plan = SmoothingPlan::new(&setup, t, s, config.p, config.half_width).map_err(numeric("smoothing plan"))?;
        let rows = setup
            .eps
            .par_iter()
            .map(|&eps| {
                let r = plan.value(eps).map_err(numeric("smoothing semi-norm"))?;
                Ok(SmoothingRow { eps, value: r.value, error_estimate: r.error_estimate })
            })
            .collect::<Result<Vec<_>, LabError>>()?;
        let sweep = plan.finish(rows);
        let name = format!("smoothing-s{s}");
        let mut table = Table::new(name.clone(), &["eps", "value", "error"]).plotted(&["value"]);
        for r in &sweep.rows {
            table.push(vec![r.eps, r.value, r.error_estimate]);
        }
        let (label, lo, hi) = if bounded {
            ("bounded", Some(-SMOOTHING_SLOPE_TOL), None)
        } else {
            ("unbounded", None, Some(-SMOOTHING_SLOPE_TOL))
        };
        checks.push((
            format!("s = {factor}·α_sup = {s:.4}: {label}"),
            Check::Slope { table: name, x: "eps".into(), y: "value".into(), lo, hi },
        ));
        tables.push(table);
        sweeps.push(to_value(&sweep));
    }
    let results = json!({
        "d_f": to_value(&report.d_f),
        "alpha_sup": to_value(&report.alpha_sup),
        "direction": to_value(&dir),
        "v": v,
        "gamma": gamma,
        "t": t,
        "sweeps": sweeps,
    });
    Ok((results, tables, checks))
}
