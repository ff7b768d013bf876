//! Acceptance suite: one line per criterion, tolerances pinned below.
//!
//! Exit status is 0 unless a criterion outside `KNOWN_RED` fails; `SMOOTHLAB_STRICT=1` makes every red fatal.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use anyhow::{anyhow, Result};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestRunner};
use smoothlab::{run_experiment, ExperimentConfig, Kind, RunRecord, Table};
use smoothlab_core::fluxcalc::{catalog, catalog_flux, parse_flux};
use smoothlab_core::nonlinearity::{d_f_global, IndexOptions};
use smoothlab_core::profile::{
    mean_value, shock_time, solve_entropy_fv, FvOptions, InitialProfile, ProfileField, ProfileFlux,
};
use smoothlab_core::scaling::ScalingFit;
use smoothlab_core::sobolev::{gamma_ds, mu_ds, mu_ds_direct, seminorm_bruteforce, Regularity, VarKernel};
use smoothlab_core::wave::{planar_cross_check, Verdict, WaveSetup};

const ALPHA_TOL: f64 = 0.05;
const MU_AGREE: f64 = 1e-8;
const MU_ENDPOINT: f64 = 1e-12;
const SOBOLEV_REL: f64 = 0.05;
const SHOCK_FORMULA_TOL: f64 = 1e-6;
const BLOWUP_REL: f64 = 0.05;
const WKB_MIN_SLOPE: f64 = 1.8;
const WKB_BAND_15: (f64, f64) = (1.3, 1.8);
const CANCEL_FACTOR: f64 = 0.9;
const PLANAR_RATIO: f64 = 3.0;
/// Evaluation time as a fraction of T*, before the shock.
const PLANAR_T_FRACTION: f64 = 0.5;
const SMOOTHING_REL: f64 = 0.10;
/// Absolute band used when the target slope is 0, where a relative band is empty.
const SMOOTHING_ZERO_BAND: f64 = 0.10;
const ORACLE_REL: f64 = 1e-4;
const MASS_TOL: f64 = 1e-10;
const JET_TOL: f64 = 1e-6;
const PROP_SEED: u64 = 0xACCE_97ED;
const PROP_CASES: u32 = 32;

/// Criteria whose finite check is known not to hold; see the notes in the README.
const KNOWN_RED: &[u32] = &[4, 6];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn fit(x: &[f64], y: &[f64]) -> f64 {
    let pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    ScalingFit::loglog(&pairs).slope
}

fn table<'a>(rec: &'a RunRecord, name: &str) -> Result<&'a Table> {
    rec.run.tables.iter().find(|t| t.name == name).ok_or_else(|| anyhow!("missing table {name}"))
}

fn col(t: &Table, c: &str) -> Result<Vec<f64>> {
    t.column(c).ok_or_else(|| anyhow!("missing column {c} in {}", t.name))
}

fn run(config: ExperimentConfig) -> Result<RunRecord> {
    run_experiment(&config).map_err(|e| anyhow!("{e}"))
}

fn defaults(kind: Kind) -> ExperimentConfig {
    ExperimentConfig::defaults(kind)
}

fn c1_alpha_sup() -> Result<Outcome> {
    let mut cases: Vec<(String, smoothlab_core::FluxExpr, (u32, u32))> =
        ["trig2d", "power-chain-2", "power-chain-3", "multid-burgers-2", "multid-burgers-3"]
            .iter()
            .map(|k| -> Result<_> {
                let e = catalog_flux(k)?;
                let expected = e.expected_alpha();
                Ok((k.to_string(), e.flux, expected))
            })
            .collect::<Result<_>>()?;
    cases.push(("[u^2, u]".into(), parse_flux("[u^2, u]")?, (0, 1)));
    cases.push(("[u^3 - u, u^2]".into(), parse_flux("[u^3 - u, u^2]")?, (1, 2)));
    let mut bad = Vec::new();
    for (name, flux, (n, d)) in &cases {
        let r = d_f_global(flux, 1.0, &IndexOptions::for_dim(flux.dim()))?;
        let got = (r.alpha_sup.numer, r.alpha_sup.denom);
        let ok = if *n == 0 { got.0 == 0 } else { got == (*n, *d) };
        if !ok {
            bad.push(format!("{name}: {}", r.alpha_sup));
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} fluxes exact{}",
            cases.len() - bad.len(),
            if bad.is_empty() { String::new() } else { format!("; wrong: {}", bad.join(", ")) }
        ),
    )
}

fn c2_alpha_fit() -> Result<Outcome> {
    let mut c = defaults(Kind::FitAlpha);
    c.flux = "power-chain-2".into();
    c.deltas = Some((0..=12).map(|k| 10f64.powf(-1.0 - 0.25 * k as f64)).collect());
    let rec = run(c)?;
    let t = table(&rec, "alpha")?;
    let slope = fit(&col(t, "delta")?, &col(t, "measure")?);
    outcome((slope - 0.5).abs() <= ALPHA_TOL, format!("slope {slope:.4}, target 0.5 ± {ALPHA_TOL}"))
}

fn c3_mu_kernel() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for d in [2, 3] {
        for sigma in [0.3, 0.7, 1.2] {
            for t1 in [0.05, 0.4, 1.5] {
                worst = worst.max((mu_ds(d, sigma, t1)? - mu_ds_direct(d, sigma, t1)?).abs());
            }
        }
    }
    let mut bounds = true;
    for d in [2, 3] {
        for sigma in [0.3, 0.7, 1.2] {
            let vals: Vec<f64> =
                (1..=100).map(|i| mu_ds(d, sigma, 2.0 * i as f64 / 100.0)).collect::<Result<_, _>>()?;
            let c = mu_ds(d, sigma, 2.0)?;
            bounds &=
                vals.iter().all(|&m| m > 0.0 && m >= c * (1.0 - 1e-12) && m <= gamma_ds(d, sigma) * (1.0 + 1e-12));
        }
    }
    let mut endpoint = 0.0f64;
    for s in [0.25, 0.5, 0.75] {
        endpoint = endpoint.max((mu_ds(2, s, 1e-14)? - 1.0 / (1.0 + s)).abs());
        endpoint = endpoint.max((mu_ds(2, s, 1.0)? - (1.0 - 2f64.powf(-(1.0 + s))) / (1.0 + s)).abs());
    }
    outcome(
        worst <= MU_AGREE && bounds && endpoint <= MU_ENDPOINT,
        format!("closed vs direct {worst:.2e} (≤ {MU_AGREE:.0e}), bounds {}, endpoints {endpoint:.2e} (≤ {MU_ENDPOINT:.0e})", if bounds { "hold" } else { "violated" }),
    )
}

fn c4_sobolev_scaling() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for gamma in [1.5, 2.0] {
        let mut c = defaults(Kind::SobolevScaling);
        c.gamma = gamma;
        c.s = vec![0.25, 0.5];
        let rec = run(c)?;
        for s in [0.25, 0.5] {
            let t = table(&rec, &format!("sobolev-s{s}"))?;
            let v = col(t, "seminorm")?;
            let slope = fit(&col(t, "epsilon")?, &v);
            let target = -s * gamma;
            let rel = (slope - target).abs() / target.abs();
            let (lo, hi) = (col(t, "lower")?, col(t, "upper")?);
            let inside = v.iter().zip(lo.iter().zip(&hi)).all(|(x, (l, h))| l <= x && x <= h);
            let ok = rel <= SOBOLEV_REL && inside;
            pass &= ok;
            parts.push(format!(
                "γ={gamma} s={s}: {slope:.4} vs {target} ({:.1}%){}",
                100.0 * rel,
                if inside { "" } else { " outside sandwich" }
            ));
        }
    }
    outcome(pass, parts.join("; "))
}

fn c5_shock_time() -> Result<Outcome> {
    let ts = shock_time(&ProfileFlux::limit(0.5, 1), &InitialProfile::sine())?.ok_or_else(|| anyhow!("no shock"))?;
    let formula = (ts - 1.0 / TAU).abs();
    let mut c = defaults(Kind::Profile);
    c.profile_flux = Some(smoothlab::config::LimitFlux { b: 0.5, q: 1 });
    c.initial = InitialProfile::sine();
    let rec = run(c)?;
    let t = table(&rec, "shock")?;
    let blow = col(t, "blowup_time")?[0];
    let rel = (blow - ts).abs() / ts;
    outcome(
        formula <= SHOCK_FORMULA_TOL && rel <= BLOWUP_REL,
        format!("|T* - 1/(2π)| = {formula:.1e}, FV blowup {blow:.5} vs {ts:.5} ({:.2}%)", 100.0 * rel),
    )
}

fn c6_wkb() -> Result<Outcome> {
    let mut slopes = Vec::new();
    for gamma in [2.0, 1.5] {
        let mut c = defaults(Kind::WkbSweep);
        c.flux = "power-chain-2".into();
        c.v = Some(vec![0.0, 1.0]);
        c.gamma = gamma;
        c.t_fraction = Some(0.4);
        let rec = run(c)?;
        let t = table(&rec, "wkb")?;
        let e = col(t, "error")?;
        let top = e.iter().copied().fold(0.0, f64::max);
        slopes.push((fit(&col(t, "eps")?, &e), top));
    }
    let (s2, top2) = slopes[0];
    let (s15, _) = slopes[1];
    let a = s2 >= WKB_MIN_SLOPE;
    let b = (WKB_BAND_15.0..=WKB_BAND_15.1).contains(&s15);
    outcome(
        a && b,
        format!(
            "γ=2: slope {s2:.4} (≥ {WKB_MIN_SLOPE}) largest error {top2:.1e} {}; γ=1.5: slope {s15:.4} in [{}, {}] {}",
            if a { "ok" } else { "FAIL" },
            WKB_BAND_15.0,
            WKB_BAND_15.1,
            if b { "ok" } else { "FAIL" }
        ),
    )
}

fn c7_cancellation() -> Result<Outcome> {
    let mut c = defaults(Kind::Cancellation);
    c.flux = "power-chain-2".into();
    c.v = Some(vec![1.0, 0.0]);
    c.gamma = 2.0;
    c.t_eval = Some(0.5);
    c.eps = (3..=8).map(|k| 2f64.powi(-k)).collect();
    let rec = run(c)?;
    let r = col(table(&rec, "cancellation")?, "ratio")?;
    let worst = r.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max);
    outcome(r.len() == 6 && worst <= CANCEL_FACTOR, format!("largest step factor {worst:.4} (≤ {CANCEL_FACTOR})"))
}

fn c8_planar() -> Result<Outcome> {
    let flux = parse_flux("[u^2/2, u^3/3]")?;
    let setup = WaveSetup::new(flux, 1.0, 0.0, vec![1.0, 1.0], 2.0, InitialProfile::sine(), vec![1.0])?;
    let ts = shock_time(&setup.psi(1.0)?, &setup.u0)?.ok_or_else(|| anyhow!("no shock"))?;
    let t = PLANAR_T_FRACTION * ts;
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [128, 256] {
        let c = planar_cross_check(&setup, 1.0, t, n)?;
        pass &= c.ratio <= PLANAR_RATIO;
        parts.push(format!("N={n}: {:.2e} / {:.2e} = {:.2}", c.distance, c.self_convergence, c.ratio));
    }
    outcome(pass, format!("t = {t:.4}: {} (≤ {PLANAR_RATIO})", parts.join(", ")))
}

fn c9_smoothing() -> Result<Outcome> {
    let rec = run(defaults(Kind::SmoothingBound))?;
    let gamma = rec.run.results["gamma"].as_f64().ok_or_else(|| anyhow!("no γ"))?;
    let mut pass = true;
    let mut parts = Vec::new();
    for (factor, expect) in [(1.0, Verdict::Bounded), (1.5, Verdict::Unbounded)] {
        let s = factor / gamma;
        let t = table(&rec, &format!("smoothing-s{s}"))?;
        let slope = fit(&col(t, "eps")?, &col(t, "value")?);
        let target = 1.0 - s * gamma;
        let band = if target == 0.0 { SMOOTHING_ZERO_BAND } else { SMOOTHING_REL * target.abs() };
        let verdict = Verdict::from_slope(slope);
        let emitted = rec.run.verdicts.iter().any(|v| {
            v.pass
                && v.name.contains(&format!("{s:.4}"))
                && v.name.ends_with(if expect == Verdict::Bounded { ": bounded" } else { ": unbounded" })
        });
        let ok = (slope - target).abs() <= band && verdict == expect && emitted;
        pass &= ok;
        parts.push(format!("s={s}: slope {slope:.4} vs {target} ± {band:.2}, {verdict:?}"));
    }
    outcome(pass, parts.join("; "))
}

fn test_functions(n: usize) -> Vec<(&'static str, Vec<f64>)> {
    let x = |i: usize| i as f64 / n as f64;
    vec![
        ("sine", (0..n).map(|i| (TAU * x(i)).sin()).collect()),
        ("two modes", (0..n).map(|i| (TAU * x(i)).sin() + 0.3 * (3.0 * TAU * x(i) + 1.0).cos()).collect()),
        ("indicator", (0..n).map(|i| if 2 * i < n { 1.0 } else { 0.0 }).collect()),
        ("triangle", (0..n).map(|i| 1.0 - 2.0 * (2.0 * x(i) - 1.0).abs()).collect()),
        ("sqrt|sin|", (0..n).map(|i| (PI * x(i)).sin().abs().sqrt()).collect()),
    ]
}

fn c10_oracle() -> Result<Outcome> {
    let n = 256;
    let mut worst = 0.0f64;
    for (_, v) in test_functions(n) {
        for (s, p) in [(0.25, 1.0), (0.5, 1.0), (0.7, 2.0)] {
            for (m, off) in [(64usize, 0usize), (100, 37)] {
                let a = m as f64 / n as f64;
                let center = (off + m) as f64 / n as f64;
                let k = VarKernel::new(&v, p)?.seminorm_riemann(s, a, center)?.value;
                let b = seminorm_bruteforce(&v, s, p, a, center)?;
                worst = worst.max((k - b).abs() / b);
            }
        }
    }
    outcome(worst <= ORACLE_REL, format!("5 functions, largest relative gap {worst:.2e} (≤ {ORACLE_REL:.0e})"))
}

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: PROP_CASES,
        rng_seed: RngSeed::Fixed(PROP_SEED),
        failure_persistence: None,
        ..Config::default()
    })
}

fn trig(n: usize, c: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|i| {
            c.iter().enumerate().map(|(k, ck)| ck * ((k + 1) as f64 * TAU * i as f64 / n as f64 + k as f64).sin()).sum()
        })
        .collect()
}

fn richardson(g: impl Fn(f64) -> f64, u: f64, h: f64) -> f64 {
    let d = |h: f64| (g(u + h) - g(u - h)) / (2.0 * h);
    let (a, b, c) = (d(h), d(h / 2.0), d(h / 4.0));
    let ab = (4.0 * b - a) / 3.0;
    let bc = (4.0 * c - b) / 3.0;
    (16.0 * bc - ab) / 15.0
}

fn c11_properties() -> Result<Outcome> {
    let mut failed = Vec::new();
    let coeffs =
        || prop::collection::vec(-1.0..1.0f64, 1..4).prop_filter("non-constant", |c| c.iter().any(|x| x.abs() > 0.05));

    let fv = runner().run(
        &(-0.5..0.5f64, prop::collection::vec(-0.4..0.4f64, 1..3), 0usize..3, 0.05..2.0f64),
        |(mean, sin, pick, t)| {
            let psi = [ProfileFlux::limit(0.5, 1), ProfileFlux::limit(1.0 / 3.0, 2), ProfileFlux::limit(-0.25, 3)]
                [pick]
                .clone();
            let init = ProfileField::from_initial(&InitialProfile::Fourier { mean, cos: Vec::new(), sin }, 256);
            let lo = init.values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = init.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let tr = solve_entropy_fv(&psi, &init, &[t / 2.0, t], &FvOptions::default()).unwrap();
            let m0 = mean_value(&init);
            for f in &tr.frames {
                prop_assert!(f.values.iter().all(|&u| u >= lo - 1e-12 && u <= hi + 1e-12), "max principle");
                prop_assert!((mean_value(f) - m0).abs() <= MASS_TOL, "mass drift {}", mean_value(f) - m0);
            }
            Ok(())
        },
    );
    if let Err(e) = fv {
        failed.push(format!("finite volumes: {e}"));
    }

    let entries = catalog();
    let jets = runner().run(&(0usize..64, -1.0..1.0f64), |(pick, u)| {
        let e = &entries[pick % entries.len()];
        let u = if e.key.starts_with("flatbump") && u.abs() < 0.3 { 0.3 + u.abs() } else { u };
        for i in 0..e.flux.dim() {
            let jet = e.flux.eval_jet(i, u, 4).unwrap();
            for k in 1..=4 {
                let fd = richardson(|x| e.flux.eval_jet(i, x, k - 1).unwrap().derivative(k - 1), u, 1e-2);
                let scale = jet.derivative(k).abs().max(fd.abs()).max(1.0);
                prop_assert!((jet.derivative(k) - fd).abs() <= JET_TOL * scale, "{} k={}", e.key, k);
            }
        }
        Ok(())
    });
    if let Err(e) = jets {
        failed.push(format!("jets: {e}"));
    }

    let homog =
        runner().run(&(coeffs(), -5.0..5.0f64, 1.0..3.0f64, 0.1..0.9f64, 0.01..1.0f64), |(c, lambda, p, s, eta)| {
            let v = trig(256, &c);
            let lv: Vec<f64> = v.iter().map(|x| lambda * x).collect();
            let a = VarKernel::new(&v, p).unwrap().seminorm(s, 1.0, eta, 0.0, Regularity::Lipschitz).unwrap().value;
            let b = VarKernel::new(&lv, p).unwrap().seminorm(s, 1.0, eta, 0.0, Regularity::Lipschitz).unwrap().value;
            prop_assert!((b - lambda.abs() * a).abs() <= 1e-10 * a.max(1e-300) * lambda.abs().max(1.0));
            Ok(())
        });
    if let Err(e) = homog {
        failed.push(format!("homogeneity: {e}"));
    }

    let shift =
        runner().run(&(coeffs(), 1usize..256, 0.1..0.9f64, 0.05..0.7f64, -1.0..1.0f64), |(c, k, s, eta, x0)| {
            let n = 256;
            let v = trig(n, &c);
            let shifted: Vec<f64> = (0..n).map(|i| v[(i + k) % n]).collect();
            let a =
                VarKernel::new(&shifted, 1.0).unwrap().seminorm(s, 1.0, eta, x0, Regularity::Lipschitz).unwrap().value;
            let b = VarKernel::new(&v, 1.0)
                .unwrap()
                .seminorm(s, 1.0, eta, x0 + k as f64 * eta / n as f64, Regularity::Lipschitz)
                .unwrap()
                .value;
            prop_assert!((a - b).abs() <= 1e-9 * b, "{} vs {}", a, b);
            Ok(())
        });
    if let Err(e) = shift {
        failed.push(format!("translation: {e}"));
    }

    outcome(
        failed.is_empty(),
        if failed.is_empty() {
            format!("4 suites × {PROP_CASES} cases, seed {PROP_SEED:#x}")
        } else {
            failed.join("; ")
        },
    )
}

type Criterion = (u32, &'static str, f64, fn() -> Result<Outcome>);

const CRITERIA: &[Criterion] = &[
    (1, "alpha_sup exactness", 2.0, c1_alpha_sup),
    (2, "empirical alpha fit", 30.0, c2_alpha_fit),
    (3, "mu kernel", 5.0, c3_mu_kernel),
    (4, "1-D oscillation scaling", 60.0, c4_sobolev_scaling),
    (5, "shock time", 10.0, c5_shock_time),
    (6, "WKB order", 180.0, c6_wkb),
    (7, "cancellation", 180.0, c7_cancellation),
    (8, "planar cross-check", 120.0, c8_planar),
    (9, "smoothing dichotomy", 300.0, c9_smoothing),
    (10, "kernel vs brute force", 10.0, c10_oracle),
    (11, "property suites", 60.0, c11_properties),
];

fn main() {
    let strict = std::env::var("SMOOTHLAB_STRICT").is_ok_and(|v| v == "1");
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    for &(n, name, budget, f) in CRITERIA {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && secs <= budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = if pass {
            "PASS"
        } else if KNOWN_RED.contains(&n) {
            "FAIL (known)"
        } else {
            "FAIL"
        };
        println!("criterion {n:>2} {tag:<12} {name} [{secs:.1} s / {budget:.0} s]: {detail}");
        if !pass && (strict || !KNOWN_RED.contains(&n)) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("failing criteria: {unexpected:?}");
        std::process::exit(1);
    }
}
