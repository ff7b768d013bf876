use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use smoothlab_core::scaling::ScalingFit;
use smoothlab_core::sobolev::{
    gamma_ds, mu_ds, seminorm_box, seminorm_bruteforce, seminorm_spacetime, BoxOptions, Regularity, VarKernel,
};

const SEED: u64 = 0x50B0_1E55;

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(SEED), failure_persistence: None, ..Config::default() }
}

/// Random trigonometric polynomial sampled at `i/n`.
fn trig_samples(n: usize, c: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let x = i as f64 / n as f64;
            c.iter().enumerate().map(|(k, ck)| ck * ((k + 1) as f64 * TAU * x + k as f64).sin()).sum()
        })
        .collect()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 1..4).prop_filter("non-constant", |c| c.iter().any(|x| x.abs() > 0.05))
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn homogeneity(c in coeffs(), lambda in -5.0..5.0f64, p in 1.0..3.0f64, s in 0.1..0.9f64, eta in 0.01..1.0f64) {
        let v = trig_samples(256, &c);
        let lv: Vec<f64> = v.iter().map(|x| lambda * x).collect();
        let a = VarKernel::new(&v, p).unwrap().seminorm(s, 1.0, eta, 0.0, Regularity::Lipschitz).unwrap();
        let b = VarKernel::new(&lv, p).unwrap().seminorm(s, 1.0, eta, 0.0, Regularity::Lipschitz).unwrap();
        prop_assert!((b.value - lambda.abs() * a.value).abs() <= 1e-10 * a.value.max(1e-300) * lambda.abs().max(1.0));
    }

    #[test]
    fn homogeneity_is_exact_for_p_one(c in coeffs(), k in -6i32..6) {
        let v = trig_samples(256, &c);
        let lambda = 2f64.powi(k);
        let lv: Vec<f64> = v.iter().map(|x| lambda * x).collect();
        let a = VarKernel::new(&v, 1.0).unwrap().seminorm(0.5, 1.0, 0.1, 0.0, Regularity::Lipschitz).unwrap();
        let b = VarKernel::new(&lv, 1.0).unwrap().seminorm(0.5, 1.0, 0.1, 0.0, Regularity::Lipschitz).unwrap();
        prop_assert_eq!(b.value, lambda * a.value);
    }

    /// Shifting the data by `k` samples equals shifting the window center by `kη/N`.
    #[test]
    fn translation_invariance(c in coeffs(), k in 1usize..256, s in 0.1..0.9f64, eta in 0.05..0.7f64, x0 in -1.0..1.0f64) {
        let n = 256;
        let v = trig_samples(n, &c);
        let shifted: Vec<f64> = (0..n).map(|i| v[(i + k) % n]).collect();
        let a = VarKernel::new(&shifted, 1.0).unwrap().seminorm(s, 1.0, eta, x0, Regularity::Lipschitz).unwrap();
        let b = VarKernel::new(&v, 1.0).unwrap()
            .seminorm(s, 1.0, eta, x0 + k as f64 * eta / n as f64, Regularity::Lipschitz).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-10 * a.value, "{} {}", a.value, b.value);
        let whole = VarKernel::new(&v, 1.0).unwrap().seminorm(s, 1.0, eta, x0 + 3.0 * eta, Regularity::Lipschitz).unwrap();
        let base = VarKernel::new(&v, 1.0).unwrap().seminorm(s, 1.0, eta, x0, Regularity::Lipschitz).unwrap();
        prop_assert!((whole.value - base.value).abs() <= 1e-10 * base.value);
    }

    #[test]
    fn monotone_in_half_width(c in coeffs(), s in 0.1..0.9f64, eta in 0.02..1.0f64, a0 in 0.1..2.0f64, grow in 0.0..2.0f64) {
        let k = VarKernel::new(&trig_samples(256, &c), 1.0).unwrap();
        let small = k.seminorm(s, a0, eta, 0.2, Regularity::Lipschitz).unwrap();
        let large = k.seminorm(s, a0 + grow, eta, 0.2, Regularity::Lipschitz).unwrap();
        prop_assert!(large.value >= small.value * (1.0 - 1e-12));
    }

    #[test]
    fn var_bounds_and_periodicity(c in coeffs(), p in 1.0..3.0f64, h in 0.0..1.0f64) {
        let v = trig_samples(256, &c);
        let k = VarKernel::new(&v, p).unwrap();
        let lp = v.iter().map(|x| x.abs().powf(p)).sum::<f64>() / 256.0;
        let var = k.var(h);
        prop_assert!(var >= 0.0 && var <= 2f64.powf(p) * lp * (1.0 + 1e-12));
        prop_assert!((k.var(h + 1.0) - var).abs() <= 1e-12 * var.max(1.0));
    }

    #[test]
    fn kernel_matches_bruteforce(c in coeffs(), s in 0.1..0.9f64, p in 1.0..2.5f64, m in 40usize..200, off in 0usize..256) {
        let n = 256;
        let v = trig_samples(n, &c);
        let a = m as f64 / n as f64;
        let center = (off + m) as f64 / n as f64;
        let k = VarKernel::new(&v, p).unwrap().seminorm_riemann(s, a, center).unwrap();
        let b = seminorm_bruteforce(&v, s, p, a, center).unwrap();
        prop_assert!((k.value - b).abs() <= 1e-10 * b, "{} {}", k.value, b);
    }
}

#[test]
fn mu_sandwich() {
    for d in [2, 3] {
        for sigma in [0.3, 0.7, 1.2] {
            let vals: Vec<f64> = (1..=100).map(|i| mu_ds(d, sigma, 2.0 * i as f64 / 100.0).unwrap()).collect();
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(0.0, f64::max);
            assert!(lo > 0.0 && hi <= gamma_ds(d, sigma) * (1.0 + 1e-12), "d={d} σ={sigma}: [{lo}, {hi}]");
        }
    }
}

#[test]
fn constant_data_has_zero_seminorm() {
    let k = VarKernel::new(&[0.7; 128], 1.5).unwrap();
    assert_eq!(k.seminorm(0.5, 1.0, 0.1, 0.0, Regularity::Lipschitz).unwrap().value, 0.0);
    let c = k.constants(0.5, Regularity::Lipschitz).unwrap();
    assert_eq!((c.d_half, c.d_one, c.d_inf), (0.0, 0.0, 0.0));
}

#[test]
fn rescaling_by_two_to_the_minus_six() {
    let v: Vec<f64> = (0..1024).map(|i| (TAU * i as f64 / 1024.0).sin()).collect();
    let k = VarKernel::new(&v, 1.0).unwrap();
    let base = k.seminorm(0.5, 1.0, 2f64.powi(-4), 0.0, Regularity::Lipschitz).unwrap().value;
    let small = k.seminorm(0.5, 1.0, 2f64.powi(-10), 0.0, Regularity::Lipschitz).unwrap().value;
    assert!((small / base / 8.0 - 1.0).abs() < 0.1, "{}", small / base);
}

#[test]
fn scaling_slope_for_gamma_two() {
    let v: Vec<f64> = (0..4096).map(|i| (TAU * i as f64 / 4096.0).sin()).collect();
    let k = VarKernel::new(&v, 1.0).unwrap();
    let pairs: Vec<(f64, f64)> = (3..=9)
        .map(|j| {
            let e = 2f64.powi(-j);
            (e, k.seminorm(0.5, 1.0, e * e, 0.0, Regularity::Lipschitz).unwrap().value)
        })
        .collect();
    let slope = ScalingFit::loglog(&pairs).slope;
    assert!((slope + 1.0).abs() < 0.05, "{slope}");
}

/// The box value over the planar field divided by the 1-D value does not depend on ε.
#[test]
fn planar_box_ratio_is_eps_independent() {
    let v: Vec<f64> = (0..2048).map(|i| (TAU * i as f64 / 2048.0).sin()).collect();
    let k = VarKernel::new(&v, 1.0).unwrap();
    let ratio = |eta: f64| {
        let d2 = k.seminorm_planar(2, 0.5, 1.0, eta, 0.0, Regularity::Lipschitz).unwrap().value;
        let d1 = k.seminorm(0.5, 1.0, eta, 0.0, Regularity::Lipschitz).unwrap().value;
        d2 / d1
    };
    let (r1, r2) = (ratio(1.0 / 64.0), ratio(1.0 / 1024.0));
    assert!((r1 / r2 - 1.0).abs() < 0.02, "{r1} {r2}");
}

/// `W_ε(x) = sin(2π(x₁ - x₂)/ε^γ)` grows like `ε^{-sγ}` on a box of half-width 1/4.
#[test]
fn diagonal_oscillation_scales() {
    let (gamma, s) = (1.5, 0.5);
    let pairs: Vec<(f64, f64)> = [0.125, 0.0625]
        .iter()
        .map(|&e: &f64| {
            let eta = e.powf(gamma);
            let f = move |x: f64, y: f64| (TAU * (x - y) / eta).sin();
            let opts = BoxOptions { levels: 12, order: 4, resolution: [eta, eta] };
            (e, seminorm_box(&f, s, 1.0, [0.0, 0.0], 0.25, &opts).unwrap().value)
        })
        .collect();
    let slope = ScalingFit::loglog(&pairs).slope;
    assert!((slope + s * gamma).abs() < 0.1 * s * gamma, "{slope}");
}

#[test]
fn time_constant_trajectory_matches_the_static_box() {
    let f = |_t: f64, x: f64| (PI * x).sin() + 0.3 * (TAU * x).cos();
    let opts = BoxOptions::default();
    let st = seminorm_spacetime(&f, (0.0, 2.0), 0.4, 1.0, 1.0, 0.1, 0.4, &opts).unwrap();
    let bx = seminorm_box(&|x: f64, y: f64| f(x, y), 0.4, 1.0, [1.0, 0.1], 0.4, &opts).unwrap();
    assert!((st.value - bx.value).abs() <= 1e-12 * bx.value + st.error_estimate);
    assert!(seminorm_spacetime(&f, (0.5, 2.0), 0.4, 1.0, 1.0, 0.1, 0.4, &opts).is_err());
}
