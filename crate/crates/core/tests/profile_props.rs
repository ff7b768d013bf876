use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use smoothlab_core::fluxcalc::parse_flux;
use smoothlab_core::profile::{
    mean_value, shock_time, solve_characteristics, solve_entropy_fv, FvOptions, InitialProfile, ProfileField,
    ProfileFlux,
};
use smoothlab_core::scaling::ScalingFit;

const SEED: u64 = 0x9F0F_11E5;

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(SEED), failure_persistence: None, ..Config::default() }
}

fn fluxes() -> Vec<ProfileFlux> {
    let f = parse_flux("[u^2/2, u^3/3]").unwrap();
    vec![
        ProfileFlux::limit(0.5, 1),
        ProfileFlux::limit(1.0 / 3.0, 2),
        ProfileFlux::limit(-0.25, 3),
        ProfileFlux::psi_eps(&f, 0.2, &[0.6, 0.8], 1.5, 0.25).unwrap(),
    ]
}

fn fourier() -> impl Strategy<Value = InitialProfile> {
    (-0.5..0.5f64, prop::collection::vec(-0.4..0.4f64, 0..3), prop::collection::vec(-0.4..0.4f64, 1..3))
        .prop_map(|(mean, cos, sin)| InitialProfile::Fourier { mean, cos, sin })
}

fn riemann() -> impl Strategy<Value = InitialProfile> {
    (-1.0..1.0f64, -1.0..1.0f64, 0.1..0.9f64).prop_map(|(left, right, split)| InitialProfile::Riemann {
        left,
        right,
        split,
    })
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn fv_obeys_max_principle_and_conserves_mass(
        pick in 0usize..4,
        u0 in prop_oneof![fourier(), riemann()],
        n in prop_oneof![Just(64usize), Just(200), Just(512)],
        t in 0.05..2.0f64,
    ) {
        let psi = &fluxes()[pick];
        let init = ProfileField::from_initial(&u0, n);
        let lo = init.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = init.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let times = [t / 4.0, t / 2.0, t];
        let tr = solve_entropy_fv(psi, &init, &times, &FvOptions::default()).unwrap();
        let m0 = mean_value(&init);
        for f in &tr.frames {
            prop_assert!(f.values.iter().all(|&u| u >= lo - 1e-12 && u <= hi + 1e-12));
            prop_assert!((mean_value(f) - m0).abs() <= 1e-10, "{}", mean_value(f) - m0);
        }
    }
}

#[test]
fn conservation_over_ten_thousand_steps() {
    let psi = ProfileFlux::limit(0.5, 1);
    let u0 = InitialProfile::Fourier { mean: 1.0, cos: vec![], sin: vec![0.5] };
    let init = ProfileField::from_initial(&u0, 4096);
    let tr = solve_entropy_fv(&psi, &init, &[2.0], &FvOptions::default()).unwrap();
    assert!(tr.steps >= 10_000, "{}", tr.steps);
    assert!((mean_value(&tr.frames[0]) - mean_value(&init)).abs() <= 1e-10);
}

#[test]
fn fv_converges_to_characteristics_before_the_shock() {
    let u0 = InitialProfile::sine();
    for psi in [ProfileFlux::limit(0.5, 1), ProfileFlux::limit(1.0 / 3.0, 2)] {
        let ts = shock_time(&psi, &u0).unwrap().unwrap();
        let t = 0.85 * ts;
        let mut pairs = Vec::new();
        for n in [256usize, 512, 1024, 2048] {
            let fv = solve_entropy_fv(&psi, &ProfileField::from_initial(&u0, n), &[t], &FvOptions::default()).unwrap();
            let ch = solve_characteristics(&psi, &u0, t, n).unwrap();
            pairs.push((1.0 / n as f64, fv.frames[0].l1_distance(&ch).unwrap()));
        }
        let rate = ScalingFit::loglog(&pairs).slope;
        assert!(rate >= 0.8, "rate {rate}");
    }
}

/// `T*(ε) ≥ 1/(m·d₀)` with `m = sup |ψ_ε''|` on the data range and `d₀ = sup |U₀'|`.
#[test]
fn life_span_is_uniform_in_eps() {
    let f = parse_flux("[u^2/2, u^3/3]").unwrap();
    let u0 = InitialProfile::sine();
    let d0 = 2.0 * std::f64::consts::PI;
    let eps: Vec<f64> = (0..=12).map(|k| 2f64.powi(-k)).collect();
    let mut m = 0.0f64;
    for &e in &eps {
        let psi = ProfileFlux::psi_eps(&f, 0.0, &[0.0, 1.0], 1.5, e).unwrap();
        for j in 0..=400 {
            let u = -1.0 + j as f64 / 200.0;
            m = m.max(psi.d2psi(u).unwrap().abs());
        }
    }
    let bound = 1.0 / (m * d0);
    for &e in &eps {
        let psi = ProfileFlux::psi_eps(&f, 0.0, &[0.0, 1.0], 1.5, e).unwrap();
        let ts = shock_time(&psi, &u0).unwrap().unwrap_or(f64::INFINITY);
        assert!(ts >= bound * (1.0 - 1e-9), "ε={e}: {ts} < {bound}");
    }
}

#[test]
fn oscillations_decay_after_the_shock() {
    let psi = ProfileFlux::limit(0.5, 1);
    let u0 = InitialProfile::Fourier { mean: 0.1, cos: vec![0.3], sin: vec![1.0] };
    let init = ProfileField::from_initial(&u0, 1024);
    let tr = solve_entropy_fv(&psi, &init, &[1.0, 2.0, 4.0, 8.0], &FvOptions::default()).unwrap();
    let dev: Vec<f64> =
        tr.frames.iter().map(|f| f.values.iter().map(|u| (u - 0.1).abs()).sum::<f64>() / 1024.0).collect();
    assert!(dev.windows(2).all(|w| w[1] < w[0]), "{dev:?}");
}
