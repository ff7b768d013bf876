use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use smoothlab_core::fluxcalc::{catalog, parse_flux, Expr, Jet};

const SEED: u64 = 0x0F1A_5EED;

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(SEED), failure_persistence: None, ..Config::default() }
}

/// Richardson-extrapolated central difference of `g` at `u`, three levels.
fn richardson(g: impl Fn(f64) -> f64, u: f64, h: f64) -> f64 {
    let d = |h: f64| (g(u + h) - g(u - h)) / (2.0 * h);
    let (a, b, c) = (d(h), d(h / 2.0), d(h / 4.0));
    let ab = (4.0 * b - a) / 3.0;
    let bc = (4.0 * c - b) / 3.0;
    (16.0 * bc - ab) / 15.0
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![Just(Expr::Var), (-3.0..3.0f64).prop_map(|c| Expr::Const((c * 8.0).round() / 8.0))];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Sin(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Cos(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Exp(Box::new(Expr::Sin(Box::new(a))))),
            (inner, 2..4i32).prop_map(|(a, n)| Expr::PowInt(Box::new(a), n)),
        ]
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(config(100))]

    /// Order 1 from values; order `k ≥ 2` by differentiating the order `k-1` jet numerically.
    #[test]
    fn catalog_jets_match_finite_differences(pick in 0usize..64, u in -1.0..1.0f64) {
        let entries = catalog();
        let e = &entries[pick % entries.len()];
        let u = if e.key.starts_with("flatbump") && u.abs() < 0.3 { 0.3 + u.abs() } else { u };
        let f = &e.flux;
        for i in 0..f.dim() {
            let jet = f.eval_jet(i, u, 6).unwrap();
            let fd1 = richardson(|x| f.eval_jet(i, x, 0).unwrap().value(), u, 1e-2);
            prop_assert!(rel_close(jet.derivative(1), fd1, 1e-6), "{} k=1: {} vs {}", e.key, jet.derivative(1), fd1);
            for k in 2..=6 {
                let fd = richardson(|x| f.eval_jet(i, x, k - 1).unwrap().derivative(k - 1), u, 1e-2);
                prop_assert!(rel_close(jet.derivative(k), fd, 1e-6), "{} k={}: {} vs {}", e.key, k, jet.derivative(k), fd);
            }
        }
    }

    #[test]
    fn product_jets_are_leibniz_convolutions(
        a in prop::collection::vec(-4i32..5, 1..6),
        b in prop::collection::vec(-4i32..5, 1..6),
        u in -2.0..2.0f64,
    ) {
        let order = 8;
        let poly = |c: &[i32]| -> Jet {
            let x = Jet::variable(u, order);
            let mut acc = Jet::constant(u, 0.0, order);
            let mut pw = Jet::constant(u, 1.0, order);
            for &ci in c {
                acc = acc.add(&pw.scale(ci as f64));
                pw = pw.mul(&x);
            }
            acc
        };
        let (fa, fb) = (poly(&a), poly(&b));
        let prod = fa.mul(&fb);
        for k in 0..=order {
            let conv: f64 = (0..=k).map(|j| fa.coeffs[j] * fb.coeffs[k - j]).sum();
            prop_assert_eq!(prod.coeffs[k], conv);
        }
    }

    #[test]
    fn printed_flux_round_trips(es in prop::collection::vec(expr_strategy(), 1..4), pts in prop::collection::vec(-1.0..1.0f64, 20)) {
        let spec = format!("[{}]", es.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "));
        let f = parse_flux(&spec).unwrap();
        let g = parse_flux(&f.to_string()).unwrap();
        prop_assert_eq!(f.dim(), g.dim());
        for &u in &pts {
            for i in 0..f.dim() {
                let a = f.eval_jet(i, u, 4).unwrap();
                let b = g.eval_jet(i, u, 4).unwrap();
                prop_assert_eq!(a.coeffs, b.coeffs, "{}", spec);
            }
        }
    }
}
