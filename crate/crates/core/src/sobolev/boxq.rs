use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_sp, Domain, Method, SeminormResult};
use crate::error::{domain, invalid, Result};
use crate::quad::GaussRule;
use crate::tolerances::GRADED_LEVELS;

/// Settings of the graded tensor quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxOptions {
    /// Dyadic shells of `h` toward 0.
    pub levels: usize,
    /// Gauss–Legendre points per panel and axis.
    pub order: usize,
    /// Largest panel width per axis, in `x` and in `h`; set it below the oscillation period.
    pub resolution: [f64; 2],
}

impl Default for BoxOptions {
    fn default() -> Self {
        Self { levels: GRADED_LEVELS, order: 6, resolution: [f64::INFINITY; 2] }
    }
}

fn panel_nodes(rule: &GaussRule, a: f64, b: f64, res: f64, min_panels: usize) -> Vec<(f64, f64)> {
    let k = if res.is_finite() { libm::ceil((b - a) / res) as usize } else { 1 }.max(min_panels);
    let w = (b - a) / k as f64;
    (0..k).flat_map(|i| rule.mapped(a + i as f64 * w, a + (i + 1) as f64 * w).collect::<Vec<_>>()).collect()
}

/// `∫_{[-A,A]²} ∫_{Q(c,A)} |f(x+h) - f(x)|^p / (|h₁|+|h₂|)^{2+σ} dx dh` over dyadic shells of
/// `h`. The part inside the last shell is added as a geometric tail with ratio `2^{σ-p}`; the
/// error estimate compares it with the tail implied by the ratio of the last two shells.
fn graded_integral<F: Fn(f64, f64) -> f64>(
    f: &F,
    sigma: f64,
    p: f64,
    center: [f64; 2],
    a: f64,
    opts: &BoxOptions,
) -> (f64, f64) {
    let rule = GaussRule::new(opts.order);
    let xs = panel_nodes(&rule, center[0] - a, center[0] + a, opts.resolution[0], 8);
    let ys = panel_nodes(&rule, center[1] - a, center[1] + a, opts.resolution[1], 8);
    let mut base = Vec::with_capacity(xs.len() * ys.len());
    for &(y, wy) in &ys {
        for &(x, wx) in &xs {
            base.push((x, y, wx * wy, f(x, y)));
        }
    }
    let pw = |d: f64| if p == 1.0 { libm::fabs(d) } else { libm::pow(libm::fabs(d), p) };
    let mut total = 0.0;
    let mut prev = 0.0;
    let mut last = 0.0;
    for level in 0..opts.levels {
        let outer = a * libm::ldexp(1.0, -(level as i32));
        let inner = 0.5 * outer;
        let spans = [(-outer, -inner), (-inner, 0.0), (0.0, inner), (inner, outer)];
        let mut shell = 0.0;
        for (ix, &(x0, x1)) in spans.iter().enumerate() {
            for (iy, &(y0, y1)) in spans.iter().enumerate() {
                if (1..3).contains(&ix) && (1..3).contains(&iy) {
                    continue;
                }
                for (h1, w1) in panel_nodes(&rule, x0, x1, opts.resolution[0], 1) {
                    for (h2, w2) in panel_nodes(&rule, y0, y1, opts.resolution[1], 1) {
                        let mut inner_sum = 0.0;
                        for &(x, y, w, fx) in &base {
                            inner_sum += w * pw(f(x + h1, y + h2) - fx);
                        }
                        let r = libm::fabs(h1) + libm::fabs(h2);
                        shell += w1 * w2 * inner_sum * libm::pow(r, -2.0 - sigma);
                    }
                }
            }
        }
        total += shell;
        prev = last;
        last = shell;
    }
    let ratio = libm::pow(2.0, -(p - sigma));
    let tail = last * ratio / (1.0 - ratio);
    let observed = if prev > 0.0 && last < prev { last * (last / prev) / (1.0 - last / prev) } else { 2.0 * tail };
    (total + tail, libm::fabs(observed - tail))
}

/// Tilde semi-norm of `f: R² → R` over `Q_2(c, A)` by graded tensor quadrature.
pub fn seminorm_box<F: Fn(f64, f64) -> f64>(
    f: &F,
    s: f64,
    p: f64,
    center: [f64; 2],
    a: f64,
    opts: &BoxOptions,
) -> Result<SeminormResult> {
    check_sp(s, p)?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid!("half-width A must be positive and finite"));
    }
    if opts.levels == 0 || opts.order == 0 {
        return Err(invalid!("levels and order must be positive"));
    }
    let (v, e) = graded_integral(f, s * p, p, center, a, opts);
    let value = libm::pow(v, 1.0 / p);
    let error = if v > 0.0 { value * e / (p * v) } else { 0.0 };
    Ok(SeminormResult {
        s,
        p,
        domain: Domain::Box { center: center.to_vec(), half_width: a },
        value,
        method: Method::GradedQuadrature,
        error_estimate: error,
    })
}

/// Stratified Monte-Carlo estimate of the `p`-th power of the box semi-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonteCarloEstimate {
    pub value_p: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl MonteCarloEstimate {
    /// Whether a quadrature value `q` (with its error estimate) lies within three standard errors.
    pub fn agrees_with(&self, q: &SeminormResult) -> bool {
        let vp = libm::pow(q.value, q.p);
        let ep = if q.value > 0.0 { q.p * vp * q.error_estimate / q.value } else { 0.0 };
        libm::fabs(vp - self.value_p) <= 3.0 * self.std_error + ep
    }
}

/// `h` is drawn with `|h|₁` of density `∝ r^{p-σ-1}` on `(0, 2A]` and uniform direction on the
/// `ℓ¹` sphere, so the weighted integrand stays bounded for Lipschitz `f`; the radial variate
/// is stratified into equal-probability bins.
pub fn seminorm_box_mc<F: Fn(f64, f64) -> f64>(
    f: &F,
    s: f64,
    p: f64,
    center: [f64; 2],
    a: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_sp(s, p)?;
    if !(a > 0.0) {
        return Err(invalid!("half-width A must be positive"));
    }
    let strata = samples.clamp(2, 1024);
    let per = samples / strata;
    if per < 2 {
        return Err(invalid!("need at least {} samples", 2 * strata));
    }
    let sigma = s * p;
    let beta = p - sigma;
    let rmax = 2.0 * a;
    let vol = 4.0 * a * a;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = 0.0;
    let mut var = 0.0;
    for k in 0..strata {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for _ in 0..per {
            let u = (k as f64 + rng.gen::<f64>()) / strata as f64;
            let r = rmax * libm::pow(u, 1.0 / beta);
            let t = 4.0 * rng.gen::<f64>();
            let edge = t as usize;
            let fr = t - edge as f64;
            let (mut h1, mut h2) = (r * (1.0 - fr), r * fr);
            for _ in 0..edge {
                (h1, h2) = (-h2, h1);
            }
            let x = center[0] + a * (2.0 * rng.gen::<f64>() - 1.0);
            let y = center[1] + a * (2.0 * rng.gen::<f64>() - 1.0);
            let val = if libm::fabs(h1) > a || libm::fabs(h2) > a || r == 0.0 {
                0.0
            } else {
                let d = libm::pow(libm::fabs(f(x + h1, y + h2) - f(x, y)), p);
                // density of h: β r^{β-1} / (rmax^β · 4r)
                let weight = 4.0 * libm::pow(rmax, beta) * libm::pow(r, 2.0 - beta) / beta;
                vol * weight * d * libm::pow(r, -2.0 - sigma)
            };
            s1 += val;
            s2 += val * val;
        }
        let m = s1 / per as f64;
        let v = (s2 / per as f64 - m * m).max(0.0) * per as f64 / (per - 1) as f64;
        mean += m / strata as f64;
        var += v / (per as f64 * (strata * strata) as f64);
    }
    Ok(MonteCarloEstimate { value_p: mean, std_error: libm::sqrt(var), samples: strata * per, seed })
}

/// Space-time tilde semi-norm of `u(t, x)` over `[t₀-A, t₀+A] × [x₀-A, x₀+A]` with kernel
/// `(|τ|+|ξ|)^{-2-sp}`. The integrand reaches `t₀ ± 2A`, so `[t₀-2A, t₀+2A]` must lie in `t_range`.
#[allow(clippy::too_many_arguments)]
pub fn seminorm_spacetime<F: Fn(f64, f64) -> f64>(
    u: &F,
    t_range: (f64, f64),
    s: f64,
    p: f64,
    t0: f64,
    x0: f64,
    a: f64,
    opts: &BoxOptions,
) -> Result<SeminormResult> {
    if !(a > 0.0) {
        return Err(invalid!("half-width A must be positive"));
    }
    if t0 - 2.0 * a < t_range.0 || t0 + 2.0 * a > t_range.1 {
        return Err(domain!(
            "space-time box needs data on [{}, {}], trajectory covers [{}, {}]",
            t0 - 2.0 * a,
            t0 + 2.0 * a,
            t_range.0,
            t_range.1
        ));
    }
    let mut r = seminorm_box(u, s, p, [t0, x0], a, opts)?;
    r.domain = Domain::SpaceTime { t0, x0, half_width: a };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sobolev::{Regularity, VarKernel};
    use crate::tolerances::MC_SEED;
    use core::f64::consts::PI;

    #[test]
    fn constant_field_is_zero() {
        let r = seminorm_box(&|_: f64, _: f64| 1.5, 0.5, 1.0, [0.0, 0.0], 1.0, &BoxOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn planar_field_matches_mu_path() {
        let n = 1024;
        let v: Vec<f64> = (0..n).map(|i| libm::sin(2.0 * PI * i as f64 / n as f64)).collect();
        let k = VarKernel::new(&v, 1.0).unwrap();
        let planar = k.seminorm_planar(2, 0.5, 0.5, 1.0, 0.0, Regularity::Lipschitz).unwrap();
        let f = |x: f64, _y: f64| libm::sin(2.0 * PI * x);
        let opts = BoxOptions { resolution: [0.125, 0.5], ..BoxOptions::default() };
        let b = seminorm_box(&f, 0.5, 1.0, [0.0, 0.0], 0.5, &opts).unwrap();
        assert!((b.value - planar.value).abs() < 2e-3 * planar.value, "{} {}", b.value, planar.value);
    }

    #[test]
    fn monte_carlo_agrees() {
        let f = |x: f64, y: f64| libm::sin(2.0 * PI * x) * libm::cos(PI * y);
        let q = seminorm_box(&f, 0.4, 1.0, [0.1, -0.2], 0.5, &BoxOptions::default()).unwrap();
        let mc = seminorm_box_mc(&f, 0.4, 1.0, [0.1, -0.2], 0.5, 200_000, MC_SEED).unwrap();
        assert!(mc.agrees_with(&q), "{} vs {} ± {}", q.value, mc.value_p, mc.std_error);
        assert!(mc.std_error < 0.02 * mc.value_p);
    }

    #[test]
    fn spacetime_needs_room() {
        let u = |t: f64, x: f64| t + x;
        let o = BoxOptions::default();
        assert!(seminorm_spacetime(&u, (0.0, 1.0), 0.5, 1.0, 0.5, 0.0, 0.3, &o).is_err());
        assert!(seminorm_spacetime(&u, (0.0, 1.0), 0.5, 1.0, 0.5, 0.0, 0.2, &o).is_ok());
    }
}
