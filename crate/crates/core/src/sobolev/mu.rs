use crate::error::{domain, invalid, Result};
use crate::quad::GaussRule;

fn binomial(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// `γ_{d,σ} = 1 / ((d-1+σ)(d-2+σ)⋯(1+σ))`, the right limit of `μ_{d,σ}` at 0.
pub fn gamma_ds(d: usize, sigma: f64) -> f64 {
    (1..d).map(|j| 1.0 / (j as f64 + sigma)).product()
}

/// `μ_{d,σ}(t₁) = ∫_{[0,1]^{d-1}} t₁^{1+σ} / (t₁ + t₂ + ⋯ + t_d)^{d+σ} dt₂⋯dt_d` in closed form.
pub fn mu_ds(d: usize, sigma: f64, t1: f64) -> Result<f64> {
    if d == 0 {
        return Err(invalid!("dimension must be at least 1"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid!("σ must be positive and finite"));
    }
    if !(t1 > 0.0) || !t1.is_finite() {
        return Err(domain!("μ needs t₁ > 0, got {}", t1));
    }
    if d == 1 {
        return Ok(1.0);
    }
    let e = 1.0 + sigma;
    let sum: f64 = (0..d)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(d - 1, k) * libm::pow(t1 / (t1 + k as f64), e)
        })
        .sum();
    Ok(gamma_ds(d, sigma) * sum)
}

/// Breakpoints `0, t₁, 2t₁, 4t₁, …, 1` that resolve the kernel's scale near 0.
fn graded_panels(t1: f64) -> alloc::vec::Vec<f64> {
    let mut v = alloc::vec![0.0];
    let mut x = t1.min(1.0);
    while x < 1.0 {
        v.push(x);
        x *= 2.0;
    }
    v.push(1.0);
    v
}

/// Defining integral of `μ_{d,σ}` by tensor Gauss–Legendre on graded panels, for `d ∈ {2, 3}`.
pub fn mu_ds_direct(d: usize, sigma: f64, t1: f64) -> Result<f64> {
    if !(t1 > 0.0) {
        return Err(domain!("μ needs t₁ > 0, got {}", t1));
    }
    let rule = GaussRule::new(20);
    let panels = graded_panels(t1);
    let num = libm::pow(t1, 1.0 + sigma);
    match d {
        2 => Ok(panels.windows(2).map(|w| rule.integrate(w[0], w[1], |h| num / libm::pow(t1 + h, 2.0 + sigma))).sum()),
        3 => {
            let mut s = 0.0;
            for a in panels.windows(2) {
                for (h2, w2) in rule.mapped(a[0], a[1]) {
                    for b in panels.windows(2) {
                        s += w2 * rule.integrate(b[0], b[1], |h3| num / libm::pow(t1 + h2 + h3, 3.0 + sigma));
                    }
                }
            }
            Ok(s)
        }
        _ => Err(invalid!("direct quadrature covers d ∈ {{2, 3}}, got {}", d)),
    }
}
