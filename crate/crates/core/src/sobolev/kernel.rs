use alloc::vec;
use alloc::vec::Vec;

use super::mu::{gamma_ds, mu_ds};
use super::{check_sp, Domain, Method, Regularity, SeminormResult};
use crate::error::{domain, invalid, Result};
use crate::quad::GaussRule;
use crate::tolerances::NEAR_PERIODS;

#[inline]
fn diff_p(a: f64, b: f64, p: f64) -> f64 {
    let d = libm::fabs(a - b);
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        libm::pow(d, p)
    }
}

/// `Var(H) = ∫₀¹ |v(X+H) - v(X)|^p dX` on the grid `H_j = j/N`, for samples `v(i/N)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarKernel {
    samples: Vec<f64>,
    p: f64,
    var: Vec<f64>,
}

/// `D_B = (∫_{-B}^{B} Var(H) |H|^{-1-sp} dH)^{1/p}` for `B ∈ {1/2, 1, ∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DConstants {
    pub s: f64,
    pub d_half: f64,
    pub d_one: f64,
    pub d_inf: f64,
    /// Estimated quadrature error of `D_∞`.
    pub error: f64,
}

/// Piecewise-linear periodic interpolation of grid values at `H_j = j/N`.
#[inline]
fn interp(s: &[f64], x: f64) -> f64 {
    let n = s.len();
    let y = x * n as f64;
    let f = libm::floor(y);
    let u = y - f;
    let j = (f as i64).rem_euclid(n as i64) as usize;
    (1.0 - u) * s[j] + u * s[(j + 1) % n]
}

struct Cells {
    nodes: [f64; 4],
    weights: [f64; 4],
}

impl Cells {
    fn new() -> Self {
        let r = GaussRule::new(4);
        let mut nodes = [0.0; 4];
        let mut weights = [0.0; 4];
        for (k, (x, w)) in r.mapped(0.0, 1.0).enumerate() {
            nodes[k] = x;
            weights[k] = w;
        }
        Self { nodes, weights }
    }

    /// `∫_from^to S(H) H^{-1-σ} ω(H) dH`, Gauss–Legendre on each grid cell.
    fn integrate(&self, s: &[f64], sigma: f64, weight: Option<&dyn Fn(f64) -> f64>, from: f64, to: f64) -> f64 {
        if !(to > from) {
            return 0.0;
        }
        let n = s.len();
        let nf = n as f64;
        let first = libm::floor(from * nf) as i64;
        let last = libm::ceil(to * nf) as i64;
        let e = -1.0 - sigma;
        let mut total = 0.0;
        for j in first..last {
            let a = (j as f64 / nf).max(from);
            let b = ((j + 1) as f64 / nf).min(to);
            if !(b > a) {
                continue;
            }
            let jj = j.rem_euclid(n as i64) as usize;
            let (s0, s1) = (s[jj], s[(jj + 1) % n]);
            if s0 == 0.0 && s1 == 0.0 {
                continue;
            }
            let mut acc = 0.0;
            for k in 0..4 {
                let h = a + (b - a) * self.nodes[k];
                let u = h * nf - j as f64;
                let sv = (1.0 - u) * s0 + u * s1;
                let mut kv = libm::pow(h, e);
                if let Some(w) = weight {
                    kv *= w(h);
                }
                acc += self.weights[k] * sv * kv;
            }
            total += (b - a) * acc;
        }
        total
    }
}

/// `∫₀^B S(H) H^{-1-σ} ω(H) dH` for a periodic grid function `S` with `S(0) = 0`.
///
/// The first cell uses `S(H) ≈ S(h)(H/h)^κ`; cells are integrated exactly up to
/// `NEAR_PERIODS`, and beyond that each period contributes its mean plus a first-moment
/// correction. Returns `(value, error estimate)`.
pub(crate) fn integrate_periodic(
    s: &[f64],
    sigma: f64,
    kappa: f64,
    b: f64,
    weight: Option<&dyn Fn(f64) -> f64>,
) -> Result<(f64, f64)> {
    if !(kappa > sigma) {
        return Err(domain!("Var(H) ~ H^{} is not integrable against |H|^(-1-{})", kappa, sigma));
    }
    if !(b > 0.0) {
        return Err(invalid!("integration range must be positive"));
    }
    if b.is_infinite() && weight.is_some() {
        return Err(invalid!("weighted kernels need a finite range"));
    }
    let n = s.len();
    let h = 1.0 / n as f64;
    let w = |x: f64| weight.map_or(1.0, |f| f(x));
    let kfun = |x: f64| libm::pow(x, -1.0 - sigma) * w(x);
    let cells = Cells::new();

    let b1 = h.min(b);
    let sb1 = interp(s, b1);
    let first = sb1 * libm::pow(b1, -sigma) / (kappa - sigma) * w(0.5 * b1);
    let mut err = if kappa != 1.0 && sigma < 1.0 {
        libm::fabs(first - sb1 * libm::pow(b1, -sigma) / (1.0 - sigma) * w(0.5 * b1))
    } else {
        0.5 * libm::fabs(first)
    };
    let near = b.min(NEAR_PERIODS as f64);
    let mut total = first + cells.integrate(s, sigma, weight, b1, near);
    if b > near {
        let mean = s.iter().sum::<f64>() / n as f64;
        let g2 = GaussRule::new(2);
        let mut m1 = 0.0;
        for j in 0..n {
            let (s0, s1) = (s[j], s[(j + 1) % n]);
            for (u, wu) in g2.mapped(0.0, 1.0) {
                let tau = (j as f64 + u) * h;
                m1 += h * wu * ((1.0 - u) * s0 + u * s1 - mean) * (tau - 0.5);
            }
        }
        if b.is_infinite() {
            let corr = m1 * kfun(near);
            total += mean * libm::pow(near, -sigma) / sigma - corr;
            err += libm::fabs(corr);
        } else {
            let whole = libm::floor(b);
            let ik = match weight {
                None => (libm::pow(near, -sigma) - libm::pow(whole, -sigma)) / sigma,
                Some(_) => {
                    let g8 = GaussRule::new(8);
                    let mut acc = 0.0;
                    let mut a = near;
                    while a < whole {
                        let e = (2.0 * a).min(whole);
                        acc += g8.integrate(a, e, kfun);
                        a = e;
                    }
                    acc
                }
            };
            let corr = m1 * (kfun(whole) - kfun(near));
            total += mean * ik + corr;
            err += libm::fabs(corr);
            total += cells.integrate(s, sigma, weight, whole, b);
        }
    }
    Ok((total, err))
}

fn mu_weight(d: usize, sigma: f64, scale: f64) -> impl Fn(f64) -> f64 {
    let g = gamma_ds(d, sigma);
    move |h: f64| mu_ds(d, sigma, h * scale).unwrap_or(g)
}

impl VarKernel {
    /// `N ≥ 64` samples of one period at `X_i = i/N`.
    pub fn new(samples: &[f64], p: f64) -> Result<Self> {
        let n = samples.len();
        if n < 64 {
            return Err(invalid!("need at least 64 samples, got {}", n));
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(invalid!("p must be finite and at least 1"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(invalid!("samples must be finite"));
        }
        let mut var = vec![0.0; n];
        for (j, out) in var.iter_mut().enumerate().skip(1) {
            let mut acc = 0.0;
            for i in 0..n {
                acc += diff_p(samples[(i + j) % n], samples[i], p);
            }
            *out = acc / n as f64;
        }
        Ok(Self { samples: samples.to_vec(), p, var })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `Var(j/N)` for `j = 0, …, N-1`.
    pub fn values(&self) -> &[f64] {
        &self.var
    }

    /// `Var(H)` by periodic linear interpolation.
    pub fn var(&self, h: f64) -> f64 {
        interp(&self.var, h)
    }

    /// `D_B` and its error estimate; `B` may be infinite.
    pub fn d_b(&self, s: f64, b: f64, reg: Regularity) -> Result<(f64, f64)> {
        check_sp(s, self.p)?;
        let sym: Vec<f64> = self.var.iter().map(|v| 2.0 * v).collect();
        let (v, e) = integrate_periodic(&sym, s * self.p, reg.kappa(self.p), b, None)?;
        Ok(root(v, e, self.p))
    }

    pub fn constants(&self, s: f64, reg: Regularity) -> Result<DConstants> {
        let (d_half, _) = self.d_b(s, 0.5, reg)?;
        let (d_one, _) = self.d_b(s, 1.0, reg)?;
        let (d_inf, error) = self.d_b(s, f64::INFINITY, reg)?;
        Ok(DConstants { s, d_half, d_one, d_inf, error })
    }

    /// `S(H) = Win(H) + Win(-H)` where `Win(H) = ∫_{X_lo}^{X_hi} |v(X+H) - v(X)|^p dX` over the
    /// window `[(x₀-A)/η, (x₀+A)/η]`, integrating the piecewise-linear interpolant exactly.
    pub fn window(&self, eta: f64, center: f64, a: f64) -> Vec<f64> {
        let n = self.samples.len();
        let lo = (center - a) / eta;
        let len = 2.0 * a / eta;
        let mut full = libm::floor(len);
        let mut r = len - full;
        if r < 1e-9 * len.max(1.0) {
            r = 0.0;
        } else if r > 1.0 - 1e-9 * len.max(1.0) {
            full += 1.0;
            r = 0.0;
        }
        let c = lo - libm::floor(lo);
        let mut win: Vec<f64> = self.var.iter().map(|v| full * v).collect();
        if r > 0.0 {
            let nf = n as f64;
            let mut f = vec![0.0; n + 1];
            let mut t = vec![0.0; n + 1];
            for (j, w) in win.iter_mut().enumerate() {
                if j == 0 {
                    continue;
                }
                for i in 0..n {
                    f[i] = diff_p(self.samples[(i + j) % n], self.samples[i], self.p);
                }
                f[n] = f[0];
                for k in 0..n {
                    t[k + 1] = t[k] + 0.5 * (f[k] + f[k + 1]) / nf;
                }
                let prim = |x: f64| -> f64 {
                    let (base, x) = if x >= 1.0 { (t[n], x - 1.0) } else { (0.0, x) };
                    let y = x * nf;
                    let k = (libm::floor(y) as usize).min(n - 1);
                    let d = y - k as f64;
                    base + t[k] + (d * f[k] + 0.5 * d * d * (f[k + 1] - f[k])) / nf
                };
                *w += prim(c + r) - prim(c);
            }
        }
        (0..n).map(|j| win[j] + win[(n - j) % n]).collect()
    }

    /// Tilde semi-norm of `V(x) = v(x/η)` over `[x₀-A, x₀+A]`.
    pub fn seminorm(&self, s: f64, a: f64, eta: f64, center: f64, reg: Regularity) -> Result<SeminormResult> {
        check_sp(s, self.p)?;
        check_box(a, eta)?;
        let sigma = s * self.p;
        let win = self.window(eta, center, a);
        let (v, e) = integrate_periodic(&win, sigma, reg.kappa(self.p), a / eta, None)?;
        let scale = libm::pow(eta, 1.0 - sigma);
        let (value, error) = root(scale * v, scale * e, self.p);
        Ok(SeminormResult {
            s,
            p: self.p,
            domain: Domain::Interval { center, half_width: a },
            value,
            method: Method::VarKernel,
            error_estimate: error,
        })
    }

    /// Tilde semi-norm over `Q_d(x₀, A)` of the planar field `W(x) = v(x₁/η)`, through the
    /// weight `2^{d-1} (2A)^{d-1} μ_{d,sp}(|h₁|/A)` on the 1-D kernel.
    pub fn seminorm_planar(
        &self,
        d: usize,
        s: f64,
        a: f64,
        eta: f64,
        center: f64,
        reg: Regularity,
    ) -> Result<SeminormResult> {
        if d == 0 {
            return Err(invalid!("dimension must be at least 1"));
        }
        if d == 1 {
            return self.seminorm(s, a, eta, center, reg);
        }
        check_sp(s, self.p)?;
        check_box(a, eta)?;
        let sigma = s * self.p;
        let win = self.window(eta, center, a);
        let weight = mu_weight(d, sigma, eta / a);
        let (v, e) = integrate_periodic(&win, sigma, reg.kappa(self.p), a / eta, Some(&weight))?;
        let pre = libm::pow(4.0 * a, (d - 1) as f64) * libm::pow(eta, 1.0 - sigma);
        let (value, error) = root(pre * v, pre * e, self.p);
        let mut c = vec![0.0; d];
        c[0] = center;
        Ok(SeminormResult {
            s,
            p: self.p,
            domain: Domain::Box { center: c, half_width: a },
            value,
            method: Method::VarKernel,
            error_estimate: error,
        })
    }

    /// Kernel path with the rectangle rule on the sample grid (`η = 1`): the same sum as
    /// [`seminorm_bruteforce`] regrouped by shift. `A·N` and `(x₀-A)·N` must be integers.
    pub fn seminorm_riemann(&self, s: f64, a: f64, center: f64) -> Result<SeminormResult> {
        check_sp(s, self.p)?;
        let n = self.samples.len();
        let (m, i0) = riemann_grid(n, a, center)?;
        let sigma = s * self.p;
        let nf = n as f64;
        let full = (2 * m / n) as f64;
        let rem = (2 * m) % n;
        let mut total = 0.0;
        for k in -(m as i64)..(m as i64) {
            if k == 0 {
                continue;
            }
            let j = k.rem_euclid(n as i64) as usize;
            let mut part = 0.0;
            for i in 0..rem {
                let x = (i0 + i) % n;
                part += diff_p(self.samples[(x + j) % n], self.samples[x], self.p);
            }
            let win = full * self.var[j] + part / nf;
            total += win * libm::pow(libm::fabs(k as f64) / nf, -1.0 - sigma) / nf;
        }
        Ok(SeminormResult {
            s,
            p: self.p,
            domain: Domain::Interval { center, half_width: a },
            value: libm::pow(total, 1.0 / self.p),
            method: Method::VarKernel,
            error_estimate: 0.0,
        })
    }
}

fn root(v: f64, e: f64, p: f64) -> (f64, f64) {
    let value = libm::pow(v.max(0.0), 1.0 / p);
    let error = if v > 0.0 { value * e / (p * v) } else { 0.0 };
    (value, error)
}

fn check_box(a: f64, eta: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid!("half-width A must be positive and finite"));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(invalid!("η must be positive and finite"));
    }
    Ok(())
}

fn riemann_grid(n: usize, a: f64, center: f64) -> Result<(usize, usize)> {
    let m = a * n as f64;
    let start = (center - a) * n as f64;
    if !(a > 0.0) || libm::fabs(m - libm::round(m)) > 1e-9 || libm::fabs(start - libm::round(start)) > 1e-9 {
        return Err(invalid!("A·N and (x₀-A)·N must be integers for the rectangle rule"));
    }
    Ok((libm::round(m) as usize, (libm::round(start) as i64).rem_euclid(n as i64) as usize))
}

/// `Σ_i Σ_{k≠0} |v(x_i + h_k) - v(x_i)|^p / |h_k|^{1+sp} / N²` over `x_i ∈ [x₀-A, x₀+A)`,
/// `h_k ∈ [-A, A)` on the sample grid: the O(N²) oracle of the kernel path.
pub fn seminorm_bruteforce(samples: &[f64], s: f64, p: f64, a: f64, center: f64) -> Result<f64> {
    check_sp(s, p)?;
    let n = samples.len();
    if n == 0 {
        return Err(invalid!("no samples"));
    }
    let (m, i0) = riemann_grid(n, a, center)?;
    let sigma = s * p;
    let nf = n as f64;
    let mut total = 0.0;
    for i in 0..2 * m {
        let x = (i0 + i) % n;
        for k in -(m as i64)..(m as i64) {
            if k == 0 {
                continue;
            }
            let y = (x as i64 + k).rem_euclid(n as i64) as usize;
            total += diff_p(samples[y], samples[x], p) * libm::pow(libm::fabs(k as f64) / nf, -1.0 - sigma);
        }
    }
    Ok(libm::pow(total / (nf * nf), 1.0 / p))
}

/// Tilde semi-norm of `V(x) = v(x/η)` over `[x₀-A, x₀+A]` from samples `v(i/N)` of one period.
pub fn seminorm_periodic_1d(
    samples: &[f64],
    s: f64,
    p: f64,
    a: f64,
    eta: f64,
    center: f64,
    reg: Regularity,
) -> Result<SeminormResult> {
    check_sp(s, p)?;
    VarKernel::new(samples, p)?.seminorm(s, a, eta, center, reg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn sine(n: usize) -> Vec<f64> {
        (0..n).map(|i| libm::sin(2.0 * PI * i as f64 / n as f64)).collect()
    }

    #[test]
    fn var_of_indicator_is_linear() {
        let n = 512;
        let v: Vec<f64> = (0..n).map(|i| if i < n / 2 { 1.0 } else { 0.0 }).collect();
        let k = VarKernel::new(&v, 1.0).unwrap();
        for j in [1, 10, 100, 256] {
            let h = j as f64 / n as f64;
            assert!((k.values()[j] - 2.0 * h).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_has_zero_norms() {
        let k = VarKernel::new(&[0.3; 128], 1.5).unwrap();
        assert!(k.values().iter().all(|&v| v == 0.0));
        let c = k.constants(0.5, Regularity::Lipschitz).unwrap();
        assert_eq!((c.d_half, c.d_one, c.d_inf), (0.0, 0.0, 0.0));
        assert_eq!(k.seminorm(0.5, 1.0, 0.01, 0.0, Regularity::Lipschitz).unwrap().value, 0.0);
    }

    #[test]
    fn var_of_sine_matches_double_sum() {
        // Var(1/2) = ∫|sin(2π(X+½)) - sin(2πX)| = 2∫|sin| = 4/π.
        let k = VarKernel::new(&sine(1024), 1.0).unwrap();
        assert!((k.var(0.5) - 4.0 / PI).abs() < 1e-5);
    }

    #[test]
    fn d_b_is_monotone_and_matches_direct_integral() {
        let k = VarKernel::new(&sine(2048), 1.0).unwrap();
        let c = k.constants(0.5, Regularity::Lipschitz).unwrap();
        assert!(0.0 < c.d_half && c.d_half <= c.d_one && c.d_one <= c.d_inf);
        // For v = sin(2πθ), Var(H) = (4/π)|sin(πH)|, so D_1 = ∫_{-1}^{1} (4/π)|sin πH| |H|^{-3/2} dH.
        let direct = 2.0
            * crate::quad::adaptive_simpson(
                |h: f64| if h == 0.0 { 0.0 } else { 4.0 / PI * (PI * h).sin() * h.powf(-1.5) },
                0.0,
                1.0,
                1e-12,
            );
        assert!((c.d_one - direct).abs() < 2e-3 * direct, "{} {}", c.d_one, direct);
    }

    #[test]
    fn sandwich_holds() {
        let k = VarKernel::new(&sine(1024), 1.0).unwrap();
        let c = k.constants(0.5, Regularity::Lipschitz).unwrap();
        for eta in [0.3, 0.05, 1.0 / 64.0, 0.0071] {
            let v = k.seminorm(0.5, 1.0, eta, 0.0, Regularity::Lipschitz).unwrap().value * eta.powf(0.5);
            assert!(v >= c.d_one && v <= 3.0 * c.d_inf, "{eta}: {v}");
        }
    }

    #[test]
    fn riemann_kernel_equals_bruteforce() {
        let n = 128;
        let v: Vec<f64> =
            (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos().powi(3) + 0.1 * i as f64 / n as f64).collect();
        let k = VarKernel::new(&v, 1.5).unwrap();
        let a = k.seminorm_riemann(0.4, 0.75, 0.25).unwrap().value;
        let b = seminorm_bruteforce(&v, 0.4, 1.5, 0.75, 0.25).unwrap();
        assert!((a - b).abs() < 1e-12 * b);
        assert!(k.seminorm_riemann(0.4, 0.7, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(seminorm_periodic_1d(&sine(64), 1.0, 1.0, 1.0, 1.0, 0.0, Regularity::Lipschitz).is_err());
        assert!(seminorm_periodic_1d(&sine(64), 0.5, 0.5, 1.0, 1.0, 0.0, Regularity::Lipschitz).is_err());
        let step: Vec<f64> = (0..64).map(|i| if i < 32 { 1.0 } else { 0.0 }).collect();
        assert!(seminorm_periodic_1d(&step, 0.5, 2.0, 1.0, 1.0, 0.0, Regularity::Discontinuous).is_err());
        assert!(seminorm_periodic_1d(&step, 0.4, 2.0, 1.0, 1.0, 0.0, Regularity::Discontinuous).is_ok());
    }
}
