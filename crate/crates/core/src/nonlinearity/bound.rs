//! Sublevel-set bound `|{|φ| ≤ ε}| ≤ c̄_k ε^{1/k}` for `|φ^(k)| ≥ 1`.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fluxcalc::Expr;

/// `c̄_1 = 2`, `c̄_k = 4 (c̄_{k-1}/(k-1))^{(k-1)/k}`.
pub fn c_bar(k: u32) -> f64 {
    let mut c = 2.0;
    for j in 2..=k {
        let jf = j as f64;
        c = 4.0 * libm::pow(c / (jf - 1.0), (jf - 1.0) / jf);
    }
    c
}

/// Samples of `φ` and `φ^(k)` on an increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPhi {
    pub v: Vec<f64>,
    pub phi: Vec<f64>,
    pub dk: Vec<f64>,
}

impl SampledPhi {
    pub fn new(v: Vec<f64>, phi: Vec<f64>, dk: Vec<f64>) -> Result<Self> {
        if v.len() < 2 || v.len() != phi.len() || v.len() != dk.len() {
            return Err(invalid!("need at least two samples with matching lengths"));
        }
        if v.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid!("sample points must increase"));
        }
        Ok(Self { v, phi, dk })
    }

    /// Sample an expression and its `k`-th derivative on `n` uniform points of `[a, b]`.
    pub fn from_expr(e: &Expr, k: usize, a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(b > a) {
            return Err(invalid!("need n ≥ 2 and a < b"));
        }
        let mut v = Vec::with_capacity(n);
        let mut phi = Vec::with_capacity(n);
        let mut dk = Vec::with_capacity(n);
        for i in 0..n {
            let x = a + (b - a) * i as f64 / (n - 1) as f64;
            let j = e.eval_jet(x, k)?;
            v.push(x);
            phi.push(j.value());
            dk.push(j.derivative(k));
        }
        Self::new(v, phi, dk)
    }

    /// `|{|φ| ≤ ε}|` for the piecewise-linear interpolant.
    pub fn sublevel_measure(&self, eps: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.v.len() - 1 {
            let (x0, x1) = (self.v[i], self.v[i + 1]);
            let (g0, g1) = (self.phi[i], self.phi[i + 1]);
            let h = x1 - x0;
            if g0 == g1 {
                if libm::fabs(g0) <= eps {
                    total += h;
                }
                continue;
            }
            // Parameter interval where the linear segment lies in [-ε, ε].
            let s_a = (-eps - g0) / (g1 - g0);
            let s_b = (eps - g0) / (g1 - g0);
            let lo = s_a.min(s_b).max(0.0);
            let hi = s_a.max(s_b).min(1.0);
            if hi > lo {
                total += (hi - lo) * h;
            }
        }
        total
    }
}

/// Outcome of [`measure_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundCheck {
    pub holds: bool,
    pub measure: f64,
    pub bound: f64,
    pub c_bar: f64,
    pub min_dk: f64,
}

/// Compare the sampled sublevel measure with `c̄_k ε^{1/k}`.
///
/// Fails with [`Error::Hypothesis`] when some sample has `|φ^(k)| < 1`.
pub fn measure_bound_check(phi: &SampledPhi, k: u32, eps: f64) -> Result<BoundCheck> {
    if k == 0 {
        return Err(invalid!("k must be at least 1"));
    }
    if !(eps > 0.0) {
        return Err(invalid!("ε must be positive"));
    }
    let min_dk = phi.dk.iter().map(|x| libm::fabs(*x)).fold(f64::INFINITY, f64::min);
    if min_dk < 1.0 {
        return Err(Error::Hypothesis(alloc::format!("min |φ^({k})| = {min_dk} < 1 on the sampled interval")));
    }
    let c = c_bar(k);
    let measure = phi.sublevel_measure(eps);
    let bound = c * libm::pow(eps, 1.0 / k as f64);
    // Equality cases (φ linear, k = 1) must survive rounding of the interpolated crossings.
    let holds = measure <= bound * (1.0 + 1e-12);
    Ok(BoundCheck { holds, measure, bound, c_bar: c, min_dk })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxcalc::parse_expr;

    #[test]
    fn constants() {
        assert_eq!(c_bar(1), 2.0);
        assert!((c_bar(2) - 4.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!((c_bar(3) - 8.0).abs() < 1e-13);
    }

    #[test]
    fn examples() {
        let id = SampledPhi::from_expr(&parse_expr("u").unwrap(), 1, -1.0, 1.0, 2001).unwrap();
        let r = measure_bound_check(&id, 1, 0.3).unwrap();
        assert!(r.holds && (r.measure - 0.6).abs() < 1e-12);

        let sq = SampledPhi::from_expr(&parse_expr("u^2").unwrap(), 2, -1.0, 1.0, 20001).unwrap();
        let r = measure_bound_check(&sq, 2, 0.01).unwrap();
        assert!(r.holds && (r.measure - 0.2).abs() < 1e-3, "{r:?}");

        let cu = SampledPhi::from_expr(&parse_expr("u^3").unwrap(), 3, -1.0, 1.0, 20001).unwrap();
        let r = measure_bound_check(&cu, 3, 1e-3).unwrap();
        assert!(r.holds && (r.measure - 0.2).abs() < 1e-3, "{r:?}");
        assert!((r.bound - 0.8).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_failure() {
        let s = SampledPhi::from_expr(&parse_expr("u^2/4").unwrap(), 2, -1.0, 1.0, 101).unwrap();
        assert!(matches!(measure_bound_check(&s, 2, 0.1), Err(Error::Hypothesis(_))));
    }
}
