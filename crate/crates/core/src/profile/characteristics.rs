use alloc::vec::Vec;

use super::flux::ProfileFlux;
use super::initial::{InitialProfile, ProfileField, Solver};
use crate::error::{invalid, Error, Result};
use crate::tolerances::{CHARACTERISTIC_TOL, SHOCK_SAFETY, SHOCK_SAMPLES};

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// `T* = 1 / sup_θ max(0, -ψ''(U₀(θ)) U₀'(θ))`, or `None` when the supremum is `≤ 0`.
pub fn shock_time(psi: &ProfileFlux, u0: &InitialProfile) -> Result<Option<f64>> {
    breaking_time(psi, u0, -1.0)
}

/// Largest `δ` such that characteristics do not cross on `]-δ, 0]`:
/// `1 / sup_θ max(0, ψ''(U₀(θ)) U₀'(θ))`, or `None` when the supremum is `≤ 0`.
pub fn backward_shock_time(psi: &ProfileFlux, u0: &InitialProfile) -> Result<Option<f64>> {
    breaking_time(psi, u0, 1.0)
}

fn breaking_time(psi: &ProfileFlux, u0: &InitialProfile, sign: f64) -> Result<Option<f64>> {
    if !u0.is_smooth() {
        return Err(Error::Hypothesis("shock time needs C¹ initial data".into()));
    }
    let rate = |theta: f64| -> Result<f64> {
        let d2 = psi.d2psi(u0.value(theta))?;
        Ok(sign * d2 * u0.derivative(theta))
    };
    let n = SHOCK_SAMPLES;
    let h = 1.0 / n as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..n {
        let th = i as f64 * h;
        let r = rate(th)?;
        if r > best.1 {
            best = (th, r);
        }
    }
    // Golden-section search on the two neighbouring cells.
    let (mut a, mut b) = (best.0 - h, best.0 + h);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (rate(c)?, rate(d)?);
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = rate(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = rate(d)?;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    let sup = best.1.max(fc).max(fd);
    if sup <= 0.0 || !sup.is_finite() {
        return Ok(None);
    }
    Ok(Some(1.0 / sup))
}

/// Pointwise solution `U(t, x)` before the shock, by inverting `θ ↦ θ + tψ'(U₀(θ))`.
#[derive(Debug, Clone)]
pub struct CharMap<'a> {
    psi: &'a ProfileFlux,
    u0: &'a InitialProfile,
    t: f64,
    cmin: f64,
    cmax: f64,
}

impl<'a> CharMap<'a> {
    /// Fails with [`Error::PastShock`] unless `-0.95 δ < t < 0.95 T*`, `δ` from [`backward_shock_time`].
    pub fn new(psi: &'a ProfileFlux, u0: &'a InitialProfile, t: f64) -> Result<Self> {
        let ts = if t >= 0.0 { shock_time(psi, u0)? } else { None };
        Self::with_shock_time(psi, u0, t, ts)
    }

    /// `t_star` is the forward shock time; negative `t` is checked against the backward one.
    pub fn with_shock_time(psi: &'a ProfileFlux, u0: &'a InitialProfile, t: f64, t_star: Option<f64>) -> Result<Self> {
        if !t.is_finite() {
            return Err(invalid!("t must be finite"));
        }
        if t < 0.0 {
            if let Some(tb) = backward_shock_time(psi, u0)? {
                if -t >= SHOCK_SAFETY * tb {
                    return Err(Error::PastShock { t, bound: -SHOCK_SAFETY * tb });
                }
            }
        } else if let Some(ts) = t_star {
            if t >= SHOCK_SAFETY * ts {
                return Err(Error::PastShock { t, bound: SHOCK_SAFETY * ts });
            }
        }
        let mut cmin = f64::INFINITY;
        let mut cmax = f64::NEG_INFINITY;
        let n = 1024;
        for i in 0..n {
            let c = psi.dpsi(u0.value(i as f64 / n as f64))?;
            cmin = cmin.min(c);
            cmax = cmax.max(c);
        }
        Ok(Self { psi, u0, t, cmin, cmax })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    fn residual(&self, y: f64, x: f64) -> Result<(f64, f64)> {
        let u = self.u0.value(y);
        let (_, d1, d2) = self.psi.derivs(u)?;
        Ok((y + self.t * d1 - x, 1.0 + self.t * d2 * self.u0.derivative(y)))
    }

    /// Foot `θ` of the characteristic through `x`, and `∂θ/∂x`'s reciprocal `Θ'(θ)`.
    pub fn foot(&self, x: f64) -> Result<(f64, f64)> {
        if self.t == 0.0 {
            return Ok((x, 1.0));
        }
        let span = self.cmax - self.cmin;
        let pad = 1e-9 * (1.0 + span * libm::fabs(self.t));
        let (a, b) = (self.t * self.cmax, self.t * self.cmin);
        let mut lo = x - a.max(b) - pad;
        let mut hi = x - a.min(b) + pad;
        let (mut glo, _) = self.residual(lo, x)?;
        let (mut ghi, _) = self.residual(hi, x)?;
        let mut widen = 0;
        while glo > 0.0 || ghi < 0.0 {
            widen += 1;
            if widen > 60 {
                return Err(Error::Numerical(alloc::format!("no characteristic bracket for x = {x}")));
            }
            let w = (hi - lo).max(1e-6);
            if glo > 0.0 {
                lo -= w;
                glo = self.residual(lo, x)?.0;
            }
            if ghi < 0.0 {
                hi += w;
                ghi = self.residual(hi, x)?.0;
            }
        }
        let mut y = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (g, dg) = self.residual(y, x)?;
            if libm::fabs(g) <= CHARACTERISTIC_TOL {
                if !(dg > 0.0) {
                    return Err(Error::Numerical(alloc::format!(
                        "characteristic map is not increasing at θ = {y}; the shock time is underestimated"
                    )));
                }
                return Ok((y, dg));
            }
            if g < 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            let newton = y - g / dg;
            y = if dg > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 4.0 * f64::EPSILON * (1.0 + libm::fabs(y)) {
                let (g, dg) = self.residual(y, x)?;
                if libm::fabs(g) <= 1e3 * CHARACTERISTIC_TOL && dg > 0.0 {
                    return Ok((y, dg));
                }
                break;
            }
        }
        Err(Error::Numerical(alloc::format!("characteristic inversion did not converge at x = {x}")))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.u0.value(self.foot(x)?.0))
    }

    /// `(U, ∂θU, ∂tU)` at `x`.
    pub fn value_and_derivatives(&self, x: f64) -> Result<(f64, f64, f64)> {
        let (y, dg) = self.foot(x)?;
        let u = self.u0.value(y);
        let ux = self.u0.derivative(y) / dg;
        let ut = -self.psi.dpsi(u)? * ux;
        Ok((u, ux, ut))
    }
}

/// Point values of `U(t, ·)` at the `n` cell centers, by characteristics.
pub fn solve_characteristics(psi: &ProfileFlux, u0: &InitialProfile, t: f64, n: usize) -> Result<ProfileField> {
    if n == 0 {
        return Err(invalid!("output grid must be non-empty"));
    }
    let map = CharMap::new(psi, u0, t)?;
    let values: Vec<f64> = (0..n).map(|i| map.value((i as f64 + 0.5) / n as f64)).collect::<Result<_>>()?;
    Ok(ProfileField::new(values, t, Solver::Characteristics, false))
}
