use alloc::vec::Vec;

use super::build::ProfileAt;
use super::WaveSetup;
use crate::error::{invalid, Result};
use crate::scaling::ScalingFit;
use crate::sobolev::{Regularity, SeminormResult, VarKernel};

/// Profile samples per period for wave semi-norms.
pub const SMOOTHING_SAMPLES: usize = 4096;
/// A fitted slope at or above `-BOUNDED_SLOPE_TOL` counts as bounded.
pub const BOUNDED_SLOPE_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Verdict {
    Bounded,
    Unbounded,
}

impl Verdict {
    pub fn from_slope(slope: f64) -> Self {
        if slope >= -BOUNDED_SLOPE_TOL {
            Verdict::Bounded
        } else {
            Verdict::Unbounded
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmoothingRow {
    pub eps: f64,
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmoothingSweep {
    pub s: f64,
    pub p: f64,
    pub t: f64,
    pub half_width: f64,
    pub rows: Vec<SmoothingRow>,
    pub fit: ScalingFit,
    /// `1 - sγ`.
    pub expected_slope: f64,
    pub verdict: Verdict,
}

/// Semi-norm of `x ↦ u_ε(t, x)` over `Q_d(0, A)` for a range of ε; [`SmoothingPlan::value`]
/// is independent per ε.
#[derive(Debug, Clone)]
pub struct SmoothingPlan {
    setup: WaveSetup,
    axis: usize,
    t: f64,
    s: f64,
    p: f64,
    a: f64,
}

impl SmoothingPlan {
    /// Needs `v` along one coordinate axis so that the field is planar in that variable.
    pub fn new(setup: &WaveSetup, t: f64, s: f64, p: f64, a: f64) -> Result<Self> {
        let nonzero: Vec<usize> = (0..setup.v.len()).filter(|&i| setup.v[i] != 0.0).collect();
        if nonzero.len() != 1 {
            return Err(invalid!("the kernel path needs v along a single axis, got {:?}", setup.v));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(invalid!("t must be finite and non-negative"));
        }
        if !(a > 0.5) || !a.is_finite() {
            return Err(invalid!("half-width must exceed 1/2, got {}", a));
        }
        crate::sobolev::check_sp(s, p)?;
        Ok(Self { setup: setup.clone(), axis: nonzero[0], t, s, p, a })
    }

    pub fn eps(&self) -> &[f64] {
        &self.setup.eps
    }

    pub fn value(&self, eps: f64) -> Result<SeminormResult> {
        let psi = self.setup.psi(eps)?;
        let prof = ProfileAt::new(&psi, &self.setup.u0, self.t)?;
        let reg = match (&prof, self.setup.u0.is_smooth()) {
            (ProfileAt::Char(_), true) => Regularity::Lipschitz,
            _ => Regularity::Discontinuous,
        };
        let n = SMOOTHING_SAMPLES;
        let samples = (0..n).map(|j| prof.value(j as f64 / n as f64)).collect::<Result<Vec<_>>>()?;
        let vi = self.setup.v[self.axis];
        let eta = libm::pow(eps, self.setup.gamma) / libm::fabs(vi);
        let speed = self.setup.phase()?.speed;
        // φ/ε^γ = sgn(v_i)(x_i - x_s)/η with x_s = t·speed/v_i
        let center = -libm::copysign(1.0, vi) * (self.t * speed / vi);
        let kernel = VarKernel::new(&samples, self.p)?;
        let d = self.setup.dim();
        let mut r = if d == 1 {
            kernel.seminorm(self.s, self.a, eta, center, reg)?
        } else {
            kernel.seminorm_planar(d, self.s, self.a, eta, center, reg)?
        };
        r.value *= eps;
        r.error_estimate *= eps;
        Ok(r)
    }

    pub fn finish(&self, rows: Vec<SmoothingRow>) -> SmoothingSweep {
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.value)).collect();
        let fit = ScalingFit::loglog(&pairs);
        SmoothingSweep {
            s: self.s,
            p: self.p,
            t: self.t,
            half_width: self.a,
            verdict: Verdict::from_slope(fit.slope),
            fit,
            expected_slope: 1.0 - self.s * self.setup.gamma,
            rows,
        }
    }

    pub fn run(&self) -> Result<SmoothingSweep> {
        let rows = self
            .setup
            .eps
            .iter()
            .map(|&eps| {
                let r = self.value(eps)?;
                Ok(SmoothingRow { eps, value: r.value, error_estimate: r.error_estimate })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.finish(rows))
    }
}

/// Fitted ε-slope of the wave's `W̃^{s,p}` semi-norm at time `t` with its bounded/unbounded verdict.
pub fn smoothing_sweep(setup: &WaveSetup, t: f64, s: f64, p: f64, a: f64) -> Result<SmoothingSweep> {
    SmoothingPlan::new(setup, t, s, p, a)?.run()
}
