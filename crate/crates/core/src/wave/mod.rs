//! Planar oscillating solutions `u_ε(t, x) = ū + ε U_ε(t, φ(t, x)/ε^γ)`.
//!
//! Planar data reduce the multi-dimensional law to the profile law with flux
//! `ψ_ε`, so [`build_wave`] is exact up to the profile solver. The split 2-D
//! solver [`solve_fv_2d`] is an independent cross-check of that reduction.

mod build;
mod fv2d;
mod smoothing;
mod sweeps;

use alloc::vec::Vec;

pub use build::{box_sides, build_wave, Field1D, Field2D, WaveField, PROFILE_FV_CELLS};
pub use fv2d::{planar_cross_check, planar_fv_2d, solve_fv_2d, PlanarCheck};
pub use smoothing::{
    smoothing_sweep, SmoothingPlan, SmoothingRow, SmoothingSweep, Verdict, BOUNDED_SLOPE_TOL, SMOOTHING_SAMPLES,
};
pub use sweeps::{
    cancellation_ratio_at, cancellation_summary, cancellation_sweep, wkb_error_sweep, CancellationRow,
    CancellationSweep, ErrorNorm, WkbPlan, WkbRow, WkbSweep, CANCELLATION_CELLS, WKB_THETA_POINTS, WKB_TIME_LEVELS,
};

use crate::error::{invalid, Result};
use crate::fluxcalc::FluxExpr;
use crate::linalg;
use crate::profile::{order_for_gamma, InitialProfile, ProfileFlux};
use crate::tolerances::ORTHOGONALITY_TOL;

/// Smallest `j ≥ 1` with `|a^(j)(ū)·v| > tol |a^(j)(ū)| |v|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompatibilityOrder {
    pub order: u32,
    /// No violation up to `kmax`; `order` is then `kmax`.
    pub saturated: bool,
}

pub fn compatibility_order(flux: &FluxExpr, ubar: f64, v: &[f64], tol: f64, kmax: u32) -> Result<CompatibilityOrder> {
    if v.len() != flux.dim() {
        return Err(invalid!("v has {} entries, flux has d = {}", v.len(), flux.dim()));
    }
    let nv = linalg::norm(v);
    if nv == 0.0 {
        return Err(invalid!("v must be nonzero"));
    }
    if kmax == 0 {
        return Err(invalid!("kmax must be at least 1"));
    }
    let ders = flux.velocity_derivatives(ubar, kmax as usize)?;
    for j in 1..=kmax as usize {
        let prod = libm::fabs(linalg::dot(&ders[j], v));
        if prod > tol * linalg::norm(&ders[j]) * nv {
            return Ok(CompatibilityOrder { order: j as u32, saturated: false });
        }
    }
    Ok(CompatibilityOrder { order: kmax, saturated: true })
}

/// Linear phase `φ(t, x) = v·x - t·speed` with `speed = a(ū)·v`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Phase {
    pub v: Vec<f64>,
    pub speed: f64,
}

impl Phase {
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        linalg::dot(&self.v, x) - t * self.speed
    }
}

pub fn eikonal_phase(flux: &FluxExpr, ubar: f64, v: &[f64]) -> Result<Phase> {
    if v.len() != flux.dim() {
        return Err(invalid!("v has {} entries, flux has d = {}", v.len(), flux.dim()));
    }
    let a = flux.velocity(ubar)?;
    Ok(Phase { v: v.to_vec(), speed: linalg::dot(&a, v) })
}

/// One oscillating family: `(flux, M, ū, v, γ, q, U₀, ε-list)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSetup {
    pub flux: FluxExpr,
    pub m: f64,
    pub ubar: f64,
    pub v: Vec<f64>,
    pub gamma: f64,
    pub q: u32,
    pub u0: InitialProfile,
    pub eps: Vec<f64>,
}

/// `{2^-3, …, 2^-9}`.
pub fn default_eps_list() -> Vec<f64> {
    (3..=9).map(|k| libm::ldexp(1.0, -k)).collect()
}

impl WaveSetup {
    /// Validates every field; `q` is `⌈γ⌉`.
    pub fn new(
        flux: FluxExpr,
        m: f64,
        ubar: f64,
        v: Vec<f64>,
        gamma: f64,
        u0: InitialProfile,
        eps: Vec<f64>,
    ) -> Result<Self> {
        if !(m > 0.0) {
            return Err(invalid!("M must be positive"));
        }
        if !(libm::fabs(ubar) <= m) {
            return Err(invalid!("|ū| = {} exceeds M = {}", libm::fabs(ubar), m));
        }
        if v.len() != flux.dim() {
            return Err(invalid!("v has {} entries, flux has d = {}", v.len(), flux.dim()));
        }
        if linalg::norm(&v) == 0.0 || v.iter().any(|x| !x.is_finite()) {
            return Err(invalid!("v must be finite and nonzero"));
        }
        if !(gamma > 1.0) {
            return Err(invalid!("γ must exceed 1, got {}", gamma));
        }
        let q = order_for_gamma(gamma)?;
        u0.validate()?;
        if eps.is_empty() {
            return Err(invalid!("ε-list is empty"));
        }
        if eps.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(invalid!("every ε must lie in (0, 1]"));
        }
        if eps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(invalid!("ε-list must be strictly decreasing"));
        }
        let (lo, hi) = u0.range();
        let amp = libm::fabs(lo).max(libm::fabs(hi));
        let worst = libm::fabs(ubar) + eps[0] * amp;
        if worst > m {
            return Err(invalid!("amplitude guard fails: |ū| + ε max|U₀| = {} > M = {}", worst, m));
        }
        Ok(Self { flux, m, ubar, v, gamma, q, u0, eps })
    }

    pub fn dim(&self) -> usize {
        self.flux.dim()
    }

    /// `r = 1` when `γ = q`, else `q - γ`.
    pub fn r(&self) -> f64 {
        if self.gamma == self.q as f64 {
            1.0
        } else {
            self.q as f64 - self.gamma
        }
    }

    pub fn compatibility(&self) -> Result<CompatibilityOrder> {
        compatibility_order(&self.flux, self.ubar, &self.v, ORTHOGONALITY_TOL, self.q.max(1) + 8)
    }

    /// `a^(k)(ū)·v = 0` for `k = 1, …, q-1`.
    pub fn compatible(&self) -> Result<bool> {
        let c = self.compatibility()?;
        Ok(c.saturated || c.order >= self.q)
    }

    pub fn phase(&self) -> Result<Phase> {
        eikonal_phase(&self.flux, self.ubar, &self.v)
    }

    pub fn psi(&self, eps: f64) -> Result<ProfileFlux> {
        ProfileFlux::psi_eps(&self.flux, self.ubar, &self.v, self.gamma, eps)
    }

    pub fn limit_psi(&self) -> Result<ProfileFlux> {
        ProfileFlux::limit_for(&self.flux, self.ubar, &self.v, self.gamma)
    }
}
