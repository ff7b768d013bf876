//! Tilde Gagliardo semi-norms with the `ℓ¹` metric `|h| = |h₁| + ⋯ + |h_d|`:
//!
//! `|V|^p = ∫_{Q_d(0,A)} ∫_{Q_d(x₀,A)} |V(x+h) - V(x)|^p / |h|^{d+sp} dx dh`.
//!
//! Periodic data go through the shift kernel `Var(H)` ([`VarKernel`]); planar fields reduce
//! to it with the weight `μ_{d,sp}`; general two-variable integrands, including space-time
//! boxes, use graded tensor quadrature with a Monte-Carlo cross-check.

mod boxq;
mod kernel;
mod mu;

use alloc::vec::Vec;

pub use boxq::{seminorm_box, seminorm_box_mc, seminorm_spacetime, BoxOptions, MonteCarloEstimate};
pub use kernel::{seminorm_bruteforce, seminorm_periodic_1d, DConstants, VarKernel};
pub use mu::{gamma_ds, mu_ds, mu_ds_direct};

use crate::error::{domain, invalid, Result};
use crate::scaling::ScalingFit;

/// Regularity the caller declares for `v`; it fixes the model `Var(H) ~ H^κ` near `H = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Regularity {
    /// `κ = p`.
    #[default]
    Lipschitz,
    /// `κ = 1`.
    Discontinuous,
}

impl Regularity {
    pub fn kappa(self, p: f64) -> f64 {
        match self {
            Regularity::Lipschitz => p,
            Regularity::Discontinuous => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Domain {
    Interval { center: f64, half_width: f64 },
    Box { center: Vec<f64>, half_width: f64 },
    SpaceTime { t0: f64, x0: f64, half_width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    VarKernel,
    GradedQuadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeminormResult {
    pub s: f64,
    pub p: f64,
    pub domain: Domain,
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
}

pub(crate) fn check_sp(s: f64, p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid!("p must be finite and at least 1, got {}", p));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(domain!("s must lie in (0, 1), got {}", s));
    }
    Ok(())
}

/// Log-log fit of `(ε, value)` pairs with the spread `max(value·ε^β) / min(value·ε^β)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingReport {
    pub fit: ScalingFit,
    pub beta: Option<f64>,
    pub sandwich: Option<f64>,
}

/// Needs at least four pairs, strictly decreasing ε and positive values.
pub fn fit_scaling(pairs: &[(f64, f64)], beta: Option<f64>) -> Result<ScalingReport> {
    if pairs.len() < 4 {
        return Err(invalid!("need at least 4 pairs, got {}", pairs.len()));
    }
    if pairs.windows(2).any(|w| !(w[1].0 < w[0].0)) || pairs.iter().any(|p| !(p.0 > 0.0)) {
        return Err(invalid!("ε must be positive and strictly decreasing"));
    }
    if let Some(p) = pairs.iter().find(|p| !(p.1 > 0.0) || !p.1.is_finite()) {
        return Err(domain!("non-positive value {} at ε = {}", p.1, p.0));
    }
    let sandwich = beta.map(|b| {
        let scaled: Vec<f64> = pairs.iter().map(|&(e, v)| v * libm::pow(e, b)).collect();
        let hi = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        hi / lo
    });
    Ok(ScalingReport { fit: ScalingFit::loglog(pairs), beta, sandwich })
}
