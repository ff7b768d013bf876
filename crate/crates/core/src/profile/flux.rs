use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::fluxcalc::{factorial, FluxExpr};
use crate::linalg;

/// The reduced scalar flux `ψ_ε` along `v`, or its limit `b U^{q+1}`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileFlux {
    Limit { b: f64, q: u32 },
    Exact(ExactPsi),
}

/// `ψ_ε(U) = ε^{-1-γ}(G(ū + εU) - G(ū)) - ε^{-γ} G'(ū) U` with `G = v·F`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPsi {
    flux: FluxExpr,
    ubar: f64,
    v: Vec<f64>,
    gamma: f64,
    eps: f64,
    g0: f64,
    s0: f64,
}

impl ExactPsi {
    pub fn flux(&self) -> &FluxExpr {
        &self.flux
    }
    pub fn ubar(&self) -> f64 {
        self.ubar
    }
    pub fn v(&self) -> &[f64] {
        &self.v
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
}

fn powu(x: f64, n: u32) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r *= x;
    }
    r
}

/// `q = ⌈γ⌉`, the integer with `q - 1 < γ ≤ q`.
pub fn order_for_gamma(gamma: f64) -> Result<u32> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid!("γ must be positive and finite"));
    }
    Ok(libm::ceil(gamma) as u32)
}

impl ProfileFlux {
    pub fn limit(b: f64, q: u32) -> Self {
        ProfileFlux::Limit { b, q }
    }

    /// Exact reduced flux for `(flux, ū, v, γ, ε)`.
    pub fn psi_eps(flux: &FluxExpr, ubar: f64, v: &[f64], gamma: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(invalid!("ε must lie in (0, 1], got {}", eps));
        }
        if v.len() != flux.dim() {
            return Err(invalid!("v has {} entries, flux has d = {}", v.len(), flux.dim()));
        }
        if linalg::norm(v) == 0.0 {
            return Err(invalid!("v must be nonzero"));
        }
        if !gamma.is_finite() {
            return Err(invalid!("γ must be finite"));
        }
        let j = flux.directional_jet(v, ubar, 1)?;
        Ok(ProfileFlux::Exact(ExactPsi {
            flux: flux.clone(),
            ubar,
            v: v.to_vec(),
            gamma,
            eps,
            g0: j.coeffs[0],
            s0: j.coeffs[1],
        }))
    }

    /// Limit flux: with `q = ⌈γ⌉`, `b = a^(q)(ū)·v/(q+1)!` when `γ = q`, else `b = 0`.
    pub fn limit_for(flux: &FluxExpr, ubar: f64, v: &[f64], gamma: f64) -> Result<Self> {
        let q = order_for_gamma(gamma)?;
        if v.len() != flux.dim() {
            return Err(invalid!("v has {} entries, flux has d = {}", v.len(), flux.dim()));
        }
        let b = if gamma == q as f64 {
            let ders = flux.velocity_derivatives(ubar, q as usize)?;
            linalg::dot(&ders[q as usize], v) / factorial(q as usize + 1)
        } else {
            0.0
        };
        Ok(ProfileFlux::Limit { b, q })
    }

    pub fn psi(&self, u: f64) -> Result<f64> {
        match self {
            ProfileFlux::Limit { b, q } => Ok(b * powu(u, q + 1)),
            ProfileFlux::Exact(e) => {
                let g = e.flux.directional_jet(&e.v, e.ubar + e.eps * u, 0)?.coeffs[0];
                Ok(libm::pow(e.eps, -1.0 - e.gamma) * (g - e.g0) - libm::pow(e.eps, -e.gamma) * e.s0 * u)
            }
        }
    }

    pub fn dpsi(&self, u: f64) -> Result<f64> {
        match self {
            ProfileFlux::Limit { b, q } => Ok((*q as f64 + 1.0) * b * powu(u, *q)),
            ProfileFlux::Exact(e) => {
                let j = e.flux.directional_jet(&e.v, e.ubar + e.eps * u, 1)?;
                Ok(libm::pow(e.eps, -e.gamma) * (j.coeffs[1] - e.s0))
            }
        }
    }

    pub fn d2psi(&self, u: f64) -> Result<f64> {
        Ok(self.derivs(u)?.2)
    }

    /// `(ψ, ψ', ψ'')` at `u`.
    pub fn derivs(&self, u: f64) -> Result<(f64, f64, f64)> {
        match self {
            ProfileFlux::Limit { b, q } => {
                let qf = *q as f64;
                let d2 = if *q == 0 { 0.0 } else { (qf + 1.0) * qf * b * powu(u, q - 1) };
                Ok((b * powu(u, q + 1), (qf + 1.0) * b * powu(u, *q), d2))
            }
            ProfileFlux::Exact(e) => {
                let j = e.flux.directional_jet(&e.v, e.ubar + e.eps * u, 2)?;
                let (c0, c1, c2) = (j.coeffs[0], j.coeffs[1], j.coeffs[2]);
                let eg = libm::pow(e.eps, -e.gamma);
                Ok((eg / e.eps * (c0 - e.g0) - eg * e.s0 * u, eg * (c1 - e.s0), 2.0 * e.eps * eg * c2))
            }
        }
    }

    /// Short human-readable provenance.
    pub fn describe(&self) -> alloc::string::String {
        match self {
            ProfileFlux::Limit { b, q } => alloc::format!("limit b·U^{} with b = {}", q + 1, b),
            ProfileFlux::Exact(e) => alloc::format!(
                "exact psi_eps for {} at ubar = {}, v = {:?}, gamma = {}, eps = {}",
                e.flux,
                e.ubar,
                e.v,
                e.gamma,
                e.eps
            ),
        }
    }
}
