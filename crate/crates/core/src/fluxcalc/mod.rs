//! Flux expressions `F: R → R^d` and their exact derivatives.
//!
//! A [`FluxExpr`] holds one expression tree per component. Derivatives of any
//! order come from Taylor-jet arithmetic ([`Jet`]), never from finite
//! differences. The velocity is `a = F'`, so `a^(k)(u) = F^(k+1)(u)`.

mod catalog;
mod expr;
mod jet;
mod parse;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use catalog::{catalog, catalog_flux, CatalogEntry};
pub use expr::Expr;
pub(crate) use jet::factorial;
pub use jet::Jet;
pub use parse::parse_expr;

use crate::error::{invalid, Result};

/// Declared smoothness of a flux. Informational only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Smoothness {
    #[default]
    Unspecified,
    Analytic,
    Smooth,
    /// `C^k` but not better at some point.
    Finite(u32),
}

/// Vector-valued flux with `d` scalar components in the variable `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxExpr {
    components: Vec<Expr>,
    name: String,
    smoothness: Smoothness,
}

impl FluxExpr {
    pub fn new(components: Vec<Expr>, name: impl Into<String>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid!("a flux needs at least one component"));
        }
        Ok(Self { components, name: name.into(), smoothness: Smoothness::Unspecified })
    }

    pub fn with_smoothness(mut self, s: Smoothness) -> Self {
        self.smoothness = s;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// Jet of component `i` (0-based) at `u` up to order `k`.
    pub fn eval_jet(&self, i: usize, u: f64, k: usize) -> Result<Jet> {
        let c =
            self.components.get(i).ok_or_else(|| invalid!("component {} out of range for d = {}", i, self.dim()))?;
        c.eval_jet(u, k)
    }

    /// `F(u)`.
    pub fn eval(&self, u: f64) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval(u)).collect()
    }

    /// `a(u) = F'(u)`.
    pub fn velocity(&self, u: f64) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval_jet(u, 1).map(|j| j.coeffs[1])).collect()
    }

    /// Entries `k = 0..=kmax` hold the vector `a^(k)(u) = F^(k+1)(u)`.
    pub fn velocity_derivatives(&self, u: f64, kmax: usize) -> Result<Vec<Vec<f64>>> {
        let d = self.dim();
        let mut out = vec![vec![0.0; d]; kmax + 1];
        for (i, c) in self.components.iter().enumerate() {
            let jet = c.eval_jet(u, kmax + 1)?;
            for (k, row) in out.iter_mut().enumerate() {
                row[i] = jet.derivative(k + 1);
            }
        }
        Ok(out)
    }

    /// Scalar flux `u ↦ v·F(u)`, as a jet of order `k`.
    pub fn directional_jet(&self, v: &[f64], u: f64, k: usize) -> Result<Jet> {
        let mut acc = Jet::constant(u, 0.0, k);
        for (c, vi) in self.components.iter().zip(v) {
            if *vi != 0.0 {
                acc = acc.add(&c.eval_jet(u, k)?.scale(*vi));
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for FluxExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Parse `"[e1, e2, …]"` (or a bare expression for `d = 1`).
pub fn parse_flux(spec: &str) -> Result<FluxExpr> {
    let comps = parse::parse_components(spec)?;
    FluxExpr::new(comps, spec.trim().to_string())
}
