//! Numerical laboratory for the smoothing effect of scalar conservation laws
//! `∂_t u + div F(u) = 0` with a smooth flux `F: R → R^d`.
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is off.
//! Modules, bottom-up:
//!
//! * [`fluxcalc`]: flux expressions and Taylor-jet differentiation.
//! * [`nonlinearity`]: the index `d_F`, `α_sup`, degeneracy sets and classifiers.
//! * [`profile`]: the 1-D periodic profile equation, by characteristics and finite volumes.
//! * [`wave`]: planar oscillating solutions, WKB and cancellation sweeps, a 2-D solver.
//! * [`sobolev`]: Gagliardo semi-norms and the `μ_{d,σ}` kernel.
//! * [`scaling`]: log-log least squares shared by the fitting operations.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

extern crate alloc;

pub mod error;
pub mod fluxcalc;
pub mod linalg;
pub mod nonlinearity;
pub mod profile;
pub mod quad;
pub mod scaling;
pub mod sobolev;
pub mod tolerances;
pub mod wave;

pub use error::{Error, Result};
pub use fluxcalc::{parse_flux, FluxExpr, Jet};
pub use scaling::ScalingFit;
