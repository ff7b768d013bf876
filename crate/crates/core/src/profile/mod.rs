//! The periodic profile law `∂_t U + ∂_θ ψ(U) = 0` on `[0, 1)`.
//!
//! `ψ` is either the exact reduced flux `ψ_ε` of a planar wave or its limit
//! `b U^{q+1}`. Smooth solutions come from characteristics up to a safety
//! fraction of the shock time; entropy solutions from an Engquist–Osher
//! finite-volume scheme.

mod characteristics;
mod flux;
mod fv;
mod initial;

pub use characteristics::{backward_shock_time, shock_time, solve_characteristics, CharMap};
pub use flux::{order_for_gamma, ExactPsi, ProfileFlux};
pub use fv::{riemann_exact, solve_entropy_fv, EoTable, FvOptions, Trajectory};
pub use initial::{mean_value, InitialProfile, ProfileField, Solver};
