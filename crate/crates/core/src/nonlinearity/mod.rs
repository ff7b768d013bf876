//! Nonlinearity index `d_F`, exponent `α_sup`, degeneracy sets and classifiers.
//!
//! `d_F[u]` is the smallest `k` with `rank[a'(u), …, a^(k)(u)] = d`, and
//! `d_F = max_{|u| ≤ M} d_F[u]`. The sharp exponent in the degeneracy bound
//! `|{|v| ≤ M : |τ + a(v)·ξ| ≤ δ}| ≤ C δ^α` is `α_sup = 1/d_F`.

mod bound;
mod classify;
mod degeneracy;

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

pub use bound::{c_bar, measure_bound_check, BoundCheck, SampledPhi};
pub use classify::{check_definitions, Decision, DefinitionReport};
pub use degeneracy::{
    default_delta_grid, degeneracy_measure, directions_with_family, directions_with_worst, fit_alpha_empirical,
    sphere_directions, worst_direction, AlphaFit, AlphaOptions, AlphaRow, DegeneracyMeasurement, DegeneracyProbe,
    Direction,
};

use crate::error::{invalid, Result};
use crate::fluxcalc::FluxExpr;
use crate::linalg;
use crate::tolerances::{INDEX_GRID, INDEX_REFINE_PASSES, RANK_TOL};

/// A positive integer or the marker for "no `k ≤ kmax` works".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum NonlinIndex {
    Finite(u32),
    Infinite,
}

impl NonlinIndex {
    pub fn finite(self) -> Option<u32> {
        match self {
            NonlinIndex::Finite(k) => Some(k),
            NonlinIndex::Infinite => None,
        }
    }
}

impl PartialOrd for NonlinIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NonlinIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NonlinIndex::Finite(a), NonlinIndex::Finite(b)) => a.cmp(b),
            (NonlinIndex::Finite(_), NonlinIndex::Infinite) => Ordering::Less,
            (NonlinIndex::Infinite, NonlinIndex::Finite(_)) => Ordering::Greater,
            (NonlinIndex::Infinite, NonlinIndex::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for NonlinIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinIndex::Finite(k) => write!(f, "{k}"),
            NonlinIndex::Infinite => write!(f, "inf"),
        }
    }
}

/// `α_sup` as an exact rational `numer/denom` together with its value.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaSup {
    pub numer: u32,
    pub denom: u32,
    pub value: f64,
}

impl fmt::Display for AlphaSup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.numer == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

/// Options of the index search.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndexOptions {
    pub kmax: usize,
    pub rank_tol: f64,
    pub grid: usize,
}

impl IndexOptions {
    /// Defaults for dimension `d`: `kmax = 2d + 6`.
    pub fn for_dim(d: usize) -> Self {
        Self { kmax: 2 * d + 6, rank_tol: RANK_TOL, grid: INDEX_GRID }
    }
}

/// Result of the global index search on `[-M, M]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NonlinearityReport {
    pub flux: alloc::string::String,
    pub dim: usize,
    pub m: f64,
    pub d_f: NonlinIndex,
    /// A point achieving `d_F`; the one closest to the center among ties.
    pub argmax: f64,
    pub alpha_sup: AlphaSup,
    /// `(u, d_F[u])` for every point visited, sorted by `u`.
    pub samples: Vec<(f64, NonlinIndex)>,
    pub kmax: usize,
    pub rank_tol: f64,
}

/// `d_F[u]`: the smallest `k ≤ kmax` with `rank[a'(u) … a^(k)(u)] = d`.
pub fn d_f_at(flux: &FluxExpr, u: f64, kmax: usize, rank_tol: f64) -> Result<NonlinIndex> {
    let d = flux.dim();
    if kmax < d {
        return Err(invalid!("kmax = {} is below the dimension {}", kmax, d));
    }
    if rank_tol <= 0.0 {
        return Err(invalid!("rank tolerance must be positive"));
    }
    let ders = flux.velocity_derivatives(u, kmax)?;
    for k in d..=kmax {
        if linalg::rank(&ders[1..=k], rank_tol) == d {
            return Ok(NonlinIndex::Finite(k as u32));
        }
    }
    Ok(NonlinIndex::Infinite)
}

/// `α_sup = 1/d_F`, or `0` when `d_F` is infinite.
pub fn alpha_sup(index: NonlinIndex) -> AlphaSup {
    match index {
        NonlinIndex::Finite(k) => AlphaSup { numer: 1, denom: k, value: 1.0 / k as f64 },
        NonlinIndex::Infinite => AlphaSup { numer: 0, denom: 1, value: 0.0 },
    }
}

/// Maximize `d_F[u]` over `[-M, M]`.
///
/// The grid always contains `u = 0`. Each grid maximizer gets
/// [`INDEX_REFINE_PASSES`] bisection passes toward its neighbours. Where two
/// neighbours both have the minimal index `d` but the determinant
/// `det[a'(u) … a^(d)(u)]` changes sign, the root is bracketed and probed,
/// since the index jumps up exactly there.
pub fn d_f_global(flux: &FluxExpr, m: f64, opts: &IndexOptions) -> Result<NonlinearityReport> {
    if !(m > 0.0) {
        return Err(invalid!("M must be positive"));
    }
    if opts.grid < 16 {
        return Err(invalid!("grid size must be at least 16"));
    }
    let d = flux.dim();
    let at = |u: f64| d_f_at(flux, u, opts.kmax, opts.rank_tol);
    let n = opts.grid;
    let mut grid: Vec<f64> = (0..n).map(|i| -m + 2.0 * m * i as f64 / (n - 1) as f64).collect();
    if !grid.contains(&0.0) {
        grid.push(0.0);
        grid.sort_by(f64::total_cmp);
    }
    let values: Vec<NonlinIndex> = grid.iter().map(|&u| at(u)).collect::<Result<_>>()?;
    let mut samples: Vec<(f64, NonlinIndex)> = grid.iter().copied().zip(values.iter().copied()).collect();

    // Bisection passes around local maximizers.
    for i in 0..grid.len() {
        let left = if i > 0 { values[i - 1] } else { NonlinIndex::Finite(0) };
        let right = if i + 1 < grid.len() { values[i + 1] } else { NonlinIndex::Finite(0) };
        if values[i] < left || values[i] < right {
            continue;
        }
        let mut best = (grid[i], values[i]);
        let mut lo = if i > 0 { grid[i - 1] } else { grid[i] };
        let mut hi = if i + 1 < grid.len() { grid[i + 1] } else { grid[i] };
        for _ in 0..INDEX_REFINE_PASSES {
            for probe in [0.5 * (lo + best.0), 0.5 * (best.0 + hi)] {
                if probe == best.0 {
                    continue;
                }
                let v = at(probe)?;
                samples.push((probe, v));
                if v > best.1 {
                    best = (probe, v);
                }
            }
            let half = 0.25 * (hi - lo);
            lo = (best.0 - half).max(lo);
            hi = (best.0 + half).min(hi);
        }
    }

    // Sign changes of the minimal-rank determinant.
    if opts.kmax >= d {
        let det_at = |u: f64| -> Result<f64> {
            let ders = flux.velocity_derivatives(u, d)?;
            Ok(linalg::det(&ders[1..=d]))
        };
        for i in 0..grid.len() - 1 {
            let target = NonlinIndex::Finite(d as u32);
            if values[i] != target || values[i + 1] != target {
                continue;
            }
            let (mut lo, mut hi) = (grid[i], grid[i + 1]);
            let (mut flo, fhi) = (det_at(lo)?, det_at(hi)?);
            if flo * fhi >= 0.0 {
                continue;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                let fm = det_at(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            for probe in [lo, hi] {
                samples.push((probe, at(probe)?));
            }
        }
    }

    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    samples.dedup_by(|a, b| a.0 == b.0);
    let d_f = samples.iter().map(|s| s.1).max().unwrap_or(NonlinIndex::Infinite);
    let argmax = samples
        .iter()
        .filter(|s| s.1 == d_f)
        .map(|s| s.0)
        .min_by(|a, b| libm::fabs(*a).total_cmp(&libm::fabs(*b)).then(a.total_cmp(b)))
        .unwrap_or(0.0);
    Ok(NonlinearityReport {
        flux: alloc::format!("{flux}"),
        dim: d,
        m,
        d_f,
        argmax,
        alpha_sup: alpha_sup(d_f),
        samples,
        kmax: opts.kmax,
        rank_tol: opts.rank_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxcalc::{catalog_flux, parse_flux};

    #[test]
    fn pointwise_index_examples() {
        let pc = catalog_flux("power-chain-3").unwrap().flux;
        for u in [-1.0, 0.0, 0.4] {
            assert_eq!(d_f_at(&pc, u, 12, RANK_TOL).unwrap(), NonlinIndex::Finite(3));
        }
        let mb = parse_flux("[u^2, u^2]").unwrap();
        assert_eq!(d_f_at(&mb, 0.3, 10, RANK_TOL).unwrap(), NonlinIndex::Infinite);
        let tr = parse_flux("[cos(u), sin(u)]").unwrap();
        assert_eq!(d_f_at(&tr, 0.3, 4, RANK_TOL).unwrap(), NonlinIndex::Finite(2));
        assert!(d_f_at(&tr, 0.3, 1, RANK_TOL).is_err());
    }

    #[test]
    fn global_index_examples() {
        let f = parse_flux("[u^2/2, u^3/3]").unwrap();
        let r = d_f_global(&f, 1.0, &IndexOptions::for_dim(2)).unwrap();
        assert_eq!(r.d_f, NonlinIndex::Finite(2));
        assert_eq!(r.alpha_sup, AlphaSup { numer: 1, denom: 2, value: 0.5 });
        let low = parse_flux("[u^2, u]").unwrap();
        let r = d_f_global(&low, 1.0, &IndexOptions::for_dim(2)).unwrap();
        assert_eq!(r.d_f, NonlinIndex::Infinite);
        assert_eq!(r.alpha_sup.value, 0.0);
    }

    #[test]
    fn isolated_degenerate_point_is_found() {
        // a = (u, (u - 0.3137)^3 / 3): a'' vanishes only at u = 0.3137, where d_F[u] = 3.
        let f = parse_flux("[u^2/2, (u - 0.3137)^4/12]").unwrap();
        let r = d_f_global(&f, 1.0, &IndexOptions::for_dim(2)).unwrap();
        assert_eq!(r.d_f, NonlinIndex::Finite(3));
        assert!((r.argmax - 0.3137).abs() < 1e-9);
        assert_eq!(d_f_at(&f, r.argmax, 10, RANK_TOL).unwrap(), NonlinIndex::Finite(3));
    }
}
