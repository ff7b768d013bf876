//! Default numerical tolerances and sizes, collected in one place.

/// Relative singular-value cutoff for numerical rank.
pub const RANK_TOL: f64 = 1e-9;
/// Relative tolerance of the orthogonality tests `a^(k)(ū)·v = 0`.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Bisection passes around each grid maximizer in the global index search.
pub const INDEX_REFINE_PASSES: usize = 3;
/// Default number of grid points for the global index search.
pub const INDEX_GRID: usize = 257;

/// Cells used when measuring degeneracy sets.
pub const DEGENERACY_CELLS: usize = 200_000;
/// Default δ grid: geometric from 1e-1 to 1e-4.
pub const DELTA_MAX: f64 = 1e-1;
pub const DELTA_MIN: f64 = 1e-4;
pub const DELTA_POINTS: usize = 8;
/// Sphere sample counts by dimension: d = 1, d = 2, d ≥ 3.
pub const DIRECTIONS_D1: usize = 720;
pub const DIRECTIONS_D2: usize = 2000;
pub const DIRECTIONS_DN: usize = 5000;

/// Fraction of `T*` below which characteristics are trusted.
pub const SHOCK_SAFETY: f64 = 0.95;
/// Target residual of the characteristic inversion.
pub const CHARACTERISTIC_TOL: f64 = 1e-12;
/// Table size for the Engquist–Osher split fluxes.
pub const EO_TABLE: usize = 4096;
/// Default CFL number.
pub const CFL: f64 = 0.9;
/// Samples used to locate `sup(-ψ''(U₀)U₀')`.
pub const SHOCK_SAMPLES: usize = 4096;
/// Negative-time extension as a fraction of `T*`.
pub const NEGATIVE_TIME_FRACTION: f64 = 0.1;

/// Levels of the geometric grading toward `h = 0` in box semi-norms.
pub const GRADED_LEVELS: usize = 24;
/// Periods of the H-axis integrated cell by cell before the moment expansion.
pub const NEAR_PERIODS: usize = 256;
/// Fixed seed of the Monte-Carlo cross-check.
pub const MC_SEED: u64 = 0x5E_ED0F_5EA1;
/// Default Monte-Carlo sample count.
pub const MC_SAMPLES: usize = 1_000_000;
/// States of `[-M, M]` whose worst direction joins the α-fit direction set.
pub const WORST_FAMILY_STATES: usize = 65;
