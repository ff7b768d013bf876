//! Degeneracy sets `W_δ(τ, ξ) = {|v| ≤ M : |τ + a(v)·ξ| ≤ δ}` and the empirical exponent.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::NonlinIndex;
use crate::error::{invalid, Error, Result};
use crate::fluxcalc::FluxExpr;
use crate::linalg;
use crate::scaling::ScalingFit;
use crate::tolerances::{
    DEGENERACY_CELLS, DELTA_MAX, DELTA_MIN, DELTA_POINTS, DIRECTIONS_D1, DIRECTIONS_D2, DIRECTIONS_DN,
    ORTHOGONALITY_TOL, RANK_TOL,
};

/// A unit vector `(τ, ξ)` in `R^{1+d}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Direction {
    pub tau: f64,
    pub xi: Vec<f64>,
}

impl Direction {
    /// Normalize `(τ, ξ)` onto the unit sphere.
    pub fn normalized(tau: f64, xi: Vec<f64>) -> Result<Self> {
        let n = libm::sqrt(tau * tau + xi.iter().map(|x| x * x).sum::<f64>());
        if !(n > 0.0) || !n.is_finite() {
            return Err(invalid!("direction must be a nonzero finite vector"));
        }
        Ok(Self { tau: tau / n, xi: xi.into_iter().map(|x| x / n).collect() })
    }

    fn norm_defect(&self) -> f64 {
        libm::fabs(self.tau * self.tau + self.xi.iter().map(|x| x * x).sum::<f64>() - 1.0)
    }
}

/// One estimate of `|W_δ(τ, ξ)|`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DegeneracyMeasurement {
    pub direction: Direction,
    pub delta: f64,
    pub measure: f64,
    pub cells: usize,
    /// `ξ = 0` and `|τ| ≤ δ`: the whole interval is degenerate.
    pub degenerate: bool,
}

/// Velocity samples on `2N + 1` equispaced points of `[-M, M]` (cell nodes and midpoints).
#[derive(Debug, Clone)]
pub struct DegeneracyProbe<'a> {
    flux: &'a FluxExpr,
    m: f64,
    cells: usize,
    /// `a(v_j)` flattened, `d` entries per point.
    a: Vec<f64>,
}

impl<'a> DegeneracyProbe<'a> {
    pub fn new(flux: &'a FluxExpr, m: f64, cells: usize) -> Result<Self> {
        if !(m > 0.0) {
            return Err(invalid!("M must be positive"));
        }
        if cells < 1000 {
            return Err(invalid!("need at least 1000 cells, got {}", cells));
        }
        let d = flux.dim();
        let mut a = Vec::with_capacity((2 * cells + 1) * d);
        for j in 0..=2 * cells {
            a.extend(flux.velocity(Self::point(m, cells, j))?);
        }
        Ok(Self { flux, m, cells, a })
    }

    fn point(m: f64, cells: usize, j: usize) -> f64 {
        -m + m * j as f64 / cells as f64
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    fn phi_at(&self, j: usize, dir: &Direction) -> f64 {
        let d = dir.xi.len();
        dir.tau + linalg::dot(&self.a[j * d..(j + 1) * d], &dir.xi)
    }

    fn phi_exact(&self, v: f64, dir: &Direction) -> Result<f64> {
        Ok(dir.tau + linalg::dot(&self.flux.velocity(v)?, &dir.xi))
    }

    fn check(&self, dir: &Direction, delta: f64) -> Result<()> {
        if dir.xi.len() != self.flux.dim() {
            return Err(invalid!("ξ has {} entries, flux has d = {}", dir.xi.len(), self.flux.dim()));
        }
        if dir.norm_defect() > 1e-12 {
            return Err(invalid!("(τ, ξ) is not a unit vector"));
        }
        if !(delta > 0.0) {
            return Err(invalid!("δ must be positive"));
        }
        Ok(())
    }

    /// Point count on every `stride`-th sample, times the sample spacing. Fast, cell-width accurate.
    fn coarse(&self, dir: &Direction, deltas_desc: &[f64], stride: usize, out: &mut [usize]) {
        out.iter_mut().for_each(|c| *c = 0);
        let last = 2 * self.cells;
        let mut j = stride / 2;
        while j < last {
            let g = libm::fabs(self.phi_at(j, dir));
            for (k, &dl) in deltas_desc.iter().enumerate() {
                if g <= dl {
                    out[k] += 1;
                } else {
                    break;
                }
            }
            j += stride;
        }
    }

    /// `|W_δ(τ, ξ)|` with crossing points located by bisection on the exact flux.
    pub fn measure(&self, dir: &Direction, delta: f64) -> Result<DegeneracyMeasurement> {
        self.check(dir, delta)?;
        let full = 2.0 * self.m;
        if linalg::norm(&dir.xi) == 0.0 {
            let inside = libm::fabs(dir.tau) <= delta;
            return Ok(DegeneracyMeasurement {
                direction: dir.clone(),
                delta,
                measure: if inside { full } else { 0.0 },
                cells: self.cells,
                degenerate: inside,
            });
        }
        let h = self.m / self.cells as f64;
        let mut total = 0.0;
        let mut g0 = self.phi_at(0, dir);
        for j in 0..2 * self.cells {
            let g1 = self.phi_at(j + 1, dir);
            let v0 = Self::point(self.m, self.cells, j);
            total += self.half_cell(dir, delta, v0, v0 + h, g0, g1)?;
            g0 = g1;
        }
        Ok(DegeneracyMeasurement {
            direction: dir.clone(),
            delta,
            measure: total.clamp(0.0, full),
            cells: self.cells,
            degenerate: false,
        })
    }

    fn half_cell(&self, dir: &Direction, delta: f64, v0: f64, v1: f64, g0: f64, g1: f64) -> Result<f64> {
        let in0 = libm::fabs(g0) <= delta;
        let in1 = libm::fabs(g1) <= delta;
        let h = v1 - v0;
        if in0 && in1 {
            return Ok(h);
        }
        if (g0 > delta && g1 > delta) || (g0 < -delta && g1 < -delta) {
            return Ok(0.0);
        }
        // φ is treated as monotone on the half cell: the set is the interval between
        // the crossings of the two levels ±δ.
        let cross = |level: f64| -> Result<f64> {
            let (mut a, mut b) = (v0, v1);
            let mut fa = g0 - level;
            for _ in 0..40 {
                let mid = 0.5 * (a + b);
                let fm = self.phi_exact(mid, dir)? - level;
                if (fm <= 0.0) == (fa <= 0.0) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
                if b - a < 1e-9 * h {
                    break;
                }
            }
            Ok(0.5 * (a + b))
        };
        let (lo_val, hi_val) = if g0 <= g1 { (g0, g1) } else { (g1, g0) };
        let enter = if lo_val < -delta {
            cross(-delta)?
        } else if g0 <= g1 {
            v0
        } else {
            v1
        };
        let leave = if hi_val > delta {
            cross(delta)?
        } else if g0 <= g1 {
            v1
        } else {
            v0
        };
        Ok(libm::fabs(leave - enter))
    }
}

/// One-shot `|W_δ(τ, ξ)|` on `cells` uniform cells of `[-M, M]`.
pub fn degeneracy_measure(
    flux: &FluxExpr,
    m: f64,
    tau: f64,
    xi: &[f64],
    delta: f64,
    cells: usize,
) -> Result<DegeneracyMeasurement> {
    let probe = DegeneracyProbe::new(flux, m, cells)?;
    probe.measure(&Direction { tau, xi: xi.to_vec() }, delta)
}

/// Direction along which `φ(v) = τ + a(v)·ξ` vanishes to order exactly `d_F` at `ū`.
pub fn worst_direction(flux: &FluxExpr, ubar: f64, d_f: u32) -> Result<Direction> {
    let k = d_f as usize;
    if k == 0 {
        return Err(invalid!("d_F must be at least 1"));
    }
    let ders = flux.velocity_derivatives(ubar, k)?;
    let d = flux.dim();
    let null: Vec<Vec<f64>> = if k == 1 {
        (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
    } else {
        let svd = linalg::svd(&ders[1..k]);
        if svd.max() == 0.0 {
            (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
        } else {
            svd.null_space(RANK_TOL)
        }
    };
    if null.is_empty() {
        return Err(Error::Hypothesis(alloc::format!(
            "a'(ū), …, a^({})(ū) already span R^{} at ū = {}",
            k - 1,
            d,
            ubar
        )));
    }
    let top = &ders[k];
    let mut xi = vec![0.0; d];
    for n in &null {
        let c = linalg::dot(n, top);
        for (x, ni) in xi.iter_mut().zip(n) {
            *x += c * ni;
        }
    }
    let nx = linalg::norm(&xi);
    if !(nx > ORTHOGONALITY_TOL * linalg::norm(top).max(1.0)) {
        return Err(Error::Hypothesis(alloc::format!(
            "a^({})(ū) is orthogonal to the null space at ū = {}; d_F = {} is not attained there",
            k,
            ubar,
            k
        )));
    }
    xi.iter_mut().for_each(|x| *x /= nx);
    let lead = xi.iter().copied().max_by(|a, b| libm::fabs(*a).total_cmp(&libm::fabs(*b))).unwrap_or(1.0);
    if lead < 0.0 {
        xi.iter_mut().for_each(|x| *x = -*x);
    }
    let tau = -linalg::dot(&flux.velocity(ubar)?, &xi);
    Direction::normalized(tau, xi)
}

/// Sample directions on `S^d ⊂ R^{1+d}`: an angle grid for `d = 1`, a Fibonacci
/// lattice for `d = 2`, seeded rejection sampling for `d ≥ 3`.
pub fn sphere_directions(d: usize, count: Option<usize>, seed: u64) -> Vec<Direction> {
    match d {
        0 => Vec::new(),
        1 => {
            let n = count.unwrap_or(DIRECTIONS_D1);
            (0..n)
                .map(|k| {
                    let t = 2.0 * core::f64::consts::PI * k as f64 / n as f64;
                    Direction { tau: libm::cos(t), xi: vec![libm::sin(t)] }
                })
                .collect()
        }
        2 => {
            let n = count.unwrap_or(DIRECTIONS_D2);
            let golden = core::f64::consts::PI * (3.0 - libm::sqrt(5.0));
            (0..n)
                .map(|i| {
                    let z = 1.0 - (2 * i + 1) as f64 / n as f64;
                    let r = libm::sqrt((1.0 - z * z).max(0.0));
                    let t = golden * i as f64;
                    Direction { tau: z, xi: vec![r * libm::cos(t), r * libm::sin(t)] }
                })
                .collect()
        }
        _ => {
            let n = count.unwrap_or(DIRECTIONS_DN);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(n);
            let mut x = vec![0.0; d + 1];
            while out.len() < n {
                x.iter_mut().for_each(|c| *c = rng.gen_range(-1.0..1.0));
                let r2: f64 = x.iter().map(|c| c * c).sum();
                if !(1e-6..=1.0).contains(&r2) {
                    continue;
                }
                let r = libm::sqrt(r2);
                out.push(Direction { tau: x[0] / r, xi: x[1..].iter().map(|c| c / r).collect() });
            }
            out
        }
    }
}

/// `DELTA_POINTS` geometric values from `DELTA_MAX` down to `DELTA_MIN`.
pub fn default_delta_grid() -> Vec<f64> {
    geometric(DELTA_MAX, DELTA_MIN, DELTA_POINTS)
}

fn geometric(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    let r = libm::log(lo / hi) / (n - 1) as f64;
    (0..n).map(|i| hi * libm::exp(r * i as f64)).collect()
}

/// Settings of [`fit_alpha_empirical`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaOptions {
    pub deltas: Vec<f64>,
    pub cells: usize,
    /// Directions per `δ` whose measure is recomputed with crossing refinement.
    pub candidates: usize,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        Self { deltas: default_delta_grid(), cells: DEGENERACY_CELLS, candidates: 16 }
    }
}

/// One row of the `(δ, direction, measure)` table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaRow {
    pub delta: f64,
    pub direction_index: usize,
    pub measure: f64,
}

/// Empirical exponent: slope of `log max_dir |W_δ|` against `log δ`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaFit {
    pub fit: ScalingFit,
    /// Per `δ` (decreasing), the largest refined measure and its direction.
    pub maxima: Vec<AlphaRow>,
    /// All refined measurements, sorted by `δ` then direction index.
    pub table: Vec<AlphaRow>,
    /// `(δ_min, δ_max)` actually used by the fit.
    pub delta_range: Option<(f64, f64)>,
    pub directions: usize,
    pub degenerate: bool,
}

/// Sweep `δ` and directions and fit the exponent.
///
/// Every direction gets a strided point count. For each `δ`, the best
/// `candidates` directions by that count, plus index 0, are remeasured with
/// crossing refinement; the maximum of those enters the fit.
pub fn fit_alpha_empirical(flux: &FluxExpr, m: f64, directions: &[Direction], opts: &AlphaOptions) -> Result<AlphaFit> {
    if opts.deltas.len() < 5 {
        return Err(invalid!("need at least 5 values of δ"));
    }
    if opts.deltas.iter().any(|&x| !(x > 0.0)) {
        return Err(invalid!("δ values must be positive"));
    }
    if directions.is_empty() {
        return Err(invalid!("no directions"));
    }
    let probe = DegeneracyProbe::new(flux, m, opts.cells)?;
    for dir in directions {
        probe.check(dir, 1.0)?;
    }
    let mut deltas = opts.deltas.clone();
    deltas.sort_by(|a, b| b.total_cmp(a));
    let nd = deltas.len();
    let stride = ((2 * opts.cells) / 40_000).max(1);

    let mut counts = vec![0usize; directions.len() * nd];
    for (i, dir) in directions.iter().enumerate() {
        probe.coarse(dir, &deltas, stride, &mut counts[i * nd..(i + 1) * nd]);
    }

    let mut table = Vec::new();
    let mut maxima = Vec::new();
    let mut any_degenerate = false;
    for (k, &delta) in deltas.iter().enumerate() {
        let mut order: Vec<usize> = (0..directions.len()).collect();
        order.sort_by(|&a, &b| counts[b * nd + k].cmp(&counts[a * nd + k]).then(a.cmp(&b)));
        let mut picked: Vec<usize> = order.into_iter().take(opts.candidates.max(1)).collect();
        if !picked.contains(&0) {
            picked.push(0);
        }
        picked.sort_unstable();
        let mut best = AlphaRow { delta, direction_index: 0, measure: -1.0 };
        for &i in &picked {
            let meas = probe.measure(&directions[i], delta)?;
            any_degenerate |= meas.degenerate;
            let row = AlphaRow { delta, direction_index: i, measure: meas.measure };
            if row.measure > best.measure {
                best = row.clone();
            }
            table.push(row);
        }
        maxima.push(best);
    }
    table.sort_by(|a, b| a.delta.total_cmp(&b.delta).then(a.direction_index.cmp(&b.direction_index)));
    let pairs: Vec<(f64, f64)> = maxima.iter().map(|r| (r.delta, r.measure)).collect();
    let fit = ScalingFit::loglog(&pairs);
    let delta_range = if fit.empty { None } else { fit.x_range() };
    Ok(AlphaFit { fit, maxima, table, delta_range, directions: directions.len(), degenerate: any_degenerate })
}

/// Sphere samples with the worst direction at `ū` injected at index 0 when `d_F` is finite.
pub fn directions_with_worst(flux: &FluxExpr, ubar: f64, d_f: NonlinIndex, seed: u64) -> Result<Vec<Direction>> {
    let mut dirs = sphere_directions(flux.dim(), None, seed);
    if let NonlinIndex::Finite(k) = d_f {
        dirs.insert(0, worst_direction(flux, ubar, k)?);
    }
    Ok(dirs)
}

/// Sphere samples preceded by the worst direction at `states` equispaced points of `[-M, M]`.
///
/// Random directions rarely land on the thin family where `φ = τ + a(v)·ξ` has a root of
/// order `d_F`, and for small `δ` the largest measure sits on that family. For even `d_F`
/// each member is also shifted by every `δ` so that the band `|φ| ≤ δ` covers `0 ≤ ±φ ≤ 2δ`.
/// States where the index drops below `d_F` are skipped.
pub fn directions_with_family(
    flux: &FluxExpr,
    m: f64,
    d_f: NonlinIndex,
    states: usize,
    deltas: &[f64],
    seed: u64,
) -> Result<Vec<Direction>> {
    let mut dirs = Vec::new();
    if let NonlinIndex::Finite(k) = d_f {
        for j in 0..states {
            let u = if states == 1 { 0.0 } else { -m + 2.0 * m * j as f64 / (states - 1) as f64 };
            let Ok(w) = worst_direction(flux, u, k) else { continue };
            if k % 2 == 0 {
                let lead = linalg::dot(&flux.velocity_derivatives(u, k as usize)?[k as usize], &w.xi);
                let sign = if lead > 0.0 { 1.0 } else { -1.0 };
                for &delta in deltas.iter().filter(|&&x| x < 1.0) {
                    // shift `h` with `h = δ |(τ - sign·h, ξ)|`, so the band edge stays at `φ = 0` after normalizing
                    let t = sign * w.tau;
                    let d2 = delta * delta;
                    let h = (-t * d2 + libm::sqrt(t * t * d2 * d2 + d2 * (1.0 - d2))) / (1.0 - d2);
                    dirs.push(Direction::normalized(w.tau - sign * h, w.xi.clone())?);
                }
            }
            dirs.push(w);
        }
    }
    dirs.extend(sphere_directions(flux.dim(), None, seed));
    Ok(dirs)
}
