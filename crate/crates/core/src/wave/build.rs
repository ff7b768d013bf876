use alloc::vec::Vec;

use super::WaveSetup;
use crate::error::{invalid, Error, Result};
use crate::profile::{shock_time, solve_entropy_fv, CharMap, FvOptions, InitialProfile, ProfileField, ProfileFlux};
use crate::tolerances::SHOCK_SAFETY;

/// Profile cells used once characteristics are no longer valid.
pub const PROFILE_FV_CELLS: usize = 4096;

/// Cell-center samples on the periodic interval `[0, side)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Field1D {
    pub side: f64,
    pub t: f64,
    pub values: Vec<f64>,
}

impl Field1D {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.side / self.values.len() as f64
    }
}

/// Cell values on the periodic box `[0, sides[0]) × [0, sides[1])`, stored at `i2 * n1 + i1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Field2D {
    pub n: [usize; 2],
    pub sides: [f64; 2],
    pub t: f64,
    pub values: Vec<f64>,
}

impl Field2D {
    pub fn new(n: [usize; 2], sides: [f64; 2], t: f64, values: Vec<f64>) -> Result<Self> {
        if n[0] == 0 || n[1] == 0 || values.len() != n[0] * n[1] {
            return Err(invalid!("field of {} values does not fit a {}×{} grid", values.len(), n[0], n[1]));
        }
        if !(sides[0] > 0.0 && sides[1] > 0.0) {
            return Err(invalid!("box sides must be positive"));
        }
        Ok(Self { n, sides, t, values })
    }

    pub fn h(&self) -> [f64; 2] {
        [self.sides[0] / self.n[0] as f64, self.sides[1] / self.n[1] as f64]
    }

    pub fn center(&self, i1: usize, i2: usize) -> [f64; 2] {
        let h = self.h();
        [(i1 as f64 + 0.5) * h[0], (i2 as f64 + 0.5) * h[1]]
    }

    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        self.values[i2 * self.n[0] + i1]
    }

    /// Box average.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `(1/|box|) ∫ |u - w|` on matching grids.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(invalid!("grids differ"));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| libm::fabs(a - b)).sum::<f64>()
            / self.values.len() as f64)
    }
}

/// A wave sampled in one or two space dimensions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "dim", rename_all = "lowercase"))]
pub enum WaveField {
    One(Field1D),
    Two(Field2D),
}

impl WaveField {
    pub fn values(&self) -> &[f64] {
        match self {
            WaveField::One(f) => &f.values,
            WaveField::Two(f) => &f.values,
        }
    }

    pub fn t(&self) -> f64 {
        match self {
            WaveField::One(f) => f.t,
            WaveField::Two(f) => f.t,
        }
    }
}

/// Box sides `m_i ε^γ / |v_i|` with `m_i = ⌈|v_i| / ε^γ⌉`, so each side holds a whole number
/// of phase periods and is at least 1; side 1 along axes with `v_i = 0`.
pub fn box_sides(v: &[f64], eps: f64, gamma: f64) -> Vec<f64> {
    let period = libm::pow(eps, gamma);
    v.iter()
        .map(|&vi| {
            let a = libm::fabs(vi);
            if a == 0.0 {
                1.0
            } else {
                libm::ceil(a / period - 1e-9) * period / a
            }
        })
        .collect()
}

/// Evaluates `U_ε(t, ·)` by characteristics before `0.95 T*`, by finite volumes after.
pub(crate) enum ProfileAt<'a> {
    Char(CharMap<'a>),
    Fv(ProfileField),
}

impl<'a> ProfileAt<'a> {
    pub(crate) fn new(psi: &'a ProfileFlux, u0: &'a InitialProfile, t: f64) -> Result<Self> {
        if u0.is_smooth() {
            let ts = shock_time(psi, u0)?;
            if ts.map_or(true, |ts| t < SHOCK_SAFETY * ts) {
                return Ok(ProfileAt::Char(CharMap::with_shock_time(psi, u0, t, ts)?));
            }
        }
        let init = ProfileField::from_initial(u0, PROFILE_FV_CELLS);
        let traj = solve_entropy_fv(psi, &init, &[t], &FvOptions::default())?;
        let frame = traj.frames.into_iter().next().ok_or_else(|| Error::Numerical("empty trajectory".into()))?;
        Ok(ProfileAt::Fv(frame))
    }

    pub(crate) fn value(&self, theta: f64) -> Result<f64> {
        let theta = theta - libm::floor(theta);
        match self {
            ProfileAt::Char(m) => m.value(theta),
            ProfileAt::Fv(f) => Ok(f.interpolate(theta)),
        }
    }
}

/// `u_ε(t, x) = ū + ε U_ε(t, φ(t, x)/ε^γ)` at the cell centers of a commensurate box.
///
/// `cells` gives the grid size per axis; only `d ≤ 2` is sampled.
pub fn build_wave(setup: &WaveSetup, eps: f64, t: f64, cells: &[usize]) -> Result<WaveField> {
    let d = setup.dim();
    if d > 2 {
        return Err(invalid!("fields are sampled for d ≤ 2 only, got d = {}", d));
    }
    if cells.len() != d || cells.contains(&0) {
        return Err(invalid!("need {} positive grid sizes", d));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid!("t must be finite and non-negative"));
    }
    let psi = setup.psi(eps)?;
    let prof = ProfileAt::new(&psi, &setup.u0, t)?;
    let phase = setup.phase()?;
    let period = libm::pow(eps, setup.gamma);
    let sides = box_sides(&setup.v, eps, setup.gamma);
    let at = |x: &[f64]| -> Result<f64> { Ok(setup.ubar + eps * prof.value(phase.eval(t, x) / period)?) };
    if d == 1 {
        let n = cells[0];
        let values = (0..n).map(|i| at(&[(i as f64 + 0.5) * sides[0] / n as f64])).collect::<Result<Vec<_>>>()?;
        return Ok(WaveField::One(Field1D { side: sides[0], t, values }));
    }
    let n = [cells[0], cells[1]];
    let mut values = Vec::with_capacity(n[0] * n[1]);
    for i2 in 0..n[1] {
        let x2 = (i2 as f64 + 0.5) * sides[1] / n[1] as f64;
        for i1 in 0..n[0] {
            let x1 = (i1 as f64 + 0.5) * sides[0] / n[0] as f64;
            values.push(at(&[x1, x2])?);
        }
    }
    Ok(WaveField::Two(Field2D::new(n, [sides[0], sides[1]], t, values)?))
}
