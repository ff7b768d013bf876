use alloc::vec::Vec;

use super::build::{box_sides, Field2D};
use super::WaveSetup;
use crate::error::{invalid, Error, Result};
use crate::fluxcalc::FluxExpr;
use crate::profile::{solve_entropy_fv, EoTable, FvOptions, ProfileField, Solver};
use crate::quad::GaussRule;
use crate::tolerances::EO_TABLE;

const MAX_STEPS: usize = 10_000_000;

fn sweep(u: &mut [f64], n: [usize; 2], axis: usize, table: &EoTable, r: f64, f: &mut Vec<f64>) {
    let (len, lines, stride, step) = if axis == 0 { (n[0], n[1], n[0], 1) } else { (n[1], n[0], 1, n[0]) };
    f.resize(len, 0.0);
    for line in 0..lines {
        let base = line * stride;
        for k in 0..len {
            let kp = if k + 1 == len { 0 } else { k + 1 };
            f[k] = table.flux(u[base + k * step], u[base + kp * step]);
        }
        let mut prev = f[len - 1];
        for k in 0..len {
            u[base + k * step] -= r * (f[k] - prev);
            prev = f[k];
        }
    }
}

/// Dimensionally split Engquist–Osher scheme for `∂_t u + ∂₁F₁(u) + ∂₂F₂(u) = 0` on a periodic box.
///
/// Each step sweeps both axes with `dt = cfl · min_i h_i / max|F_i'|`; the sweep order alternates.
pub fn solve_fv_2d(flux: &FluxExpr, initial: &Field2D, t_end: f64, cfl: f64) -> Result<Field2D> {
    if flux.dim() != 2 {
        return Err(invalid!("the split solver needs d = 2, got {}", flux.dim()));
    }
    if initial.n[0] < 4 || initial.n[1] < 4 || initial.values.len() != initial.n[0] * initial.n[1] {
        return Err(invalid!("need at least 4×4 cells"));
    }
    if !(cfl > 0.0 && cfl <= 0.9) {
        return Err(invalid!("cfl must lie in (0, 0.9]"));
    }
    if !(t_end >= initial.t) || !t_end.is_finite() {
        return Err(invalid!("t_end must be finite and not before the initial time"));
    }
    let lo = initial.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = initial.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Numerical("non-finite initial data".into()));
    }
    let mut out = initial.clone();
    out.t = t_end;
    if hi == lo {
        return Ok(out);
    }
    let tables = [
        EoTable::from_speed(|u| Ok(flux.velocity(u)?[0]), lo, hi, EO_TABLE)?,
        EoTable::from_speed(|u| Ok(flux.velocity(u)?[1]), lo, hi, EO_TABLE)?,
    ];
    let h = initial.h();
    let u = &mut out.values;
    let mut f = Vec::new();
    let mut t = initial.t;
    let mut steps = 0usize;
    while t < t_end {
        let mut dt = f64::INFINITY;
        for i in 0..2 {
            let smax = u.iter().map(|&x| libm::fabs(tables[i].speed(x))).fold(0.0, f64::max);
            if smax > 0.0 {
                dt = dt.min(cfl * h[i] / smax);
            }
        }
        let last = t + dt >= t_end;
        if last {
            dt = t_end - t;
        }
        let order = if steps % 2 == 0 { [0, 1] } else { [1, 0] };
        for axis in order {
            sweep(u, initial.n, axis, &tables[axis], dt / h[axis], &mut f);
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical(alloc::format!("non-finite value at step {steps}")));
        }
        t = if last { t_end } else { t + dt };
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Numerical(alloc::format!("exceeded {MAX_STEPS} time steps")));
        }
    }
    Ok(out)
}

/// Cell averages of `ū + ε U₀(v·x/ε^γ)` on an `n[0] × n[1]` grid of the commensurate box,
/// advanced by [`solve_fv_2d`].
pub fn planar_fv_2d(setup: &WaveSetup, eps: f64, t: f64, n: [usize; 2], cfl: f64) -> Result<Field2D> {
    if setup.dim() != 2 {
        return Err(invalid!("planar 2-D data needs d = 2"));
    }
    let sides = box_sides(&setup.v, eps, setup.gamma);
    let period = libm::pow(eps, setup.gamma);
    for i in 0..2 {
        let m = setup.v[i] * sides[i] / period;
        if libm::fabs(m - libm::round(m)) > 1e-9 * libm::fabs(m).max(1.0) {
            return Err(invalid!("box side {} is not a whole number of periods along axis {}", sides[i], i));
        }
    }
    let init = Field2D::new(n, [sides[0], sides[1]], 0.0, planar_averages(setup, eps, n, [sides[0], sides[1]]))?;
    solve_fv_2d(&setup.flux, &init, t, cfl)
}

fn planar_averages(setup: &WaveSetup, eps: f64, n: [usize; 2], sides: [f64; 2]) -> Vec<f64> {
    let period = libm::pow(eps, setup.gamma);
    let h = [sides[0] / n[0] as f64, sides[1] / n[1] as f64];
    let rule = GaussRule::new(3);
    let mut values = Vec::with_capacity(n[0] * n[1]);
    for i2 in 0..n[1] {
        let y = i2 as f64 * h[1];
        for i1 in 0..n[0] {
            let x = i1 as f64 * h[0];
            let mut s = 0.0;
            for (a, wa) in rule.mapped(x, x + h[0]) {
                for (b, wb) in rule.mapped(y, y + h[1]) {
                    s += wa * wb * setup.u0.value((setup.v[0] * a + setup.v[1] * b) / period);
                }
            }
            values.push(setup.ubar + eps * s / (h[0] * h[1]));
        }
    }
    values
}

/// Outcome of comparing the split 2-D solver with the 1-D planar reduction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanarCheck {
    pub n: usize,
    /// `(1/|box|) ‖u_2D - u_ref‖₁`, with `u_ref` the reduction on a 16× finer profile grid.
    pub distance: f64,
    /// `ε ‖w_N - avg(w_2N)‖₁` for the reduced scheme at the matching profile resolution.
    pub self_convergence: f64,
    pub ratio: f64,
}

/// Planar cross-check on an `n × n` grid: `distance ≤ 3 · self_convergence` is the pass rule.
pub fn planar_cross_check(setup: &WaveSetup, eps: f64, t: f64, n: usize) -> Result<PlanarCheck> {
    let sides = box_sides(&setup.v, eps, setup.gamma);
    let period = libm::pow(eps, setup.gamma);
    let m_max = (0..2).map(|i| libm::round(libm::fabs(setup.v[i]) * sides[i] / period)).fold(1.0, f64::max);
    let n1 = (n as f64 / m_max) as usize;
    if n1 < 64 {
        return Err(invalid!("the profile grid would have {} < 64 cells", n1));
    }
    let cfl = 0.9;
    let two = planar_fv_2d(setup, eps, t, [n, n], cfl)?;
    let psi = setup.psi(eps)?;
    let opts = FvOptions::default();
    let solve = |cells: usize| -> Result<ProfileField> {
        let init = ProfileField::new(setup.u0.cell_averages(cells), 0.0, Solver::Initial, false);
        Ok(solve_entropy_fv(&psi, &init, &[t], &opts)?.frames.remove(0))
    };
    let w_n = solve(n1)?;
    let w_2n = solve(2 * n1)?;
    let w_ref = solve(16 * n1)?;
    let self_convergence = eps
        * (0..n1).map(|i| libm::fabs(w_n.values[i] - 0.5 * (w_2n.values[2 * i] + w_2n.values[2 * i + 1]))).sum::<f64>()
        / n1 as f64;
    let phase = setup.phase()?;
    let h = two.h();
    let sub = 8;
    let mut total = 0.0;
    for i2 in 0..n {
        for i1 in 0..n {
            let mut avg = 0.0;
            for a in 0..sub {
                for b in 0..sub {
                    let x = [
                        (i1 as f64 + (a as f64 + 0.5) / sub as f64) * h[0],
                        (i2 as f64 + (b as f64 + 0.5) / sub as f64) * h[1],
                    ];
                    avg += w_ref.interpolate(phase.eval(t, &x) / period);
                }
            }
            let reference = setup.ubar + eps * avg / (sub * sub) as f64;
            total += libm::fabs(two.get(i1, i2) - reference);
        }
    }
    let distance = total / (n * n) as f64;
    let ratio = if self_convergence > 0.0 { distance / self_convergence } else { f64::INFINITY };
    Ok(PlanarCheck { n, distance, self_convergence, ratio })
}
