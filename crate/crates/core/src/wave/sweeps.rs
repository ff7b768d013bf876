use alloc::string::String;
use alloc::vec::Vec;

use super::WaveSetup;
use crate::error::{invalid, Error, Result};
use crate::profile::{shock_time, solve_entropy_fv, CharMap, FvOptions, ProfileField, ProfileFlux, Solver};
use crate::scaling::ScalingFit;
use crate::tolerances::SHOCK_SAFETY;

/// Phase points per period for WKB errors.
pub const WKB_THETA_POINTS: usize = 1024;
/// Time levels on `[0, t_eval]` for the time derivative in the `C¹` norm.
pub const WKB_TIME_LEVELS: usize = 9;
/// Profile cells for cancellation ratios.
pub const CANCELLATION_CELLS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ErrorNorm {
    /// `max_θ |D(t_eval, θ)|`.
    Sup,
    /// `max|D| + max|∂_t D| + max|∂_θ D|` over `[0, t_eval] × [0, 1)`.
    C1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WkbRow {
    pub eps: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WkbSweep {
    pub rows: Vec<WkbRow>,
    pub fit: ScalingFit,
    pub t0: f64,
    pub t_eval: f64,
    pub norm: ErrorNorm,
    /// Every error vanished: the expansion is exact and no slope exists.
    pub exact: bool,
}

/// Validated WKB sweep; [`WkbPlan::error`] is independent per ε.
#[derive(Debug, Clone)]
pub struct WkbPlan {
    setup: WaveSetup,
    limit: ProfileFlux,
    t_eval: f64,
    t0: f64,
    norm: ErrorNorm,
}

fn pre_shock(psi: &ProfileFlux, setup: &WaveSetup) -> Result<f64> {
    Ok(shock_time(psi, &setup.u0)?.unwrap_or(f64::INFINITY))
}

impl WkbPlan {
    /// Needs compatibility and `t_eval < 0.95 T₀`, `T₀` the smallest shock time over the ε-list and the limit.
    pub fn new(setup: &WaveSetup, t_eval: f64, norm: ErrorNorm) -> Result<Self> {
        if !setup.compatible()? {
            return Err(Error::Hypothesis("WKB sweep needs the compatibility condition".into()));
        }
        if !(t_eval > 0.0) || !t_eval.is_finite() {
            return Err(invalid!("t_eval must be positive and finite"));
        }
        let limit = setup.limit_psi()?;
        let t0 = Self::uniform_time(setup)?;
        if t_eval >= SHOCK_SAFETY * t0 {
            return Err(Error::PastShock { t: t_eval, bound: SHOCK_SAFETY * t0 });
        }
        Ok(Self { setup: setup.clone(), limit, t_eval, t0, norm })
    }

    /// `T₀ = min(T*(ψ_ε) over the ε-list, T*(limit))`, infinite when nothing breaks.
    pub fn uniform_time(setup: &WaveSetup) -> Result<f64> {
        let mut t0 = pre_shock(&setup.limit_psi()?, setup)?;
        for &e in &setup.eps {
            t0 = t0.min(pre_shock(&setup.psi(e)?, setup)?);
        }
        Ok(t0)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn eps(&self) -> &[f64] {
        &self.setup.eps
    }

    /// Distance between `u_ε` and `ū + εU` for one ε.
    pub fn error(&self, eps: f64) -> Result<f64> {
        let psi = self.setup.psi(eps)?;
        let u0 = &self.setup.u0;
        let n = WKB_THETA_POINTS;
        let levels: Vec<f64> = match self.norm {
            ErrorNorm::Sup => alloc::vec![self.t_eval],
            ErrorNorm::C1 => {
                (0..WKB_TIME_LEVELS).map(|k| self.t_eval * k as f64 / (WKB_TIME_LEVELS - 1) as f64).collect()
            }
        };
        let mut d = Vec::with_capacity(levels.len());
        for &t in &levels {
            let a = CharMap::new(&psi, u0, t)?;
            let b = CharMap::new(&self.limit, u0, t)?;
            let row = (0..n)
                .map(|j| {
                    let th = j as f64 / n as f64;
                    Ok(eps * (a.value(th)? - b.value(th)?))
                })
                .collect::<Result<Vec<f64>>>()?;
            d.push(row);
        }
        let c0 = d.iter().flatten().map(|x| libm::fabs(*x)).fold(0.0, f64::max);
        if self.norm == ErrorNorm::Sup {
            return Ok(c0);
        }
        let dth = 1.0 / n as f64;
        let mut cth: f64 = 0.0;
        for row in &d {
            for j in 0..n {
                cth = cth.max(libm::fabs(row[(j + 1) % n] - row[(j + n - 1) % n]) / (2.0 * dth));
            }
        }
        let m = levels.len();
        let dt = levels[1] - levels[0];
        let mut ct: f64 = 0.0;
        for k in 0..m {
            for j in 0..n {
                let g = if k == 0 {
                    (-3.0 * d[0][j] + 4.0 * d[1][j] - d[2][j]) / (2.0 * dt)
                } else if k == m - 1 {
                    (3.0 * d[m - 1][j] - 4.0 * d[m - 2][j] + d[m - 3][j]) / (2.0 * dt)
                } else {
                    (d[k + 1][j] - d[k - 1][j]) / (2.0 * dt)
                };
                ct = ct.max(libm::fabs(g));
            }
        }
        Ok(c0 + ct + cth)
    }

    pub fn finish(&self, rows: Vec<WkbRow>) -> WkbSweep {
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.error)).collect();
        let exact = rows.iter().all(|r| r.error == 0.0);
        WkbSweep { fit: ScalingFit::loglog(&pairs), rows, t0: self.t0, t_eval: self.t_eval, norm: self.norm, exact }
    }

    pub fn run(&self) -> Result<WkbSweep> {
        let rows = self
            .setup
            .eps
            .iter()
            .map(|&eps| Ok(WkbRow { eps, error: self.error(eps)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.finish(rows))
    }
}

/// Slope of `log error` against `log ε` for the WKB remainder.
pub fn wkb_error_sweep(setup: &WaveSetup, t_eval: f64, norm: ErrorNorm) -> Result<WkbSweep> {
    WkbPlan::new(setup, t_eval, norm)?.run()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CancellationRow {
    pub eps: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CancellationSweep {
    pub rows: Vec<CancellationRow>,
    /// `ratio(ε_{k+1}) / ratio(ε_k)`.
    pub factors: Vec<f64>,
    /// Empirical rate of `ratio` in ε.
    pub fit: ScalingFit,
    pub t_eval: f64,
    pub warning: Option<String>,
}

/// `‖u_ε(t) - ū - εŪ₀‖₁ / (ε |box|)`, which equals `∫₀¹ |U_ε(t, θ) - Ū₀| dθ` on a commensurate box.
pub fn cancellation_ratio_at(setup: &WaveSetup, eps: f64, t_eval: f64, cells: usize) -> Result<f64> {
    if !(t_eval > 0.0) || !t_eval.is_finite() {
        return Err(invalid!("t_eval must be positive and finite"));
    }
    let psi = setup.psi(eps)?;
    let init = ProfileField::new(setup.u0.cell_averages(cells), 0.0, Solver::Initial, false);
    let mean = setup.u0.mean();
    let frame = solve_entropy_fv(&psi, &init, &[t_eval], &FvOptions::default())?.frames.remove(0);
    Ok(frame.values.iter().map(|u| libm::fabs(u - mean)).sum::<f64>() / cells as f64)
}

/// Ratios over the ε-list; needs the compatibility condition to fail.
pub fn cancellation_sweep(setup: &WaveSetup, t_eval: f64) -> Result<CancellationSweep> {
    if setup.compatible()? {
        return Err(Error::Hypothesis("cancellation needs the compatibility condition to fail".into()));
    }
    let rows = setup
        .eps
        .iter()
        .map(|&eps| Ok(CancellationRow { eps, ratio: cancellation_ratio_at(setup, eps, t_eval, CANCELLATION_CELLS)? }))
        .collect::<Result<Vec<_>>>()?;
    cancellation_summary(setup, t_eval, rows)
}

/// Factors, rate and the early-time warning for precomputed rows.
pub fn cancellation_summary(setup: &WaveSetup, t_eval: f64, rows: Vec<CancellationRow>) -> Result<CancellationSweep> {
    let mut warning = None;
    if setup.u0.is_smooth() {
        if let Some(ts) = shock_time(&setup.psi(setup.eps[0])?, &setup.u0)? {
            if t_eval < ts {
                warning = Some(alloc::format!(
                    "t_eval = {t_eval} precedes the shock time {ts} of the largest ε; oscillations may not have cancelled yet"
                ));
            }
        }
    }
    let factors = rows.windows(2).map(|w| w[1].ratio / w[0].ratio).collect();
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.ratio)).collect();
    Ok(CancellationSweep { fit: ScalingFit::loglog(&pairs), rows, factors, t_eval, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxcalc::parse_flux;
    use crate::profile::InitialProfile;
    use alloc::vec;

    #[test]
    fn linear_flux_has_no_error() {
        let s = WaveSetup::new(
            parse_flux("[3*u, -u]").unwrap(),
            1.0,
            0.2,
            vec![1.0, 2.0],
            2.0,
            InitialProfile::sine(),
            vec![0.5, 0.25],
        )
        .unwrap();
        let w = wkb_error_sweep(&s, 1.0, ErrorNorm::C1).unwrap();
        assert!(w.exact && w.fit.empty && w.t0.is_infinite());
    }

    #[test]
    fn gamma_three_halves_slope() {
        let f = parse_flux("[u^2/2, u^3/3]").unwrap();
        let s = WaveSetup::new(f, 1.0, 0.0, vec![0.0, 1.0], 1.5, InitialProfile::sine(), vec![0.125, 0.0625, 0.03125])
            .unwrap();
        let t0 = WkbPlan::uniform_time(&s).unwrap();
        let w = wkb_error_sweep(&s, 0.4 * t0, ErrorNorm::Sup).unwrap();
        assert!((w.fit.slope - 1.5).abs() < 0.1, "{}", w.fit.slope);
    }

    #[test]
    fn incompatible_setups_are_refused() {
        let f = parse_flux("[u^2/2, u^3/3]").unwrap();
        let s = WaveSetup::new(f, 1.0, 0.0, vec![1.0, 0.0], 2.0, InitialProfile::sine(), vec![0.25]).unwrap();
        assert!(matches!(wkb_error_sweep(&s, 0.01, ErrorNorm::Sup), Err(Error::Hypothesis(_))));
        let s2 = WaveSetup { v: vec![0.0, 1.0], ..s };
        assert!(matches!(cancellation_sweep(&s2, 0.5), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn constant_profile_has_zero_ratio() {
        let f = parse_flux("[u^2/2]").unwrap();
        let s = WaveSetup::new(f, 1.0, 0.0, vec![1.0], 2.0, InitialProfile::constant(0.4), vec![0.25, 0.125]).unwrap();
        let c = cancellation_sweep(&s, 0.5).unwrap();
        assert!(c.rows.iter().all(|r| r.ratio == 0.0));
    }

    #[test]
    fn burgers_ratio_decreases() {
        let f = parse_flux("[u^2/2]").unwrap();
        let s =
            WaveSetup::new(f, 1.0, 0.0, vec![1.0], 2.0, InitialProfile::sine(), vec![0.125, 0.0625, 0.03125]).unwrap();
        let c = cancellation_sweep(&s, 0.5).unwrap();
        assert!(c.warning.is_none());
        assert!(c.factors.iter().all(|&q| q <= 0.9), "{:?}", c.factors);
    }
}
