//! Log-log least squares for scaling exponents.

use alloc::vec::Vec;

/// Least-squares line through `(log x, log y)` points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    /// Set when fewer than two usable points remained; slope and intercept are NaN.
    pub empty: bool,
}

impl ScalingFit {
    /// Fit a line to already-logged points.
    pub fn from_points(points: Vec<(f64, f64)>) -> Self {
        let n = points.len();
        if n < 2 {
            return Self { points, slope: f64::NAN, intercept: f64::NAN, max_residual: f64::NAN, empty: true };
        }
        let nf = n as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
        let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx == 0.0 {
            return Self { points, slope: f64::NAN, intercept: f64::NAN, max_residual: f64::NAN, empty: true };
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let max_residual = points.iter().map(|p| libm::fabs(p.1 - intercept - slope * p.0)).fold(0.0, f64::max);
        Self { points, slope, intercept, max_residual, empty: false }
    }

    /// Fit `log y` against `log x`, dropping pairs with a non-positive entry.
    pub fn loglog(pairs: &[(f64, f64)]) -> Self {
        Self::from_points(
            pairs
                .iter()
                .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
                .map(|&(x, y)| (libm::log(x), libm::log(y)))
                .collect(),
        )
    }

    /// Range of the fitted abscissa, in original units.
    pub fn x_range(&self) -> Option<(f64, f64)> {
        let lo = self.points.iter().map(|p| p.0).reduce(f64::min)?;
        let hi = self.points.iter().map(|p| p.0).reduce(f64::max)?;
        Some((libm::exp(lo), libm::exp(hi)))
    }
}
