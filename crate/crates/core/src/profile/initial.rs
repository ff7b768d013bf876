use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Result};

fn sinc(x: f64) -> f64 {
    if libm::fabs(x) < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        libm::sin(x) / x
    }
}

/// 1-periodic initial profile `U₀(θ)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum InitialProfile {
    /// `mean + Σ_k cos[k-1]·cos(2πkθ) + sin[k-1]·sin(2πkθ)`.
    Fourier {
        mean: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        cos: Vec<f64>,
        #[cfg_attr(feature = "serde", serde(default))]
        sin: Vec<f64>,
    },
    /// `left` on `[0, split)`, `right` on `[split, 1)`.
    Riemann { left: f64, right: f64, split: f64 },
    /// Point values at the cell centers `(i + ½)/N`, interpolated linearly.
    Sampled { values: Vec<f64> },
}

impl InitialProfile {
    /// `sin(2πθ)`.
    pub fn sine() -> Self {
        InitialProfile::Fourier { mean: 0.0, cos: Vec::new(), sin: alloc::vec![1.0] }
    }

    pub fn constant(c: f64) -> Self {
        InitialProfile::Fourier { mean: c, cos: Vec::new(), sin: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InitialProfile::Fourier { mean, cos, sin } => {
                if !mean.is_finite() || cos.iter().chain(sin).any(|c| !c.is_finite()) {
                    return Err(invalid!("Fourier coefficients must be finite"));
                }
            }
            InitialProfile::Riemann { left, right, split } => {
                if !(*split > 0.0 && *split < 1.0) || !left.is_finite() || !right.is_finite() {
                    return Err(invalid!("Riemann data needs finite states and 0 < split < 1"));
                }
            }
            InitialProfile::Sampled { values } => {
                if values.len() < 4 || values.iter().any(|c| !c.is_finite()) {
                    return Err(invalid!("sampled profile needs at least 4 finite values"));
                }
            }
        }
        Ok(())
    }

    /// Whether `U₀` is `C¹`, so that a shock time is defined.
    pub fn is_smooth(&self) -> bool {
        !matches!(self, InitialProfile::Riemann { .. })
    }

    fn wrap(theta: f64) -> f64 {
        theta - libm::floor(theta)
    }

    fn sampled_locate(values: &[f64], theta: f64) -> (usize, usize, f64) {
        let n = values.len();
        let x = Self::wrap(theta) * n as f64 - 0.5;
        let f = libm::floor(x);
        let w = x - f;
        let i0 = (f as i64).rem_euclid(n as i64) as usize;
        (i0, (i0 + 1) % n, w)
    }

    pub fn value(&self, theta: f64) -> f64 {
        match self {
            InitialProfile::Fourier { mean, cos, sin } => {
                let mut s = *mean;
                for (k, c) in cos.iter().enumerate() {
                    s += c * libm::cos(2.0 * PI * (k + 1) as f64 * theta);
                }
                for (k, c) in sin.iter().enumerate() {
                    s += c * libm::sin(2.0 * PI * (k + 1) as f64 * theta);
                }
                s
            }
            InitialProfile::Riemann { left, right, split } => {
                if Self::wrap(theta) < *split {
                    *left
                } else {
                    *right
                }
            }
            InitialProfile::Sampled { values } => {
                let (i0, i1, w) = Self::sampled_locate(values, theta);
                (1.0 - w) * values[i0] + w * values[i1]
            }
        }
    }

    /// `U₀'(θ)`: exact for Fourier data, centered differences of the samples otherwise.
    pub fn derivative(&self, theta: f64) -> f64 {
        match self {
            InitialProfile::Fourier { cos, sin, .. } => {
                let mut s = 0.0;
                for (k, c) in cos.iter().enumerate() {
                    let w = 2.0 * PI * (k + 1) as f64;
                    s -= c * w * libm::sin(w * theta);
                }
                for (k, c) in sin.iter().enumerate() {
                    let w = 2.0 * PI * (k + 1) as f64;
                    s += c * w * libm::cos(w * theta);
                }
                s
            }
            InitialProfile::Riemann { .. } => 0.0,
            InitialProfile::Sampled { values } => {
                let n = values.len();
                let slope = |i: usize| (values[(i + 1) % n] - values[(i + n - 1) % n]) * n as f64 / 2.0;
                let (i0, i1, w) = Self::sampled_locate(values, theta);
                (1.0 - w) * slope(i0) + w * slope(i1)
            }
        }
    }

    /// Exact cell averages on `n` uniform cells (Sampled data: averages of the interpolant).
    pub fn cell_averages(&self, n: usize) -> Vec<f64> {
        let h = 1.0 / n as f64;
        match self {
            InitialProfile::Fourier { mean, cos, sin } => (0..n)
                .map(|i| {
                    let c = (i as f64 + 0.5) * h;
                    let mut s = *mean;
                    for (k, a) in cos.iter().enumerate() {
                        let w = 2.0 * PI * (k + 1) as f64;
                        s += a * libm::cos(w * c) * sinc(w * h / 2.0);
                    }
                    for (k, b) in sin.iter().enumerate() {
                        let w = 2.0 * PI * (k + 1) as f64;
                        s += b * libm::sin(w * c) * sinc(w * h / 2.0);
                    }
                    s
                })
                .collect(),
            InitialProfile::Riemann { left, right, split } => (0..n)
                .map(|i| {
                    let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                    let l = (split.min(b) - a).clamp(0.0, h);
                    (l * left + (h - l) * right) / h
                })
                .collect(),
            InitialProfile::Sampled { .. } => (0..n)
                .map(|i| {
                    let a = i as f64 * h;
                    // Two-point Gauss on each cell is exact for the piecewise-linear interpolant
                    // except on cells straddling a node, where the error is below h².
                    let g = 0.5 / libm::sqrt(3.0);
                    0.5 * (self.value(a + (0.5 - g) * h) + self.value(a + (0.5 + g) * h))
                })
                .collect(),
        }
    }

    /// Point values at the cell centers of `n` uniform cells.
    pub fn centers(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.value((i as f64 + 0.5) / n as f64)).collect()
    }

    /// `∫₀¹ U₀`.
    pub fn mean(&self) -> f64 {
        match self {
            InitialProfile::Fourier { mean, .. } => *mean,
            InitialProfile::Riemann { left, right, split } => split * left + (1.0 - split) * right,
            InitialProfile::Sampled { values } => values.iter().sum::<f64>() / values.len() as f64,
        }
    }

    /// `(min, max)` of `U₀`; Fourier data is sampled on 4096 points.
    pub fn range(&self) -> (f64, f64) {
        match self {
            InitialProfile::Riemann { left, right, .. } => (left.min(*right), left.max(*right)),
            InitialProfile::Sampled { values } => (
                values.iter().copied().fold(f64::INFINITY, f64::min),
                values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ),
            InitialProfile::Fourier { .. } => {
                let n = 4096;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..n {
                    let x = self.value(i as f64 / n as f64);
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
                (lo, hi)
            }
        }
    }
}

/// Which solver produced a [`ProfileField`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Solver {
    Initial,
    Characteristics,
    FiniteVolume,
}

/// Samples of a periodic profile at the cell centers `(i + ½)/N` of `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProfileField {
    pub values: Vec<f64>,
    pub t: f64,
    pub solver: Solver,
    pub shock: bool,
}

impl ProfileField {
    pub fn new(values: Vec<f64>, t: f64, solver: Solver, shock: bool) -> Self {
        Self { values, t, solver, shock }
    }

    /// Cell averages of `U₀` at `t = 0`.
    pub fn from_initial(u0: &InitialProfile, n: usize) -> Self {
        Self::new(u0.cell_averages(n), 0.0, Solver::Initial, false)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn theta(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.values.len() as f64
    }

    /// Periodic linear interpolation between cell centers.
    pub fn interpolate(&self, theta: f64) -> f64 {
        let n = self.values.len();
        let x = (theta - libm::floor(theta)) * n as f64 - 0.5;
        let f = libm::floor(x);
        let w = x - f;
        let i0 = (f as i64).rem_euclid(n as i64) as usize;
        (1.0 - w) * self.values[i0] + w * self.values[(i0 + 1) % n]
    }

    /// `∫ |U - V|` over one period, on matching grids.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(invalid!("grids differ: {} vs {}", self.len(), other.len()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| libm::fabs(a - b)).sum::<f64>() / self.len() as f64)
    }
}

/// Cell-average mean of a field.
pub fn mean_value(field: &ProfileField) -> f64 {
    if field.values.is_empty() {
        return 0.0;
    }
    field.values.iter().sum::<f64>() / field.values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_examples() {
        for n in [7, 64, 1000] {
            let f = ProfileField::from_initial(&InitialProfile::sine(), n);
            assert!(mean_value(&f).abs() < 1e-12);
        }
        let c = ProfileField::from_initial(&InitialProfile::constant(0.7), 33);
        assert!((mean_value(&c) - 0.7).abs() < 1e-15);
        // 0.3 + 0.5 sin² = 0.55 - 0.25 cos(4πθ)
        let s2 = InitialProfile::Fourier { mean: 0.55, cos: alloc::vec![0.0, -0.25], sin: Vec::new() };
        let f = ProfileField::new(s2.centers(1024), 0.0, Solver::Initial, false);
        assert!((mean_value(&f) - 0.55).abs() < 1e-6);
        let t = 0.37;
        assert!((s2.value(t) - (0.3 + 0.5 * (2.0 * PI * t).sin().powi(2))).abs() < 1e-14);
    }

    #[test]
    fn riemann_cell_averages() {
        let r = InitialProfile::Riemann { left: 1.0, right: -1.0, split: 0.3 };
        let a = r.cell_averages(10);
        assert_eq!(a[0], 1.0);
        assert!(a[2] > 0.99 && a[3] < -0.99);
        assert!((a.iter().sum::<f64>() / 10.0 - r.mean()).abs() < 1e-15);
    }

    #[test]
    fn fourier_derivative() {
        let u = InitialProfile::Fourier { mean: 0.1, cos: alloc::vec![0.3], sin: alloc::vec![0.0, 0.5] };
        let h = 1e-6;
        for t in [0.1, 0.45, 0.8] {
            let fd = (u.value(t + h) - u.value(t - h)) / (2.0 * h);
            assert!((fd - u.derivative(t)).abs() < 1e-6);
        }
    }
}
