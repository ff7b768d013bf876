//! Small dense linear algebra: one-sided Jacobi SVD, numerical rank, null spaces.
//!
//! Matrices are row-major `&[Vec<f64>]`. Sizes here are tiny (a few rows of
//! derivative vectors), so a Hestenes sweep is accurate and cheap.

use alloc::vec;
use alloc::vec::Vec;

/// Singular values and right singular vectors of an `m × n` matrix.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `n` values, sorted in decreasing order (zeros included when `m < n`).
    pub singular_values: Vec<f64>,
    /// Right singular vectors, `v[j]` pairs with `singular_values[j]`.
    pub v: Vec<Vec<f64>>,
}

impl Svd {
    pub fn max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Count of singular values above `tol · σ_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let cut = tol * self.max();
        if self.max() == 0.0 {
            return 0;
        }
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }

    /// Right singular vectors whose singular value is at most `tol · σ_max`.
    pub fn null_space(&self, tol: f64) -> Vec<Vec<f64>> {
        let cut = tol * self.max();
        self.singular_values
            .iter()
            .zip(&self.v)
            .filter(|(&s, _)| self.max() == 0.0 || s <= cut)
            .map(|(_, v)| v.clone())
            .collect()
    }
}

/// One-sided Jacobi SVD. Rows may have any length `n ≥ 1`; all rows must agree.
pub fn svd(rows: &[Vec<f64>]) -> Svd {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let scale = rows.iter().flatten().fold(0.0f64, |acc, x| acc.max(libm::fabs(*x)));
    // Column-major working copy, rescaled to avoid overflow in the sums.
    let mut cols: Vec<Vec<f64>> =
        (0..n).map(|j| (0..m).map(|i| if scale > 0.0 { rows[i][j] / scale } else { 0.0 }).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a * b).sum();
                if gamma == 0.0 || libm::fabs(gamma) <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..m {
                    let (a, b) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * a - s * b;
                    cols[q][i] = s * a + c * b;
                }
                for i in 0..n {
                    let (a, b) = (v[p][i], v[q][i]);
                    v[p][i] = c * a - s * b;
                    v[q][i] = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> =
        cols.iter().map(|c| libm::sqrt(c.iter().map(|x| x * x).sum::<f64>()) * scale).zip(v).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (singular_values, v) = pairs.into_iter().unzip();
    Svd { singular_values, v }
}

/// Numerical rank with relative cutoff `tol`.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    svd(rows).rank(tol)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut d = 1.0;
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| libm::fabs(a[i][k]).total_cmp(&libm::fabs(a[j][k]))).unwrap_or(k);
        if a[piv][k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            a.swap(piv, k);
            d = -d;
        }
        d *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    d
}
