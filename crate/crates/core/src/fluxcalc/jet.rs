use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Result};

/// Truncated Taylor series of a scalar function at a point.
///
/// `coeffs[k] = f^(k)(u) / k!` for `k = 0..=order`. Arithmetic follows the
/// Leibniz rule for products and the usual first-order recurrences for
/// quotients, powers, `exp`, `sin` and `cos`, so every operation costs
/// `O(K²)` and differentiation is exact up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(u: f64, value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { u, coeffs }
    }

    /// The identity function `u ↦ u`.
    pub fn variable(u: f64, order: usize) -> Self {
        let mut j = Self::constant(u, u, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `f^(k)(u)`.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeffs[k] * factorial(k)
    }

    /// `[f(u), f'(u), …, f^(K)(u)]`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order()).map(|k| self.derivative(k)).collect()
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self { u: self.u, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { u: self.u, coeffs: self.coeffs.iter().map(|a| c * a).collect() }
    }

    /// Leibniz product.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut c = vec![0.0; n];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|j| self.coeffs[j] * other.coeffs[k - j]).sum();
        }
        Self { u: self.u, coeffs: c }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return Err(domain!("division by zero at u = {}", self.u));
        }
        let n = self.coeffs.len();
        let mut c = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (1..=k).map(|j| other.coeffs[j] * c[k - j]).sum();
            c[k] = (self.coeffs[k] - s) / b0;
        }
        Ok(Self { u: self.u, coeffs: c })
    }

    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let n = a.len();
        let mut e = vec![0.0; n];
        e[0] = libm::exp(a[0]);
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Self { u: self.u, coeffs: e }
    }

    /// `(sin f, cos f)` from the coupled recurrence.
    pub fn sin_cos(&self) -> (Self, Self) {
        let a = &self.coeffs;
        let n = a.len();
        let (mut s, mut c) = (vec![0.0; n], vec![0.0; n]);
        s[0] = libm::sin(a[0]);
        c[0] = libm::cos(a[0]);
        for k in 1..n {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Self { u: self.u, coeffs: s }, Self { u: self.u, coeffs: c })
    }

    pub fn powi(&self, n: i32) -> Result<Self> {
        if n < 0 {
            let one = Self::constant(self.u, 1.0, self.order());
            return one.div(&self.powi(-n)?);
        }
        let mut result = Self::constant(self.u, 1.0, self.order());
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// `f^r` for real `r`, requiring `f(u) > 0` unless `r` is an integer.
    pub fn powf(&self, r: f64) -> Result<Self> {
        if libm::floor(r) == r && libm::fabs(r) <= i32::MAX as f64 {
            return self.powi(r as i32);
        }
        let a = &self.coeffs;
        if a[0] <= 0.0 {
            if a[0] == 0.0 && r > 0.0 && self.order() == 0 {
                return Ok(Self::constant(self.u, 0.0, 0));
            }
            return Err(domain!("real power {} of non-positive base {} at u = {}", r, a[0], self.u));
        }
        let n = a.len();
        let mut p = vec![0.0; n];
        p[0] = libm::pow(a[0], r);
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| (r * j as f64 - (k - j) as f64) * a[j] * p[k - j]).sum();
            p[k] = s / (k as f64 * a[0]);
        }
        Ok(Self { u: self.u, coeffs: p })
    }

    /// `|f|^(1+p)`. Smooth away from zeros of `f`; at a zero only orders
    /// strictly below `1+p` exist (all of them vanish) unless `1+p` is an
    /// even integer.
    pub fn abs_pow(&self, p: f64) -> Result<Self> {
        let e = 1.0 + p;
        let a0 = self.coeffs[0];
        if a0 > 0.0 {
            return self.powf(e);
        }
        if a0 < 0.0 {
            return self.neg().powf(e);
        }
        if libm::floor(e) == e && (e as i64) % 2 == 0 {
            return self.powi(e as i32);
        }
        if (self.order() as f64) < e {
            return Ok(Self::constant(self.u, 0.0, self.order()));
        }
        Err(domain!("|f|^{} has no derivative of order {} where f vanishes (u = {})", e, self.order(), self.u))
    }

    /// `exp(-1/f²)`, extended by the zero jet where `f = 0`.
    pub fn flat_bump(&self) -> Result<Self> {
        if self.coeffs[0] == 0.0 {
            return Ok(Self::constant(self.u, 0.0, self.order()));
        }
        let one = Self::constant(self.u, 1.0, self.order());
        Ok(one.div(&self.mul(self))?.neg().exp())
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}
