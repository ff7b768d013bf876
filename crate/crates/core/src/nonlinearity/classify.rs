//! Decide the three nonlinearity notions for polynomial and trigonometric-polynomial fluxes.
//!
//! Components are expanded exactly in the basis `u^n`, `u^n cos(ωu)`,
//! `u^n sin(ωu)`, whose elements are linearly independent on every interval.
//! Linear (in)dependence of functions then reduces to the rank of a
//! coefficient matrix.

use alloc::vec;
use alloc::vec::Vec;

use super::{d_f_global, IndexOptions, NonlinIndex};
use crate::error::Result;
use crate::fluxcalc::{Expr, FluxExpr};
use crate::linalg;
use crate::tolerances::RANK_TOL;

/// Outcome of one decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase", tag = "decision"))]
pub enum Decision {
    True,
    False,
    /// Not expandable; `sampled_rank` is the numerical rank on sample points and
    /// `needed` the rank that would make the answer true.
    Undecided {
        sampled_rank: usize,
        needed: usize,
    },
}

impl Decision {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Decision::True => Some(true),
            Decision::False => Some(false),
            Decision::Undecided { .. } => None,
        }
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Decision::True
        } else {
            Decision::False
        }
    }
}

/// Classification record of a flux on `[-M, M]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DefinitionReport {
    /// `d_F < ∞` on `[-M, M]`.
    pub smooth_nonlinear: Decision,
    /// No `(τ, ξ) ≠ 0` with `τ + a(v)·ξ ≡ 0` on a subinterval: `{1, a_1, …, a_d}` independent.
    pub lpt_nonlinear: Decision,
    /// `{F_1'', …, F_d''}` linearly independent.
    pub strictly_nonlinear: Decision,
    pub d_f: NonlinIndex,
    /// `Some(true)` when every decided implication in the chain holds.
    pub implications_hold: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Poly,
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    n: u32,
    kind: Kind,
    omega: f64,
    c: f64,
}

impl Term {
    fn poly(n: u32, c: f64) -> Self {
        Term { n, kind: Kind::Poly, omega: 0.0, c }
    }

    fn canonical(mut self) -> Option<Self> {
        if self.c == 0.0 {
            return None;
        }
        if self.kind != Kind::Poly && self.omega < 0.0 {
            self.omega = -self.omega;
            if self.kind == Kind::Sin {
                self.c = -self.c;
            }
        }
        if self.omega == 0.0 {
            match self.kind {
                Kind::Sin => return None,
                Kind::Cos => self.kind = Kind::Poly,
                Kind::Poly => {}
            }
        }
        Some(self)
    }

    fn same_basis(&self, o: &Term) -> bool {
        self.n == o.n
            && self.kind == o.kind
            && libm::fabs(self.omega - o.omega) <= 1e-12 * self.omega.max(o.omega).max(1.0)
    }
}

/// Finite sum of basis terms.
#[derive(Debug, Clone, PartialEq, Default)]
struct TrigPoly(Vec<Term>);

impl TrigPoly {
    fn constant(c: f64) -> Self {
        Self::from_terms(vec![Term::poly(0, c)])
    }

    fn from_terms(terms: Vec<Term>) -> Self {
        let mut out: Vec<Term> = Vec::new();
        for t in terms.into_iter().filter_map(Term::canonical) {
            if let Some(e) = out.iter_mut().find(|e| e.same_basis(&t)) {
                e.c += t.c;
            } else {
                out.push(t);
            }
        }
        out.retain(|t| t.c != 0.0);
        TrigPoly(out)
    }

    fn as_constant(&self) -> Option<f64> {
        match self.0.as_slice() {
            [] => Some(0.0),
            [t] if t.kind == Kind::Poly && t.n == 0 => Some(t.c),
            _ => None,
        }
    }

    fn add(&self, o: &Self, sign: f64) -> Self {
        let mut t = self.0.clone();
        t.extend(o.0.iter().map(|x| Term { c: sign * x.c, ..*x }));
        Self::from_terms(t)
    }

    fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.0.iter().map(|x| Term { c: s * x.c, ..*x }).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Vec::new();
        for a in &self.0 {
            for b in &o.0 {
                let n = a.n + b.n;
                let c = a.c * b.c;
                let (p, m) = (a.omega + b.omega, a.omega - b.omega);
                use Kind::*;
                match (a.kind, b.kind) {
                    (Poly, k) => out.push(Term { n, kind: k, omega: b.omega, c }),
                    (k, Poly) => out.push(Term { n, kind: k, omega: a.omega, c }),
                    (Cos, Cos) => {
                        out.push(Term { n, kind: Cos, omega: m, c: 0.5 * c });
                        out.push(Term { n, kind: Cos, omega: p, c: 0.5 * c });
                    }
                    (Sin, Sin) => {
                        out.push(Term { n, kind: Cos, omega: m, c: 0.5 * c });
                        out.push(Term { n, kind: Cos, omega: p, c: -0.5 * c });
                    }
                    (Sin, Cos) => {
                        out.push(Term { n, kind: Sin, omega: p, c: 0.5 * c });
                        out.push(Term { n, kind: Sin, omega: m, c: 0.5 * c });
                    }
                    (Cos, Sin) => {
                        out.push(Term { n, kind: Sin, omega: p, c: 0.5 * c });
                        out.push(Term { n, kind: Sin, omega: -m, c: 0.5 * c });
                    }
                }
            }
        }
        Self::from_terms(out)
    }

    fn derivative(&self) -> Self {
        let mut out = Vec::new();
        for t in &self.0 {
            if t.n > 0 {
                out.push(Term { n: t.n - 1, c: t.c * t.n as f64, ..*t });
            }
            match t.kind {
                Kind::Poly => {}
                Kind::Cos => out.push(Term { kind: Kind::Sin, c: -t.c * t.omega, ..*t }),
                Kind::Sin => out.push(Term { kind: Kind::Cos, c: t.c * t.omega, ..*t }),
            }
        }
        Self::from_terms(out)
    }

    /// `(α, β)` when the expansion is `αu + β`.
    fn as_linear(&self) -> Option<(f64, f64)> {
        let (mut a, mut b) = (0.0, 0.0);
        for t in &self.0 {
            match (t.kind, t.n) {
                (Kind::Poly, 0) => b += t.c,
                (Kind::Poly, 1) => a += t.c,
                _ => return None,
            }
        }
        Some((a, b))
    }

    fn trig(&self, sine: bool) -> Option<Self> {
        let (a, b) = self.as_linear()?;
        let (sb, cb) = (libm::sin(b), libm::cos(b));
        let terms = if sine {
            vec![Term { n: 0, kind: Kind::Cos, omega: a, c: sb }, Term { n: 0, kind: Kind::Sin, omega: a, c: cb }]
        } else {
            vec![Term { n: 0, kind: Kind::Cos, omega: a, c: cb }, Term { n: 0, kind: Kind::Sin, omega: a, c: -sb }]
        };
        Some(Self::from_terms(terms))
    }
}

fn expand(e: &Expr) -> Option<TrigPoly> {
    Some(match e {
        Expr::Const(c) => TrigPoly::constant(*c),
        Expr::Var => TrigPoly::from_terms(vec![Term::poly(1, 1.0)]),
        Expr::Neg(a) => expand(a)?.scale(-1.0),
        Expr::Add(a, b) => expand(a)?.add(&expand(b)?, 1.0),
        Expr::Sub(a, b) => expand(a)?.add(&expand(b)?, -1.0),
        Expr::Mul(a, b) => expand(a)?.mul(&expand(b)?),
        Expr::Div(a, b) => {
            let den = expand(b)?.as_constant()?;
            if den == 0.0 {
                return None;
            }
            expand(a)?.scale(1.0 / den)
        }
        Expr::PowInt(a, n) => {
            let base = expand(a)?;
            if *n < 0 {
                return Some(TrigPoly::constant(libm::pow(base.as_constant()?, *n as f64)));
            }
            let mut acc = TrigPoly::constant(1.0);
            for _ in 0..*n {
                acc = acc.mul(&base);
            }
            acc
        }
        Expr::Sin(a) => expand(a)?.trig(true)?,
        Expr::Cos(a) => expand(a)?.trig(false)?,
        Expr::PowReal(..) | Expr::Exp(_) | Expr::AbsPow(..) | Expr::FlatBump(_) => {
            if e.contains_var() {
                return None;
            }
            TrigPoly::constant(e.eval(0.0).ok()?)
        }
    })
}

fn coefficient_rank(polys: &[TrigPoly]) -> usize {
    let mut basis: Vec<Term> = Vec::new();
    for p in polys {
        for t in &p.0 {
            if !basis.iter().any(|b| b.same_basis(t)) {
                basis.push(*t);
            }
        }
    }
    if basis.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<f64>> = polys
        .iter()
        .map(|p| basis.iter().map(|b| p.0.iter().filter(|t| t.same_basis(b)).map(|t| t.c).sum()).collect())
        .collect();
    linalg::rank(&rows, RANK_TOL)
}

/// Numerical rank of sampled functions on 64 points of `[-M, M]`.
fn sampled_rank(f: &dyn Fn(f64) -> Result<Vec<f64>>, m: f64) -> Result<usize> {
    let n = 64;
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        // Irrational offset keeps samples off special points such as 0.
        let u = -m + 2.0 * m * (i as f64 + 0.5 + 0.1234567) / (n as f64 + 1.0);
        cols.push(f(u)?);
    }
    let k = cols[0].len();
    let rows: Vec<Vec<f64>> = (0..k).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    Ok(linalg::rank(&rows, RANK_TOL))
}

/// Classify `flux` on `[-M, M]`.
pub fn check_definitions(flux: &FluxExpr, m: f64) -> Result<DefinitionReport> {
    let d = flux.dim();
    let report = d_f_global(flux, m, &IndexOptions::for_dim(d))?;
    let smooth_nonlinear = Decision::from_bool(report.d_f != NonlinIndex::Infinite);

    let expanded: Option<Vec<TrigPoly>> = flux.components().iter().map(expand).collect();
    let (lpt, strict) = match expanded {
        Some(fs) => {
            let a: Vec<TrigPoly> = fs.iter().map(TrigPoly::derivative).collect();
            let f2: Vec<TrigPoly> = a.iter().map(TrigPoly::derivative).collect();
            let mut with_one = vec![TrigPoly::constant(1.0)];
            with_one.extend(a);
            (Decision::from_bool(coefficient_rank(&with_one) == d + 1), Decision::from_bool(coefficient_rank(&f2) == d))
        }
        None => {
            let lpt_rank = sampled_rank(
                &|u| {
                    let mut row = vec![1.0];
                    row.extend(flux.velocity(u)?);
                    Ok(row)
                },
                m,
            )?;
            let strict_rank = sampled_rank(&|u| Ok(flux.velocity_derivatives(u, 1)?.swap_remove(1)), m)?;
            (
                Decision::Undecided { sampled_rank: lpt_rank, needed: d + 1 },
                Decision::Undecided { sampled_rank: strict_rank, needed: d },
            )
        }
    };

    let chain = [(smooth_nonlinear, lpt), (lpt, strict)];
    let mut implications_hold = Some(true);
    for (p, q) in chain {
        match (p.as_bool(), q.as_bool()) {
            (Some(true), Some(false)) => implications_hold = Some(false),
            (Some(true), None) if implications_hold == Some(true) => implications_hold = None,
            _ => {}
        }
    }
    Ok(DefinitionReport {
        smooth_nonlinear,
        lpt_nonlinear: lpt,
        strictly_nonlinear: strict,
        d_f: report.d_f,
        implications_hold,
    })
}
