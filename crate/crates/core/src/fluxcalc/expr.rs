use alloc::boxed::Box;
use core::fmt;

use super::jet::Jet;
use crate::error::{domain, Result};

/// Scalar expression in the single variable `u`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowInt(Box<Expr>, i32),
    PowReal(Box<Expr>, f64),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    /// `|e|^(1+p)`.
    AbsPow(Box<Expr>, f64),
    /// `exp(-1/e²)`, zero where `e = 0`.
    FlatBump(Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Self {
        Expr::Const(c)
    }

    pub fn var() -> Self {
        Expr::Var
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Neg(a)
            | Expr::PowInt(a, _)
            | Expr::PowReal(a, _)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Exp(a)
            | Expr::AbsPow(a, _)
            | Expr::FlatBump(a) => a.contains_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_var() || b.contains_var()
            }
        }
    }

    /// Taylor jet of order `order` at `u`.
    pub fn eval_jet(&self, u: f64, order: usize) -> Result<Jet> {
        Ok(match self {
            Expr::Const(c) => Jet::constant(u, *c, order),
            Expr::Var => Jet::variable(u, order),
            Expr::Neg(a) => a.eval_jet(u, order)?.neg(),
            Expr::Add(a, b) => a.eval_jet(u, order)?.add(&b.eval_jet(u, order)?),
            Expr::Sub(a, b) => a.eval_jet(u, order)?.sub(&b.eval_jet(u, order)?),
            Expr::Mul(a, b) => a.eval_jet(u, order)?.mul(&b.eval_jet(u, order)?),
            Expr::Div(a, b) => a.eval_jet(u, order)?.div(&b.eval_jet(u, order)?)?,
            Expr::PowInt(a, n) => a.eval_jet(u, order)?.powi(*n)?,
            Expr::PowReal(a, r) => a.eval_jet(u, order)?.powf(*r)?,
            Expr::Sin(a) => a.eval_jet(u, order)?.sin_cos().0,
            Expr::Cos(a) => a.eval_jet(u, order)?.sin_cos().1,
            Expr::Exp(a) => a.eval_jet(u, order)?.exp(),
            Expr::AbsPow(a, p) => a.eval_jet(u, order)?.abs_pow(*p)?,
            Expr::FlatBump(a) => a.eval_jet(u, order)?.flat_bump()?,
        })
    }

    /// Plain value at `u`, without building jets.
    pub fn eval(&self, u: f64) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => u,
            Expr::Neg(a) => -a.eval(u)?,
            Expr::Add(a, b) => a.eval(u)? + b.eval(u)?,
            Expr::Sub(a, b) => a.eval(u)? - b.eval(u)?,
            Expr::Mul(a, b) => a.eval(u)? * b.eval(u)?,
            Expr::Div(a, b) => {
                let d = b.eval(u)?;
                if d == 0.0 {
                    return Err(domain!("division by zero at u = {}", u));
                }
                a.eval(u)? / d
            }
            Expr::PowInt(a, n) => {
                let x = a.eval(u)?;
                if x == 0.0 && *n < 0 {
                    return Err(domain!("division by zero at u = {}", u));
                }
                powi(x, *n)
            }
            Expr::PowReal(a, r) => {
                let x = a.eval(u)?;
                if x < 0.0 || (x == 0.0 && *r < 0.0) {
                    return Err(domain!("real power {} of {} at u = {}", r, x, u));
                }
                libm::pow(x, *r)
            }
            Expr::Sin(a) => libm::sin(a.eval(u)?),
            Expr::Cos(a) => libm::cos(a.eval(u)?),
            Expr::Exp(a) => libm::exp(a.eval(u)?),
            Expr::AbsPow(a, p) => libm::pow(libm::fabs(a.eval(u)?), 1.0 + p),
            Expr::FlatBump(a) => {
                let x = a.eval(u)?;
                if x == 0.0 {
                    0.0
                } else {
                    libm::exp(-1.0 / (x * x))
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::PowInt(..) | Expr::PowReal(..) => 4,
            Expr::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

fn powi(x: f64, n: i32) -> f64 {
    let mut r = 1.0;
    let mut b = x;
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            r *= b;
        }
        b *= b;
        e >>= 1;
    }
    if n < 0 {
        1.0 / r
    } else {
        r
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x < 0.0 {
        write!(f, "({x:?})")
    } else {
        write!(f, "{x:?}")
    }
}

/// Prints in the grammar accepted by [`super::parse_flux`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var => write!(f, "u"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, 4)
            }
            Expr::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " - ")?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "*")?;
                write_child(f, b, 4)
            }
            Expr::Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "/")?;
                write_child(f, b, 4)
            }
            Expr::PowInt(a, n) => {
                write_child(f, a, 5)?;
                write!(f, "^")?;
                write_number(f, *n as f64)
            }
            Expr::PowReal(a, r) => {
                write_child(f, a, 5)?;
                write!(f, "^")?;
                write_number(f, *r)
            }
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::AbsPow(a, p) => write!(f, "abspow({a}, {p:?})"),
            Expr::FlatBump(a) => write!(f, "flat({a})"),
        }
    }
}
