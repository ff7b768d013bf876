//! Recursive-descent parser for flux strings.
//!
//! ```text
//! flux    := '[' expr (',' expr)* ']' | expr
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := primary ('^' unary)?          exponent must be constant
//! primary := number | 'u' | 'pi' | name '(' args ')' | '(' expr ')'
//! name    := sin | cos | exp | sqrt | abspow(e, p) | flat
//! ```
//!
//! Positions in errors are byte offsets into the input.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::expr::Expr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &lx.src[start..i];
                let x: f64 = text
                    .parse()
                    .map_err(|_| Error::Syntax { pos: start, msg: alloc::format!("malformed number `{text}`") })?;
                lx.toks.push((Tok::Num(x), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.toks.push((Tok::Ident(lx.src[start..i].to_string()), start));
            } else if "+-*/^(),[]".contains(c) {
                lx.toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(Error::Syntax { pos: i, msg: alloc::format!("unexpected character `{c}`") });
            }
        }
        lx.toks.push((Tok::End, src.len()));
        Ok(lx.toks)
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: &str) -> Result<T> {
        let found = match self.peek() {
            Tok::Num(x) => alloc::format!("number {x}"),
            Tok::Ident(s) => alloc::format!("`{s}`"),
            Tok::Sym(c) => alloc::format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        };
        Err(Error::Syntax { pos: self.pos(), msg: alloc::format!("{msg}, found {found}") })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(&alloc::format!("expected `{c}`"))
        }
    }

    fn flux(&mut self) -> Result<Vec<Expr>> {
        let mut out = Vec::new();
        if *self.peek() == Tok::Sym('[') {
            self.bump();
            out.push(self.expr()?);
            while *self.peek() == Tok::Sym(',') {
                self.bump();
                out.push(self.expr()?);
            }
            self.expect(']')?;
        } else {
            out.push(self.expr()?);
        }
        if *self.peek() != Tok::End {
            return self.fail("expected end of input");
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                let inner = self.unary()?;
                Ok(match inner {
                    Expr::Const(c) => Expr::Const(-c),
                    e => Expr::Neg(Box::new(e)),
                })
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let exponent = self.unary()?;
        let r = self.constant_value(&exponent, pos)?;
        Ok(power_node(base, r))
    }

    fn constant_value(&self, e: &Expr, pos: usize) -> Result<f64> {
        if e.contains_var() {
            return Err(Error::Syntax { pos, msg: "exponent must not depend on u".to_string() });
        }
        e.eval(0.0).map_err(|err| Error::Syntax { pos, msg: alloc::format!("cannot evaluate constant: {err}") })
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(x) => Ok(Expr::Const(x)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "u" => Ok(Expr::Var),
                "pi" => Ok(Expr::Const(core::f64::consts::PI)),
                "sin" | "cos" | "exp" | "sqrt" | "flat" => {
                    self.expect('(')?;
                    let a = Box::new(self.expr()?);
                    self.expect(')')?;
                    Ok(match name.as_str() {
                        "sin" => Expr::Sin(a),
                        "cos" => Expr::Cos(a),
                        "exp" => Expr::Exp(a),
                        "sqrt" => Expr::PowReal(a, 0.5),
                        _ => Expr::FlatBump(a),
                    })
                }
                "abspow" => {
                    self.expect('(')?;
                    let a = Box::new(self.expr()?);
                    self.expect(',')?;
                    let ppos = self.pos();
                    let pe = self.expr()?;
                    let p = self.constant_value(&pe, ppos)?;
                    if p <= -1.0 {
                        return Err(Error::Syntax { pos: ppos, msg: "abspow needs p > -1".to_string() });
                    }
                    self.expect(')')?;
                    Ok(Expr::AbsPow(a, p))
                }
                _ => {
                    if *self.peek() == Tok::Sym('(') {
                        Err(Error::UnsupportedFunction { name, pos })
                    } else {
                        Err(Error::Syntax { pos, msg: alloc::format!("unknown identifier `{name}`") })
                    }
                }
            },
            _ => {
                self.at = self.at.saturating_sub(1);
                self.fail("expected a number, `u`, a function or `(`")
            }
        }
    }
}

fn power_node(base: Expr, r: f64) -> Expr {
    if libm::floor(r) == r && libm::fabs(r) <= i32::MAX as f64 {
        Expr::PowInt(Box::new(base), r as i32)
    } else {
        Expr::PowReal(Box::new(base), r)
    }
}

/// Parse the component expressions of a flux string.
pub fn parse_components(src: &str) -> Result<Vec<Expr>> {
    let toks = Lexer::run(src)?;
    Parser { toks, at: 0 }.flux()
}

/// Parse a single scalar expression.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = Lexer::run(src)?;
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("expected end of input");
    }
    Ok(e)
}
