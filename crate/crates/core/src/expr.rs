//! Expression language for polynomials, enveloping-algebra elements and
//! parameter coefficients: `+ - * /`, integer powers and parentheses.
//! Division is only allowed by generator-free subexpressions.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::poly::{Coeff, Field, Poly, Rational};
use crate::ratexpr::RatExpr;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt),
    Sym(String, usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Num(s.parse().unwrap()), start + 1));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            let mut s: String = chars[start..i].iter().collect();
            // `l(Z)`-style parameter names are single identifiers.
            if i < chars.len() && chars[i] == '(' {
                let close = chars[i..].iter().position(|&c| c == ')').map(|p| p + i);
                if let Some(close) = close {
                    let inner: String = chars[i + 1..close].iter().collect();
                    if !inner.is_empty() && inner.chars().all(|c| c.is_alphanumeric() || c == '_') {
                        s = format!("{s}({inner})");
                        i = close + 1;
                    }
                }
            }
            out.push((Tok::Ident(s), start + 1));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i + 1));
            i += 1;
        } else if c == '·' {
            out.push((Tok::Op('*'), i + 1));
            i += 1;
        } else {
            return Err(Error::Parse {
                column: i + 1,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            column: self.col(),
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(&Tok::Op('/')) {
                let col = self.col();
                self.pos += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), col);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let k: u32 = n.try_into().or_else(|_| self.err("exponent too large"))?;
                    Ok(Expr::Pow(Box::new(base), k))
                }
                _ => self.err("expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Sym(s, col))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.chars().count() + 1,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// How an expression is interpreted: which symbols are generators and how the
/// target ring multiplies.
pub trait Interp {
    type Val: Clone;
    fn scalar(&self, r: RatExpr) -> Self::Val;
    /// `None` when `name` is not a generator of the target.
    fn generator(&self, name: &str) -> Option<Self::Val>;
    fn add(&self, a: &Self::Val, b: &Self::Val) -> Self::Val;
    fn mul(&self, a: &Self::Val, b: &Self::Val) -> Self::Val;
    fn neg(&self, a: &Self::Val) -> Self::Val;
    fn as_scalar(&self, a: &Self::Val) -> Option<RatExpr>;
}

/// Symbol environment: named definitions and free parameters. Identifiers of
/// the form `f(x)` are always parameters.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub definitions: BTreeMap<String, Expr>,
    pub params: BTreeSet<String>,
}

impl Env {
    pub fn new() -> Self {
        let params = ["t", "eps"].iter().map(|s| s.to_string()).collect();
        Env {
            definitions: BTreeMap::new(),
            params,
        }
    }

    pub fn define(&mut self, name: &str, src: &str) -> Result<()> {
        self.definitions.insert(name.to_string(), parse(src)?);
        Ok(())
    }

    pub fn is_param(&self, name: &str) -> bool {
        self.params.contains(name) || (name.ends_with(')') && name.contains('('))
    }

    pub fn eval<I: Interp>(&self, e: &Expr, it: &I) -> Result<I::Val> {
        self.eval_guarded(e, it, &mut Vec::new())
    }

    fn eval_guarded<I: Interp>(&self, e: &Expr, it: &I, stack: &mut Vec<String>) -> Result<I::Val> {
        Ok(match e {
            Expr::Num(n) => it.scalar(RatExpr::from_rational(Rational::from_integer(n.clone()))),
            Expr::Sym(s, col) => {
                if let Some(v) = it.generator(s) {
                    v
                } else if let Some(def) = self.definitions.get(s) {
                    if stack.contains(s) {
                        return Err(Error::Parse {
                            column: *col,
                            message: format!("recursive definition of `{s}`"),
                        });
                    }
                    stack.push(s.clone());
                    let v = self.eval_guarded(def, it, stack)?;
                    stack.pop();
                    v
                } else if self.is_param(s) {
                    it.scalar(RatExpr::param(s))
                } else {
                    return Err(Error::UnknownSymbol(s.clone()));
                }
            }
            Expr::Add(a, b) => it.add(
                &self.eval_guarded(a, it, stack)?,
                &self.eval_guarded(b, it, stack)?,
            ),
            Expr::Sub(a, b) => {
                let b = self.eval_guarded(b, it, stack)?;
                it.add(&self.eval_guarded(a, it, stack)?, &it.neg(&b))
            }
            Expr::Mul(a, b) => it.mul(
                &self.eval_guarded(a, it, stack)?,
                &self.eval_guarded(b, it, stack)?,
            ),
            Expr::Div(a, b, col) => {
                let d = self.eval_guarded(b, it, stack)?;
                let Some(d) = it.as_scalar(&d) else {
                    return Err(Error::Parse {
                        column: *col,
                        message: "division by a generator expression".into(),
                    });
                };
                let inv = d.inverse().ok_or(Error::DivisionByZero {
                    denominator: d.to_string(),
                })?;
                it.mul(&self.eval_guarded(a, it, stack)?, &it.scalar(inv))
            }
            Expr::Neg(a) => it.neg(&self.eval_guarded(a, it, stack)?),
            Expr::Pow(a, k) => {
                let base = self.eval_guarded(a, it, stack)?;
                let mut acc = it.scalar(RatExpr::one());
                for _ in 0..*k {
                    acc = it.mul(&acc, &base);
                }
                acc
            }
        })
    }
}

/// Interprets expressions as parameter coefficients only.
pub struct ScalarInterp;

impl Interp for ScalarInterp {
    type Val = RatExpr;
    fn scalar(&self, r: RatExpr) -> RatExpr {
        r
    }
    fn generator(&self, _: &str) -> Option<RatExpr> {
        None
    }
    fn add(&self, a: &RatExpr, b: &RatExpr) -> RatExpr {
        a.plus(b)
    }
    fn mul(&self, a: &RatExpr, b: &RatExpr) -> RatExpr {
        a.times(b)
    }
    fn neg(&self, a: &RatExpr) -> RatExpr {
        a.negated()
    }
    fn as_scalar(&self, a: &RatExpr) -> Option<RatExpr> {
        Some(a.clone())
    }
}

/// Parses a coefficient such as `1/(12*l(Z))` or `-3/4`.
pub fn parse_ratexpr(src: &str) -> Result<RatExpr> {
    let mut env = Env::new();
    // Every bare identifier is a parameter in coefficient context.
    collect_idents(&parse(src)?, &mut env.params);
    env.eval(&parse(src)?, &ScalarInterp)
}

/// Interprets expressions as commutative polynomials over fixed generators.
pub struct PolyInterp {
    pub gens: std::sync::Arc<[String]>,
}

impl Interp for PolyInterp {
    type Val = Poly<RatExpr>;
    fn scalar(&self, r: RatExpr) -> Self::Val {
        Poly::constant(self.gens.clone(), r)
    }
    fn generator(&self, name: &str) -> Option<Self::Val> {
        Poly::var(self.gens.clone(), name).ok()
    }
    fn add(&self, a: &Self::Val, b: &Self::Val) -> Self::Val {
        a.add(b)
    }
    fn mul(&self, a: &Self::Val, b: &Self::Val) -> Self::Val {
        a.mul(b)
    }
    fn neg(&self, a: &Self::Val) -> Self::Val {
        a.neg()
    }
    fn as_scalar(&self, a: &Self::Val) -> Option<RatExpr> {
        if a.terms().keys().all(|m| m.iter().all(|&e| e == 0)) {
            Some(a.constant_term())
        } else {
            None
        }
    }
}

/// Parses a commutative polynomial in `gens`; other identifiers must be
/// parameters such as `l(Z)`.
pub fn parse_poly(src: &str, gens: &std::sync::Arc<[String]>) -> Result<Poly<RatExpr>> {
    Env::new().eval(&parse(src)?, &PolyInterp { gens: gens.clone() })
}

fn collect_idents(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Sym(s, _) => {
            out.insert(s.clone());
        }
        Expr::Num(_) => {}
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) => {
            collect_idents(a, out);
            collect_idents(b, out);
        }
        Expr::Neg(a) | Expr::Pow(a, _) => collect_idents(a, out),
    }
}
