//! Sparse multivariate polynomials over an exact coefficient ring.
//!
//! Exponent vectors are indexed by the generator list, and the term map is
//! ordered lexicographically with the first generator most significant.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse {
        column: 0,
        message: format!("not a rational literal: `{s}`"),
    };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::DivisionByZero {
            denominator: "0".into(),
        });
    }
    Ok(Rational::new(n, d))
}

pub fn factorial(k: u32) -> Rational {
    (1..=k as i64).fold(int(1), |acc, i| acc * int(i))
}

/// Ring operations shared by every coefficient type.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn from_rational(r: Rational) -> Self;

    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    /// Sign and magnitude text used by the polynomial printer. The flag says
    /// whether the magnitude needs parentheses when followed by a monomial.
    fn render_parts(&self) -> (bool, String, bool);
}

pub trait Field: Coeff {
    fn inverse(&self) -> Option<Self>;

    fn divided(&self, other: &Self) -> Option<Self> {
        other.inverse().map(|inv| self.times(&inv))
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn render_parts(&self) -> (bool, String, bool) {
        (self.is_negative(), self.abs().to_string(), false)
    }
}

impl Field for Rational {
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

pub type Monomial = Vec<u32>;

/// All exponent vectors in `nvars` variables of total degree exactly `d`,
/// lexicographically descending.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    if nvars == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials_of_degree(nvars - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Exponent vectors of degree at most `d`, highest degree first.
pub fn monomials_upto(nvars: usize, d: u32) -> Vec<Monomial> {
    (0..=d)
        .rev()
        .flat_map(|k| monomials_of_degree(nvars, k))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Poly<C> {
    gens: Arc<[String]>,
    terms: BTreeMap<Monomial, C>,
}

pub fn gens_of<S: AsRef<str>>(names: &[S]) -> Arc<[String]> {
    names
        .iter()
        .map(|s| s.as_ref().to_string())
        .collect::<Vec<_>>()
        .into()
}

fn is_sorted(g: &[String]) -> bool {
    g.windows(2).all(|w| w[0] < w[1])
}

/// Union of two generator lists. Sorted inputs give a sorted union, otherwise
/// the left order is kept and new names from the right are appended.
fn merge_gens(a: &Arc<[String]>, b: &Arc<[String]>) -> Arc<[String]> {
    if Arc::ptr_eq(a, b) || a[..] == b[..] {
        return a.clone();
    }
    if b.iter().all(|x| a.contains(x)) {
        return a.clone();
    }
    if a.iter().all(|x| b.contains(x)) && !(is_sorted(a) && is_sorted(b)) {
        return b.clone();
    }
    let mut out: Vec<String> = a.to_vec();
    for x in b.iter() {
        if !out.contains(x) {
            out.push(x.clone());
        }
    }
    if is_sorted(a) && is_sorted(b) {
        out.sort();
    }
    out.into()
}

impl<C: Coeff> Poly<C> {
    pub fn zero(gens: Arc<[String]>) -> Self {
        Poly {
            gens,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(gens: Arc<[String]>, c: C) -> Self {
        let mut p = Poly::zero(gens);
        if !c.is_zero() {
            let n = p.gens.len();
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn one(gens: Arc<[String]>) -> Self {
        Poly::constant(gens, C::one())
    }

    pub fn var(gens: Arc<[String]>, name: &str) -> Result<Self> {
        let i = gens
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::UnknownSymbol(name.into()))?;
        let mut e = vec![0; gens.len()];
        e[i] = 1;
        Ok(Poly::monomial(gens, e, C::one()))
    }

    pub fn monomial(gens: Arc<[String]>, exps: Monomial, c: C) -> Self {
        assert_eq!(exps.len(), gens.len(), "exponent vector length");
        let mut p = Poly::zero(gens);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(gens: Arc<[String]>, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Poly::zero(gens);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn gens(&self) -> &Arc<[String]> {
        &self.gens
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, C> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, C> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn constant_term(&self) -> C {
        self.terms
            .get(&vec![0; self.gens.len()])
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn coeff(&self, m: &[u32]) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.gens
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::UnknownSymbol(name.into()))
    }

    /// Adds `c·m` in place.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().plus(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m[i]).max().unwrap_or(0)
    }

    /// Lexicographically largest term.
    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// Re-expresses the polynomial over a superset of its generators.
    pub fn embed(&self, gens: &Arc<[String]>) -> Self {
        if Arc::ptr_eq(&self.gens, gens) || self.gens[..] == gens[..] {
            return Poly {
                gens: gens.clone(),
                terms: self.terms.clone(),
            };
        }
        let map: Vec<usize> = self
            .gens
            .iter()
            .map(|g| {
                gens.iter()
                    .position(|h| h == g)
                    .expect("embed target must contain every generator")
            })
            .collect();
        let mut out = Poly::zero(gens.clone());
        for (m, c) in &self.terms {
            let mut e = vec![0; gens.len()];
            for (i, &k) in m.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(e, c.clone());
        }
        out
    }

    /// Drops generators that do not occur.
    pub fn trimmed(&self) -> Self {
        let used: Vec<usize> = (0..self.gens.len())
            .filter(|&i| self.terms.keys().any(|m| m[i] > 0))
            .collect();
        if used.len() == self.gens.len() {
            return self.clone();
        }
        let gens: Arc<[String]> = used
            .iter()
            .map(|&i| self.gens[i].clone())
            .collect::<Vec<_>>()
            .into();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (used.iter().map(|&i| m[i]).collect(), c.clone()))
            .collect();
        Poly { gens, terms }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let g = merge_gens(&self.gens, &other.gens);
        (self.embed(&g), other.embed(&g))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.aligned(other);
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Poly {
            gens: self.gens.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.negated()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero(self.gens.clone());
        }
        let mut out = Poly::zero(self.gens.clone());
        for (m, d) in &self.terms {
            out.add_term(m.clone(), d.times(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let mut out = Poly::zero(a.gens.clone());
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.add_term(m, ca.times(cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::one(self.gens.clone());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn mul_monomial(&self, m: &[u32], c: &C) -> Self {
        let mut out = Poly::zero(self.gens.clone());
        for (mm, d) in &self.terms {
            out.add_term(mm.iter().zip(m).map(|(x, y)| x + y).collect(), d.times(c));
        }
        out
    }

    pub fn derive_index(&self, i: usize, order: u32) -> Self {
        let mut out = Poly::zero(self.gens.clone());
        for (m, c) in &self.terms {
            if m[i] < order {
                continue;
            }
            let mut f = C::one();
            for k in 0..order {
                f = f.times(&C::from_rational(int((m[i] - k) as i64)));
            }
            let mut e = m.clone();
            e[i] -= order;
            out.add_term(e, c.times(&f));
        }
        out
    }

    pub fn derive(&self, var: &str, order: u32) -> Result<Self> {
        Ok(self.derive_index(self.index_of(var)?, order))
    }

    /// Applies `∂^alpha` for a full multi-index.
    pub fn derive_multi(&self, alpha: &[u32]) -> Self {
        let mut out = Poly::zero(self.gens.clone());
        'terms: for (m, c) in &self.terms {
            let mut f = c.clone();
            let mut e = m.clone();
            for (i, &a) in alpha.iter().enumerate() {
                if e[i] < a {
                    continue 'terms;
                }
                for k in 0..a {
                    f = f.times(&C::from_rational(int((e[i] - k) as i64)));
                }
                e[i] -= a;
            }
            out.add_term(e, f);
        }
        out
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Poly {
            gens: self.gens.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.iter().sum::<u32>() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Evaluates with every generator replaced by a coefficient.
    pub fn eval(&self, values: &[C]) -> C {
        assert_eq!(values.len(), self.gens.len());
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t = t.times(&values[i]);
                }
            }
            acc = acc.plus(&t);
        }
        acc
    }

    /// Commutative substitution of each generator by a polynomial over `target`.
    pub fn substitute(&self, images: &[Poly<C>], target: &Arc<[String]>) -> Self {
        assert_eq!(images.len(), self.gens.len());
        let images: Vec<Poly<C>> = images.iter().map(|p| p.embed(target)).collect();
        let mut powers: Vec<Vec<Poly<C>>> = images
            .iter()
            .map(|p| vec![Poly::one(target.clone()), p.clone()])
            .collect();
        let mut out = Poly::zero(target.clone());
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target.clone(), c.clone());
            for (i, &e) in m.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.gens.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn try_map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> Result<D>) -> Result<Poly<D>> {
        let mut out = Poly::zero(self.gens.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn monomial_text(&self, m: &[u32]) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.gens[i].clone()),
                _ => parts.push(format!("{}^{}", self.gens[i], e)),
            }
        }
        parts.join("*")
    }
}

impl<C: Field> Poly<C> {
    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (mut r, b) = self.aligned(divisor);
        let (mb, cb) = {
            let (m, c) = b.leading()?;
            (m.clone(), c.clone())
        };
        let inv = cb.inverse()?;
        let mut q = Poly::zero(r.gens.clone());
        while let Some((mr, cr)) = r.leading() {
            if mr.iter().zip(&mb).any(|(x, y)| x < y) {
                return None;
            }
            let e: Monomial = mr.iter().zip(&mb).map(|(x, y)| x - y).collect();
            let c = cr.times(&inv);
            q.add_term(e.clone(), c.clone());
            r = r.sub(&b.mul_monomial(&e, &c));
        }
        Some(q)
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => self.scale(&c.inverse().expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }
}

impl<C: Coeff> PartialEq for Poly<C> {
    fn eq(&self, other: &Self) -> bool {
        if self.gens[..] == other.gens[..] {
            return self.terms == other.terms;
        }
        let (a, b) = self.aligned(other);
        a.terms == b.terms
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag, paren) = c.render_parts();
            let mono = self.monomial_text(m);
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{mono}")?;
            } else if paren {
                write!(f, "({mag})*{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

macro_rules! poly_binop {
    ($tr:ident, $m:ident) => {
        impl<C: Coeff> $tr<&Poly<C>> for &Poly<C> {
            type Output = Poly<C>;
            fn $m(self, rhs: &Poly<C>) -> Poly<C> {
                Poly::$m(self, rhs)
            }
        }
    };
}
poly_binop!(Add, add);
poly_binop!(Sub, sub);
poly_binop!(Mul, mul);

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly::neg(self)
    }
}
