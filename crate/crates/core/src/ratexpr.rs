//! Rational functions in named formal parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{int, Coeff, Field, Poly, Rational};

/// Polynomial in parameter symbols with rational coefficients.
pub type ParamPoly = Poly<Rational>;

fn no_gens() -> Arc<[String]> {
    Vec::<String>::new().into()
}

fn sorted_gens(names: &[String]) -> Arc<[String]> {
    let mut v = names.to_vec();
    v.sort();
    v.dedup();
    v.into()
}

/// Canonical form: trimmed and with sorted generators.
fn canon(p: &ParamPoly) -> ParamPoly {
    let t = p.trimmed();
    t.embed(&sorted_gens(t.gens()))
}

fn common(a: &ParamPoly, b: &ParamPoly) -> (ParamPoly, ParamPoly) {
    let mut names: Vec<String> = a.gens().to_vec();
    names.extend(b.gens().iter().cloned());
    let g = sorted_gens(&names);
    (a.embed(&g), b.embed(&g))
}

/// Coefficients of `p` seen as a univariate polynomial in generator `v`.
fn univariate(p: &ParamPoly, v: usize) -> Vec<ParamPoly> {
    let d = p.degree_in(v) as usize;
    let mut out = vec![ParamPoly::zero(p.gens().clone()); d + 1];
    for (m, c) in p.terms() {
        let mut e = m.clone();
        let k = e[v] as usize;
        e[v] = 0;
        out[k].add_term(e, c.clone());
    }
    out
}

fn content_in(p: &ParamPoly, v: usize) -> ParamPoly {
    univariate(p, v)
        .iter()
        .filter(|c| !c.is_zero())
        .fold(ParamPoly::zero(p.gens().clone()), |acc, c| {
            poly_gcd(&acc, c)
        })
}

fn pseudo_rem(f: &ParamPoly, g: &ParamPoly, v: usize) -> ParamPoly {
    let dg = g.degree_in(v);
    let lcg = univariate(g, v).pop().unwrap();
    let mut r = f.clone();
    while !r.is_zero() && r.degree_in(v) >= dg {
        let dr = r.degree_in(v);
        let lcr = univariate(&r, v).pop().unwrap();
        let mut shift = vec![0; r.gens().len()];
        shift[v] = dr - dg;
        r = r.mul(&lcg).sub(&lcr.mul(&g.mul_monomial(&shift, &int(1))));
    }
    r
}

/// Monic greatest common divisor over Q[params].
pub fn poly_gcd(a: &ParamPoly, b: &ParamPoly) -> ParamPoly {
    let (a, b) = common(a, b);
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let n = a.gens().len();
    let var = (0..n).find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0);
    let Some(v) = var else {
        return ParamPoly::one(a.gens().clone());
    };
    let ca = content_in(&a, v);
    let cb = content_in(&b, v);
    let cont = poly_gcd(&ca, &cb);
    let mut f = a.div_exact(&ca).expect("content divides");
    let mut g = b.div_exact(&cb).expect("content divides");
    if f.degree_in(v) < g.degree_in(v) {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_zero() {
        let r = pseudo_rem(&f, &g, v);
        f = g;
        g = if r.is_zero() {
            r
        } else {
            let c = content_in(&r, v);
            r.div_exact(&c).expect("content divides")
        };
    }
    let c = content_in(&f, v);
    let prim = f.div_exact(&c).expect("content divides");
    canon(&prim.mul(&cont).monic())
}

/// Quotient of two parameter polynomials kept coprime with a monic denominator.
#[derive(Clone, Debug)]
pub struct RatExpr {
    num: ParamPoly,
    den: ParamPoly,
}

impl RatExpr {
    pub fn from_rational(r: Rational) -> Self {
        RatExpr {
            num: ParamPoly::constant(no_gens(), r),
            den: ParamPoly::one(no_gens()),
        }
    }

    pub fn int(n: i64) -> Self {
        RatExpr::from_rational(int(n))
    }

    pub fn param(name: &str) -> Self {
        let g: Arc<[String]> = vec![name.to_string()].into();
        RatExpr {
            num: ParamPoly::var(g, name).unwrap(),
            den: ParamPoly::one(no_gens()),
        }
    }

    pub fn from_poly(p: ParamPoly) -> Self {
        RatExpr {
            num: canon(&p),
            den: ParamPoly::one(no_gens()),
        }
    }

    pub fn new(num: ParamPoly, den: ParamPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero {
                denominator: "0".into(),
            });
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: ParamPoly, den: ParamPoly) -> Self {
        if num.is_zero() {
            return RatExpr::zero();
        }
        if den.is_constant() {
            let c = den.constant_term();
            return RatExpr {
                num: canon(&num.scale(&c.recip())),
                den: ParamPoly::one(no_gens()),
            };
        }
        let g = poly_gcd(&num, &den);
        let (n, d) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        let lc = d.leading().map(|(_, c)| c.clone()).unwrap();
        let inv = lc.recip();
        let d = canon(&d.scale(&inv));
        let n = canon(&n.scale(&inv));
        if d.is_constant() {
            RatExpr {
                num: n,
                den: ParamPoly::one(no_gens()),
            }
        } else {
            RatExpr { num: n, den: d }
        }
    }

    pub fn numerator(&self) -> &ParamPoly {
        &self.num
    }

    pub fn denominator(&self) -> &ParamPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The rational value when no parameter occurs.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(self.num.constant_term())
        } else {
            None
        }
    }

    pub fn params(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .num
            .gens()
            .iter()
            .chain(self.den.gens().iter())
            .cloned()
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn eval(&self, assignment: &BTreeMap<String, Rational>) -> Result<Rational> {
        let vals = |p: &ParamPoly| -> Result<Vec<Rational>> {
            p.gens()
                .iter()
                .map(|g| {
                    assignment
                        .get(g)
                        .cloned()
                        .ok_or_else(|| Error::UnknownSymbol(g.clone()))
                })
                .collect()
        };
        let n = self.num.eval(&vals(&self.num)?);
        let d = self.den.eval(&vals(&self.den)?);
        if Zero::is_zero(&d) {
            return Err(Error::DivisionByZero {
                denominator: self.den.to_string(),
            });
        }
        Ok(n / d)
    }

    /// Substitutes some parameters by rational functions; others stay symbolic.
    pub fn subst(&self, assignment: &BTreeMap<String, RatExpr>) -> Result<RatExpr> {
        let go = |p: &ParamPoly| -> RatExpr {
            let mut acc = RatExpr::zero();
            for (m, c) in p.terms() {
                let mut t = RatExpr::from_rational(c.clone());
                for (i, &e) in m.iter().enumerate() {
                    let name = &p.gens()[i];
                    let base = assignment
                        .get(name)
                        .cloned()
                        .unwrap_or_else(|| RatExpr::param(name));
                    for _ in 0..e {
                        t = t.times(&base);
                    }
                }
                acc = acc.plus(&t);
            }
            acc
        };
        let n = go(&self.num);
        let d = go(&self.den);
        if d.is_zero() {
            return Err(Error::DivisionByZero {
                denominator: self.den.to_string(),
            });
        }
        Ok(n.divided(&d).unwrap())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(RatExpr::one(), |acc, _| acc.times(self))
    }

    /// Derivative with respect to a parameter.
    pub fn derive_param(&self, name: &str) -> Self {
        let d = |p: &ParamPoly| {
            p.derive(name, 1)
                .unwrap_or_else(|_| ParamPoly::zero(p.gens().clone()))
        };
        let num = d(&self.num)
            .mul(&self.den)
            .sub(&self.num.mul(&d(&self.den)));
        RatExpr::reduce(num, self.den.mul(&self.den))
    }

    /// Definite integral in a parameter absent from the denominator.
    pub fn integrate_param(&self, name: &str, lo: &Rational, hi: &Rational) -> Result<Self> {
        if self.den.gens().iter().any(|g| g == name)
            && self.den.degree_in(self.den.index_of(name)?) > 0
        {
            return Err(Error::NotImplemented(format!(
                "integration in {name} with {name} in the denominator"
            )));
        }
        let Ok(i) = self.num.index_of(name) else {
            return Ok(self.times(&RatExpr::from_rational(hi - lo)));
        };
        let mut out = ParamPoly::zero(self.num.gens().clone());
        for (m, c) in self.num.terms() {
            let k = m[i] as i64 + 1;
            let mut e = m.clone();
            e[i] = 0;
            let pow = |x: &Rational| (0..k).fold(int(1), |a, _| a * x);
            out.add_term(e, c * (pow(hi) - pow(lo)) / int(k));
        }
        Ok(RatExpr::reduce(out, self.den.clone()))
    }

    fn needs_parens(&self) -> bool {
        !self.den.is_constant()
            || self.num.len() > 1
            || (self.num.len() == 1
                && !self.num.is_constant()
                && !One::is_one(&self.num.leading().unwrap().1.abs()))
    }
}

fn wrap(p: &ParamPoly) -> String {
    if p.len() > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return write!(f, "{}", self.num);
        }
        // Clear coefficient denominators so that 1/(12*l(Z)) prints as such.
        let k = self
            .num
            .terms()
            .values()
            .chain(self.den.terms().values())
            .fold(num_bigint::BigInt::one(), |acc, c| {
                num_integer::Integer::lcm(&acc, c.denom())
            });
        let k = Rational::from_integer(k);
        let n = self.num.scale(&k);
        let d = self.den.scale(&k);
        let dt = d.to_string();
        if dt.contains(['*', ' ']) {
            write!(f, "{}/({})", wrap(&n), dt)
        } else {
            write!(f, "{}/{}", wrap(&n), dt)
        }
    }
}

impl PartialEq for RatExpr {
    fn eq(&self, other: &Self) -> bool {
        if self.den.is_constant() && other.den.is_constant() {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Coeff for RatExpr {
    fn zero() -> Self {
        RatExpr {
            num: ParamPoly::zero(no_gens()),
            den: ParamPoly::one(no_gens()),
        }
    }
    fn one() -> Self {
        RatExpr::int(1)
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        match (self.den.is_constant(), o.den.is_constant()) {
            (true, true) => RatExpr {
                num: canon(&self.num.add(&o.num)),
                den: ParamPoly::one(no_gens()),
            },
            (true, false) => RatExpr {
                num: canon(&self.num.mul(&o.den).add(&o.num)),
                den: o.den.clone(),
            },
            (false, true) => RatExpr {
                num: canon(&o.num.mul(&self.den).add(&self.num)),
                den: self.den.clone(),
            },
            (false, false) => {
                if self.den == o.den {
                    RatExpr::reduce(self.num.add(&o.num), self.den.clone())
                } else {
                    RatExpr::reduce(
                        self.num.mul(&o.den).add(&o.num.mul(&self.den)),
                        self.den.mul(&o.den),
                    )
                }
            }
        }
    }
    fn times(&self, o: &Self) -> Self {
        if self.num.is_zero() || o.num.is_zero() {
            return RatExpr::zero();
        }
        match (self.den.is_constant(), o.den.is_constant()) {
            (true, true) => RatExpr {
                num: canon(&self.num.mul(&o.num)),
                den: ParamPoly::one(no_gens()),
            },
            _ => {
                let g1 = poly_gcd(&self.num, &o.den);
                let g2 = poly_gcd(&o.num, &self.den);
                let n = self
                    .num
                    .div_exact(&g1)
                    .unwrap()
                    .mul(&o.num.div_exact(&g2).unwrap());
                let d = self
                    .den
                    .div_exact(&g2)
                    .unwrap()
                    .mul(&o.den.div_exact(&g1).unwrap());
                RatExpr::reduce(n, d)
            }
        }
    }
    fn negated(&self) -> Self {
        RatExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
    fn from_rational(r: Rational) -> Self {
        RatExpr::from_rational(r)
    }
    fn render_parts(&self) -> (bool, String, bool) {
        let neg = self
            .num
            .leading()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false);
        let mag = if neg { self.negated() } else { self.clone() };
        (neg, mag.to_string(), mag.needs_parens())
    }
}

impl Field for RatExpr {
    fn inverse(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatExpr::reduce(self.den.clone(), self.num.clone()))
        }
    }
}

impl From<Rational> for RatExpr {
    fn from(r: Rational) -> Self {
        RatExpr::from_rational(r)
    }
}

impl Serialize for RatExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RatExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        crate::expr::parse_ratexpr(&s).map_err(serde::de::Error::custom)
    }
}

/// Parameter polynomials declared non-vanishing.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Locus {
    nonzero: Vec<ParamPoly>,
}

impl Locus {
    pub fn new() -> Self {
        Locus::default()
    }

    pub fn declare(mut self, p: ParamPoly) -> Self {
        let p = canon(&p.monic());
        if !p.is_constant() && !self.nonzero.contains(&p) {
            self.nonzero.push(p);
        }
        self
    }

    pub fn declare_param(self, name: &str) -> Self {
        let p = RatExpr::param(name).num;
        self.declare(p)
    }

    pub fn union(&self, other: &Locus) -> Locus {
        other
            .nonzero
            .iter()
            .fold(self.clone(), |acc, p| acc.declare(p.clone()))
    }

    pub fn factors(&self) -> &[ParamPoly] {
        &self.nonzero
    }

    /// A value is safe as a pivot when it is a nonzero constant times a product
    /// of declared factors (the same test is applied to its denominator).
    pub fn is_safe(&self, r: &RatExpr) -> bool {
        if r.is_zero() {
            return false;
        }
        self.strips(&r.num) && self.strips(&r.den)
    }

    fn strips(&self, p: &ParamPoly) -> bool {
        let mut rest = p.clone();
        loop {
            if rest.is_constant() {
                return true;
            }
            let mut progressed = false;
            for f in &self.nonzero {
                if let Some(q) = rest.div_exact(f) {
                    rest = q;
                    progressed = true;
                }
            }
            if !progressed {
                return false;
            }
        }
    }
}
