//! The universal enveloping algebra in PBW normal form.
//!
//! An element is a polynomial whose exponent vector `a` stands for the ordered
//! product `X_1^{a_1}···X_n^{a_n}` in the basis order of the algebra.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::poly::{factorial, gens_of, Coeff, Monomial, Poly};
use crate::ratexpr::RatExpr;

pub type Pbw = Poly<RatExpr>;

pub struct Enveloping {
    algebra: LieAlgebra,
    gens: Arc<[String]>,
    right_mul: Mutex<HashMap<(Monomial, usize), Pbw>>,
    words: Mutex<HashMap<Monomial, Pbw>>,
}

impl fmt::Debug for Enveloping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U({})", self.gens.join(","))
    }
}

impl Enveloping {
    pub fn new(algebra: LieAlgebra) -> Arc<Self> {
        let gens = gens_of(algebra.names());
        Arc::new(Enveloping {
            algebra,
            gens,
            right_mul: Mutex::default(),
            words: Mutex::default(),
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn gens(&self) -> &Arc<[String]> {
        &self.gens
    }

    fn dim(&self) -> usize {
        self.gens.len()
    }

    fn unit_exp(&self, i: usize) -> Monomial {
        let mut e = vec![0; self.dim()];
        e[i] = 1;
        e
    }

    pub fn one(&self) -> Pbw {
        Poly::one(self.gens.clone())
    }

    pub fn generator(&self, i: usize) -> Pbw {
        Poly::monomial(self.gens.clone(), self.unit_exp(i), RatExpr::one())
    }

    /// `X^a · X_k` in normal form.
    fn mul_monomial_gen(&self, a: &[u32], k: usize) -> Pbw {
        let last = a.iter().rposition(|&e| e > 0);
        match last {
            Some(j) if j > k => {}
            _ => {
                let mut e = a.to_vec();
                e[k] += 1;
                return Poly::monomial(self.gens.clone(), e, RatExpr::one());
            }
        }
        let j = last.unwrap();
        let key = (a.to_vec(), k);
        if let Some(p) = self.right_mul.lock().unwrap().get(&key) {
            return p.clone();
        }
        // X^a X_k = X^{a-e_j} X_j X_k = (X^{a-e_j} X_k) X_j + X^{a-e_j} [X_j, X_k]
        let mut rest = a.to_vec();
        rest[j] -= 1;
        let mut out = self.mul_gen(&self.mul_monomial_gen(&rest, k), j);
        for (c, coef) in self.algebra.structure_constant(j, k).iter().enumerate() {
            if !coef.is_zero() {
                out = out.add(&self.mul_monomial_gen(&rest, c).scale(coef));
            }
        }
        self.right_mul.lock().unwrap().insert(key, out.clone());
        out
    }

    /// `p · X_k`.
    pub fn mul_gen(&self, p: &Pbw, k: usize) -> Pbw {
        let mut out = Poly::zero(self.gens.clone());
        for (m, c) in p.terms() {
            out = out.add(&self.mul_monomial_gen(m, k).scale(c));
        }
        out
    }

    /// `X_k · p`, by normal ordering the word `X_k X^a`.
    pub fn gen_mul(&self, k: usize, p: &Pbw) -> Pbw {
        self.mul(&self.generator(k), p)
    }

    pub fn mul(&self, a: &Pbw, b: &Pbw) -> Pbw {
        let mut out = Poly::zero(self.gens.clone());
        for (m, c) in b.terms() {
            let mut cur = a.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    cur = self.mul_gen(&cur, i);
                }
            }
            out = out.add(&cur.scale(c));
        }
        out
    }

    pub fn pow(&self, a: &Pbw, k: u32) -> Pbw {
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Normal form of the word `X_{w_1}···X_{w_r}`.
    pub fn normalize_word(&self, word: &[usize]) -> Pbw {
        word.iter()
            .fold(self.one(), |acc, &k| self.mul_gen(&acc, k))
    }

    pub fn normalize_named(&self, word: &[&str]) -> Result<Pbw> {
        let idx: Result<Vec<usize>> = word.iter().map(|w| self.algebra.index(w)).collect();
        Ok(self.normalize_word(&idx?))
    }

    /// Sum of all distinct words with letter content `a`.
    fn word_sum(&self, a: &[u32]) -> Pbw {
        if a.iter().all(|&e| e == 0) {
            return self.one();
        }
        if let Some(p) = self.words.lock().unwrap().get(a) {
            return p.clone();
        }
        let mut out = Poly::zero(self.gens.clone());
        for i in 0..a.len() {
            if a[i] > 0 {
                let mut b = a.to_vec();
                b[i] -= 1;
                out = out.add(&self.mul_gen(&self.word_sum(&b), i));
            }
        }
        self.words.lock().unwrap().insert(a.to_vec(), out.clone());
        out
    }

    /// `β(X^a)`: the average of all orderings of the letters.
    pub fn symmetrize_monomial(&self, a: &[u32]) -> Pbw {
        let total: u32 = a.iter().sum();
        let mut w = a.iter().fold(factorial(0), |acc, &e| acc * factorial(e));
        w /= factorial(total);
        self.word_sum(a).scale(&RatExpr::from_rational(w))
    }

    /// `β` on a commutative polynomial in the basis symbols.
    pub fn symmetrize(&self, p: &Poly<RatExpr>) -> Result<Pbw> {
        let p = self.aligned(p)?;
        let mut out = Poly::zero(self.gens.clone());
        for (m, c) in p.terms() {
            out = out.add(&self.symmetrize_monomial(m).scale(c));
        }
        Ok(out)
    }

    /// `β⁻¹`, peeling off the top degree repeatedly.
    pub fn symmetrize_inverse(&self, u: &Pbw) -> Result<Poly<RatExpr>> {
        let mut rest = self.aligned(u)?;
        let mut out = Poly::zero(self.gens.clone());
        while let Some(d) = rest.degree() {
            let top = rest.homogeneous_part(d);
            rest = rest.sub(&self.symmetrize(&top)?);
            out = out.add(&top);
        }
        Ok(out)
    }

    fn aligned(&self, p: &Poly<RatExpr>) -> Result<Poly<RatExpr>> {
        if p.gens()[..] == self.gens[..] {
            return Ok(p.clone());
        }
        if let Some(g) = p.gens().iter().find(|g| !self.gens.contains(g)) {
            if p.terms().keys().any(|m| m[p.index_of(g).unwrap()] > 0) {
                return Err(Error::UnknownSymbol(g.clone()));
            }
        }
        Ok(p.trimmed().embed(&self.gens))
    }

    /// The algebra map `U(g) → U(g')` sending each generator to `images[i]`.
    pub fn transport(&self, u: &Pbw, target: &Enveloping, images: &[Pbw]) -> Pbw {
        let mut out = target.one().scale(&RatExpr::zero());
        for (m, c) in u.terms() {
            let mut cur = target.one();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    cur = target.mul(&cur, &images[i]);
                }
            }
            out = out.add(&cur.scale(c));
        }
        out
    }
}

/// An element of the enveloping algebra bundled with its context.
#[derive(Clone, Debug)]
pub struct UEAElement {
    env: Arc<Enveloping>,
    pbw: Pbw,
}

impl PartialEq for UEAElement {
    fn eq(&self, other: &Self) -> bool {
        self.pbw == other.pbw
    }
}

impl UEAElement {
    pub fn from_pbw(env: &Arc<Enveloping>, pbw: Pbw) -> Result<Self> {
        let pbw = env.aligned(&pbw)?;
        Ok(UEAElement {
            env: env.clone(),
            pbw,
        })
    }

    pub fn scalar(env: &Arc<Enveloping>, c: RatExpr) -> Self {
        UEAElement {
            env: env.clone(),
            pbw: Poly::constant(env.gens.clone(), c),
        }
    }

    pub fn generator(env: &Arc<Enveloping>, name: &str) -> Result<Self> {
        let i = env.algebra.index(name)?;
        Ok(UEAElement {
            env: env.clone(),
            pbw: env.generator(i),
        })
    }

    pub fn word(env: &Arc<Enveloping>, word: &[&str]) -> Result<Self> {
        Ok(UEAElement {
            env: env.clone(),
            pbw: env.normalize_named(word)?,
        })
    }

    pub fn symmetrized(env: &Arc<Enveloping>, p: &Poly<RatExpr>) -> Result<Self> {
        Ok(UEAElement {
            env: env.clone(),
            pbw: env.symmetrize(p)?,
        })
    }

    pub fn env(&self) -> &Arc<Enveloping> {
        &self.env
    }

    pub fn pbw(&self) -> &Pbw {
        &self.pbw
    }

    fn wrap(&self, pbw: Pbw) -> Self {
        UEAElement {
            env: self.env.clone(),
            pbw,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.wrap(self.pbw.add(&o.pbw))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.wrap(self.pbw.sub(&o.pbw))
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.pbw.neg())
    }

    pub fn scale(&self, c: &RatExpr) -> Self {
        self.wrap(self.pbw.scale(c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.wrap(self.env.mul(&self.pbw, &o.pbw))
    }

    pub fn pow(&self, k: u32) -> Self {
        self.wrap(self.env.pow(&self.pbw, k))
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.pbw.is_zero()
    }

    pub fn symmetrize_inverse(&self) -> Poly<RatExpr> {
        self.env
            .symmetrize_inverse(&self.pbw)
            .expect("same generators")
    }
}

impl fmt::Display for UEAElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.pbw.fmt(f)
    }
}
