//! The left module `U(g) / U(g)·h_λ` realized on polynomials in a
//! supplementary `q`, with the quotient symmetrization and its inverse, the
//! adjoint operators `d_H` and their common kernel.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::enveloping::{Enveloping, Pbw, UEAElement};
use crate::error::{Error, Result};
use crate::lie::{Functional, LieAlgebra};
use crate::linalg::{self, Mat};
use crate::poly::{factorial, gens_of, monomials_upto, Coeff, Monomial, Poly, Rational};
use crate::ratexpr::{Locus, RatExpr};

/// Which scalar an `h` generator becomes at the right end of a PBW word.
///
/// `Plus` quotients by the left ideal generated by `H − λ(H)`, which is the
/// choice compatible with evaluating at points of `λ + h⊥`. `Minus` uses
/// `H + λ(H)` and is kept for comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdealSign {
    #[default]
    Plus,
    Minus,
}

/// A named vector of the ambient algebra.
pub type Named = (String, Vec<RatExpr>);

pub struct CosetSpace {
    base: LieAlgebra,
    env: Arc<Enveloping>,
    nq: usize,
    q_gens: Arc<[String]>,
    q_vectors: Vec<Vec<RatExpr>>,
    h_values: Vec<RatExpr>,
    lambda_values: Vec<RatExpr>,
    to_adapted: Mat,
    sign: IdealSign,
    locus: Locus,
    left: Mutex<HashMap<(usize, Monomial), Poly<RatExpr>>>,
    words: Mutex<HashMap<Monomial, Poly<RatExpr>>>,
}

/// Invariants of bounded degree, in echelon form with respect to a
/// degree-descending monomial order.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    pub max_degree: u32,
    pub elements: Vec<Poly<RatExpr>>,
}

impl InvariantBasis {
    /// Elements grouped by their top degree.
    pub fn by_degree(&self) -> Vec<Vec<Poly<RatExpr>>> {
        let mut out = vec![Vec::new(); self.max_degree as usize + 1];
        for p in &self.elements {
            out[p.degree().unwrap_or(0) as usize].push(p.clone());
        }
        out
    }

    pub fn rendered(&self) -> Vec<String> {
        self.elements
            .iter()
            .map(|p| primitive(p).to_string())
            .collect()
    }
}

/// Clears denominators and common integer content when all coefficients are
/// rational, and makes the leading coefficient positive.
pub fn primitive(p: &Poly<RatExpr>) -> Poly<RatExpr> {
    use num_integer::Integer;
    use num_traits::Signed;
    let rats: Option<Vec<Rational>> = p.terms().values().map(|c| c.as_rational()).collect();
    let Some(rats) = rats else { return p.clone() };
    if rats.is_empty() {
        return p.clone();
    }
    let den = rats
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, r| acc.lcm(r.denom()));
    let num = rats.iter().fold(num_bigint::BigInt::from(0), |acc, r| {
        acc.gcd(&(r.numer() * &den / r.denom()))
    });
    let mut s = Rational::new(den, num);
    let lead = p
        .terms()
        .iter()
        .max_by(|a, b| degree_desc_cmp(b.0, a.0))
        .map(|(_, c)| c.as_rational().unwrap())
        .unwrap();
    if lead.is_negative() {
        s = -s;
    }
    p.scale(&RatExpr::from_rational(s))
}

fn degree_desc_cmp(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let (da, db) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
    db.cmp(&da).then_with(|| b.cmp(a))
}

impl CosetSpace {
    /// `q` and `h` list named basis vectors of the two summands of `g`.
    pub fn new(
        g: &LieAlgebra,
        q: &[Named],
        h: &[Named],
        lambda: &Functional,
        sign: IdealSign,
        locus: &Locus,
    ) -> Result<Self> {
        let locus = g.locus().union(locus).union(lambda.locus());
        let hs = g
            .subspace(&h.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>())?
            .with_locus(&locus);
        if hs.dim() != h.len() {
            return Err(Error::Consistency("h vectors are dependent".into()));
        }
        if !g.is_subalgebra(&hs)? {
            return Err(Error::Consistency("h is not a subalgebra".into()));
        }
        if !g.is_character(&hs, lambda) {
            return Err(Error::Consistency("λ does not vanish on [h,h]".into()));
        }
        let names: Vec<String> = q.iter().chain(h).map(|(n, _)| n.clone()).collect();
        let mut seen = names.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != names.len() {
            return Err(Error::Consistency("duplicate generator names".into()));
        }
        let vectors: Vec<Vec<RatExpr>> = q.iter().chain(h).map(|(_, v)| v.clone()).collect();
        let (adapted, to_adapted) = g.change_basis(&names, &vectors, &locus)?;
        let lambda_values: Vec<RatExpr> = h.iter().map(|(_, v)| lambda.apply(v)).collect();
        let h_values = lambda_values
            .iter()
            .map(|x| match sign {
                IdealSign::Plus => x.clone(),
                IdealSign::Minus => x.negated(),
            })
            .collect();
        Ok(CosetSpace {
            base: g.clone(),
            env: Enveloping::new(adapted),
            nq: q.len(),
            q_gens: gens_of(&names[..q.len()]),
            q_vectors: q.iter().map(|(_, v)| v.clone()).collect(),
            h_values,
            lambda_values,
            to_adapted,
            sign,
            locus,
            left: Mutex::default(),
            words: Mutex::default(),
        })
    }

    pub fn env(&self) -> &Arc<Enveloping> {
        &self.env
    }

    pub fn q_gens(&self) -> &Arc<[String]> {
        &self.q_gens
    }

    pub fn q_vectors(&self) -> &[Vec<RatExpr>] {
        &self.q_vectors
    }

    pub fn h_count(&self) -> usize {
        self.h_values.len()
    }

    /// `λ(H_j)` for the `h` generators.
    pub fn lambda_values(&self) -> &[RatExpr] {
        &self.lambda_values
    }

    /// The scalars substituted for the `h` generators, `±λ(H_j)`.
    pub fn h_values(&self) -> &[RatExpr] {
        &self.h_values
    }

    pub fn sign(&self) -> IdealSign {
        self.sign
    }

    pub fn locus(&self) -> &Locus {
        &self.locus
    }

    pub fn base_algebra(&self) -> &LieAlgebra {
        &self.base
    }

    pub fn adapted_algebra(&self) -> &LieAlgebra {
        self.env.algebra()
    }

    fn zero(&self) -> Poly<RatExpr> {
        Poly::zero(self.q_gens.clone())
    }

    fn embed(&self, p: &Poly<RatExpr>) -> Pbw {
        let n = self.env.gens().len();
        Poly::from_terms(
            self.env.gens().clone(),
            p.terms().iter().map(|(m, c)| {
                let mut e = m.clone();
                e.resize(n, 0);
                (e, c.clone())
            }),
        )
    }

    fn check_q(&self, p: &Poly<RatExpr>) -> Result<Poly<RatExpr>> {
        if p.gens()[..] == self.q_gens[..] {
            return Ok(p.clone());
        }
        let t = p.trimmed();
        if let Some(g) = t.gens().iter().find(|g| !self.q_gens.contains(g)) {
            return Err(Error::UnknownSymbol(g.clone()));
        }
        Ok(t.embed(&self.q_gens))
    }

    /// Rewrites an element of the original algebra's enveloping algebra in
    /// the adapted PBW basis (q first, then h).
    pub fn lift(&self, u: &UEAElement) -> Result<Pbw> {
        if u.env().gens()[..] == self.env.gens()[..] {
            return Ok(u.pbw().clone());
        }
        if u.env().gens()[..] != self.base.names()[..] {
            return Err(Error::Consistency(
                "element belongs to another algebra".into(),
            ));
        }
        let n = self.env.gens().len();
        let images: Vec<Pbw> = self
            .to_adapted
            .iter()
            .map(|row| {
                Poly::from_terms(
                    self.env.gens().clone(),
                    row.iter().enumerate().map(|(j, c)| (unit(n, j), c.clone())),
                )
            })
            .collect();
        Ok(u.env().transport(u.pbw(), &self.env, &images))
    }

    /// Moves every `h` letter to the right end and replaces it by its scalar.
    pub fn reduce_pbw(&self, u: &Pbw) -> Poly<RatExpr> {
        let mut out = self.zero();
        for (m, c) in u.terms() {
            let mut coef = c.clone();
            for (j, &e) in m[self.nq..].iter().enumerate() {
                if e > 0 {
                    coef = coef.times(&self.h_values[j].pow(e));
                }
            }
            out.add_term(m[..self.nq].to_vec(), coef);
        }
        out
    }

    /// Coordinates of an ambient vector in the adapted basis (q first, then h).
    pub fn adapted_coords(&self, v: &[RatExpr]) -> Vec<RatExpr> {
        let n = self.to_adapted.len();
        (0..n)
            .map(|j| {
                (0..n).fold(RatExpr::zero(), |acc, i| {
                    acc.plus(&v[i].times(&self.to_adapted[i][j]))
                })
            })
            .collect()
    }

    /// The degree-one representative of an ambient vector: its `q` part plus
    /// the scalar its `h` part reduces to.
    pub fn linear_symbol(&self, v: &[RatExpr]) -> Poly<RatExpr> {
        let c = self.adapted_coords(v);
        let mut out = Poly::constant(
            self.q_gens.clone(),
            c[self.nq..]
                .iter()
                .zip(&self.h_values)
                .fold(RatExpr::zero(), |acc, (a, b)| acc.plus(&a.times(b))),
        );
        for (i, x) in c[..self.nq].iter().enumerate() {
            out.add_term(unit(self.nq, i), x.clone());
        }
        out
    }

    pub fn reduce(&self, u: &UEAElement) -> Result<Poly<RatExpr>> {
        Ok(self.reduce_pbw(&self.lift(u)?))
    }

    /// Left action of the `k`-th adapted generator on a coset representative.
    pub fn act(&self, k: usize, p: &Poly<RatExpr>) -> Poly<RatExpr> {
        let mut out = self.zero();
        for (m, c) in p.terms() {
            out = out.add(&self.act_monomial(k, m).scale(c));
        }
        out
    }

    fn act_monomial(&self, k: usize, m: &[u32]) -> Poly<RatExpr> {
        let key = (k, m.to_vec());
        if let Some(p) = self.left.lock().unwrap().get(&key) {
            return p.clone();
        }
        let word = self.embed(&Poly::monomial(
            self.q_gens.clone(),
            m.to_vec(),
            RatExpr::one(),
        ));
        let out = self.reduce_pbw(&self.env.gen_mul(k, &word));
        self.left.lock().unwrap().insert(key, out.clone());
        out
    }

    fn word_sum(&self, a: &[u32]) -> Poly<RatExpr> {
        if a.iter().all(|&e| e == 0) {
            return Poly::one(self.q_gens.clone());
        }
        if let Some(p) = self.words.lock().unwrap().get(a) {
            return p.clone();
        }
        let mut out = self.zero();
        for i in 0..a.len() {
            if a[i] > 0 {
                let mut b = a.to_vec();
                b[i] -= 1;
                out = out.add(&self.act(i, &self.word_sum(&b)));
            }
        }
        self.words.lock().unwrap().insert(a.to_vec(), out.clone());
        out
    }

    /// `β_q`: symmetrize in `U(g)` and project to the quotient.
    pub fn beta_q(&self, p: &Poly<RatExpr>) -> Result<Poly<RatExpr>> {
        let p = self.check_q(p)?;
        let mut out = self.zero();
        for (m, c) in p.terms() {
            let total: u32 = m.iter().sum();
            let w = m.iter().fold(factorial(0), |acc, &e| acc * factorial(e)) / factorial(total);
            out = out.add(&self.word_sum(m).scale(&c.times(&RatExpr::from_rational(w))));
        }
        Ok(out)
    }

    /// The same map computed by symmetrizing in the full enveloping algebra.
    pub fn beta_q_direct(&self, p: &Poly<RatExpr>) -> Result<Poly<RatExpr>> {
        let p = self.check_q(p)?;
        Ok(self.reduce_pbw(&self.env.symmetrize(&self.embed(&p))?))
    }

    pub fn beta_q_inverse(&self, p: &Poly<RatExpr>) -> Result<Poly<RatExpr>> {
        let mut rest = self.check_q(p)?;
        let mut out = self.zero();
        while let Some(d) = rest.degree() {
            let top = rest.homogeneous_part(d);
            rest = rest.sub(&self.beta_q(&top)?);
            out = out.add(&top);
        }
        Ok(out)
    }

    /// `d_H = β_q⁻¹ ∘ (H· − value(H)) ∘ β_q` for the `j`-th `h` generator.
    pub fn d_h(&self, j: usize, p: &Poly<RatExpr>) -> Result<Poly<RatExpr>> {
        let b = self.beta_q(p)?;
        let moved = self.act(self.nq + j, &b).sub(&b.scale(&self.h_values[j]));
        self.beta_q_inverse(&moved)
    }

    /// The first nonzero `d_H(p)`, if any.
    pub fn invariance_defect(&self, p: &Poly<RatExpr>) -> Result<Option<(String, Poly<RatExpr>)>> {
        for j in 0..self.h_count() {
            let d = self.d_h(j, p)?;
            if !d.is_zero() {
                return Ok(Some((self.env.gens()[self.nq + j].clone(), d)));
            }
        }
        Ok(None)
    }

    /// Common kernel of all `d_H` on polynomials of degree at most `max_degree`.
    pub fn invariants(&self, max_degree: u32) -> Result<InvariantBasis> {
        let monos = monomials_upto(self.nq, max_degree);
        let index: HashMap<&Monomial, usize> =
            monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: Mat = Vec::new();
        for j in 0..self.h_count() {
            let images: Vec<Poly<RatExpr>> = monos
                .iter()
                .map(|m| {
                    self.d_h(
                        j,
                        &Poly::monomial(self.q_gens.clone(), m.clone(), RatExpr::one()),
                    )
                })
                .collect::<Result<_>>()?;
            let mut block = vec![vec![RatExpr::zero(); monos.len()]; monos.len()];
            for (col, img) in images.iter().enumerate() {
                for (m, c) in img.terms() {
                    let r = *index
                        .get(m)
                        .ok_or_else(|| Error::Consistency("d_H raised the degree".into()))?;
                    block[r][col] = c.clone();
                }
            }
            rows.extend(block.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())));
        }
        let kernel = linalg::kernel(&rows, monos.len(), &self.locus)?;
        let echelon = linalg::safe_echelon(&kernel, &self.locus)?;
        let elements = echelon
            .iter()
            .map(|v| {
                Poly::from_terms(
                    self.q_gens.clone(),
                    v.iter()
                        .enumerate()
                        .map(|(i, c)| (monos[i].clone(), c.clone())),
                )
            })
            .collect();
        Ok(InvariantBasis {
            max_degree,
            elements,
        })
    }

    /// Evaluates a coset representative at `l`, sending each `Q` to `l(Q)`.
    pub fn evaluate(&self, p: &Poly<RatExpr>, l: &Functional) -> Result<RatExpr> {
        let p = self.check_q(p)?;
        let values: Vec<RatExpr> = self.q_vectors.iter().map(|v| l.apply(v)).collect();
        Ok(p.eval(&values))
    }
}

fn unit(n: usize, j: usize) -> Monomial {
    let mut e = vec![0; n];
    e[j] = 1;
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example;
    use crate::expr::parse_poly;

    fn named(name: &str, v: Vec<RatExpr>) -> Named {
        (name.to_string(), v)
    }

    pub(crate) fn space_q(sign: IdealSign) -> CosetSpace {
        let g = example::algebra();
        let q = ["Z", "U", "V"].map(|n| named(n, example::vector(n)));
        let h = ["X", "E"].map(|n| named(n, example::vector(n)));
        CosetSpace::new(&g, &q, &h, &example::character(), sign, &example::locus()).unwrap()
    }

    fn space_ql_signed(full: bool, sign: IdealSign) -> CosetSpace {
        let g = example::algebra();
        let k = if full {
            example::k_full()
        } else {
            example::k_short()
        };
        let q = [
            named("Z", example::vector("Z")),
            named("V", example::vector("V")),
            named("K", k),
        ];
        let h = ["X", "E"].map(|n| named(n, example::vector(n)));
        CosetSpace::new(&g, &q, &h, &example::character(), sign, &example::locus()).unwrap()
    }

    fn space_ql(full: bool) -> CosetSpace {
        let g = example::algebra();
        let k = if full {
            example::k_full()
        } else {
            example::k_short()
        };
        let q = [
            named("Z", example::vector("Z")),
            named("V", example::vector("V")),
            named("K", k),
        ];
        let h = ["X", "E"].map(|n| named(n, example::vector(n)));
        CosetSpace::new(
            &g,
            &q,
            &h,
            &example::character(),
            IdealSign::Plus,
            &example::locus(),
        )
        .unwrap()
    }

    fn base_elem(src: &str) -> UEAElement {
        let env = Enveloping::new(example::algebra());
        let p = parse_poly(src, env.gens()).unwrap();
        UEAElement::symmetrized(&env, &p).unwrap()
    }

    fn qpoly(s: &CosetSpace, src: &str) -> Poly<RatExpr> {
        parse_poly(src, s.q_gens()).unwrap()
    }

    #[test]
    fn a_and_w_share_a_coset() {
        for sign in [IdealSign::Plus, IdealSign::Minus] {
            let s = space_q(sign);
            let a = s.reduce(&base_elem("2*U*Z - V^2")).unwrap();
            assert_eq!(a, qpoly(&s, "2*U*Z - V^2"));
            assert_eq!(s.reduce(&base_elem("2*U*Z - V^2 - 2*E*X")).unwrap(), a);
        }
    }

    #[test]
    fn a_in_adapted_supplementary() {
        for full in [false, true] {
            let s = space_ql(full);
            let a = s.reduce(&base_elem("2*U*Z - V^2")).unwrap();
            let expected = if full {
                "-2*Z*K/l(Z) - V^2 + 2*Z*V*l(V)/l(Z)"
            } else {
                "-2*Z*K/l(Z) - V^2"
            };
            assert_eq!(a, qpoly(&s, expected));
        }
    }

    #[test]
    fn quotient_symmetrization_two_routes() {
        for s in [
            space_q(IdealSign::Plus),
            space_q(IdealSign::Minus),
            space_ql(false),
        ] {
            for m in monomials_upto(3, 4) {
                let p = Poly::monomial(s.q_gens().clone(), m, RatExpr::one());
                assert_eq!(s.beta_q(&p).unwrap(), s.beta_q_direct(&p).unwrap());
                assert_eq!(s.beta_q_inverse(&s.beta_q(&p).unwrap()).unwrap(), p);
            }
        }
    }

    #[test]
    fn a_cubed_in_the_naive_supplementary() {
        let s = space_q(IdealSign::Plus);
        let a3 = s.reduce(&base_elem("2*U*Z - V^2").pow(3)).unwrap();
        assert_eq!(
            s.beta_q_inverse(&a3).unwrap(),
            qpoly(&s, "(2*U*Z - V^2)^3 - 2*Z^2")
        );
    }

    #[test]
    fn adjoint_operators() {
        let s = space_q(IdealSign::Plus);
        let a = qpoly(&s, "2*Z*U - V^2");
        assert!(s.d_h(0, &a).unwrap().is_zero());
        assert!(s.d_h(1, &a).unwrap().is_zero());
        assert_eq!(s.d_h(0, &qpoly(&s, "U")).unwrap(), qpoly(&s, "V"));
        assert!(s.d_h(0, &qpoly(&s, "1")).unwrap().is_zero());
    }

    #[test]
    fn low_degree_invariants() {
        let s = space_q(IdealSign::Plus);
        let inv = s.invariants(2).unwrap();
        assert_eq!(inv.rendered(), vec!["Z^2", "2*Z*U - V^2", "Z", "1"]);
        assert_eq!(s.invariants(0).unwrap().rendered(), vec!["1"]);
    }

    #[test]
    fn adapted_invariants_have_the_same_ranks() {
        let naive = space_q(IdealSign::Plus).invariants(4).unwrap().by_degree();
        for full in [false, true] {
            let adapted = space_ql_signed(full, IdealSign::Plus)
                .invariants(4)
                .unwrap()
                .by_degree();
            let ranks = |b: &Vec<Vec<Poly<RatExpr>>>| b.iter().map(Vec::len).collect::<Vec<_>>();
            assert_eq!(ranks(&adapted), ranks(&naive));
        }
        let s = space_ql_signed(true, IdealSign::Plus);
        let expected = parse_poly("Z*K + l(Z)/2*V^2 - l(V)*Z*V", s.q_gens()).unwrap();
        assert!(s.invariants(2).unwrap().elements.contains(&expected));
    }

    #[test]
    fn adapted_route_is_multiplicative_only_with_plus() {
        let a = base_elem("2*U*Z - V^2");
        let a3 = a.pow(3);
        for full in [false, true] {
            let s = space_ql_signed(full, IdealSign::Plus);
            let l = example::point();
            let ga = s
                .evaluate(&s.beta_q_inverse(&s.reduce(&a).unwrap()).unwrap(), &l)
                .unwrap();
            let ga3 = s
                .evaluate(&s.beta_q_inverse(&s.reduce(&a3).unwrap()).unwrap(), &l)
                .unwrap();
            assert_eq!(ga3, ga.pow(3));
            let m = space_ql_signed(full, IdealSign::Minus);
            let ma3 = m
                .evaluate(&m.beta_q_inverse(&m.reduce(&a3).unwrap()).unwrap(), &l)
                .unwrap();
            assert_ne!(ma3, ga.pow(3));
        }
    }
}
