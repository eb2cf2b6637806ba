//! Star products on `S(q)`: the Moyal product of a constant bivector, with
//! ε-grading, optional extra bidifferential terms, affine symbols and the
//! induced Poisson bracket.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::coset::CosetSpace;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::poly::{Coeff, Monomial, Poly, Rational};
use crate::ratexpr::RatExpr;

pub type QPoly = Poly<RatExpr>;

/// A bidifferential operator supplied from outside, e.g. a weighted graph.
pub type Bidifferential = Arc<dyn Fn(&QPoly, &QPoly) -> Result<QPoly> + Send + Sync>;

#[derive(Clone)]
pub struct StarConfig {
    q_gens: Arc<[String]>,
    bivector: Mat,
    symmetric_pair: bool,
    extra: Vec<(u32, Bidifferential)>,
}

impl fmt::Debug for StarConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StarConfig")
            .field("q_gens", &self.q_gens)
            .field(
                "bivector",
                &self
                    .bivector
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            )
            .field("symmetric_pair", &self.symmetric_pair)
            .field("extra_terms", &self.extra.len())
            .finish()
    }
}

impl StarConfig {
    /// A constant skew bivector on the given generators.
    pub fn new(q_gens: Arc<[String]>, bivector: Mat) -> Result<Self> {
        let n = q_gens.len();
        if bivector.len() != n || bivector.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("bivector must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if !bivector[i][j].plus(&bivector[j][i]).is_zero() {
                    return Err(Error::Consistency(format!(
                        "bivector is not skew at ({i},{j})"
                    )));
                }
            }
        }
        Ok(StarConfig {
            q_gens,
            bivector,
            symmetric_pair: false,
            extra: Vec::new(),
        })
    }

    /// `M[i][j] = −½·λ(h-part of [Q_i, Q_j])`.
    pub fn from_coset(space: &CosetSpace) -> Result<Self> {
        let g = space.adapted_algebra();
        let nq = space.q_gens().len();
        let lambda = space.lambda_values();
        let half = RatExpr::from_rational(Rational::new(1.into(), 2.into()));
        let mut m = vec![vec![RatExpr::zero(); nq]; nq];
        let mut symmetric = true;
        for i in 0..nq {
            for j in 0..nq {
                let c = g.structure_constant(i, j);
                if c[..nq].iter().any(|x| !x.is_zero()) {
                    symmetric = false;
                }
                let pairing = c[nq..]
                    .iter()
                    .zip(lambda)
                    .fold(RatExpr::zero(), |acc, (x, y)| acc.plus(&x.times(y)));
                m[i][j] = pairing.times(&half).negated();
            }
        }
        let mut cfg = StarConfig::new(space.q_gens().clone(), m)?;
        cfg.symmetric_pair = symmetric;
        Ok(cfg)
    }

    /// Adds `ε^order · op(F, G)` to the product.
    pub fn with_term(mut self, order: u32, op: Bidifferential) -> Self {
        self.extra.push((order, op));
        self
    }

    pub fn q_gens(&self) -> &Arc<[String]> {
        &self.q_gens
    }

    pub fn bivector(&self) -> &Mat {
        &self.bivector
    }

    /// Whether every `[Q_i, Q_j]` lies in `h`, so that Moyal is the exact product.
    pub fn is_symmetric_pair(&self) -> bool {
        self.symmetric_pair
    }

    fn align(&self, p: &QPoly) -> Result<QPoly> {
        if p.gens()[..] == self.q_gens[..] {
            return Ok(p.clone());
        }
        let t = p.trimmed();
        if let Some(g) = t.gens().iter().find(|g| !self.q_gens.contains(g)) {
            return Err(Error::UnknownSymbol(g.clone()));
        }
        Ok(t.embed(&self.q_gens))
    }

    /// Coefficients of `∂^α F ∂^β G` at contraction order `k`.
    fn contractions(&self, k: u32) -> Vec<BTreeMap<(Monomial, Monomial), RatExpr>> {
        let n = self.q_gens.len();
        let mut levels = vec![BTreeMap::from([((vec![0; n], vec![0; n]), RatExpr::one())])];
        for order in 1..=k {
            let inv = RatExpr::from_rational(Rational::new(1.into(), order.into()));
            let mut next: BTreeMap<(Monomial, Monomial), RatExpr> = BTreeMap::new();
            for ((a, b), c) in &levels[order as usize - 1] {
                for i in 0..n {
                    for j in 0..n {
                        let m = &self.bivector[i][j];
                        if m.is_zero() {
                            continue;
                        }
                        let (mut a2, mut b2) = (a.clone(), b.clone());
                        a2[i] += 1;
                        b2[j] += 1;
                        let e = next.entry((a2, b2)).or_insert_with(RatExpr::zero);
                        *e = e.plus(&c.times(m).times(&inv));
                    }
                }
            }
            next.retain(|_, c| !c.is_zero());
            levels.push(next);
        }
        levels
    }
}

/// A polynomial in ε with polynomial coefficients: `Σ ε^k P_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsPoly {
    coeffs: Vec<QPoly>,
}

impl EpsPoly {
    pub fn constant(p: QPoly) -> Self {
        EpsPoly { coeffs: vec![p] }.trimmed()
    }

    pub fn from_coeffs(coeffs: Vec<QPoly>) -> Self {
        EpsPoly { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|p| p.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn coeff(&self, k: usize) -> Option<&QPoly> {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &[QPoly] {
        &self.coeffs
    }

    pub fn eps_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|p| p.is_zero())
    }

    fn zip_with(&self, o: &Self, f: impl Fn(&QPoly, &QPoly) -> QPoly) -> Self {
        let gens = self.coeffs[0].gens().clone();
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = Poly::zero(gens);
        let coeffs = (0..n)
            .map(|k| {
                f(
                    self.coeffs.get(k).unwrap_or(&zero),
                    o.coeffs.get(k).unwrap_or(&zero),
                )
            })
            .collect();
        EpsPoly { coeffs }.trimmed()
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip_with(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip_with(o, |a, b| a.sub(b))
    }

    /// Multiplication by `ε^k`.
    pub fn shift(&self, k: usize) -> Self {
        let zero = Poly::zero(self.coeffs[0].gens().clone());
        let mut coeffs = vec![zero; k];
        coeffs.extend(self.coeffs.iter().cloned());
        EpsPoly { coeffs }.trimmed()
    }

    /// Specialization at `ε = 1`.
    pub fn at_one(&self) -> QPoly {
        self.coeffs
            .iter()
            .skip(1)
            .fold(self.coeffs[0].clone(), |acc, p| acc.add(p))
    }
}

/// `F ∗ G` with ε-grading equal to the contraction order.
pub fn moyal_eps(f: &QPoly, g: &QPoly, cfg: &StarConfig) -> Result<EpsPoly> {
    let (f, g) = (cfg.align(f)?, cfg.align(g)?);
    let k = f.degree().unwrap_or(0).min(g.degree().unwrap_or(0));
    let levels = cfg.contractions(k);
    let mut coeffs = Vec::with_capacity(levels.len());
    for level in &levels {
        let mut acc = Poly::zero(cfg.q_gens.clone());
        for ((a, b), c) in level {
            let da = f.derive_multi(a);
            if da.is_zero() {
                continue;
            }
            let db = g.derive_multi(b);
            if db.is_zero() {
                continue;
            }
            acc = acc.add(&da.mul(&db).scale(c));
        }
        coeffs.push(acc);
    }
    let mut out = EpsPoly { coeffs }.trimmed();
    for (order, op) in &cfg.extra {
        out = out.add(&EpsPoly::constant(op(&f, &g)?).shift(*order as usize));
    }
    Ok(out)
}

/// `F ∗ G` specialized at `ε = 1`.
pub fn moyal(f: &QPoly, g: &QPoly, cfg: &StarConfig) -> Result<QPoly> {
    Ok(moyal_eps(f, g, cfg)?.at_one())
}

/// Product of ε-polynomials, bilinear in the ε-grading.
pub fn star_eps(p: &EpsPoly, q: &EpsPoly, cfg: &StarConfig) -> Result<EpsPoly> {
    let mut out = EpsPoly::constant(Poly::zero(cfg.q_gens.clone()));
    for (a, pa) in p.coeffs.iter().enumerate() {
        for (b, qb) in q.coeffs.iter().enumerate() {
            if pa.is_zero() || qb.is_zero() {
                continue;
            }
            out = out.add(&moyal_eps(pa, qb, cfg)?.shift(a + b));
        }
    }
    Ok(out)
}

/// `σ_aff`: the ε⁰ coefficient.
pub fn affine_symbol(p: &EpsPoly) -> QPoly {
    p.coeffs[0].clone()
}

/// `σ_aff((P∗Q − Q∗P)/ε)`.
pub fn symbol_poisson(p: &EpsPoly, q: &EpsPoly, cfg: &StarConfig) -> Result<QPoly> {
    let c = star_eps(p, q, cfg)?.sub(&star_eps(q, p, cfg)?);
    if !c.coeffs[0].is_zero() {
        return Err(Error::Consistency(
            "commutator has a nonzero ε⁰ part".into(),
        ));
    }
    Ok(c.coeffs
        .get(1)
        .cloned()
        .unwrap_or_else(|| Poly::zero(cfg.q_gens.clone())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutativityReport {
    pub commutative: bool,
    /// Indices of the first non-commuting pair.
    pub witness: Option<(usize, usize)>,
    /// Whether the pair already fails before specializing ε.
    pub fails_graded: bool,
}

pub fn check_commutativity(basis: &[QPoly], cfg: &StarConfig) -> Result<CommutativityReport> {
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let fg = moyal_eps(&basis[i], &basis[j], cfg)?;
            let gf = moyal_eps(&basis[j], &basis[i], cfg)?;
            let graded = fg != gf;
            if graded || fg.at_one() != gf.at_one() {
                return Ok(CommutativityReport {
                    commutative: false,
                    witness: Some((i, j)),
                    fails_graded: graded,
                });
            }
        }
    }
    Ok(CommutativityReport {
        commutative: true,
        witness: None,
        fails_graded: false,
    })
}

/// First-order reduction operator: for each `H`, the vector field
/// `F ↦ Σ_i ([H, Q_i]|_{λ+h⊥}) ∂_i F`, with `h`-coordinates frozen at their
/// values in the coset space.
pub fn reduction_diff_order1(f: &QPoly, space: &CosetSpace) -> Result<Vec<QPoly>> {
    let g = space.adapted_algebra();
    let gens = space.q_gens().clone();
    let nq = gens.len();
    let f = if f.gens()[..] == gens[..] {
        f.clone()
    } else {
        f.trimmed().embed(&gens)
    };
    let mut out = Vec::new();
    for j in 0..space.h_count() {
        let mut acc = Poly::zero(gens.clone());
        for i in 0..nq {
            let d = f.derive_index(i, 1);
            if d.is_zero() {
                continue;
            }
            let c = g.structure_constant(nq + j, i);
            let mut lin = Poly::zero(gens.clone());
            for (k, x) in c[..nq].iter().enumerate() {
                let mut e = vec![0; nq];
                e[k] = 1;
                lin.add_term(e, x.clone());
            }
            let scalar = c[nq..]
                .iter()
                .zip(space.h_values())
                .fold(RatExpr::zero(), |acc, (x, y)| acc.plus(&x.times(y)));
            lin.add_term(vec![0; nq], scalar);
            acc = acc.add(&lin.mul(&d));
        }
        out.push(acc);
    }
    Ok(out)
}
