//! Lie algebras given by structure constants, their subspaces and
//! functionals, and the orbit-geometry predicates built from Kostant forms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::poly::Coeff;
use crate::ratexpr::{Locus, RatExpr};

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    names: Vec<String>,
    /// `consts[i][j]` holds the coordinates of `[X_i, X_j]`.
    consts: Vec<Vec<Vec<RatExpr>>>,
    locus: Locus,
    nilpotent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub antisymmetry_witness: Option<(String, String, String)>,
    pub jacobi_witness: Option<(String, String, String)>,
    pub nilpotent: bool,
    pub lower_central_dims: Vec<usize>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.antisymmetry_witness.is_none() && self.jacobi_witness.is_none() && self.nilpotent
    }
}

fn zeros(n: usize) -> Vec<RatExpr> {
    vec![RatExpr::zero(); n]
}

fn add_vec(a: &[RatExpr], b: &[RatExpr]) -> Vec<RatExpr> {
    a.iter().zip(b).map(|(x, y)| x.plus(y)).collect()
}

fn scale_vec(a: &[RatExpr], c: &RatExpr) -> Vec<RatExpr> {
    a.iter().map(|x| x.times(c)).collect()
}

impl LieAlgebra {
    /// Raw structure constants, not checked; see [`LieAlgebra::verify_structure`].
    pub fn from_structure_constants(
        names: Vec<String>,
        consts: Vec<Vec<Vec<RatExpr>>>,
        locus: Locus,
    ) -> Result<Self> {
        let n = names.len();
        if consts.len() != n
            || consts
                .iter()
                .any(|r| r.len() != n || r.iter().any(|v| v.len() != n))
        {
            return Err(Error::Shape(format!(
                "structure constants must be {n}x{n}x{n}"
            )));
        }
        let mut g = LieAlgebra {
            names,
            consts,
            locus,
            nilpotent: false,
        };
        g.nilpotent = g
            .lower_central_series()
            .map(|d| d.last() == Some(&0))
            .unwrap_or(false);
        Ok(g)
    }

    /// Builds the algebra from the nonzero brackets `[X_i, X_j] = v`, filling
    /// in antisymmetry.
    pub fn from_brackets(names: &[&str], brackets: &[(&str, &str, Vec<RatExpr>)]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let n = names.len();
        let mut c = vec![vec![zeros(n); n]; n];
        let idx = |s: &str| {
            names
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| Error::UnknownSymbol(s.into()))
        };
        for (a, b, v) in brackets {
            let (i, j) = (idx(a)?, idx(b)?);
            if v.len() != n {
                return Err(Error::Shape(format!(
                    "bracket [{a},{b}] needs {n} coordinates"
                )));
            }
            c[i][j] = v.clone();
            c[j][i] = v.iter().map(|x| x.negated()).collect();
        }
        LieAlgebra::from_structure_constants(names, c, Locus::new())
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn locus(&self) -> &Locus {
        &self.locus
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotent
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| Error::UnknownSymbol(name.into()))
    }

    pub fn basis_vector(&self, i: usize) -> Vec<RatExpr> {
        let mut v = zeros(self.dim());
        v[i] = RatExpr::one();
        v
    }

    pub fn structure_constant(&self, i: usize, j: usize) -> &[RatExpr] {
        &self.consts[i][j]
    }

    pub fn bracket(&self, x: &[RatExpr], y: &[RatExpr]) -> Vec<RatExpr> {
        let n = self.dim();
        let mut out = zeros(n);
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let c = x[i].times(&y[j]);
                out = add_vec(&out, &scale_vec(&self.consts[i][j], &c));
            }
        }
        out
    }

    pub fn verify_structure(&self) -> StructureReport {
        let n = self.dim();
        let name = |i: usize| self.names[i].clone();
        let mut anti = None;
        'a: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !self.consts[i][j][k].plus(&self.consts[j][i][k]).is_zero() {
                        anti = Some((name(i), name(j), name(k)));
                        break 'a;
                    }
                }
            }
        }
        let mut jac = None;
        'j: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (x, y, z) = (
                        self.basis_vector(i),
                        self.basis_vector(j),
                        self.basis_vector(k),
                    );
                    let s = add_vec(
                        &add_vec(
                            &self.bracket(&x, &self.bracket(&y, &z)),
                            &self.bracket(&y, &self.bracket(&z, &x)),
                        ),
                        &self.bracket(&z, &self.bracket(&x, &y)),
                    );
                    if s.iter().any(|c| !c.is_zero()) {
                        jac = Some((name(i), name(j), name(k)));
                        break 'j;
                    }
                }
            }
        }
        let dims = self.lower_central_series().unwrap_or_default();
        StructureReport {
            antisymmetry_witness: anti,
            jacobi_witness: jac,
            nilpotent: dims.last() == Some(&0),
            lower_central_dims: dims,
        }
    }

    /// Dimensions of g, [g,g], [g,[g,g]], ... until zero or stationary.
    pub fn lower_central_series(&self) -> Result<Vec<usize>> {
        let mut cur = linalg::identity(self.dim());
        let mut dims = vec![cur.len()];
        while !cur.is_empty() {
            let mut next = Vec::new();
            for i in 0..self.dim() {
                for v in &cur {
                    next.push(self.bracket(&self.basis_vector(i), v));
                }
            }
            let next = linalg::rref(&next, &self.locus)?;
            if next.len() == cur.len() {
                break;
            }
            dims.push(next.len());
            cur = next;
        }
        Ok(dims)
    }

    pub fn subspace(&self, vectors: &[Vec<RatExpr>]) -> Result<Subspace> {
        Subspace::span(self.dim(), vectors, &self.locus)
    }

    /// Subspace spanned by named basis vectors.
    pub fn span_of(&self, names: &[&str]) -> Result<Subspace> {
        let vs: Result<Vec<_>> = names
            .iter()
            .map(|n| Ok(self.basis_vector(self.index(n)?)))
            .collect();
        self.subspace(&vs?)
    }

    pub fn whole(&self) -> Subspace {
        Subspace {
            ambient: self.dim(),
            basis: linalg::identity(self.dim()),
            locus: self.locus.clone(),
        }
    }

    pub fn center(&self) -> Result<Subspace> {
        let n = self.dim();
        // X central iff [X, e_j] = 0 for all j: stack the linear maps.
        let mut rows = Vec::new();
        for j in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|i| self.consts[i][j][k].clone()).collect());
            }
        }
        let k = linalg::kernel(&rows, n, &self.locus)?;
        self.subspace(&k)
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> Result<bool> {
        let s = s.clone().with_locus(&self.locus);
        for a in s.basis() {
            for b in s.basis() {
                if !s.contains(&self.bracket(a, b))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_ideal(&self, s: &Subspace) -> Result<bool> {
        let s = s.clone().with_locus(&self.locus);
        for i in 0..self.dim() {
            for b in s.basis() {
                if !s.contains(&self.bracket(&self.basis_vector(i), b))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn locus_with(&self, l: &Functional) -> Locus {
        self.locus.union(&l.locus)
    }

    pub fn kostant_form(&self, l: &Functional) -> Mat {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| l.apply(&self.consts[i][j])).collect())
            .collect()
    }

    pub fn stabilizer(&self, l: &Functional) -> Result<Subspace> {
        let loc = self.locus_with(l);
        let k = linalg::kernel(&self.kostant_form(l), self.dim(), &loc)?;
        Subspace::span(self.dim(), &k, &loc)
    }

    /// Rank of `a → g*`, `X ↦ l([X, ·])`.
    pub fn orbit_dim(&self, a: &Subspace, l: &Functional) -> Result<usize> {
        let b = self.kostant_form(l);
        let rows: Mat = a
            .basis()
            .iter()
            .map(|x| linalg::mat_vec(&linalg::transpose(&b), x))
            .collect();
        if rows.is_empty() {
            return Ok(0);
        }
        linalg::rank(&rows, &self.locus_with(l))
    }

    pub fn lagrangian_check(&self, h: &Subspace, l: &Functional) -> Result<bool> {
        Ok(2 * self.orbit_dim(h, l)? == self.orbit_dim(&self.whole(), l)?)
    }

    /// `λ([h,h]) = 0`.
    pub fn is_character(&self, h: &Subspace, lambda: &Functional) -> bool {
        h.basis().iter().all(|a| {
            h.basis()
                .iter()
                .all(|b| lambda.apply(&self.bracket(a, b)).is_zero())
        })
    }

    /// `{X ∈ s : l([X, s]) = 0}`.
    pub fn restricted_stabilizer(&self, s: &Subspace, l: &Functional) -> Result<Subspace> {
        let loc = self.locus_with(l);
        let basis = s.basis();
        let m: Mat = basis
            .iter()
            .map(|y| basis.iter().map(|x| l.apply(&self.bracket(x, y))).collect())
            .collect();
        let coeffs = linalg::kernel(&m, basis.len(), &loc)?;
        let vecs: Vec<Vec<RatExpr>> = coeffs
            .iter()
            .map(|c| {
                c.iter().zip(basis).fold(zeros(self.dim()), |acc, (ci, b)| {
                    add_vec(&acc, &scale_vec(b, ci))
                })
            })
            .collect();
        Subspace::span(self.dim(), &vecs, &loc)
    }

    pub fn check_flag(&self, flag: &[Subspace]) -> Result<()> {
        let mut prev = 0;
        for (i, s) in flag.iter().enumerate() {
            if s.dim() != prev + 1 {
                return Err(Error::Flag(format!(
                    "step {} has dimension {} after {}",
                    i + 1,
                    s.dim(),
                    prev
                )));
            }
            if i > 0 && !flag[i - 1].is_contained_in(s)? {
                return Err(Error::Flag(format!(
                    "step {i} is not contained in step {}",
                    i + 1
                )));
            }
            if !self.is_ideal(s)? {
                return Err(Error::Flag(format!("step {} is not an ideal", i + 1)));
            }
            prev = s.dim();
        }
        if prev != self.dim() {
            return Err(Error::Flag(format!(
                "flag ends in dimension {prev}, not {}",
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn vergne_polarization(&self, l: &Functional, flag: &[Subspace]) -> Result<Subspace> {
        self.check_flag(flag)?;
        let loc = self.locus_with(l);
        let mut vecs = Vec::new();
        for s in flag {
            vecs.extend(self.restricted_stabilizer(s, l)?.basis().iter().cloned());
        }
        Subspace::span(self.dim(), &vecs, &loc)
    }

    pub fn is_polarization(&self, b: &Subspace, l: &Functional) -> Result<bool> {
        if !self.is_subalgebra(b)? {
            return Ok(false);
        }
        for x in b.basis() {
            for y in b.basis() {
                if !l.apply(&self.bracket(x, y)).is_zero() {
                    return Ok(false);
                }
            }
        }
        let gl = self.stabilizer(l)?;
        if 2 * b.dim() != self.dim() + gl.dim() {
            return Ok(false);
        }
        gl.is_contained_in(b)
    }

    /// `g = h ⊕ q` and `b = (b∩h) ⊕ (b∩q)`.
    pub fn transversality_check(&self, b: &Subspace, h: &Subspace, q: &Subspace) -> Result<bool> {
        let b = b.clone().with_locus(&self.locus);
        if h.dim() + q.dim() != self.dim() || h.sum(q)?.dim() != self.dim() {
            return Ok(false);
        }
        Ok(b.intersection_dim(h)? + b.intersection_dim(q)? == b.dim())
    }

    /// A flag of ideals refining the upper central series.
    pub fn central_flag(&self) -> Result<Vec<Subspace>> {
        let mut flag: Vec<Subspace> = Vec::new();
        let mut current = Subspace::zero(self.dim()).with_locus(&self.locus);
        while current.dim() < self.dim() {
            // Next term of the upper central series: X with [g, X] ⊆ current.
            let next = self.upper_central_step(&current)?;
            if next.dim() == current.dim() {
                return Err(Error::Flag("algebra is not nilpotent".into()));
            }
            for v in next.basis() {
                if !current.contains(v)? {
                    let mut vs = current.basis().to_vec();
                    vs.push(v.clone());
                    current = self.subspace(&vs)?;
                    flag.push(current.clone());
                }
            }
        }
        Ok(flag)
    }

    fn upper_central_step(&self, z: &Subspace) -> Result<Subspace> {
        let n = self.dim();
        let comp = z.clone().with_locus(&self.locus).complement_projection()?;
        let mut rows = Vec::new();
        for j in 0..n {
            for p in &comp {
                rows.push((0..n).map(|i| linalg::dot(p, &self.consts[j][i])).collect());
            }
        }
        if rows.is_empty() {
            return Ok(self.whole());
        }
        let k = linalg::kernel(&rows, n, &self.locus)?;
        self.subspace(&k)
    }

    /// Re-expresses the algebra in a new basis given by coordinate vectors.
    /// Returns the new algebra and the matrix converting old coordinates to new.
    pub fn change_basis(
        &self,
        names: &[String],
        vectors: &[Vec<RatExpr>],
        locus: &Locus,
    ) -> Result<(LieAlgebra, Mat)> {
        let n = self.dim();
        if names.len() != n || vectors.len() != n {
            return Err(Error::Shape(format!("a basis needs {n} vectors")));
        }
        let loc = self.locus.union(locus);
        let inv = linalg::invert(&vectors.to_vec(), &loc)?;
        let to_new = |v: &[RatExpr]| -> Vec<RatExpr> {
            (0..n)
                .map(|j| (0..n).fold(RatExpr::zero(), |acc, i| acc.plus(&v[i].times(&inv[i][j]))))
                .collect()
        };
        let mut consts = vec![vec![zeros(n); n]; n];
        for i in 0..n {
            for j in 0..n {
                consts[i][j] = to_new(&self.bracket(&vectors[i], &vectors[j]));
            }
        }
        let g = LieAlgebra::from_structure_constants(names.to_vec(), consts, loc)?;
        Ok((g, inv))
    }
}

/// Linear subspace stored by its reduced row-echelon basis, together with
/// the non-vanishing assumptions its coordinates rely on.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Mat,
    locus: Locus,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis == other.basis
    }
}

impl Subspace {
    pub fn span(ambient: usize, vectors: &[Vec<RatExpr>], locus: &Locus) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != ambient) {
            return Err(Error::Shape(format!(
                "vectors must have {ambient} coordinates"
            )));
        }
        Ok(Subspace {
            ambient,
            basis: linalg::rref(&vectors.to_vec(), locus)?,
            locus: locus.clone(),
        })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            locus: Locus::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<RatExpr>] {
        &self.basis
    }

    pub fn locus(&self) -> &Locus {
        &self.locus
    }

    pub fn with_locus(mut self, locus: &Locus) -> Self {
        self.locus = self.locus.union(locus);
        self
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &v, &self.locus.union(&other.locus))
    }

    pub fn contains(&self, v: &[RatExpr]) -> Result<bool> {
        if v.iter().all(|x| x.is_zero()) {
            return Ok(true);
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Ok(linalg::rank(&rows, &self.locus)? == self.dim())
    }

    pub fn is_contained_in(&self, other: &Subspace) -> Result<bool> {
        let wide = other.clone().with_locus(&self.locus);
        for v in &self.basis {
            if !wide.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn intersection_dim(&self, other: &Subspace) -> Result<usize> {
        Ok(self.dim() + other.dim() - self.sum(other)?.dim())
    }

    /// Rows of linear forms whose common kernel is this subspace.
    fn complement_projection(&self) -> Result<Mat> {
        if self.basis.is_empty() {
            return Ok(linalg::identity(self.ambient));
        }
        linalg::kernel(&self.basis, self.ambient, &self.locus)
    }

    /// Renders basis vectors as linear combinations of `names`.
    pub fn render(&self, names: &[String]) -> Vec<String> {
        self.basis.iter().map(|v| render_vector(v, names)).collect()
    }
}

pub fn render_vector(v: &[RatExpr], names: &[String]) -> String {
    let gens: std::sync::Arc<[String]> = names.to_vec().into();
    let mut p = crate::poly::Poly::<RatExpr>::zero(gens.clone());
    for (i, c) in v.iter().enumerate() {
        let mut e = vec![0; names.len()];
        e[i] = 1;
        p.add_term(e, c.clone());
    }
    p.to_string()
}

/// Linear form on the algebra, by coordinates in the dual basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    coords: Vec<RatExpr>,
    locus: Locus,
}

impl Functional {
    pub fn new(coords: Vec<RatExpr>, locus: Locus) -> Self {
        Functional { coords, locus }
    }

    /// Dual basis element `X_i*`.
    pub fn dual(dim: usize, i: usize) -> Self {
        let mut c = zeros(dim);
        c[i] = RatExpr::one();
        Functional::new(c, Locus::new())
    }

    pub fn coords(&self) -> &[RatExpr] {
        &self.coords
    }

    pub fn locus(&self) -> &Locus {
        &self.locus
    }

    pub fn apply(&self, v: &[RatExpr]) -> RatExpr {
        linalg::dot(&self.coords, v)
    }

    pub fn scaled(&self, c: &RatExpr) -> Functional {
        Functional {
            coords: scale_vec(&self.coords, c),
            locus: self.locus.clone(),
        }
    }

    /// Coordinates with respect to a new basis of the algebra.
    pub fn in_basis(&self, vectors: &[Vec<RatExpr>]) -> Functional {
        Functional {
            coords: vectors.iter().map(|v| self.apply(v)).collect(),
            locus: self.locus.clone(),
        }
    }

    pub fn is_concrete(&self) -> bool {
        self.coords.iter().all(|c| c.as_rational().is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example;

    fn heisenberg() -> LieAlgebra {
        let z = vec![RatExpr::zero(), RatExpr::zero(), RatExpr::one()];
        LieAlgebra::from_brackets(&["p", "q", "z"], &[("p", "q", z)]).unwrap()
    }

    fn abelian(n: usize) -> LieAlgebra {
        let names: Vec<String> = (0..n).map(|i| format!("A{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        LieAlgebra::from_brackets(&refs, &[]).unwrap()
    }

    #[test]
    fn example_structure_passes() {
        let g = example::algebra();
        let r = g.verify_structure();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.lower_central_dims, vec![5, 3, 2, 0]);
        assert!(abelian(3).verify_structure().passed());
    }

    #[test]
    fn antisymmetry_witness() {
        let n = 4;
        let mut c = vec![vec![vec![RatExpr::zero(); n]; n]; n];
        c[1][2][3] = RatExpr::one();
        let names = (0..n).map(|i| format!("A{i}")).collect();
        let g = LieAlgebra::from_structure_constants(names, c, Locus::new()).unwrap();
        let r = g.verify_structure();
        assert_eq!(
            r.antisymmetry_witness,
            Some(("A1".into(), "A2".into(), "A3".into()))
        );
    }

    #[test]
    fn jacobi_failure_is_witnessed() {
        let e = |i: usize| {
            (0..4)
                .map(|k| {
                    if k == i {
                        RatExpr::one()
                    } else {
                        RatExpr::zero()
                    }
                })
                .collect::<Vec<_>>()
        };
        let g =
            LieAlgebra::from_brackets(&["a", "b", "c", "d"], &[("a", "b", e(2)), ("c", "d", e(0))])
                .unwrap();
        assert!(g.verify_structure().jacobi_witness.is_some());
    }

    #[test]
    fn example_orbit_geometry() {
        let g = example::algebra();
        let l = example::point();
        let gl = g.stabilizer(&l).unwrap();
        let expected = g
            .subspace(&[
                example::vector("E"),
                example::vector("Z"),
                example::k_full(),
            ])
            .unwrap();
        assert_eq!(gl, expected);
        assert_eq!(g.orbit_dim(&g.whole(), &l).unwrap(), 2);
        let h = example::h(&g).unwrap();
        assert_eq!(g.orbit_dim(&h, &l).unwrap(), 1);
        assert!(g.lagrangian_check(&h, &l).unwrap());
        assert_eq!(g.center().unwrap(), g.span_of(&["E", "Z"]).unwrap());
        assert!(g.is_character(&h, &example::character()));
    }

    #[test]
    fn kostant_form_is_skew() {
        let g = example::algebra();
        let b = g.kostant_form(&example::point());
        for i in 0..5 {
            for j in 0..5 {
                assert!(b[i][j].plus(&b[j][i]).is_zero());
            }
        }
        assert_eq!(linalg::rank(&b, &example::locus()).unwrap(), 2);
    }

    #[test]
    fn undeclared_locus_is_surfaced() {
        let g = example::algebra();
        let l = Functional::new(example::point().coords().to_vec(), Locus::new());
        // l(Z) appears as the only pivot for the X row once E is used.
        assert!(matches!(
            g.vergne_polarization(&l, &example::flag(&g).unwrap()),
            Err(Error::Genericity { .. })
        ));
    }

    #[test]
    fn example_polarization() {
        let g = example::algebra();
        let l = example::point();
        let b = g
            .vergne_polarization(&l, &example::flag(&g).unwrap())
            .unwrap();
        let expected = Subspace::span(
            5,
            &[
                example::vector("E"),
                example::vector("Z"),
                example::vector("V"),
                example::k_full(),
            ],
            &example::locus(),
        )
        .unwrap();
        assert_eq!(b, expected);
        assert!(g.is_polarization(&b, &l).unwrap());
        assert!(!g
            .is_polarization(&g.span_of(&["E", "Z", "V", "U"]).unwrap(), &l)
            .unwrap());
        let h = example::h(&g).unwrap();
        assert!(!g
            .transversality_check(&b, &h, &example::q(&g).unwrap())
            .unwrap());
        assert!(g
            .transversality_check(&b, &h, &example::q_adapted(&g, false).unwrap())
            .unwrap());
        assert!(g
            .transversality_check(&b, &h, &example::q_adapted(&g, true).unwrap())
            .unwrap());
    }

    #[test]
    fn heisenberg_cases() {
        let g = heisenberg();
        let l = Functional::dual(3, 2);
        assert_eq!(g.stabilizer(&l).unwrap(), g.span_of(&["z"]).unwrap());
        let flag = vec![
            g.span_of(&["z"]).unwrap(),
            g.span_of(&["z", "q"]).unwrap(),
            g.whole(),
        ];
        assert_eq!(
            g.vergne_polarization(&l, &flag).unwrap(),
            g.span_of(&["z", "q"]).unwrap()
        );
        assert!(!g.lagrangian_check(&Subspace::zero(3), &l).unwrap());
        assert!(!g.lagrangian_check(&g.whole(), &l).unwrap());
    }

    #[test]
    fn abelian_cases() {
        let g = abelian(3);
        let l = Functional::dual(3, 0);
        assert!(g.kostant_form(&l).iter().flatten().all(|x| x.is_zero()));
        assert_eq!(g.stabilizer(&l).unwrap(), g.whole());
        let flag = vec![
            g.span_of(&["A0"]).unwrap(),
            g.span_of(&["A0", "A1"]).unwrap(),
            g.whole(),
        ];
        assert_eq!(g.vergne_polarization(&l, &flag).unwrap(), g.whole());
        assert!(g.is_polarization(&g.whole(), &l).unwrap());
        let ex = example::algebra();
        let b = ex.span_of(&["E", "Z"]).unwrap();
        assert!(ex
            .transversality_check(&b, &ex.whole(), &Subspace::zero(5))
            .unwrap());
    }

    #[test]
    fn bad_flags_are_rejected() {
        let g = example::algebra();
        let l = example::point();
        let not_ideal = vec![g.span_of(&["X"]).unwrap(), g.span_of(&["X", "E"]).unwrap()];
        assert!(matches!(
            g.vergne_polarization(&l, &not_ideal),
            Err(Error::Flag(_))
        ));
        let mut skip = example::flag(&g).unwrap();
        skip.remove(1);
        assert!(matches!(
            g.vergne_polarization(&l, &skip),
            Err(Error::Flag(_))
        ));
    }

    #[test]
    fn central_flag_is_a_flag_of_ideals() {
        let g = example::algebra();
        let flag = g.central_flag().unwrap();
        g.check_flag(&flag).unwrap();
        let b = g.vergne_polarization(&example::point(), &flag).unwrap();
        assert!(g.is_polarization(&b, &example::point()).unwrap());
    }

    #[test]
    fn change_basis_preserves_brackets() {
        let g = example::algebra();
        let names: Vec<String> = ["Z", "V", "K", "X", "E"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let vecs = vec![
            example::vector("Z"),
            example::vector("V"),
            example::k_short(),
            example::vector("X"),
            example::vector("E"),
        ];
        let (g2, _) = g.change_basis(&names, &vecs, &example::locus()).unwrap();
        assert!(g2.verify_structure().passed());
        // [K, V] = [X - l(Z)U, V] = Z - l(Z)E.
        let kv = g2.structure_constant(2, 1);
        assert_eq!(kv[0], RatExpr::one());
        assert_eq!(kv[4], example::param("Z").negated());
    }
}
