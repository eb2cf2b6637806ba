//! The five-dimensional filiform-type algebra with basis `X, U, V, E, Z` and
//! brackets `[U,V]=E`, `[X,U]=V`, `[X,V]=Z`, together with the subalgebra
//! `h = ⟨X,E⟩`, the character `E*` and the symbolic evaluation point.
//!
//! The same data ships as the bundled configuration; this module builds it
//! directly so that the library can be exercised without parsing anything.

use crate::error::Result;
use crate::lie::{Functional, LieAlgebra, Subspace};
use crate::poly::Coeff;
use crate::ratexpr::{Locus, RatExpr};

pub const BASIS: [&str; 5] = ["X", "U", "V", "E", "Z"];

fn unit(name: &str) -> Vec<RatExpr> {
    BASIS
        .iter()
        .map(|b| {
            if *b == name {
                RatExpr::one()
            } else {
                RatExpr::zero()
            }
        })
        .collect()
}

pub fn algebra() -> LieAlgebra {
    LieAlgebra::from_brackets(
        &BASIS,
        &[
            ("U", "V", unit("E")),
            ("X", "U", unit("V")),
            ("X", "V", unit("Z")),
        ],
    )
    .expect("example brackets are well formed")
}

pub fn param(name: &str) -> RatExpr {
    RatExpr::param(&format!("l({name})"))
}

/// `l(Z) ≠ 0`, the open set on which the example is generic.
pub fn locus() -> Locus {
    Locus::new().declare_param("l(Z)")
}

/// `E*`, the character on `h`.
pub fn character() -> Functional {
    Functional::new(unit("E"), Locus::new())
}

/// A point of `λ + h⊥`: `l(E)=1`, `l(X)=0`, the rest symbolic.
pub fn point() -> Functional {
    Functional::new(
        vec![
            RatExpr::zero(),
            param("U"),
            param("V"),
            RatExpr::one(),
            param("Z"),
        ],
        locus(),
    )
}

pub fn h(g: &LieAlgebra) -> Result<Subspace> {
    g.span_of(&["X", "E"])
}

/// The non-transversal supplementary `⟨Z,U,V⟩`.
pub fn q(g: &LieAlgebra) -> Result<Subspace> {
    g.span_of(&["Z", "U", "V"])
}

/// `X − l(Z)U`, the short form of the adapted generator.
pub fn k_short() -> Vec<RatExpr> {
    let mut v = unit("X");
    v[1] = param("Z").negated();
    v
}

/// `X − l(Z)U + l(V)V`, spanning the stabilizer together with the center.
pub fn k_full() -> Vec<RatExpr> {
    let mut v = k_short();
    v[2] = param("V");
    v
}

/// The transversal supplementary `⟨Z,V,K⟩`.
pub fn q_adapted(g: &LieAlgebra, full_k: bool) -> Result<Subspace> {
    let k = if full_k { k_full() } else { k_short() };
    Subspace::span(g.dim(), &[unit("Z"), unit("V"), k], &locus())
}

pub fn flag(g: &LieAlgebra) -> Result<Vec<Subspace>> {
    [
        vec!["E"],
        vec!["E", "Z"],
        vec!["E", "Z", "V"],
        vec!["E", "Z", "V", "X"],
        BASIS.to_vec(),
    ]
    .iter()
    .map(|names| g.span_of(names))
    .collect()
}

pub fn vector(name: &str) -> Vec<RatExpr> {
    unit(name)
}
