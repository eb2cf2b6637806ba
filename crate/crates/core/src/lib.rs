//! Exact calculus for biquantization on nilpotent Lie algebras: polynomial
//! and rational-function arithmetic, PBW normal ordering, reduction modulo
//! character ideals, star products, Kontsevich graphs and their weights.

pub mod characters;
pub mod config;
pub mod coset;
pub mod enveloping;
pub mod error;
pub mod example;
pub mod expr;
pub mod kgraphs;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod ratexpr;
pub mod star;
pub mod weights;

pub use error::{Error, Result};
pub use poly::{Coeff, Field, Poly, Rational};
pub use ratexpr::{Locus, RatExpr};
