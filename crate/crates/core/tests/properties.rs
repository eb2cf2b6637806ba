use std::collections::BTreeMap;
use std::sync::Arc;

use biquant::coset::{CosetSpace, IdealSign, Named};
use biquant::enveloping::{Enveloping, Pbw};
use biquant::example;
use biquant::kgraphs::enumerate;
use biquant::lie::{Functional, LieAlgebra};
use biquant::poly::{gens_of, monomials_upto};
use biquant::star::{moyal, symbol_poisson, EpsPoly, QPoly, StarConfig};
use biquant::{Coeff, Field, Locus, Poly, RatExpr, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rational(rng: &mut ChaCha8Rng, nonzero: bool) -> Rational {
    loop {
        let r = Rational::new(
            rng.random_range(-5i64..=5).into(),
            rng.random_range(1i64..=4).into(),
        );
        if !nonzero || r != Rational::from_integer(0.into()) {
            return r;
        }
    }
}

fn random_poly(
    rng: &mut ChaCha8Rng,
    gens: &Arc<[String]>,
    max_degree: u32,
    max_terms: usize,
) -> Poly<RatExpr> {
    let monos = monomials_upto(gens.len(), max_degree);
    let terms: Vec<_> = (0..rng.random_range(1..=max_terms))
        .map(|_| {
            (
                monos[rng.random_range(0..monos.len())].clone(),
                RatExpr::from_rational(rational(rng, true)),
            )
        })
        .collect();
    Poly::from_terms(gens.clone(), terms)
}

fn zuv() -> Arc<[String]> {
    gens_of(&["Z", "U", "V"])
}

/// Rational expressions in two parameters, built from random ring operations
/// and a few quotients by factors that stay away from the sample points.
fn random_ratexpr(rng: &mut ChaCha8Rng, depth: u32) -> RatExpr {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..3) {
            0 => RatExpr::param("a"),
            1 => RatExpr::param("b"),
            _ => RatExpr::from_rational(rational(rng, false)),
        };
    }
    let (x, y) = (
        random_ratexpr(rng, depth - 1),
        random_ratexpr(rng, depth - 1),
    );
    match rng.random_range(0..4) {
        0 => x.plus(&y),
        1 => x.minus(&y),
        2 => x.times(&y),
        // a² + 1 never vanishes over the rationals
        _ => x.times(
            &RatExpr::param("a")
                .pow(2)
                .plus(&RatExpr::one())
                .inverse()
                .expect("nonzero"),
        ),
    }
}

fn sample_point(a: i64, b: i64) -> BTreeMap<String, Rational> {
    [("a", a), ("b", b)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), Rational::from_integer(v.into())))
        .collect()
}

fn unit(n: usize, i: usize) -> Vec<RatExpr> {
    (0..n)
        .map(|j| {
            if i == j {
                RatExpr::one()
            } else {
                RatExpr::zero()
            }
        })
        .collect()
}

fn algebra(names: &[&str], brackets: &[(&str, &str, &str)]) -> LieAlgebra {
    let n = names.len();
    let triples: Vec<_> = brackets
        .iter()
        .map(|&(a, b, c)| (a, b, unit(n, names.iter().position(|x| *x == c).unwrap())))
        .collect();
    LieAlgebra::from_brackets(names, &triples).expect("valid structure constants")
}

/// Small nilpotent algebras of different step and dimension.
fn corpus() -> Vec<LieAlgebra> {
    vec![
        algebra(&["P", "Q", "C"], &[("P", "Q", "C")]),
        algebra(
            &["P1", "Q1", "P2", "Q2", "C"],
            &[("P1", "Q1", "C"), ("P2", "Q2", "C")],
        ),
        algebra(
            &["X1", "X2", "X3", "X4"],
            &[("X1", "X2", "X3"), ("X1", "X3", "X4")],
        ),
        algebra(
            &["E12", "E13", "E14", "E23", "E24", "E34"],
            &[
                ("E12", "E23", "E13"),
                ("E12", "E24", "E14"),
                ("E13", "E34", "E14"),
                ("E23", "E34", "E24"),
            ],
        ),
        algebra(
            &["A", "B", "C", "AB", "AC", "BC"],
            &[("A", "B", "AB"), ("A", "C", "AC"), ("B", "C", "BC")],
        ),
        example::algebra(),
    ]
}

/// The same algebra in a random unipotent basis, so the corpus is not only
/// made of adapted bases.
fn scrambled(g: &LieAlgebra, rng: &mut ChaCha8Rng) -> LieAlgebra {
    let n = g.dim();
    let vectors: Vec<Vec<RatExpr>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Equal => RatExpr::one(),
                    std::cmp::Ordering::Greater if rng.random_bool(0.4) => {
                        RatExpr::from_rational(rational(rng, false))
                    }
                    _ => RatExpr::zero(),
                })
                .collect()
        })
        .collect();
    let names: Vec<String> = (0..n).map(|i| format!("Y{i}")).collect();
    g.change_basis(&names, &vectors, &Locus::new())
        .expect("unipotent change of basis")
        .0
}

fn random_functional(n: usize, rng: &mut ChaCha8Rng) -> Functional {
    Functional::new(
        (0..n)
            .map(|_| RatExpr::from_rational(rational(rng, false)))
            .collect(),
        Locus::new(),
    )
}

fn example_space(q: &[(&str, Vec<RatExpr>)]) -> CosetSpace {
    let named = |(n, v): &(&str, Vec<RatExpr>)| -> Named { (n.to_string(), v.clone()) };
    let q: Vec<Named> = q.iter().map(named).collect();
    let h: Vec<Named> = ["X", "E"]
        .map(|n| (n.to_string(), example::vector(n)))
        .to_vec();
    CosetSpace::new(
        &example::algebra(),
        &q,
        &h,
        &example::character(),
        IdealSign::Plus,
        &example::locus(),
    )
    .expect("coset space")
}

fn naive_space() -> CosetSpace {
    example_space(&[
        ("Z", example::vector("Z")),
        ("U", example::vector("U")),
        ("V", example::vector("V")),
    ])
}

fn adapted_space() -> CosetSpace {
    example_space(&[
        ("Z", example::vector("Z")),
        ("V", example::vector("V")),
        ("K", example::k_full()),
    ])
}

fn random_pbw(env: &Enveloping, rng: &mut ChaCha8Rng) -> Pbw {
    random_poly(rng, env.gens(), 3, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_ring_axioms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = zuv();
        let (f, g, h) = (random_poly(&mut rng, &gens, 3, 4), random_poly(&mut rng, &gens, 3, 4), random_poly(&mut rng, &gens, 3, 4));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
        prop_assert!(f.sub(&f).is_zero());
        prop_assert_eq!(f.mul(&Poly::one(gens.clone())), f.clone());
    }

    #[test]
    fn ratexpr_equality_matches_evaluation(seed in any::<u64>(), a in -4i64..=4, b in -4i64..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_ratexpr(&mut rng, 3), random_ratexpr(&mut rng, 3));
        let at = sample_point(a, b);
        let (xv, yv) = (x.eval(&at).unwrap(), y.eval(&at).unwrap());
        prop_assert_eq!(x.plus(&y).eval(&at).unwrap(), &xv + &yv);
        prop_assert_eq!(x.times(&y).eval(&at).unwrap(), &xv * &yv);
        // normal forms are canonical: a rearranged computation compares equal
        prop_assert_eq!(x.plus(&y).minus(&y), x.clone());
        if x == y {
            prop_assert_eq!(xv, yv);
        }
    }

    #[test]
    fn enveloping_product_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let env = Enveloping::new(example::algebra());
        let (a, b, c) = (random_pbw(&env, &mut rng), random_pbw(&env, &mut rng), random_pbw(&env, &mut rng));
        prop_assert_eq!(env.mul(&env.mul(&a, &b), &c), env.mul(&a, &env.mul(&b, &c)));
    }

    #[test]
    fn symmetrization_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let env = Enveloping::new(example::algebra());
        let p = random_poly(&mut rng, env.gens(), 4, 4);
        prop_assert_eq!(env.symmetrize_inverse(&env.symmetrize(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn coset_symmetrization_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for space in [naive_space(), adapted_space()] {
            let p = random_poly(&mut rng, space.q_gens(), 3, 3);
            let lifted = space.beta_q(&p).unwrap();
            prop_assert_eq!(space.beta_q_inverse(&lifted).unwrap(), p);
        }
    }

    #[test]
    fn moyal_product_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = StarConfig::from_coset(&naive_space()).unwrap();
        let gens = zuv();
        let (f, g, h) = (random_poly(&mut rng, &gens, 3, 3), random_poly(&mut rng, &gens, 3, 3), random_poly(&mut rng, &gens, 3, 3));
        let left = moyal(&moyal(&f, &g, &cfg).unwrap(), &h, &cfg).unwrap();
        let right = moyal(&f, &moyal(&g, &h, &cfg).unwrap(), &cfg).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn symbol_bracket_satisfies_jacobi(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = StarConfig::from_coset(&naive_space()).unwrap();
        let gens = zuv();
        let br = |p: &QPoly, q: &QPoly| symbol_poisson(&EpsPoly::constant(p.clone()), &EpsPoly::constant(q.clone()), &cfg).unwrap();
        let (f, g, h) = (random_poly(&mut rng, &gens, 3, 3), random_poly(&mut rng, &gens, 3, 3), random_poly(&mut rng, &gens, 3, 3));
        prop_assert!(br(&f, &g).add(&br(&g, &f)).is_zero());
        let jac = br(&f, &br(&g, &h)).add(&br(&g, &br(&h, &f))).add(&br(&h, &br(&f, &g)));
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn vergne_construction_polarizes(seed in any::<u64>(), which in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = scrambled(&corpus()[which], &mut rng);
        let l = random_functional(g.dim(), &mut rng);
        let b = g.vergne_polarization(&l, &g.central_flag().unwrap()).unwrap();
        prop_assert!(g.is_polarization(&b, &l).unwrap());
    }

    #[test]
    fn lagrangian_condition_is_scale_invariant(lu in -6i64..=6, lv in -6i64..=6, lz in 1i64..=6, s in 1i64..=5, negate in any::<bool>()) {
        let g = example::algebra();
        let h = example::h(&g).unwrap();
        let int = |n: i64| RatExpr::int(n);
        let l = Functional::new(vec![int(0), int(lu), int(lv), int(1), int(lz)], Locus::new());
        let scale = RatExpr::int(if negate { -s } else { s });
        let scaled = l.scaled(&scale);
        prop_assert_eq!(g.lagrangian_check(&h, &l).unwrap(), g.lagrangian_check(&h, &scaled).unwrap());
        prop_assert_eq!(g.orbit_dim(&h, &l).unwrap(), g.orbit_dim(&h, &scaled).unwrap());
        prop_assert_eq!(g.stabilizer(&l).unwrap(), g.stabilizer(&scaled).unwrap());
    }

    #[test]
    fn adapted_basis_keeps_lower_central_series(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = example::algebra();
        let expected = g.lower_central_series().unwrap();
        let (lu, lv, lz) = (rational(&mut rng, false), rational(&mut rng, false), rational(&mut rng, true));
        let assignment: BTreeMap<String, RatExpr> =
            [("l(U)", lu), ("l(V)", lv), ("l(Z)", lz)].into_iter().map(|(k, v)| (k.to_string(), RatExpr::from_rational(v))).collect();
        let k: Vec<RatExpr> = example::k_full().iter().map(|c| c.subst(&assignment).unwrap()).collect();
        let space = example_space(&[("Z", example::vector("Z")), ("V", example::vector("V")), ("K", k)]);
        prop_assert_eq!(space.adapted_algebra().lower_central_series().unwrap(), expected.clone());
        prop_assert_eq!(scrambled(&g, &mut rng).lower_central_series().unwrap(), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Each aerial vertex picks an ordered pair of distinct targets other
    /// than itself.
    #[test]
    fn graph_count_closed_form(n in 0usize..=3, m in 1usize..=3) {
        let per_vertex = (n + m - 1) * (n + m).saturating_sub(2);
        let graphs = enumerate(n, m, 4).unwrap();
        prop_assert_eq!(graphs.len(), per_vertex.pow(n as u32));
        prop_assert!(graphs.iter().all(|g| g.is_admissible()));
        let mut texts: Vec<String> = graphs.iter().map(|g| g.to_string()).collect();
        texts.sort();
        texts.dedup();
        prop_assert_eq!(texts.len(), graphs.len());
    }
}
