//! Characters of the invariant algebra `(U(g)/U(g)h_λ)^h`: the transversal
//! route through `β_q⁻¹` for a supplementary adapted to a polarization, and
//! the corrected route that keeps the naive supplementary and repairs it by
//! the exponential of a third-order differential operator.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coset::{CosetSpace, IdealSign, Named};
use crate::enveloping::UEAElement;
use crate::error::{Error, Result};
use crate::example;
use crate::expr::parse_ratexpr;
use crate::lie::{render_vector, Functional, LieAlgebra, Subspace};
use crate::poly::{int, rat, Coeff, Field, Poly, Rational};
use crate::ratexpr::{Locus, RatExpr};

type QPoly = Poly<RatExpr>;

/// `(num/den) · ∂_var^order` with a coefficient free of every variable the
/// derivation differentiates, so the terms commute.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivTerm {
    pub num: QPoly,
    pub den: QPoly,
    pub var: String,
    pub order: u32,
}

/// A nilpotent constant-coefficient derivation whose exponential is applied
/// to symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpDerivation {
    gens: Arc<[String]>,
    terms: Vec<DerivTerm>,
}

impl ExpDerivation {
    pub fn zero(gens: Arc<[String]>) -> Self {
        ExpDerivation {
            gens,
            terms: Vec::new(),
        }
    }

    pub fn single(num: QPoly, den: QPoly, var: &str, order: u32) -> Result<Self> {
        let gens = num.gens().clone();
        ExpDerivation::zero(gens).with_term(num, den, var, order)
    }

    pub fn with_term(mut self, num: QPoly, den: QPoly, var: &str, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain(
                "a derivation term needs positive order".into(),
            ));
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero {
                denominator: "0".into(),
            });
        }
        let (num, den) = (num.embed(&self.gens), den.embed(&self.gens));
        let i = self
            .gens
            .iter()
            .position(|g| g == var)
            .ok_or_else(|| Error::UnknownSymbol(var.to_string()))?;
        let mut vars: Vec<usize> = self
            .terms
            .iter()
            .map(|t| self.gens.iter().position(|g| *g == t.var).unwrap())
            .collect();
        vars.push(i);
        let depends = |p: &QPoly| vars.iter().any(|&v| p.degree_in(v) > 0);
        if depends(&num)
            || depends(&den)
            || self
                .terms
                .iter()
                .any(|t| depends(&t.num) || depends(&t.den))
        {
            return Err(Error::Domain(format!(
                "coefficients must not involve the differentiated variable {var}"
            )));
        }
        self.terms.push(DerivTerm {
            num,
            den,
            var: var.to_string(),
            order,
        });
        Ok(self)
    }

    pub fn gens(&self) -> &Arc<[String]> {
        &self.gens
    }

    pub fn terms(&self) -> &[DerivTerm] {
        &self.terms
    }

    /// One application. Fails when a coefficient denominator does not
    /// divide the derivative, since the result would leave the polynomials.
    pub fn apply(&self, p: &QPoly) -> Result<QPoly> {
        let p = p.embed(&self.gens);
        let mut out = QPoly::zero(self.gens.clone());
        for t in &self.terms {
            let d = p.derive(&t.var, t.order)?;
            if d.is_zero() {
                continue;
            }
            let scaled = d.mul(&t.num).div_exact(&t.den).ok_or_else(|| {
                Error::Domain(format!("{} is not divisible by {}", d.mul(&t.num), t.den))
            })?;
            out = out.add(&scaled);
        }
        Ok(out)
    }

    /// Substitutes parameter values into every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&RatExpr) -> Result<RatExpr>) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(DerivTerm {
                    num: t.num.try_map_coeffs(&f)?,
                    den: t.den.try_map_coeffs(&f)?,
                    ..t.clone()
                })
            })
            .collect::<Result<_>>()?;
        Ok(ExpDerivation {
            gens: self.gens.clone(),
            terms,
        })
    }
}

impl fmt::Display for ExpDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if t.den.is_constant() && t.den.constant_term().is_one() {
                write!(f, "({})*d{}^{}", t.num, t.var, t.order)?;
            } else {
                write!(f, "({})/({})*d{}^{}", t.num, t.den, t.var, t.order)?;
            }
        }
        Ok(())
    }
}

/// `Σ_k Dᵏp / k!`; the series stops because every application lowers the
/// degree in a differentiated variable.
pub fn exp_apply(d: &ExpDerivation, p: &QPoly) -> Result<QPoly> {
    let mut term = p.embed(d.gens());
    let mut out = term.clone();
    let mut k = 0i64;
    while !term.is_zero() {
        k += 1;
        term = d.apply(&term)?.scale(&RatExpr::from_rational(rat(1, k)));
        out = out.add(&term);
    }
    Ok(out)
}

pub const DU_WEIGHT: (i64, i64) = (1, 12);
const TIME: &str = "t";

/// The commuting family of third-order operators that moves symbols from the
/// supplementary `⟨Z,U,V⟩` to the adapted one, for the bundled example.
#[derive(Clone, Debug)]
pub struct DuOperator {
    gens: Arc<[String]>,
    lz: RatExpr,
    lx: RatExpr,
    weight: RatExpr,
    vector_field_graph: bool,
}

impl DuOperator {
    /// The coefficient of `∂_U³` at time `t`, a polynomial in `Z` whose
    /// coefficients involve the parameter `t`.
    pub fn coefficient(&self) -> QPoly {
        let z = QPoly::var(self.gens.clone(), "Z").expect("Z is a generator");
        let first = QPoly::constant(
            self.gens.clone(),
            self.weight.divided(&self.lz).expect("l(Z) checked"),
        );
        let second = z.scale(
            &self
                .weight
                .times(&RatExpr::param(TIME))
                .divided(&self.lz.pow(2))
                .expect("l(Z) checked"),
        );
        first.sub(&second)
    }

    pub fn at(&self, t: &Rational) -> Result<ExpDerivation> {
        let num = self.coefficient().try_map_coeffs(|c| {
            c.subst(&[(TIME.to_string(), RatExpr::from_rational(t.clone()))].into())
        })?;
        self.build(num)
    }

    /// `∫_lo^hi DU dt`.
    pub fn integrated(&self, lo: &Rational, hi: &Rational) -> Result<ExpDerivation> {
        let num = self
            .coefficient()
            .try_map_coeffs(|c| c.integrate_param(TIME, lo, hi))?;
        self.build(num)
    }

    fn build(&self, num: QPoly) -> Result<ExpDerivation> {
        let one = QPoly::one(self.gens.clone());
        let mut d = ExpDerivation::single(num, one.clone(), "U", 3)?;
        if self.vector_field_graph && !self.lx.is_zero() {
            return Err(Error::NotImplemented(
                "the vector-field graph only has a known value (zero) on points with l(X) = 0"
                    .into(),
            ));
        }
        if self.vector_field_graph {
            // contributes l(X)/l(Z) ∂_U, which vanishes here
            d = d.with_term(QPoly::zero(self.gens.clone()), one, "U", 1)?;
        }
        Ok(d)
    }

    /// The vector field the deformation is built from, as recorded.
    pub fn vector_field(&self) -> String {
        format!("X/({})*dU", self.lz)
    }
}

/// `DU` for the example at a point `l`; `vector_field_graph` adds the graph
/// whose contribution is proportional to `l(X)`.
pub fn du_operator(l: &Functional, vector_field_graph: bool) -> Result<DuOperator> {
    let lz = l.apply(&example::vector("Z"));
    if lz.is_zero() {
        return Err(Error::DivisionByZero {
            denominator: "l(Z)".into(),
        });
    }
    let (n, d) = DU_WEIGHT;
    Ok(DuOperator {
        gens: crate::poly::gens_of(&["Z", "U", "V"]),
        lz,
        lx: l.apply(&example::vector("X")),
        weight: RatExpr::from_rational(rat(n, d)),
        vector_field_graph,
    })
}

/// `∫₀¹ DU dt` with the parameter `l(Z)` kept, or with `l(Z)` replaced by the
/// generator `Z`, which collapses the coefficient to `1/(24Z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentForm {
    #[default]
    Parameter,
    Generator,
}

pub fn correction_operator(
    l: &Functional,
    form: ExponentForm,
    vector_field_graph: bool,
) -> Result<ExpDerivation> {
    match form {
        ExponentForm::Parameter => du_operator(l, vector_field_graph)?.integrated(&int(0), &int(1)),
        ExponentForm::Generator => {
            let gens = crate::poly::gens_of(&["Z", "U", "V"]);
            let z = QPoly::var(gens.clone(), "Z")?;
            ExpDerivation::single(
                QPoly::constant(gens, RatExpr::from_rational(rat(1, 24))),
                z,
                "U",
                3,
            )
        }
    }
}

/// Rewrites a symbol over one supplementary in the generators of another:
/// each old generator becomes its degree-one representative in the new
/// coset space.
pub fn change_variables(p: &QPoly, from: &CosetSpace, to: &CosetSpace) -> Result<QPoly> {
    let images: Vec<QPoly> = from
        .q_vectors()
        .iter()
        .map(|v| to.linear_symbol(v))
        .collect();
    let p = p.embed(from.q_gens());
    Ok(p.substitute(&images, to.q_gens()))
}

/// `B_{q,q_l}`: the exponential correction followed by the change of
/// variables. Only the bundled example has a closed-form correction; other
/// inputs must pass their own integrated operator.
pub fn supplementary_change(
    p: &QPoly,
    from: &CosetSpace,
    to: &CosetSpace,
    correction: &ExpDerivation,
) -> Result<QPoly> {
    if from.q_gens()[..] != correction.gens()[..] {
        return Err(Error::NotImplemented(
            "no closed-form correction for this supplementary; compile and weight the graph operators instead".into(),
        ));
    }
    change_variables(&exp_apply(correction, p)?, from, to)
}

/// A symbol operator applied after `β_q⁻¹`.
pub type SymbolOperator = Arc<dyn Fn(&QPoly) -> Result<QPoly> + Send + Sync>;

#[derive(Clone, Default)]
pub enum T1 {
    #[default]
    Identity,
    Supplied {
        label: String,
        op: SymbolOperator,
        /// Graph weights the operator was assembled from, if any.
        weights: Option<Vec<(String, RatExpr)>>,
    },
}

impl T1 {
    fn label(&self) -> String {
        match self {
            T1::Identity => "identity".into(),
            T1::Supplied {
                label,
                weights: Some(_),
                ..
            } => format!("{label} (weighted)"),
            T1::Supplied {
                label,
                weights: None,
                ..
            } => format!("{label} (unweighted)"),
        }
    }
}

impl fmt::Debug for T1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T1({})", self.label())
    }
}

/// A value split into real and imaginary parts, for evaluations at `i·l`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussValue {
    pub re: RatExpr,
    pub im: RatExpr,
}

impl fmt::Display for GaussValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "({})*i", self.im),
            (false, false) => write!(f, "{} + ({})*i", self.re, self.im),
        }
    }
}

/// Scale parameter used to move the evaluation point along its ray.
pub const SCALE_PARAM: &str = "s";

fn split_at_i(p: &crate::ratexpr::ParamPoly) -> (RatExpr, RatExpr) {
    let Ok(k) = p.index_of(SCALE_PARAM) else {
        return (RatExpr::from_poly(p.clone()), RatExpr::zero());
    };
    let (mut re, mut im) = (
        crate::ratexpr::ParamPoly::zero(p.gens().clone()),
        crate::ratexpr::ParamPoly::zero(p.gens().clone()),
    );
    for (m, c) in p.terms() {
        let mut e = m.clone();
        e[k] = 0;
        match m[k] % 4 {
            0 => re.add_term(e, c.clone()),
            1 => im.add_term(e, c.clone()),
            2 => re.add_term(e, -c.clone()),
            _ => im.add_term(e, -c.clone()),
        }
    }
    (RatExpr::from_poly(re), RatExpr::from_poly(im))
}

/// Sets the scale parameter to the imaginary unit.
pub fn at_imaginary_unit(r: &RatExpr) -> Result<GaussValue> {
    let (nr, ni) = split_at_i(r.numerator());
    let (dr, di) = split_at_i(r.denominator());
    let norm = dr.times(&dr).plus(&di.times(&di));
    let div = |x: RatExpr| {
        x.divided(&norm).ok_or_else(|| Error::DivisionByZero {
            denominator: r.denominator().to_string(),
        })
    };
    Ok(GaussValue {
        re: div(nr.times(&dr).plus(&ni.times(&di)))?,
        im: div(ni.times(&dr).minus(&nr.times(&di)))?,
    })
}

pub type Rebuild = Arc<dyn Fn(&RatExpr) -> Result<CharacterPipeline> + Send + Sync>;

/// The data of the transversal route: a polarization at the evaluation
/// point, a supplementary transversal to it and the subalgebra, and `T1`.
pub struct CharacterPipeline {
    space: CosetSpace,
    point: Functional,
    polarization: Subspace,
    t1: T1,
    provenance: Vec<String>,
    /// The same construction at `s·l` with character `s·λ`.
    rescaled: Option<Rebuild>,
}

impl fmt::Debug for CharacterPipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharacterPipeline")
            .field("provenance", &self.provenance)
            .field("t1", &self.t1)
            .finish()
    }
}

impl CharacterPipeline {
    pub fn new(
        g: &LieAlgebra,
        h: &[Named],
        lambda: &Functional,
        point: &Functional,
        polarization: Subspace,
        q_b: &[Named],
        locus: &Locus,
    ) -> Result<Self> {
        let locus = locus.union(point.locus());
        let hs = g
            .subspace(&h.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>())?
            .with_locus(&locus);
        let qs = g
            .subspace(&q_b.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>())?
            .with_locus(&locus);
        for (name, v) in h {
            if point.apply(v) != lambda.apply(v) {
                return Err(Error::Domain(format!(
                    "the evaluation point differs from λ on {name}"
                )));
            }
        }
        if !g.lagrangian_check(&hs, point)? {
            return Err(Error::Consistency(
                "the Lagrangian condition fails at the evaluation point".into(),
            ));
        }
        if !g.is_polarization(&polarization, point)? {
            return Err(Error::Consistency(
                "b is not a polarization at the evaluation point".into(),
            ));
        }
        if !g.transversality_check(&polarization, &hs, &qs)? {
            return Err(Error::Consistency(
                "the supplementary is not transversal to b and h".into(),
            ));
        }
        let space = CosetSpace::new(g, q_b, h, lambda, IdealSign::Plus, &locus)?;
        let names = g.names().to_vec();
        let provenance = vec![
            format!("polarization: <{}>", polarization.render(&names).join(", ")),
            format!(
                "supplementary: <{}>",
                q_b.iter()
                    .map(|(n, v)| format!("{n}={}", render_vector(v, &names)))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            "checks: lagrangian, polarization, transversality".into(),
        ];
        Ok(CharacterPipeline {
            space,
            point: point.clone(),
            polarization,
            t1: T1::Identity,
            provenance,
            rescaled: None,
        })
    }

    /// Installs the construction used for [`CharacterPipeline::alt_convention_value`].
    pub fn with_rescaling(mut self, rebuild: Rebuild) -> Self {
        self.rescaled = Some(rebuild);
        self
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.provenance.push(note);
        self
    }

    pub fn with_t1(mut self, t1: T1) -> Self {
        self.provenance.push(format!("T1: {}", t1.label()));
        self.t1 = t1;
        self
    }

    pub fn space(&self) -> &CosetSpace {
        &self.space
    }

    pub fn point(&self) -> &Functional {
        &self.point
    }

    pub fn polarization(&self) -> &Subspace {
        &self.polarization
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn t1_label(&self) -> String {
        self.t1.label()
    }

    /// A supplied `T1` without graph weights is run but its output is not
    /// claimed to be multiplicative.
    pub fn claims_character(&self) -> bool {
        !matches!(self.t1, T1::Supplied { weights: None, .. })
    }

    /// `T1(β_q⁻¹(u))` after checking invariance.
    pub fn symbol(&self, u: &UEAElement) -> Result<QPoly> {
        let s = invariant_symbol(&self.space, u)?;
        match &self.t1 {
            T1::Identity => Ok(s),
            T1::Supplied { op, .. } => op(&s),
        }
    }

    pub fn gamma_ct(&self, u: &UEAElement) -> Result<RatExpr> {
        self.space.evaluate(&self.symbol(u)?, &self.point)
    }

    /// The character for the point `i·l` on the quotient by `h_{iλ}`,
    /// obtained by rebuilding the pipeline along the ray `s·l` and setting
    /// `s = i` at the end.
    pub fn alt_convention_value(&self, u: &UEAElement) -> Result<GaussValue> {
        let rebuild = self.rescaled.as_ref().ok_or_else(|| {
            Error::NotImplemented("this pipeline cannot be rebuilt at a rescaled point".into())
        })?;
        let scaled = rebuild(&RatExpr::param(SCALE_PARAM))?.with_t1(self.t1.clone());
        at_imaginary_unit(&scaled.gamma_ct(u)?)
    }
}

/// `β_q⁻¹` of the coset of `u`, refusing cosets that are not `h`-invariant.
pub fn invariant_symbol(space: &CosetSpace, u: &UEAElement) -> Result<QPoly> {
    let s = space.beta_q_inverse(&space.reduce(u)?)?;
    if let Some((generator, residue)) = space.invariance_defect(&s)? {
        return Err(Error::Invariance {
            generator,
            residue: residue.to_string(),
        });
    }
    Ok(s)
}

fn named(name: &str, v: Vec<RatExpr>) -> Named {
    (name.to_string(), v)
}

/// Which adapted generator spans the supplementary with `Z` and `V`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KForm {
    /// `X − l(Z)U`.
    Short,
    /// `X − l(Z)U + l(V)V`.
    #[default]
    Full,
}

fn k_vector(l: &Functional, form: KForm) -> Vec<RatExpr> {
    let mut k = example::vector("X");
    k[1] = l.apply(&example::vector("Z")).negated();
    if form == KForm::Full {
        k[2] = l.apply(&example::vector("V"));
    }
    k
}

/// Points of `λ + h⊥` in the example: `l(X)=0`, `l(E)=1`.
pub fn example_point(lu: RatExpr, lv: RatExpr, lz: RatExpr) -> Functional {
    Functional::new(
        vec![RatExpr::zero(), lu, lv, RatExpr::one(), lz],
        example::locus(),
    )
}

fn example_h() -> [Named; 2] {
    ["X", "E"].map(|n| named(n, example::vector(n)))
}

/// The coset space over the naive supplementary `⟨Z,U,V⟩`.
pub fn example_naive_space() -> Result<CosetSpace> {
    let q = ["Z", "U", "V"].map(|n| named(n, example::vector(n)));
    CosetSpace::new(
        &example::algebra(),
        &q,
        &example_h(),
        &example::character(),
        IdealSign::Plus,
        &example::locus(),
    )
}

/// The transversal pipeline for the example at `l`, with the Vergne
/// polarization of the standard flag.
pub fn example_pipeline(l: &Functional, k: KForm) -> Result<CharacterPipeline> {
    let mut p = example_pipeline_scaled(l, k, &RatExpr::one())?;
    let base = l.clone();
    p.rescaled = Some(Arc::new(move |s: &RatExpr| {
        example_pipeline_scaled(&base, k, s)
    }));
    Ok(p)
}

fn example_pipeline_scaled(l: &Functional, k: KForm, scale: &RatExpr) -> Result<CharacterPipeline> {
    let g = example::algebra();
    if l.apply(&example::vector("Z")).is_zero() {
        return Err(Error::DivisionByZero {
            denominator: "l(Z)".into(),
        });
    }
    let mut locus = example::locus();
    if !scale.is_polynomial() || scale.as_rational().is_none() {
        locus = locus.declare(scale.numerator().clone());
    }
    let point = Functional::new(l.coords().to_vec(), locus.clone()).scaled(scale);
    let lambda = example::character().scaled(scale);
    // the stabilizer, hence K, only depends on the ray through l
    let b = g.vergne_polarization(&point, &example::flag(&g)?)?;
    let q = [
        named("Z", example::vector("Z")),
        named("V", example::vector("V")),
        named("K", k_vector(l, k)),
    ];
    let mut p = CharacterPipeline::new(&g, &example_h(), &lambda, &point, b, &q, &locus)?;
    p.provenance.push(format!(
        "K: {}",
        if k == KForm::Full {
            "X - l(Z)*U + l(V)*V"
        } else {
            "X - l(Z)*U"
        }
    ));
    Ok(p)
}

/// Evaluation of `exp(∫DU)β_q⁻¹(v)` at `l` over the naive supplementary.
pub fn character_formula_example(
    v: &UEAElement,
    l: &Functional,
    form: ExponentForm,
) -> Result<RatExpr> {
    let space = example_naive_space()?;
    let corrected = exp_apply(
        &correction_operator(l, form, false)?,
        &invariant_symbol(&space, v)?,
    )?;
    space.evaluate(&corrected, l)
}

/// `β_q⁻¹(v)(l)` over the naive supplementary, with no correction.
pub fn uncorrected_value(v: &UEAElement, l: &Functional) -> Result<RatExpr> {
    let space = example_naive_space()?;
    let p = space.reduce(v)?;
    space.evaluate(&space.beta_q_inverse(&p)?, l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Generators act through `l`.
    Real,
    /// Generators act through `i·l`.
    Imaginary,
}

/// Eigenvalues of the example's invariants on the distinguished
/// distribution vector, as computed on the representation side.
pub struct ExpectedEigenvalue {
    pub element: &'static str,
    pub value: &'static str,
    pub convention: Convention,
}

pub const EIGENVALUE_TABLE: [ExpectedEigenvalue; 2] = [
    ExpectedEigenvalue {
        element: "A",
        value: "l(V)^2 - 2*l(Z)*l(U)",
        convention: Convention::Imaginary,
    },
    ExpectedEigenvalue {
        element: "A^3",
        value: "(l(V)^2 - 2*l(Z)*l(U))^3",
        convention: Convention::Imaginary,
    },
];

impl ExpectedEigenvalue {
    pub fn parsed(&self) -> RatExpr {
        parse_ratexpr(self.value).expect("table entries parse")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Transversal,
    Corrected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterReport {
    pub element: String,
    pub functional: Vec<String>,
    pub route: Route,
    pub value: String,
    pub alt_convention_value: Option<String>,
    pub polarization: Vec<String>,
    pub supplementary: Vec<String>,
    pub t1: String,
    pub claims_character: bool,
    pub provenance: Vec<String>,
}

impl CharacterReport {
    pub fn transversal(
        element: &str,
        u: &UEAElement,
        pipeline: &CharacterPipeline,
    ) -> Result<Self> {
        let names = pipeline.space.adapted_algebra().names().to_vec();
        let base = pipeline.space.base_algebra().names().to_vec();
        Ok(CharacterReport {
            element: element.to_string(),
            functional: pipeline
                .point
                .coords()
                .iter()
                .zip(&base)
                .map(|(c, n)| format!("l({n})={c}"))
                .collect(),
            route: Route::Transversal,
            value: pipeline.gamma_ct(u)?.to_string(),
            alt_convention_value: match pipeline.alt_convention_value(u) {
                Ok(v) => Some(v.to_string()),
                Err(Error::NotImplemented(_)) => None,
                Err(e) => return Err(e),
            },
            polarization: pipeline.polarization.render(&base),
            supplementary: names[..pipeline.space.q_gens().len()].to_vec(),
            t1: pipeline.t1_label(),
            claims_character: pipeline.claims_character(),
            provenance: pipeline.provenance.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enveloping::Enveloping;
    use crate::expr::parse_poly;
    use crate::poly::gens_of;
    use std::collections::BTreeMap;

    fn zuv() -> Arc<[String]> {
        gens_of(&["Z", "U", "V"])
    }

    fn poly(src: &str) -> QPoly {
        parse_poly(src, &zuv()).unwrap()
    }

    fn elem(src: &str) -> UEAElement {
        let env = Enveloping::new(example::algebra());
        UEAElement::symmetrized(&env, &parse_poly(src, env.gens()).unwrap()).unwrap()
    }

    fn a() -> UEAElement {
        elem("2*U*Z - V^2")
    }

    fn gamma_a() -> RatExpr {
        parse_ratexpr("2*l(Z)*l(U) - l(V)^2").unwrap()
    }

    #[test]
    fn du_family_closed_forms() {
        let du = du_operator(&example::point(), false).unwrap();
        let at0 = du.at(&int(0)).unwrap();
        assert_eq!(at0.terms()[0].num, poly("1/(12*l(Z))"));
        assert_eq!(at0.terms()[0].order, 3);
        let at1 = du.at(&int(1)).unwrap();
        assert_eq!(at1.terms()[0].num, poly("(1/12)*(1/l(Z) - Z/l(Z)^2)"));
        let integral = du.integrated(&int(0), &int(1)).unwrap();
        assert_eq!(
            integral.terms()[0].num,
            poly("(1/(12*l(Z)))*(1 - Z/(2*l(Z)))")
        );
        assert_eq!(du.vector_field(), "X/(l(Z))*dU");
        let zero = example_point(RatExpr::int(1), RatExpr::int(1), RatExpr::zero());
        assert!(matches!(
            du_operator(&zero, false),
            Err(Error::DivisionByZero { .. })
        ));
    }

    #[test]
    fn exponential_correction_of_the_naive_cube() {
        let d = correction_operator(&example::point(), ExponentForm::Parameter, false).unwrap();
        let p = poly("(2*U*Z - V^2)^3 - 2*Z^2");
        let expected = poly("(2*U*Z - V^2)^3 - 2*Z^2 + 4*Z^3/l(Z) - 2*Z^4/l(Z)^2");
        assert_eq!(exp_apply(&d, &p).unwrap(), expected);
        // nothing of U-degree below three moves
        for src in ["2*U*Z - V^2", "(2*U*Z - V^2)^2", "Z^5*V^3"] {
            assert_eq!(exp_apply(&d, &poly(src)).unwrap(), poly(src));
        }
    }

    #[test]
    fn generator_form_of_the_exponent() {
        let inverse = ExpDerivation::single(poly("-1/24"), poly("Z"), "U", 3).unwrap();
        let abar3 = poly("(2*U*Z - V^2)^3");
        assert_eq!(
            poly("(2*U*Z - V^2)^3").derive("U", 3).unwrap(),
            poly("48*Z^3")
        );
        assert_eq!(
            exp_apply(&inverse, &abar3).unwrap(),
            poly("(2*U*Z - V^2)^3 - 2*Z^2")
        );
        let forward =
            correction_operator(&example::point(), ExponentForm::Generator, false).unwrap();
        assert_eq!(
            exp_apply(&forward, &poly("(2*U*Z - V^2)^3 - 2*Z^2")).unwrap(),
            abar3
        );
        // a denominator that does not divide is refused
        assert!(exp_apply(&inverse, &poly("U^3")).is_err());
    }

    #[test]
    fn derivations_reject_dependent_coefficients() {
        assert!(ExpDerivation::single(poly("U"), poly("1"), "U", 3).is_err());
        assert!(ExpDerivation::single(poly("1"), poly("U"), "U", 1).is_err());
        assert!(ExpDerivation::single(poly("1"), poly("1"), "U", 0).is_err());
    }

    #[test]
    fn transversal_character_values() {
        for k in [KForm::Short, KForm::Full] {
            let p = example_pipeline(&example::point(), k).unwrap();
            assert_eq!(p.gamma_ct(&a()).unwrap(), gamma_a());
            assert_eq!(p.gamma_ct(&a().pow(3)).unwrap(), gamma_a().pow(3));
            assert_eq!(p.gamma_ct(&elem("1")).unwrap(), RatExpr::one());
            assert!(matches!(
                p.gamma_ct(&elem("U")),
                Err(Error::Invariance { .. })
            ));
            assert!(p.claims_character());
        }
    }

    #[test]
    fn vergne_polarization_is_the_expected_one() {
        let l = example::point();
        let p = example_pipeline(&l, KForm::Full).unwrap();
        let g = example::algebra();
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
        assert_eq!(*p.polarization(), expected);
        let naive = ["Z", "U", "V"].map(|n| named(n, example::vector(n)));
        let err = CharacterPipeline::new(
            &g,
            &example_h(),
            &example::character(),
            &l,
            expected,
            &naive,
            &example::locus(),
        );
        assert!(matches!(err, Err(Error::Consistency(_))));
    }

    #[test]
    fn corrected_route_matches() {
        let l = example::point();
        for v in [
            a(),
            a().pow(2),
            a().pow(3),
            elem("Z").mul(&a()),
            elem("Z^3"),
        ] {
            let transversal = example_pipeline(&l, KForm::Full)
                .unwrap()
                .gamma_ct(&v)
                .unwrap();
            for form in [ExponentForm::Parameter, ExponentForm::Generator] {
                assert_eq!(
                    character_formula_example(&v, &l, form).unwrap(),
                    transversal
                );
            }
        }
        let lz = example::param("Z");
        assert_eq!(
            uncorrected_value(&a().pow(3), &l).unwrap(),
            gamma_a().pow(3).minus(&lz.pow(2).times(&RatExpr::int(2)))
        );
        assert_eq!(
            character_formula_example(&elem("Z^2"), &l, ExponentForm::Parameter).unwrap(),
            lz.pow(2)
        );
    }

    #[test]
    fn supplementary_change_agrees_after_evaluation() {
        let naive = example_naive_space().unwrap();
        let l = example::point();
        let adapted = example_pipeline(&l, KForm::Short).unwrap();
        let d = correction_operator(&l, ExponentForm::Parameter, false).unwrap();
        let p = poly("(2*U*Z - V^2)^3 - 2*Z^2");
        let moved = supplementary_change(&p, &naive, adapted.space(), &d).unwrap();
        let target = adapted.symbol(&a().pow(3)).unwrap();
        let at = |q: &QPoly, s: &CosetSpace| s.evaluate(q, &l).unwrap();
        // with the short K the two symbols coincide before evaluation
        assert_eq!(moved, target);
        assert_eq!(at(&moved, adapted.space()), at(&target, adapted.space()));
        // low U-degree: pure substitution
        let low = supplementary_change(&poly("2*U*Z - V^2"), &naive, adapted.space(), &d).unwrap();
        assert_eq!(
            low,
            change_variables(&poly("2*U*Z - V^2"), &naive, adapted.space()).unwrap()
        );
        assert_eq!(
            low,
            parse_poly("-2*Z*K/l(Z) - V^2", adapted.space().q_gens()).unwrap()
        );
        // five rational points
        let pts = [(1, 1, 2), (-3, 2, 5), (7, -1, -1), (0, 4, 3), (2, 2, -7)];
        for (u, v, z) in pts {
            let env: BTreeMap<String, Rational> = [("l(U)", u), ("l(V)", v), ("l(Z)", z)]
                .iter()
                .map(|(k, x)| (k.to_string(), int(*x)))
                .collect();
            let lhs = at(&moved, adapted.space()).eval(&env).unwrap();
            let rhs = at(&p, &naive).eval(&env).unwrap() + int(4 * z * z) - int(2 * z * z);
            assert_eq!(lhs, rhs);
        }
        let other = ExpDerivation::zero(gens_of(&["A", "B"]));
        assert!(matches!(
            supplementary_change(&p, &naive, adapted.space(), &other),
            Err(Error::NotImplemented(_))
        ));
    }

    #[test]
    fn vector_field_graph_toggle() {
        let l = example::point();
        let with = correction_operator(&l, ExponentForm::Parameter, true).unwrap();
        let without = correction_operator(&l, ExponentForm::Parameter, false).unwrap();
        let p = poly("(2*U*Z - V^2)^3");
        assert_eq!(
            exp_apply(&with, &p).unwrap(),
            exp_apply(&without, &p).unwrap()
        );
        let off_coset = Functional::new(
            vec![
                RatExpr::one(),
                example::param("U"),
                example::param("V"),
                RatExpr::one(),
                example::param("Z"),
            ],
            example::locus(),
        );
        assert!(matches!(
            du_operator(&off_coset, true)
                .unwrap()
                .integrated(&int(0), &int(1)),
            Err(Error::NotImplemented(_))
        ));
    }

    #[test]
    fn imaginary_convention_table() {
        let p = example_pipeline(&example::point(), KForm::Full).unwrap();
        let [ta, ta3] = &EIGENVALUE_TABLE;
        let alt_a = p.alt_convention_value(&a()).unwrap();
        assert!(alt_a.im.is_zero());
        assert_eq!(alt_a.re, ta.parsed());
        let alt_a3 = p.alt_convention_value(&a().pow(3)).unwrap();
        assert_eq!(
            alt_a3,
            GaussValue {
                re: ta3.parsed(),
                im: RatExpr::zero()
            }
        );
        let alt_z = p.alt_convention_value(&elem("Z")).unwrap();
        assert_eq!(
            alt_z,
            GaussValue {
                re: RatExpr::zero(),
                im: example::param("Z")
            }
        );
        assert_eq!(p.gamma_ct(&a()).unwrap(), ta.parsed().negated());
        // the full symmetrization misses the table at degree three
        let env = Enveloping::new(example::algebra());
        let sym = a().pow(3).symmetrize_inverse();
        let values: Vec<RatExpr> = example::point().coords().to_vec();
        let at_il = evaluate_imaginary_full(&sym, &values);
        assert_ne!(at_il, ta3.parsed());
        assert_eq!(
            at_il,
            ta3.parsed()
                .minus(&example::param("Z").pow(2).times(&RatExpr::int(2)))
        );
        let _ = env;
    }

    fn evaluate_imaginary_full(p: &QPoly, values: &[RatExpr]) -> RatExpr {
        let mut out = RatExpr::zero();
        for (m, c) in p.terms() {
            let d: u32 = m.iter().sum();
            assert_eq!(d % 2, 0);
            let mono = m
                .iter()
                .zip(values)
                .fold(c.clone(), |acc, (&e, v)| acc.times(&v.pow(e)));
            out = if d.is_multiple_of(4) {
                out.plus(&mono)
            } else {
                out.minus(&mono)
            };
        }
        out
    }

    #[test]
    fn multiplicativity_table() {
        let p = example_pipeline(&example::point(), KForm::Full).unwrap();
        let set = [
            elem("1"),
            elem("Z"),
            a(),
            elem("Z").mul(&a()),
            a().pow(2),
            a().pow(3),
        ];
        let values: Vec<RatExpr> = set.iter().map(|u| p.gamma_ct(u).unwrap()).collect();
        for (i, u) in set.iter().enumerate() {
            for (j, v) in set.iter().enumerate().skip(i) {
                assert_eq!(
                    p.gamma_ct(&u.mul(v)).unwrap(),
                    values[i].times(&values[j]),
                    "pair {i},{j}"
                );
            }
        }
    }

    #[test]
    fn unweighted_t1_is_not_claimed() {
        let p = example_pipeline(&example::point(), KForm::Full).unwrap();
        let doubled = T1::Supplied {
            label: "scale".into(),
            op: Arc::new(|s: &QPoly| Ok(s.clone())),
            weights: None,
        };
        let p = p.with_t1(doubled);
        assert!(!p.claims_character());
        assert_eq!(p.gamma_ct(&a()).unwrap(), gamma_a());
        assert!(p.provenance().iter().any(|s| s.contains("unweighted")));
    }

    #[test]
    fn report_roundtrip() {
        let l = example_point(RatExpr::int(1), RatExpr::int(1), RatExpr::int(2));
        let p = example_pipeline(&l, KForm::Full).unwrap();
        let r = CharacterReport::transversal("A^3", &a().pow(3), &p).unwrap();
        assert_eq!(r.value, "27");
        assert_eq!(r.alt_convention_value.as_deref(), Some("-27"));
        let back: CharacterReport =
            serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
