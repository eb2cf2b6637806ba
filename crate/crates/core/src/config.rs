//! Declarative algebra descriptions in TOML: basis, bracket table, named
//! subspaces, flags, functionals and element definitions, plus the checks and
//! pipelines that can be built from them.
//!
//! Every error produced while loading names the offending key and its line.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::characters::CharacterPipeline;
use crate::coset::{CosetSpace, IdealSign, Named};
use crate::enveloping::{Enveloping, Pbw, UEAElement};
use crate::error::{Error, Result};
use crate::example;
use crate::expr::{parse, parse_poly, parse_ratexpr, Env, Interp};
use crate::lie::{Functional, LieAlgebra, Subspace};
use crate::poly::{gens_of, Coeff, Poly, Rational};
use crate::ratexpr::{Locus, RatExpr};

pub const BUNDLED_EXAMPLE: &str = include_str!("../data/example.toml");

type SpannedNames = Spanned<Vec<Spanned<String>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    algebra: RawAlgebra,
    #[serde(default)]
    locus: Option<RawLocus>,
    #[serde(default)]
    subspaces: BTreeMap<String, Spanned<Vec<Spanned<String>>>>,
    #[serde(default)]
    flags: BTreeMap<String, Spanned<Vec<SpannedNames>>>,
    #[serde(default)]
    functionals: BTreeMap<String, Spanned<BTreeMap<String, Spanned<String>>>>,
    #[serde(default)]
    elements: BTreeMap<String, Spanned<String>>,
    #[serde(default)]
    setup: Option<Spanned<RawSetup>>,
    #[serde(default)]
    checks: Option<RawChecks>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    basis: Spanned<Vec<Spanned<String>>>,
    #[serde(default)]
    brackets: Vec<Spanned<Vec<Spanned<String>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLocus {
    #[serde(default)]
    nonzero: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetup {
    subalgebra: Spanned<String>,
    character: Spanned<String>,
    point: Option<Spanned<String>>,
    flag: Option<Spanned<String>>,
    naive: Option<Spanned<String>>,
    supplementary: Option<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChecks {
    #[serde(default)]
    transversal: Vec<Spanned<String>>,
    #[serde(default)]
    not_transversal: Vec<Spanned<String>>,
}

/// Which named objects the pipelines use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Setup {
    pub subalgebra: String,
    pub character: String,
    pub point: Option<String>,
    pub flag: Option<String>,
    /// Supplementary without transversality, used by the corrected route.
    pub naive: Option<String>,
    pub supplementary: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Checks {
    pub transversal: Vec<String>,
    pub not_transversal: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct AlgebraConfig {
    pub algebra: LieAlgebra,
    pub locus: Locus,
    pub subspaces: BTreeMap<String, Vec<Named>>,
    pub flags: BTreeMap<String, Vec<Vec<Vec<RatExpr>>>>,
    pub functionals: BTreeMap<String, Vec<RatExpr>>,
    pub elements: BTreeMap<String, String>,
    pub setup: Option<Setup>,
    pub checks: Checks,
    pub warnings: Vec<String>,
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Best guess at the dotted key around `offset`, for errors raised by the
/// TOML layer itself.
fn key_at(src: &str, offset: usize) -> String {
    let upto = &src[..offset.min(src.len())];
    let table = upto.lines().rev().find_map(|l| {
        let t = l.trim();
        (t.starts_with('[') && t.ends_with(']'))
            .then(|| t.trim_matches(|c| c == '[' || c == ']').trim().to_string())
    });
    let line = src[upto.rfind('\n').map_or(0, |i| i + 1)..]
        .lines()
        .next()
        .unwrap_or("");
    let key = line
        .split_once('=')
        .map(|(k, _)| k.trim().to_string())
        .filter(|k| !k.is_empty() && !k.starts_with('['));
    match (table, key) {
        (Some(t), Some(k)) => format!("{t}.{k}"),
        (Some(t), None) => t,
        (None, Some(k)) => k,
        (None, None) => "<document>".into(),
    }
}

struct Ctx<'a> {
    src: &'a str,
}

impl Ctx<'_> {
    fn err(&self, key: impl Into<String>, span: Range<usize>, msg: impl Into<String>) -> Error {
        Error::config(key, line_of(self.src, span.start), msg)
    }

    fn wrap<T>(&self, key: &str, span: Range<usize>, r: Result<T>) -> Result<T> {
        r.map_err(|e| self.err(key, span, e.to_string()))
    }
}

/// Coordinates of a linear expression such as `X - l(Z)*U`.
pub fn parse_linear(src: &str, gens: &Arc<[String]>) -> Result<Vec<RatExpr>> {
    let p = parse_poly(src, gens)?;
    let mut v = vec![RatExpr::zero(); gens.len()];
    for (m, c) in p.terms() {
        match m.iter().sum::<u32>() {
            1 => v[m.iter().position(|&e| e == 1).unwrap()] = c.clone(),
            0 => return Err(Error::Domain(format!("`{src}` has a constant term"))),
            _ => return Err(Error::Domain(format!("`{src}` is not linear"))),
        }
    }
    Ok(v)
}

/// Interprets expressions in the enveloping algebra: products are taken in
/// the order written.
struct UeaInterp<'a> {
    env: &'a Arc<Enveloping>,
}

impl Interp for UeaInterp<'_> {
    type Val = Pbw;
    fn scalar(&self, r: RatExpr) -> Pbw {
        Poly::constant(self.env.gens().clone(), r)
    }
    fn generator(&self, name: &str) -> Option<Pbw> {
        self.env
            .gens()
            .iter()
            .position(|g| g == name)
            .map(|i| self.env.generator(i))
    }
    fn add(&self, a: &Pbw, b: &Pbw) -> Pbw {
        a.add(b)
    }
    fn mul(&self, a: &Pbw, b: &Pbw) -> Pbw {
        self.env.mul(a, b)
    }
    fn neg(&self, a: &Pbw) -> Pbw {
        a.neg()
    }
    fn as_scalar(&self, a: &Pbw) -> Option<RatExpr> {
        a.is_constant().then(|| a.constant_term())
    }
}

impl AlgebraConfig {
    pub fn bundled() -> Self {
        AlgebraConfig::parse(BUNDLED_EXAMPLE).expect("bundled configuration is valid")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), 0, e.to_string()))?;
        AlgebraConfig::parse(&src)
    }

    pub fn parse(src: &str) -> Result<Self> {
        let raw: Raw = toml::from_str(src).map_err(|e| {
            let at = e.span().map_or(0, |s| s.start);
            Error::config(
                key_at(src, at),
                line_of(src, at),
                e.message().trim().to_string(),
            )
        })?;
        let cx = Ctx { src };

        let basis: Vec<String> = raw
            .algebra
            .basis
            .get_ref()
            .iter()
            .map(|s| s.get_ref().clone())
            .collect();
        if basis.is_empty() {
            return Err(cx.err("algebra.basis", raw.algebra.basis.span(), "basis is empty"));
        }
        for (i, b) in raw.algebra.basis.get_ref().iter().enumerate() {
            let name = b.get_ref();
            let ok = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(cx.err(
                    "algebra.basis",
                    b.span(),
                    format!("`{name}` is not an identifier"),
                ));
            }
            if basis[..i].contains(name) {
                return Err(cx.err("algebra.basis", b.span(), format!("`{name}` is repeated")));
            }
        }
        let gens = gens_of(&basis);

        let mut table: Vec<(String, String, Vec<RatExpr>)> = Vec::new();
        for (k, t) in raw.algebra.brackets.iter().enumerate() {
            let key = format!("algebra.brackets[{k}]");
            let parts = t.get_ref();
            if parts.len() != 3 {
                return Err(cx.err(
                    &key,
                    t.span(),
                    format!(
                        "expected [first, second, value], found {} entries",
                        parts.len()
                    ),
                ));
            }
            let (a, b) = (parts[0].get_ref(), parts[1].get_ref());
            for p in &parts[..2] {
                if !basis.contains(p.get_ref()) {
                    return Err(cx.err(
                        &key,
                        p.span(),
                        format!("`{}` is not a basis symbol", p.get_ref()),
                    ));
                }
            }
            if a == b {
                return Err(cx.err(&key, t.span(), format!("[{a},{a}] is zero by antisymmetry")));
            }
            if table
                .iter()
                .any(|(x, y, _)| (x == a && y == b) || (x == b && y == a))
            {
                return Err(cx.err(&key, t.span(), format!("[{a},{b}] is given twice")));
            }
            let v = cx.wrap(
                &key,
                parts[2].span(),
                parse_linear(parts[2].get_ref(), &gens),
            )?;
            table.push((a.clone(), b.clone(), v));
        }
        let names: Vec<&str> = basis.iter().map(String::as_str).collect();
        let borrowed: Vec<(&str, &str, Vec<RatExpr>)> = table
            .iter()
            .map(|(a, b, v)| (a.as_str(), b.as_str(), v.clone()))
            .collect();
        let algebra = LieAlgebra::from_brackets(&names, &borrowed)?;
        let mut warnings = Vec::new();
        if !algebra.is_nilpotent() {
            warnings
                .push("the algebra is not nilpotent; character pipelines are disabled".to_string());
        }

        let mut locus = Locus::new();
        for (k, f) in raw.locus.iter().flat_map(|l| l.nonzero.iter()).enumerate() {
            let key = format!("locus.nonzero[{k}]");
            let r = cx.wrap(&key, f.span(), parse_ratexpr(f.get_ref()))?;
            if r.is_zero() {
                return Err(cx.err(&key, f.span(), "declared non-zero but identically zero"));
            }
            locus = locus.declare(r.numerator().clone());
        }

        let vector = |key: &str, s: &Spanned<String>| -> Result<Named> {
            let text = s.get_ref().trim();
            let (name, body) = match text.split_once('=') {
                Some((n, b)) => (n.trim().to_string(), b.trim()),
                None => (text.to_string(), text),
            };
            let plain =
                !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !plain {
                return Err(cx.err(
                    key,
                    s.span(),
                    format!("name the vector `{text}` as `Name = ...`"),
                ));
            }
            Ok((name, cx.wrap(key, s.span(), parse_linear(body, &gens))?))
        };

        let mut subspaces = BTreeMap::new();
        for (name, list) in &raw.subspaces {
            let key = format!("subspaces.{name}");
            let vs = list
                .get_ref()
                .iter()
                .map(|s| vector(&key, s))
                .collect::<Result<Vec<_>>>()?;
            let span = cx.wrap(
                &key,
                list.span(),
                algebra.subspace(&vs.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>()),
            )?;
            if span.dim() != vs.len() {
                return Err(cx.err(&key, list.span(), "vectors are linearly dependent"));
            }
            subspaces.insert(name.clone(), vs);
        }

        let mut flags = BTreeMap::new();
        for (name, members) in &raw.flags {
            let key = format!("flags.{name}");
            let mut out = Vec::new();
            for m in members.get_ref() {
                out.push(
                    m.get_ref()
                        .iter()
                        .map(|s| vector(&key, s).map(|(_, v)| v))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            flags.insert(name.clone(), out);
        }

        let mut functionals = BTreeMap::new();
        for (name, coords) in &raw.functionals {
            let key = format!("functionals.{name}");
            let mut v = vec![RatExpr::zero(); basis.len()];
            for (b, c) in coords.get_ref() {
                let Some(i) = basis.iter().position(|x| x == b) else {
                    return Err(cx.err(
                        format!("{key}.{b}"),
                        c.span(),
                        format!("`{b}` is not a basis symbol"),
                    ));
                };
                v[i] = cx.wrap(&format!("{key}.{b}"), c.span(), parse_ratexpr(c.get_ref()))?;
            }
            functionals.insert(name.clone(), v);
        }

        let mut elements = BTreeMap::new();
        for (name, def) in &raw.elements {
            let key = format!("elements.{name}");
            if basis.contains(name) {
                return Err(cx.err(&key, def.span(), format!("`{name}` shadows a basis symbol")));
            }
            cx.wrap(&key, def.span(), parse(def.get_ref()).map(|_| ()))?;
            elements.insert(name.clone(), def.get_ref().clone());
        }

        let setup = match &raw.setup {
            None => None,
            Some(s) => {
                let r = s.get_ref();
                let need = |key: &str, v: &Spanned<String>, present: bool| -> Result<String> {
                    if present {
                        Ok(v.get_ref().clone())
                    } else {
                        Err(cx.err(
                            format!("setup.{key}"),
                            v.span(),
                            format!("`{}` is not defined", v.get_ref()),
                        ))
                    }
                };
                let sub = |key: &str, v: &Option<Spanned<String>>| -> Result<Option<String>> {
                    v.as_ref()
                        .map(|v| need(key, v, subspaces.contains_key(v.get_ref())))
                        .transpose()
                };
                Some(Setup {
                    subalgebra: need(
                        "subalgebra",
                        &r.subalgebra,
                        subspaces.contains_key(r.subalgebra.get_ref()),
                    )?,
                    character: need(
                        "character",
                        &r.character,
                        functionals.contains_key(r.character.get_ref()),
                    )?,
                    point: r
                        .point
                        .as_ref()
                        .map(|v| need("point", v, functionals.contains_key(v.get_ref())))
                        .transpose()?,
                    flag: r
                        .flag
                        .as_ref()
                        .map(|v| need("flag", v, flags.contains_key(v.get_ref())))
                        .transpose()?,
                    naive: sub("naive", &r.naive)?,
                    supplementary: sub("supplementary", &r.supplementary)?,
                })
            }
        };

        let mut checks = Checks::default();
        if let Some(c) = &raw.checks {
            for (key, list, out) in [
                (
                    "checks.transversal",
                    &c.transversal,
                    &mut checks.transversal,
                ),
                (
                    "checks.not_transversal",
                    &c.not_transversal,
                    &mut checks.not_transversal,
                ),
            ] {
                for v in list {
                    if !subspaces.contains_key(v.get_ref()) {
                        return Err(cx.err(
                            key,
                            v.span(),
                            format!("`{}` is not a defined subspace", v.get_ref()),
                        ));
                    }
                    out.push(v.get_ref().clone());
                }
            }
            if (!checks.transversal.is_empty() || !checks.not_transversal.is_empty())
                && setup
                    .as_ref()
                    .is_none_or(|s| s.point.is_none() || s.flag.is_none())
            {
                return Err(Error::config(
                    "checks",
                    0,
                    "transversality checks need setup.point and setup.flag",
                ));
            }
        }

        Ok(AlgebraConfig {
            algebra,
            locus,
            subspaces,
            flags,
            functionals,
            elements,
            setup,
            checks,
            warnings,
        })
    }

    pub fn setup(&self) -> Result<&Setup> {
        self.setup
            .as_ref()
            .ok_or_else(|| Error::config("setup", 0, "missing [setup] table"))
    }

    pub fn named(&self, name: &str) -> Result<&[Named]> {
        self.subspaces
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::config(format!("subspaces.{name}"), 0, "not defined"))
    }

    pub fn subspace(&self, name: &str) -> Result<Subspace> {
        let vs: Vec<Vec<RatExpr>> = self.named(name)?.iter().map(|(_, v)| v.clone()).collect();
        Ok(self.algebra.subspace(&vs)?.with_locus(&self.locus))
    }

    pub fn functional(&self, name: &str) -> Result<Functional> {
        let v = self
            .functionals
            .get(name)
            .ok_or_else(|| Error::config(format!("functionals.{name}"), 0, "not defined"))?;
        Ok(Functional::new(v.clone(), self.locus.clone()))
    }

    pub fn flag(&self, name: &str) -> Result<Vec<Subspace>> {
        let f = self
            .flags
            .get(name)
            .ok_or_else(|| Error::config(format!("flags.{name}"), 0, "not defined"))?;
        f.iter()
            .map(|vs| Ok(self.algebra.subspace(vs)?.with_locus(&self.locus)))
            .collect()
    }

    pub fn point(&self) -> Result<Functional> {
        let name = self
            .setup()?
            .point
            .clone()
            .ok_or_else(|| Error::config("setup.point", 0, "no evaluation point configured"))?;
        self.functional(&name)
    }

    /// True when the algebra is the bundled five-dimensional example, so that
    /// the closed-form correction route applies.
    pub fn is_example(&self) -> bool {
        let ex = example::algebra();
        self.algebra.names() == ex.names()
            && (0..ex.dim()).all(|i| {
                (0..ex.dim())
                    .all(|j| self.algebra.structure_constant(i, j) == ex.structure_constant(i, j))
            })
    }

    /// Replaces parameters by rational values everywhere except the bracket
    /// table. Fails when a declared non-zero factor vanishes.
    pub fn specialize(&self, values: &BTreeMap<String, Rational>) -> Result<Self> {
        let map: BTreeMap<String, RatExpr> = values
            .iter()
            .map(|(k, v)| (k.clone(), RatExpr::from_rational(v.clone())))
            .collect();
        let sub = |v: &[RatExpr]| v.iter().map(|c| c.subst(&map)).collect::<Result<Vec<_>>>();
        let mut locus = Locus::new();
        for f in self.locus.factors() {
            let r = RatExpr::from_poly(f.clone()).subst(&map)?;
            if r.is_zero() {
                return Err(Error::Domain(format!(
                    "{} vanishes at the requested point",
                    RatExpr::from_poly(f.clone())
                )));
            }
            if r.as_rational().is_none() {
                locus = locus.declare(r.numerator().clone());
            }
        }
        let mut out = self.clone();
        out.locus = locus;
        for vs in out.subspaces.values_mut() {
            for (_, v) in vs.iter_mut() {
                *v = sub(v)?;
            }
        }
        for members in out.flags.values_mut() {
            for vs in members.iter_mut() {
                for v in vs.iter_mut() {
                    *v = sub(v)?;
                }
            }
        }
        for v in out.functionals.values_mut() {
            *v = sub(v)?;
        }
        Ok(out)
    }

    /// Parses `src` in `U(g)`: products are taken in the written order and
    /// names from `[elements]` expand to their definitions.
    pub fn parse_element(&self, src: &str, env: &Arc<Enveloping>) -> Result<UEAElement> {
        let mut scope = Env::new();
        for (name, def) in &self.elements {
            scope.define(name, def)?;
        }
        let pbw = scope.eval(&parse(src)?, &UeaInterp { env })?;
        UEAElement::from_pbw(env, pbw)
    }

    pub fn coset_space(&self, supplementary: &str) -> Result<CosetSpace> {
        let s = self.setup()?;
        CosetSpace::new(
            &self.algebra,
            self.named(supplementary)?,
            self.named(&s.subalgebra)?,
            &self.functional(&s.character)?,
            IdealSign::Plus,
            &self.locus,
        )
    }

    /// Transversal route over `supplementary` with the Vergne polarization of
    /// the configured flag at the configured point.
    pub fn pipeline(self: &Arc<Self>, supplementary: &str) -> Result<CharacterPipeline> {
        let p = self.pipeline_scaled(supplementary, &RatExpr::one())?;
        let (cfg, name) = (self.clone(), supplementary.to_string());
        Ok(p.with_rescaling(Arc::new(move |s: &RatExpr| cfg.pipeline_scaled(&name, s))))
    }

    fn pipeline_scaled(&self, supplementary: &str, scale: &RatExpr) -> Result<CharacterPipeline> {
        if !self.algebra.is_nilpotent() {
            return Err(Error::Domain(
                "the algebra is not nilpotent; character pipelines are disabled".into(),
            ));
        }
        let s = self.setup()?;
        let flag_name = s
            .flag
            .clone()
            .ok_or_else(|| Error::config("setup.flag", 0, "no flag configured"))?;
        let mut locus = self.locus.clone();
        if scale.as_rational().is_none() {
            locus = locus.declare(scale.numerator().clone());
        }
        // the supplementary is taken from the unscaled point: only the ray matters
        let point = Functional::new(self.point()?.coords().to_vec(), locus.clone()).scaled(scale);
        let lambda = self.functional(&s.character)?.scaled(scale);
        let b = self
            .algebra
            .vergne_polarization(&point, &self.flag(&flag_name)?)?;
        let p = CharacterPipeline::new(
            &self.algebra,
            self.named(&s.subalgebra)?,
            &lambda,
            &point,
            b,
            self.named(supplementary)?,
            &locus,
        )?;
        Ok(p.with_note(format!("configured as: {supplementary}")))
    }

    pub fn check(&self) -> CheckReport {
        let mut items = Vec::new();
        let structure = self.algebra.verify_structure();
        let detail = match (&structure.antisymmetry_witness, &structure.jacobi_witness) {
            (Some(w), _) => format!("antisymmetry fails at {w:?}"),
            (None, Some(w)) => format!("Jacobi fails at {w:?}"),
            _ => format!(
                "lower central series dims {:?}",
                structure.lower_central_dims
            ),
        };
        items.push(CheckItem::new(
            "structure",
            structure.antisymmetry_witness.is_none() && structure.jacobi_witness.is_none(),
            detail,
        ));
        items.push(CheckItem::new(
            "nilpotent",
            structure.nilpotent,
            if structure.nilpotent {
                "lower central series reaches 0".into()
            } else {
                "lower central series stalls".into()
            },
        ));
        if let Err(e) = self.check_setup(&mut items) {
            items.push(CheckItem::new("setup", false, e.to_string()));
        }
        CheckReport {
            items,
            warnings: self.warnings.clone(),
        }
    }

    fn check_setup(&self, items: &mut Vec<CheckItem>) -> Result<()> {
        let Some(s) = &self.setup else { return Ok(()) };
        let g = &self.algebra;
        let h = self.subspace(&s.subalgebra)?;
        let closes = g.is_subalgebra(&h)?;
        items.push(CheckItem::new(
            "subalgebra",
            closes,
            format!("{} = <{}>", s.subalgebra, h.render(g.names()).join(", ")),
        ));
        let lambda = self.functional(&s.character)?;
        let ok = g.is_character(&h, &lambda);
        items.push(CheckItem::new(
            "character",
            ok,
            if ok {
                format!(
                    "{} vanishes on [{}, {}]",
                    s.character, s.subalgebra, s.subalgebra
                )
            } else {
                format!(
                    "{} does not vanish on [{}, {}]",
                    s.character, s.subalgebra, s.subalgebra
                )
            },
        ));
        let Some(pname) = &s.point else { return Ok(()) };
        let point = self.point()?;
        let off: Vec<String> = self
            .named(&s.subalgebra)?
            .iter()
            .filter(|(_, v)| point.apply(v) != lambda.apply(v))
            .map(|(n, v)| {
                format!(
                    "{pname}({n}) = {} but {}({n}) = {}",
                    point.apply(v),
                    s.character,
                    lambda.apply(v)
                )
            })
            .collect();
        items.push(CheckItem::new(
            "point",
            off.is_empty(),
            if off.is_empty() {
                format!("{pname} restricts to {} on {}", s.character, s.subalgebra)
            } else {
                off.join("; ")
            },
        ));
        let outcome = |r: Result<bool>| r.map_err(|e| e.to_string());
        match outcome(g.lagrangian_check(&h, &point)) {
            Ok(ok) => {
                let dims = format!(
                    "dim g.{pname} = {}, dim {}.{pname} = {}",
                    g.orbit_dim(&g.whole(), &point)?,
                    s.subalgebra,
                    g.orbit_dim(&h, &point)?
                );
                items.push(CheckItem::new("lagrangian", ok, dims));
            }
            Err(e) => items.push(CheckItem::new("lagrangian", false, e)),
        }
        let Some(fname) = &s.flag else { return Ok(()) };
        let b = match g.vergne_polarization(&point, &self.flag(fname)?) {
            Ok(b) => b,
            Err(e) => {
                items.push(CheckItem::new("polarization", false, e.to_string()));
                return Ok(());
            }
        };
        let pol = g.is_polarization(&b, &point)?;
        items.push(CheckItem::new(
            "polarization",
            pol,
            format!("b = <{}>", b.render(g.names()).join(", ")),
        ));
        for (name, expected) in self
            .checks
            .transversal
            .iter()
            .map(|n| (n, true))
            .chain(self.checks.not_transversal.iter().map(|n| (n, false)))
        {
            let q = self.subspace(name)?;
            match outcome(g.transversality_check(&b, &h, &q)) {
                Ok(t) => items.push(CheckItem::new(
                    &format!("transversality {name}"),
                    t == expected,
                    format!(
                        "{name} is {}transversal (expected {}transversal)",
                        if t { "" } else { "not " },
                        if expected { "" } else { "not " }
                    ),
                )),
                Err(e) => items.push(CheckItem::new(&format!("transversality {name}"), false, e)),
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckItem {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckItem {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
    pub warnings: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

/// Parses `U=1,V=1,Z=2` into parameter values `l(U)=1, ...` for the point
/// functional named `point`.
pub fn parse_assignment(src: &str, point: &str) -> Result<BTreeMap<String, Rational>> {
    let mut out = BTreeMap::new();
    for (col, part) in src.split(',').scan(1usize, |c, p| {
        let at = *c;
        *c += p.len() + 1;
        Some((at, p))
    }) {
        let Some((k, v)) = part.split_once('=') else {
            return Err(Error::Parse {
                column: col,
                message: format!("expected NAME=VALUE, found `{}`", part.trim()),
            });
        };
        let val = parse_ratexpr(v.trim())?
            .as_rational()
            .ok_or_else(|| Error::Parse {
                column: col,
                message: format!("`{}` is not a rational number", v.trim()),
            })?;
        out.insert(format!("{point}({})", k.trim()), val);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn bundled_matches_example_module() {
        let c = AlgebraConfig::bundled();
        assert!(c.is_example());
        assert!(c.warnings.is_empty());
        let g = &c.algebra;
        assert_eq!(c.subspace("h").unwrap(), example::h(g).unwrap());
        assert_eq!(c.subspace("q").unwrap(), example::q(g).unwrap());
        assert_eq!(
            c.subspace("q_l").unwrap(),
            example::q_adapted(g, true).unwrap()
        );
        assert_eq!(
            c.subspace("q_l_short").unwrap(),
            example::q_adapted(g, false).unwrap()
        );
        assert_eq!(c.flag("standard").unwrap(), example::flag(g).unwrap());
        assert_eq!(
            c.functional("lambda").unwrap().coords(),
            example::character().coords()
        );
        assert_eq!(c.point().unwrap().coords(), example::point().coords());
    }

    #[test]
    fn bundled_checks_pass() {
        let r = AlgebraConfig::bundled().check();
        assert!(r.passed(), "{r:#?}");
        let names: Vec<&str> = r.items.iter().map(|i| i.name.as_str()).collect();
        assert!(names.contains(&"transversality q") && names.contains(&"transversality q_l"));
    }

    #[test]
    fn elements_expand_in_written_order() {
        let c = AlgebraConfig::bundled();
        let env = Enveloping::new(c.algebra.clone());
        let a = c.parse_element("A", &env).unwrap();
        let sym =
            UEAElement::symmetrized(&env, &parse_poly("2*U*Z - V^2", env.gens()).unwrap()).unwrap();
        assert_eq!(a, sym);
        // V*U = U*V - E in PBW order
        let vu = c.parse_element("V*U", &env).unwrap();
        assert_eq!(vu, c.parse_element("U*V - E", &env).unwrap());
        let w = c.parse_element("W", &env).unwrap();
        for x in ["X", "U", "V", "E", "Z"] {
            assert!(w
                .commutator(&UEAElement::generator(&env, x).unwrap())
                .is_zero());
        }
        assert!(matches!(
            c.parse_element("U/V", &env),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            c.parse_element("Q", &env),
            Err(Error::UnknownSymbol(_))
        ));
    }

    #[test]
    fn malformed_bracket_names_its_line() {
        let src = BUNDLED_EXAMPLE.replace(r#"["X", "U", "V"],"#, r#"["X", "U"],"#);
        match AlgebraConfig::parse(&src) {
            Err(Error::Config { key, line, .. }) => {
                assert_eq!(key, "algebra.brackets[1]");
                assert_eq!(
                    line,
                    BUNDLED_EXAMPLE
                        .lines()
                        .position(|l| l.contains(r#"["X", "U", "V"]"#))
                        .unwrap()
                        + 1
                );
            }
            other => panic!("{other:?}"),
        }
        let bad = BUNDLED_EXAMPLE.replace(r#"["U", "V", "E"]"#, r#"["U", "V", "E^2"]"#);
        let line = BUNDLED_EXAMPLE
            .lines()
            .position(|l| l.contains(r#"["U", "V", "E"]"#))
            .unwrap()
            + 1;
        assert_eq!(
            AlgebraConfig::parse(&bad).unwrap_err(),
            Error::config(
                "algebra.brackets[0]",
                line,
                "domain error: `E^2` is not linear"
            )
        );
    }

    #[test]
    fn syntax_and_reference_errors() {
        let e = AlgebraConfig::parse("[algebra]\nbasis = [\"X\"\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }), "{e:?}");
        let e = AlgebraConfig::parse("[algebra]\nbasis = [\"X\"]\nextra = 1\n").unwrap_err();
        assert!(
            matches!(e, Error::Config { ref key, .. } if key.starts_with("algebra")),
            "{e:?}"
        );
        let src = BUNDLED_EXAMPLE.replace("subalgebra = \"h\"", "subalgebra = \"nope\"");
        let e = AlgebraConfig::parse(&src).unwrap_err();
        assert!(
            matches!(e, Error::Config { ref key, .. } if key == "setup.subalgebra"),
            "{e:?}"
        );
        let src = BUNDLED_EXAMPLE.replace(
            "[functionals.lambda]\nE = \"1\"",
            "[functionals.lambda]\nY = \"1\"",
        );
        let e = AlgebraConfig::parse(&src).unwrap_err();
        assert!(
            matches!(e, Error::Config { ref key, .. } if key == "functionals.lambda.Y"),
            "{e:?}"
        );
    }

    #[test]
    fn wrong_character_is_diagnosed() {
        let src = BUNDLED_EXAMPLE.replace(
            "[functionals.lambda]\nE = \"1\"",
            "[functionals.lambda]\nV = \"1\"",
        );
        let r = AlgebraConfig::parse(&src).unwrap().check();
        assert!(!r.passed());
        let bad: Vec<&CheckItem> = r.items.iter().filter(|i| !i.passed).collect();
        assert_eq!(bad[0].name, "point");
        assert!(bad[0].detail.contains("l(E) = 1"), "{}", bad[0].detail);
    }

    #[test]
    fn non_nilpotent_is_flagged() {
        let src = "[algebra]\nbasis = [\"H\", \"P\"]\nbrackets = [[\"H\", \"P\", \"P\"]]\n";
        let c = AlgebraConfig::parse(src).unwrap();
        assert_eq!(c.warnings.len(), 1);
        assert!(!c.check().passed());
    }

    #[test]
    fn specialization_and_assignment() {
        let c = AlgebraConfig::bundled();
        let at = parse_assignment("U=1, V=1,Z=2", "l").unwrap();
        assert_eq!(at["l(Z)"], rat(2, 1));
        let s = c.specialize(&at).unwrap();
        assert!(s.point().unwrap().is_concrete());
        assert!(s.check().passed());
        let zero = parse_assignment("U=1,V=1,Z=0", "l").unwrap();
        assert!(matches!(c.specialize(&zero), Err(Error::Domain(_))));
        assert!(matches!(
            parse_assignment("U=1,V", "l"),
            Err(Error::Parse { column: 5, .. })
        ));
    }

    #[test]
    fn config_pipeline_agrees_with_example_pipeline() {
        use crate::characters::{example_pipeline, KForm};
        let c = Arc::new(AlgebraConfig::bundled());
        let env = Enveloping::new(c.algebra.clone());
        let a3 = c.parse_element("A^3", &env).unwrap();
        let p = c.pipeline("q_l").unwrap();
        let q = example_pipeline(&example::point(), KForm::Full).unwrap();
        assert_eq!(p.gamma_ct(&a3).unwrap(), q.gamma_ct(&a3).unwrap());
        assert_eq!(
            p.alt_convention_value(&a3).unwrap(),
            q.alt_convention_value(&a3).unwrap()
        );
        assert!(matches!(c.pipeline("q"), Err(Error::Consistency(_))));
    }
}
