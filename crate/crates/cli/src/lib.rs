//! Command implementations and report types for the `biquant` binary.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use biquant::characters::{
    character_formula_example, uncorrected_value, CharacterReport, ExponentForm, Route,
};
use biquant::config::{parse_assignment, AlgebraConfig, CheckReport};
use biquant::coset::primitive;
use biquant::enveloping::Enveloping;
use biquant::expr::{parse, Env, PolyInterp};
use biquant::kgraphs::{
    enumerate, enumerate_colored, ColoredGraph, ColoredOptions, DEFAULT_GRAPH_CAP,
    DEFAULT_MAX_GRAPHS,
};
use biquant::star::{moyal, StarConfig};
use biquant::weights::{estimate_weight, WeightEstimate};
use biquant::{Error, Poly, RatExpr, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const DEGREE_CAP_VAR: &str = "BIQUANT_DEGREE_CAP";
pub const GRAPH_CAP_VAR: &str = "BIQUANT_GRAPH_CAP";
pub const SAMPLES_CAP_VAR: &str = "BIQUANT_MAX_SAMPLES";

pub const DEFAULT_DEGREE_CAP: u32 = 8;
pub const DEFAULT_MAX_SAMPLES: usize = 100_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "biquant",
    version,
    about = "Exact invariants, star products and characters for nilpotent Lie algebras"
)]
pub struct Cli {
    /// Algebra description (TOML); the bundled example when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Exponent {
    Parameter,
    Generator,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structure, subalgebra, character, Lagrangian and transversality checks.
    Check,
    /// Invariant polynomials of the coset space up to a degree.
    Invariants {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        supplementary: Option<String>,
    },
    /// Vergne polarization of a flag at the configured point.
    Polarization {
        #[arg(long)]
        vergne: bool,
        #[arg(long)]
        flag: Option<String>,
        /// Point coordinates such as `U=1,V=1,Z=2`.
        #[arg(long)]
        at: Option<String>,
    },
    /// Star product of two polynomials in the supplementary generators.
    Star {
        #[arg(long, num_args = 2, value_names = ["F", "G"])]
        moyal: Vec<String>,
        #[arg(long)]
        supplementary: Option<String>,
    },
    /// Character value of an invariant element.
    Character {
        #[arg(long)]
        element: String,
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        supplementary: Option<String>,
        #[arg(long, value_enum, default_value_t = Exponent::Parameter)]
        exponent: Exponent,
    },
    /// Enumerate admissible graphs.
    Graphs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        colored: bool,
        /// With `--colored`: one edge to infinity.
        #[arg(long, requires = "colored")]
        infinity: bool,
    },
    /// Monte-Carlo estimate of a graph weight.
    Weights {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBlock {
    pub degree: u32,
    pub basis: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsReport {
    pub supplementary: String,
    pub generators: Vec<String>,
    pub max_degree: u32,
    pub by_degree: Vec<DegreeBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalEntry {
    pub supplementary: String,
    pub transversal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationReport {
    pub flag: String,
    pub point: Vec<String>,
    pub polarization: Vec<String>,
    pub is_polarization: bool,
    pub transversality: Vec<TransversalEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarReport {
    pub supplementary: String,
    pub left: String,
    pub right: String,
    pub product: String,
    pub symmetric_pair: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterOutput {
    pub reports: Vec<CharacterReport>,
    /// `β_q⁻¹(u)(l)` over the naive supplementary, with no correction.
    pub uncorrected: Option<String>,
    pub routes_agree: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphsReport {
    pub n: usize,
    pub m: usize,
    pub colored: bool,
    pub infinity: bool,
    pub count: usize,
    pub graphs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Report {
    Check(CheckReport),
    Invariants(InvariantsReport),
    Polarization(PolarizationReport),
    Star(StarReport),
    Character(CharacterOutput),
    Graphs(GraphsReport),
    Weights(WeightEstimate),
}

impl Report {
    /// Reports that carry a negative verdict map to exit code 1.
    pub fn passed(&self) -> bool {
        match self {
            Report::Check(c) => c.passed(),
            Report::Polarization(p) => p.is_polarization,
            _ => true,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Check(c) => {
                for w in &c.warnings {
                    let _ = writeln!(s, "warning: {w}");
                }
                for i in &c.items {
                    let _ = writeln!(
                        s,
                        "{:<4} {}: {}",
                        if i.passed { "ok" } else { "FAIL" },
                        i.name,
                        i.detail
                    );
                }
            }
            Report::Invariants(r) => {
                let _ = writeln!(
                    s,
                    "invariants over {} = <{}>, degree <= {}",
                    r.supplementary,
                    r.generators.join(", "),
                    r.max_degree
                );
                for b in &r.by_degree {
                    let _ = writeln!(
                        s,
                        "  degree {}: {}",
                        b.degree,
                        if b.basis.is_empty() {
                            "-".into()
                        } else {
                            b.basis.join(", ")
                        }
                    );
                }
            }
            Report::Polarization(p) => {
                let _ = writeln!(s, "point: {}", p.point.join(", "));
                let _ = writeln!(
                    s,
                    "Vergne polarization ({}): <{}>",
                    p.flag,
                    p.polarization.join(", ")
                );
                let _ = writeln!(s, "is polarization: {}", p.is_polarization);
                for t in &p.transversality {
                    let _ = writeln!(s, "transversal {}: {}", t.supplementary, t.transversal);
                }
            }
            Report::Star(r) => {
                let _ = writeln!(s, "({}) * ({}) = {}", r.left, r.right, r.product);
            }
            Report::Character(c) => {
                for r in &c.reports {
                    let route = match r.route {
                        Route::Transversal => "transversal",
                        Route::Corrected => "corrected",
                    };
                    let _ = writeln!(s, "{route}: gamma({}) = {}", r.element, r.value);
                    if let Some(alt) = &r.alt_convention_value {
                        let _ = writeln!(s, "  at i*l: {alt}");
                    }
                    for p in &r.provenance {
                        let _ = writeln!(s, "  {p}");
                    }
                    if !r.claims_character {
                        let _ =
                            writeln!(s, "  (T1 has no weights: value not claimed multiplicative)");
                    }
                }
                if let Some(u) = &c.uncorrected {
                    let _ = writeln!(s, "uncorrected: {u}");
                }
                if let Some(a) = c.routes_agree {
                    let _ = writeln!(s, "routes agree: {a}");
                }
            }
            Report::Graphs(g) => {
                let _ = writeln!(
                    s,
                    "{} graphs (n={}, m={}{})",
                    g.count,
                    g.n,
                    g.m,
                    if g.colored { ", colored" } else { "" }
                );
                for e in &g.graphs {
                    let _ = writeln!(s, "{e}");
                }
            }
            Report::Weights(w) => {
                let _ = writeln!(s, "{w}");
            }
        }
        s
    }
}

/// 0 success, 1 mathematical failure, 2 configuration or usage error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. }
        | Error::Parse { .. }
        | Error::Cap { .. }
        | Error::UnknownSymbol(_) => 2,
        _ => 1,
    }
}

fn cap_from_env<T: std::str::FromStr>(var: &str, default: T) -> Result<T> {
    match std::env::var(var) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::config(var, 0, format!("`{v}` is not a valid cap"))),
        Err(_) => Ok(default),
    }
}

fn load(cli: &Cli) -> Result<AlgebraConfig> {
    match &cli.config {
        Some(p) => AlgebraConfig::load(p),
        None => Ok(AlgebraConfig::bundled()),
    }
}

fn at_point(cfg: AlgebraConfig, at: Option<&str>) -> Result<AlgebraConfig> {
    let Some(at) = at else { return Ok(cfg) };
    let name = cfg
        .setup()?
        .point
        .clone()
        .ok_or_else(|| Error::config("setup.point", 0, "no evaluation point configured"))?;
    let values = parse_assignment(at, &name)?;
    for k in values.keys() {
        let basis = &k[name.len() + 1..k.len() - 1];
        if !cfg.algebra.names().iter().any(|b| b == basis) {
            return Err(Error::UnknownSymbol(basis.to_string()));
        }
    }
    cfg.specialize(&values)
}

fn supplementary(
    cfg: &AlgebraConfig,
    given: &Option<String>,
    prefer_naive: bool,
) -> Result<String> {
    if let Some(s) = given {
        cfg.named(s)?;
        return Ok(s.clone());
    }
    let s = cfg.setup()?;
    let pick = if prefer_naive {
        s.naive.clone().or(s.supplementary.clone())
    } else {
        s.supplementary.clone().or(s.naive.clone())
    };
    pick.ok_or_else(|| Error::config("setup.supplementary", 0, "no supplementary configured"))
}

fn point_text(cfg: &AlgebraConfig) -> Result<Vec<String>> {
    let name = cfg.setup()?.point.clone().unwrap_or_else(|| "l".into());
    Ok(cfg
        .point()?
        .coords()
        .iter()
        .zip(cfg.algebra.names())
        .map(|(c, n)| format!("{name}({n})={c}"))
        .collect())
}

pub fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Check => Ok(Report::Check(load(cli)?.check())),
        Command::Invariants {
            degree,
            supplementary: sup,
        } => {
            let cap = cap_from_env(DEGREE_CAP_VAR, DEFAULT_DEGREE_CAP)?;
            if *degree > cap {
                return Err(Error::Cap {
                    requested: *degree as usize,
                    cap: cap as usize,
                });
            }
            let cfg = load(cli)?;
            let name = supplementary(&cfg, sup, true)?;
            let space = cfg.coset_space(&name)?;
            let basis = space.invariants(*degree)?;
            let by_degree = basis
                .by_degree()
                .into_iter()
                .enumerate()
                .map(|(d, ps)| DegreeBlock {
                    degree: d as u32,
                    basis: ps.iter().map(|p| primitive(p).to_string()).collect(),
                })
                .collect();
            Ok(Report::Invariants(InvariantsReport {
                supplementary: name,
                generators: space.q_gens().to_vec(),
                max_degree: *degree,
                by_degree,
            }))
        }
        Command::Polarization {
            vergne: _,
            flag,
            at,
        } => {
            let cfg = at_point(load(cli)?, at.as_deref())?;
            let flag = match flag {
                Some(f) => f.clone(),
                None => cfg
                    .setup()?
                    .flag
                    .clone()
                    .ok_or_else(|| Error::config("setup.flag", 0, "no flag configured"))?,
            };
            let g = &cfg.algebra;
            let point = cfg.point()?;
            let b = g.vergne_polarization(&point, &cfg.flag(&flag)?)?;
            let h = cfg.subspace(&cfg.setup()?.subalgebra)?;
            let mut transversality = Vec::new();
            for name in cfg.subspaces.keys() {
                if *name == cfg.setup()?.subalgebra {
                    continue;
                }
                let q = cfg.subspace(name)?;
                if q.dim() + h.dim() == g.dim() {
                    transversality.push(TransversalEntry {
                        supplementary: name.clone(),
                        transversal: g.transversality_check(&b, &h, &q)?,
                    });
                }
            }
            Ok(Report::Polarization(PolarizationReport {
                flag,
                point: point_text(&cfg)?,
                polarization: b.render(g.names()),
                is_polarization: g.is_polarization(&b, &point)?,
                transversality,
            }))
        }
        Command::Star {
            moyal: fg,
            supplementary: sup,
        } => {
            let cfg = load(cli)?;
            let name = supplementary(&cfg, sup, true)?;
            let space = cfg.coset_space(&name)?;
            let star = StarConfig::from_coset(&space)?;
            let mut scope = Env::new();
            for (k, v) in &cfg.elements {
                scope.define(k, v)?;
            }
            let interp = PolyInterp {
                gens: space.q_gens().clone(),
            };
            let polys: Vec<Poly<RatExpr>> = fg
                .iter()
                .map(|s| scope.eval(&parse(s)?, &interp))
                .collect::<Result<_>>()?;
            let product = moyal(&polys[0], &polys[1], &star)?;
            Ok(Report::Star(StarReport {
                supplementary: name,
                left: polys[0].to_string(),
                right: polys[1].to_string(),
                product: product.to_string(),
                symmetric_pair: star.is_symmetric_pair(),
            }))
        }
        Command::Character {
            element,
            at,
            supplementary: sup,
            exponent,
        } => {
            let cfg = Arc::new(at_point(load(cli)?, at.as_deref())?);
            let env = Enveloping::new(cfg.algebra.clone());
            let u = cfg.parse_element(element, &env)?;
            let name = supplementary(&cfg, sup, false)?;
            let pipeline = cfg.pipeline(&name)?;
            let mut reports = vec![CharacterReport::transversal(element, &u, &pipeline)?];
            let (mut uncorrected, mut routes_agree) = (None, None);
            if let (true, Some(naive)) = (cfg.is_example(), cfg.setup()?.naive.clone()) {
                let form = match exponent {
                    Exponent::Parameter => ExponentForm::Parameter,
                    Exponent::Generator => ExponentForm::Generator,
                };
                let l = cfg.point()?;
                let value = character_formula_example(&u, &l, form)?.to_string();
                routes_agree = Some(value == reports[0].value);
                uncorrected = Some(uncorrected_value(&u, &l)?.to_string());
                reports.push(CharacterReport {
                    element: element.clone(),
                    functional: reports[0].functional.clone(),
                    route: Route::Corrected,
                    value,
                    alt_convention_value: None,
                    polarization: Vec::new(),
                    supplementary: cfg.named(&naive)?.iter().map(|(n, _)| n.clone()).collect(),
                    t1: format!(
                        "exp(integrated DU), {} form",
                        if form == ExponentForm::Parameter {
                            "parameter"
                        } else {
                            "generator"
                        }
                    ),
                    claims_character: true,
                    provenance: vec![format!("supplementary: {naive}")],
                });
            }
            Ok(Report::Character(CharacterOutput {
                reports,
                uncorrected,
                routes_agree,
            }))
        }
        Command::Graphs {
            n,
            m,
            colored,
            infinity,
        } => {
            let cap = cap_from_env(GRAPH_CAP_VAR, DEFAULT_GRAPH_CAP)?;
            let graphs = if *colored {
                enumerate_colored(
                    *n,
                    *m,
                    ColoredOptions {
                        with_infinity: *infinity,
                        cap,
                        max_graphs: DEFAULT_MAX_GRAPHS,
                    },
                )?
            } else {
                enumerate(*n, *m, cap)?
            };
            Ok(Report::Graphs(GraphsReport {
                n: *n,
                m: *m,
                colored: *colored,
                infinity: *infinity,
                count: graphs.len(),
                graphs: graphs.iter().map(ToString::to_string).collect(),
            }))
        }
        Command::Weights {
            graph,
            samples,
            seed,
        } => {
            let cap = cap_from_env(SAMPLES_CAP_VAR, DEFAULT_MAX_SAMPLES)?;
            if *samples > cap {
                return Err(Error::Cap {
                    requested: *samples,
                    cap,
                });
            }
            let g: ColoredGraph = graph.parse()?;
            Ok(Report::Weights(estimate_weight(&g, *samples, *seed)?))
        }
    }
}

/// Runs the command and renders its output; returns the exit code.
pub fn main_with(cli: &Cli, out: &mut impl std::io::Write, err: &mut impl std::io::Write) -> i32 {
    match run(cli) {
        Ok(report) => {
            let text = match cli.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            let _ = out.write_all(text.as_bytes());
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.format == Format::Json {
                let body = serde_json::json!({ "error": e.to_string(), "exit_code": code });
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&body).expect("json")
                );
            }
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}
