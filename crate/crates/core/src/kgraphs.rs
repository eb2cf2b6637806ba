//! Admissible graphs with ordered edge pairs and two edge colors, their
//! enumeration, classification, text encoding, and compilation into
//! polydifferential operators for a linear Poisson structure.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coset::CosetSpace;
use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::poly::{gens_of, Coeff, Poly};
use crate::ratexpr::RatExpr;
use crate::star::Bidifferential;

pub const DEFAULT_GRAPH_CAP: usize = 4;
pub const DEFAULT_MAX_GRAPHS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Target {
    /// A type-I vertex, by index.
    Internal(usize),
    /// A type-II vertex on the real axis, by index among the type-II vertices.
    Ground(usize),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Color {
    Plus,
    Minus,
}

impl Color {
    pub fn flipped(self) -> Color {
        match self {
            Color::Plus => Color::Minus,
            Color::Minus => Color::Plus,
        }
    }

    fn symbol(self) -> char {
        match self {
            Color::Plus => '+',
            Color::Minus => '-',
        }
    }
}

/// Each type-I vertex owns an ordered pair of outgoing edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColoredGraph {
    pub n: usize,
    pub m: usize,
    pub targets: Vec<[Target; 2]>,
    pub colors: Vec<[Color; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphFamily {
    Bernoulli(usize),
    Wheel(usize),
    BernoulliWheel(usize),
    Other,
}

impl ColoredGraph {
    pub fn new(m: usize, targets: Vec<[Target; 2]>, colors: Vec<[Color; 2]>) -> Result<Self> {
        if targets.len() != colors.len() {
            return Err(Error::Shape("one color pair per vertex".into()));
        }
        let g = ColoredGraph {
            n: targets.len(),
            m,
            targets,
            colors,
        };
        g.check()?;
        Ok(g)
    }

    /// Same targets, every edge colored `+`.
    pub fn plain(m: usize, targets: Vec<[Target; 2]>) -> Result<Self> {
        let colors = vec![[Color::Plus; 2]; targets.len()];
        ColoredGraph::new(m, targets, colors)
    }

    pub fn edge_count(&self) -> usize {
        2 * self.n
    }

    /// Edges as `(source, slot, target, color)` in their canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Target, Color)> + '_ {
        (0..self.n)
            .flat_map(move |r| (0..2).map(move |s| (r, s, self.targets[r][s], self.colors[r][s])))
    }

    pub fn infinity_edge(&self) -> Option<usize> {
        self.edges().position(|(_, _, t, _)| t == Target::Infinity)
    }

    pub fn check(&self) -> Result<()> {
        let mut infinities = 0;
        for r in 0..self.n {
            for s in 0..2 {
                match self.targets[r][s] {
                    Target::Internal(v) if v == r => {
                        return Err(Error::Domain(format!("loop at vertex {r}")))
                    }
                    Target::Internal(v) if v >= self.n => {
                        return Err(Error::Domain(format!(
                            "vertex {r} targets missing vertex {v}"
                        )))
                    }
                    Target::Ground(k) if k >= self.m => {
                        return Err(Error::Domain(format!(
                            "vertex {r} targets missing ground vertex {k}"
                        )))
                    }
                    Target::Infinity => {
                        infinities += 1;
                        if self.colors[r][s] != Color::Minus {
                            return Err(Error::Domain(
                                "the edge to infinity must be colored -".into(),
                            ));
                        }
                    }
                    _ => {}
                }
            }
            if self.targets[r][0] == self.targets[r][1] && self.colors[r][0] == self.colors[r][1] {
                return Err(Error::Domain(format!("double edge at vertex {r}")));
            }
        }
        if infinities > 1 {
            return Err(Error::Domain("more than one edge to infinity".into()));
        }
        Ok(())
    }

    pub fn is_admissible(&self) -> bool {
        self.check().is_ok()
    }

    /// Number of edges landing on ground vertex `k`.
    pub fn ground_in_degree(&self, k: usize) -> usize {
        self.edges().filter(|e| e.2 == Target::Ground(k)).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges().filter(|e| e.2 == Target::Internal(v)).count()
    }

    /// Tags for reduction graphs (one ground vertex carrying `F`).
    pub fn family(&self) -> GraphFamily {
        if self.m != 1 || self.n == 0 {
            return GraphFamily::Other;
        }
        let into_f = self.ground_in_degree(0);
        match (self.infinity_edge().is_some(), into_f) {
            (true, d) if d == self.n => GraphFamily::Bernoulli(self.n),
            (false, d) if d == self.n => GraphFamily::Wheel(self.n),
            (true, d) if d + 1 == self.n => GraphFamily::BernoulliWheel(self.n),
            _ => GraphFamily::Other,
        }
    }

    /// Dimension of the gauge-fixed configuration space.
    pub fn configuration_dim(&self) -> isize {
        2 * self.n as isize + self.m as isize - 2
    }

    /// Number of edges carrying an angle form (all but the edge to infinity).
    pub fn form_degree(&self) -> usize {
        self.edge_count() - usize::from(self.infinity_edge().is_some())
    }
}

impl fmt::Display for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .map(|(r, _, t, c)| {
                let t = match t {
                    Target::Internal(v) => v.to_string(),
                    Target::Ground(k) => (self.n + k).to_string(),
                    Target::Infinity => "inf".into(),
                };
                format!("({r},{t},{})", c.symbol())
            })
            .collect();
        let inf = self
            .infinity_edge()
            .map_or("-".to_string(), |i| i.to_string());
        write!(
            f,
            "{};{};edges=[{}];inf={}",
            self.n,
            self.m,
            edges.join(","),
            inf
        )
    }
}

impl FromStr for ColoredGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |col: usize, msg: &str| Error::Parse {
            column: col,
            message: msg.to_string(),
        };
        let parts: Vec<&str> = s.trim().split(';').collect();
        if parts.len() != 4 {
            return Err(bad(0, "expected `n;m;edges=[...];inf=k`"));
        }
        let n: usize = parts[0]
            .trim()
            .parse()
            .map_err(|_| bad(0, "bad type-I count"))?;
        let m: usize = parts[1]
            .trim()
            .parse()
            .map_err(|_| bad(parts[0].len() + 1, "bad type-II count"))?;
        let edge_col = parts[0].len() + parts[1].len() + 2;
        let body = parts[2]
            .trim()
            .strip_prefix("edges=[")
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| bad(edge_col, "expected edges=[...]"))?;
        let mut edges = Vec::new();
        let mut rest = body.trim();
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| bad(edge_col, "expected `(`"))?;
            let close = rest
                .find(')')
                .ok_or_else(|| bad(edge_col, "unclosed edge"))?;
            let fields: Vec<&str> = rest[open + 1..close].split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad(edge_col, "an edge is (source,target,color)"));
            }
            let src: usize = fields[0].parse().map_err(|_| bad(edge_col, "bad source"))?;
            let tgt = match fields[1] {
                "inf" => Target::Infinity,
                t => {
                    let v: usize = t.parse().map_err(|_| bad(edge_col, "bad target"))?;
                    if v < n {
                        Target::Internal(v)
                    } else if v < n + m {
                        Target::Ground(v - n)
                    } else {
                        return Err(bad(edge_col, "target out of range"));
                    }
                }
            };
            let color = match fields[2] {
                "+" => Color::Plus,
                "-" => Color::Minus,
                _ => return Err(bad(edge_col, "color must be + or -")),
            };
            edges.push((src, tgt, color));
            rest = rest[close + 1..].trim_start_matches([',', ' ']);
        }
        if edges.len() != 2 * n {
            return Err(bad(edge_col, "each type-I vertex needs exactly two edges"));
        }
        let mut targets = Vec::new();
        let mut colors = Vec::new();
        for r in 0..n {
            let (a, b) = (edges[2 * r], edges[2 * r + 1]);
            if a.0 != r || b.0 != r {
                return Err(bad(
                    edge_col,
                    "edges must be listed by source, two per vertex",
                ));
            }
            targets.push([a.1, b.1]);
            colors.push([a.2, b.2]);
        }
        let g = ColoredGraph::new(m, targets, colors)?;
        let inf_field = parts[3]
            .trim()
            .strip_prefix("inf=")
            .ok_or_else(|| bad(edge_col + parts[2].len() + 1, "expected inf=k"))?;
        let declared = match inf_field {
            "-" => None,
            k => Some(
                k.parse::<usize>()
                    .map_err(|_| bad(edge_col + parts[2].len() + 1, "bad inf index"))?,
            ),
        };
        if declared != g.infinity_edge() {
            return Err(Error::Parse {
                column: edge_col + parts[2].len() + 1,
                message: "inf index does not match the edge list".into(),
            });
        }
        Ok(g)
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Cap { requested: n, cap });
    }
    Ok(())
}

/// Ordered pairs of distinct targets available to vertex `r`.
fn plain_pairs(n: usize, m: usize, r: usize) -> Vec<[Target; 2]> {
    let options: Vec<Target> = (0..n)
        .filter(|&v| v != r)
        .map(Target::Internal)
        .chain((0..m).map(Target::Ground))
        .collect();
    let mut out = Vec::new();
    for &a in &options {
        for &b in &options {
            if a != b {
                out.push([a, b]);
            }
        }
    }
    out
}

fn product<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    choices.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut p = prefix.clone();
                    p.push(o.clone());
                    p
                })
            })
            .collect()
    })
}

/// All plain admissible graphs with `n` type-I and `m` type-II vertices.
pub fn enumerate(n: usize, m: usize, cap: usize) -> Result<Vec<ColoredGraph>> {
    check_cap(n, cap)?;
    let choices: Vec<Vec<[Target; 2]>> = (0..n).map(|r| plain_pairs(n, m, r)).collect();
    let mut out: Vec<ColoredGraph> = product(&choices)
        .into_iter()
        .map(|targets| ColoredGraph {
            n,
            m,
            colors: vec![[Color::Plus; 2]; n],
            targets,
        })
        .collect();
    out.sort();
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct ColoredOptions {
    /// Require exactly one edge to infinity.
    pub with_infinity: bool,
    pub cap: usize,
    pub max_graphs: usize,
}

impl Default for ColoredOptions {
    fn default() -> Self {
        ColoredOptions {
            with_infinity: false,
            cap: DEFAULT_GRAPH_CAP,
            max_graphs: DEFAULT_MAX_GRAPHS,
        }
    }
}

type Slot = (Target, Color);

fn colored_pairs(n: usize, m: usize, r: usize, infinity: bool) -> Vec<[Slot; 2]> {
    let mut slots: Vec<Slot> = Vec::new();
    for t in (0..n)
        .filter(|&v| v != r)
        .map(Target::Internal)
        .chain((0..m).map(Target::Ground))
    {
        slots.push((t, Color::Plus));
        slots.push((t, Color::Minus));
    }
    if infinity {
        slots.push((Target::Infinity, Color::Minus));
    }
    let mut out = Vec::new();
    for &a in &slots {
        for &b in &slots {
            if a != b {
                out.push([a, b]);
            }
        }
    }
    out
}

/// All admissible 2-colorings, optionally with one edge to infinity.
pub fn enumerate_colored(n: usize, m: usize, opts: ColoredOptions) -> Result<Vec<ColoredGraph>> {
    check_cap(n, opts.cap)?;
    let choices: Vec<Vec<[Slot; 2]>> = (0..n)
        .map(|r| colored_pairs(n, m, r, opts.with_infinity))
        .collect();
    let estimate = choices
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
        .unwrap_or(usize::MAX);
    if estimate > opts.max_graphs {
        return Err(Error::Cap {
            requested: estimate,
            cap: opts.max_graphs,
        });
    }
    let mut out = Vec::new();
    for pick in product(&choices) {
        let infinities = pick
            .iter()
            .flatten()
            .filter(|s| s.0 == Target::Infinity)
            .count();
        if infinities != usize::from(opts.with_infinity) {
            continue;
        }
        out.push(ColoredGraph {
            n,
            m,
            targets: pick.iter().map(|p| [p[0].0, p[1].0]).collect(),
            colors: pick.iter().map(|p| [p[0].1, p[1].1]).collect(),
        });
    }
    out.sort();
    Ok(out)
}

/// How edge labels map to coordinates of `g*`.
#[derive(Clone, Debug)]
pub struct Splitting {
    /// Coordinate indices for `+` edges.
    pub plus: Vec<usize>,
    /// Coordinate indices for `-` edges; also indexes the output components
    /// of graphs with an edge to infinity.
    pub minus: Vec<usize>,
    /// Coordinates frozen at a value (restriction to an affine subspace).
    pub frozen: Vec<Option<RatExpr>>,
    /// Names of the free coordinates, the generators of targets and results.
    pub vars: Arc<[String]>,
}

impl Splitting {
    /// Plain setting: every label ranges over all of `g`, nothing frozen.
    pub fn full(g: &LieAlgebra) -> Self {
        let all: Vec<usize> = (0..g.dim()).collect();
        Splitting {
            plus: all.clone(),
            minus: all,
            frozen: vec![None; g.dim()],
            vars: gens_of(g.names()),
        }
    }

    /// `+` over `q`, `-` over `h`, with `h`-coordinates frozen at the coset
    /// space's values. Use with the coset space's adapted algebra.
    pub fn from_coset(space: &CosetSpace) -> Self {
        let nq = space.q_gens().len();
        let n = nq + space.h_count();
        let mut frozen = vec![None; n];
        for (j, v) in space.h_values().iter().enumerate() {
            frozen[nq + j] = Some(v.clone());
        }
        Splitting {
            plus: (0..nq).collect(),
            minus: (nq..n).collect(),
            frozen,
            vars: space.q_gens().clone(),
        }
    }

    fn var_index(&self, coord: usize) -> Option<usize> {
        if self.frozen[coord].is_some() {
            return None;
        }
        Some(self.frozen[..coord].iter().filter(|f| f.is_none()).count())
    }
}

struct Compiler<'a> {
    g: &'a LieAlgebra,
    graph: &'a ColoredGraph,
    split: &'a Splitting,
    targets: &'a [Poly<RatExpr>],
}

impl Compiler<'_> {
    fn range(&self, c: Color) -> &[usize] {
        match c {
            Color::Plus => &self.split.plus,
            Color::Minus => &self.split.minus,
        }
    }

    /// `π^{ij}` as a polynomial in the free coordinates.
    fn pi(&self, i: usize, j: usize) -> Poly<RatExpr> {
        let c = self.g.structure_constant(i, j);
        let mut p = Poly::zero(self.split.vars.clone());
        let nv = self.split.vars.len();
        for (k, x) in c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match (&self.split.frozen[k], self.split.var_index(k)) {
                (Some(v), _) => p.add_term(vec![0; nv], x.times(v)),
                (None, Some(vi)) => {
                    let mut e = vec![0; nv];
                    e[vi] = 1;
                    p.add_term(e, x.clone());
                }
                _ => unreachable!(),
            }
        }
        p
    }

    /// Applies `∂_{k}` for each label in `labels` to `p`; derivatives along
    /// frozen coordinates act on the unrestricted function, which for the
    /// linear `π` is the structure constant itself.
    fn derive_pi(&self, i: usize, j: usize, labels: &[usize]) -> Poly<RatExpr> {
        match labels {
            [] => self.pi(i, j),
            [k] => Poly::constant(
                self.split.vars.clone(),
                self.g.structure_constant(i, j)[*k].clone(),
            ),
            _ => Poly::zero(self.split.vars.clone()),
        }
    }

    fn derive_target(&self, p: &Poly<RatExpr>, labels: &[usize]) -> Poly<RatExpr> {
        let nv = self.split.vars.len();
        let mut alpha = vec![0; nv];
        for &k in labels {
            match self.split.var_index(k) {
                Some(vi) => alpha[vi] += 1,
                None => return Poly::zero(self.split.vars.clone()),
            }
        }
        p.derive_multi(&alpha)
    }

    fn run(&self) -> Vec<Poly<RatExpr>> {
        let edges: Vec<(usize, usize, Target, Color)> = self.graph.edges().collect();
        let inf = self.graph.infinity_edge();
        let ncomp = if inf.is_some() {
            self.split.minus.len()
        } else {
            1
        };
        let mut out = vec![Poly::zero(self.split.vars.clone()); ncomp];
        let mut labels = vec![0usize; edges.len()];
        self.assign(0, &edges, &mut labels, inf, &mut out);
        out
    }

    fn assign(
        &self,
        e: usize,
        edges: &[(usize, usize, Target, Color)],
        labels: &mut Vec<usize>,
        inf: Option<usize>,
        out: &mut [Poly<RatExpr>],
    ) {
        if e == edges.len() {
            let term = self.evaluate(edges, labels);
            if !term.is_zero() {
                let comp = inf.map_or(0, |i| {
                    self.split
                        .minus
                        .iter()
                        .position(|&x| x == labels[i])
                        .unwrap()
                });
                out[comp] = out[comp].add(&term);
            }
            return;
        }
        for &k in self.range(edges[e].3) {
            labels[e] = k;
            // Both labels of a vertex are known at its second edge.
            if e % 2 == 1
                && self
                    .g
                    .structure_constant(labels[e - 1], k)
                    .iter()
                    .all(|x| x.is_zero())
            {
                continue;
            }
            self.assign(e + 1, edges, labels, inf, out);
        }
    }

    fn evaluate(&self, edges: &[(usize, usize, Target, Color)], labels: &[usize]) -> Poly<RatExpr> {
        let incoming = |t: Target| -> Vec<usize> {
            edges
                .iter()
                .zip(labels)
                .filter(|(e, _)| e.2 == t)
                .map(|(_, &l)| l)
                .collect()
        };
        let mut acc = Poly::one(self.split.vars.clone());
        for r in 0..self.graph.n {
            let f = self.derive_pi(
                labels[2 * r],
                labels[2 * r + 1],
                &incoming(Target::Internal(r)),
            );
            if f.is_zero() {
                return f;
            }
            acc = acc.mul(&f);
        }
        for (k, t) in self.targets.iter().enumerate() {
            let f = self.derive_target(t, &incoming(Target::Ground(k)));
            if f.is_zero() {
                return f;
            }
            acc = acc.mul(&f);
        }
        acc
    }
}

/// The operator of `graph` for the linear Poisson structure
/// `π^{ij} = Σ_k c_{ij}^k x_k` applied to `targets` (one per ground vertex).
/// With an edge to infinity the result has one component per `-` label.
pub fn compile_operator(
    graph: &ColoredGraph,
    g: &LieAlgebra,
    split: &Splitting,
    targets: &[Poly<RatExpr>],
) -> Result<Vec<Poly<RatExpr>>> {
    graph.check()?;
    if targets.len() != graph.m {
        return Err(Error::Shape(format!(
            "graph has {} ground vertices but {} targets were given",
            graph.m,
            targets.len()
        )));
    }
    if split.frozen.len() != g.dim() {
        return Err(Error::Shape("splitting does not match the algebra".into()));
    }
    let targets: Vec<Poly<RatExpr>> = targets
        .iter()
        .map(|t| {
            if t.gens()[..] == split.vars[..] {
                Ok(t.clone())
            } else {
                let tt = t.trimmed();
                match tt.gens().iter().find(|x| !split.vars.contains(x)) {
                    Some(x) => Err(Error::UnknownSymbol(x.clone())),
                    None => Ok(tt.embed(&split.vars)),
                }
            }
        })
        .collect::<Result<_>>()?;
    Ok(Compiler {
        g,
        graph,
        split,
        targets: &targets,
    }
    .run())
}

/// A weighted two-target graph as a bidifferential operator for star products.
pub fn graph_bidifferential(
    graph: ColoredGraph,
    weight: RatExpr,
    g: LieAlgebra,
    split: Splitting,
) -> Bidifferential {
    Arc::new(move |f, h| {
        let r = compile_operator(&graph, &g, &split, &[f.clone(), h.clone()])?;
        Ok(r[0].scale(&weight))
    })
}

/// The first-order reduction graph: one vertex, a `-` edge to infinity and a
/// `+` edge to `F`.
pub fn order_one_reduction_graph() -> ColoredGraph {
    ColoredGraph::new(
        1,
        vec![[Target::Infinity, Target::Ground(0)]],
        vec![[Color::Minus, Color::Plus]],
    )
    .expect("admissible")
}

/// The first-order product graph with edges to `F` then `G`.
pub fn order_one_product_graph() -> ColoredGraph {
    ColoredGraph::plain(2, vec![[Target::Ground(0), Target::Ground(1)]]).expect("admissible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::IdealSign;
    use crate::example;
    use crate::expr::parse_poly;

    /// Independent oracle: every assignment of two targets per vertex, then
    /// filtering by the admissibility predicate.
    fn oracle_count(n: usize, m: usize) -> usize {
        let all: Vec<Target> = (0..n)
            .map(Target::Internal)
            .chain((0..m).map(Target::Ground))
            .collect();
        let mut count = 0;
        let total = all.len().pow(2 * n as u32);
        for code in 0..total {
            let mut c = code;
            let mut targets = Vec::new();
            for _ in 0..n {
                let a = all[c % all.len()];
                c /= all.len();
                let b = all[c % all.len()];
                c /= all.len();
                targets.push([a, b]);
            }
            let g = ColoredGraph {
                n,
                m,
                colors: vec![[Color::Plus; 2]; n],
                targets,
            };
            if g.is_admissible() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn plain_counts_match_oracle() {
        assert_eq!(enumerate(1, 2, 4).unwrap().len(), 2);
        assert_eq!(enumerate(0, 2, 4).unwrap().len(), 1);
        for n in 0..=3 {
            for m in 1..=2 {
                let list = enumerate(n, m, 4).unwrap();
                assert!(list.iter().all(|g| g.is_admissible()));
                assert_eq!(list.len(), oracle_count(n, m), "n={n} m={m}");
                let mut dedup = list.clone();
                dedup.dedup();
                assert_eq!(dedup.len(), list.len());
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate(5, 2, 4),
            Err(Error::Cap {
                requested: 5,
                cap: 4
            })
        ));
        let opts = ColoredOptions {
            max_graphs: 10,
            ..Default::default()
        };
        assert!(matches!(
            enumerate_colored(2, 2, opts),
            Err(Error::Cap { .. })
        ));
    }

    #[test]
    fn encoding_round_trips() {
        let g: ColoredGraph = "1;2;edges=[(0,1,+),(0,2,+)];inf=-".parse().unwrap();
        assert_eq!(g, order_one_product_graph());
        assert_eq!(g.to_string(), "1;2;edges=[(0,1,+),(0,2,+)];inf=-");
        let r = order_one_reduction_graph();
        assert_eq!(r.to_string(), "1;1;edges=[(0,inf,-),(0,1,+)];inf=0");
        assert_eq!(r.to_string().parse::<ColoredGraph>().unwrap(), r);
        let opts = ColoredOptions {
            with_infinity: true,
            ..Default::default()
        };
        for g in enumerate_colored(2, 1, opts).unwrap() {
            assert_eq!(g.to_string().parse::<ColoredGraph>().unwrap(), g);
        }
        assert!("1;2;edges=[(0,0,+),(0,2,+)];inf=-"
            .parse::<ColoredGraph>()
            .is_err());
        assert!("1;2;edges=[(0,1,+),(0,1,+)];inf=-"
            .parse::<ColoredGraph>()
            .is_err());
        assert!("1;1;edges=[(0,inf,-),(0,1,+)];inf=-"
            .parse::<ColoredGraph>()
            .is_err());
    }

    #[test]
    fn order_one_reduction_family() {
        let opts = ColoredOptions {
            with_infinity: true,
            ..Default::default()
        };
        let list = enumerate_colored(1, 1, opts).unwrap();
        assert!(list.contains(&order_one_reduction_graph()));
        assert_eq!(
            order_one_reduction_graph().family(),
            GraphFamily::Bernoulli(1)
        );
        for g in &list {
            assert!(g.is_admissible());
            assert_eq!(g.family(), GraphFamily::Bernoulli(1));
        }
    }

    #[test]
    fn order_two_families_partition() {
        let opts = ColoredOptions {
            with_infinity: true,
            ..Default::default()
        };
        let list = enumerate_colored(2, 1, opts).unwrap();
        let (mut b, mut bw, mut other) = (0, 0, 0);
        for g in &list {
            let into_f = g.edges().filter(|e| e.2 == Target::Ground(0)).count();
            match g.family() {
                GraphFamily::Bernoulli(2) => {
                    assert_eq!(into_f, 2);
                    b += 1;
                    // A Bernoulli graph has a vertex receiving no edge.
                    assert!((0..2).any(|v| g.in_degree(v) == 0));
                }
                GraphFamily::BernoulliWheel(2) => {
                    assert_eq!(into_f, 1);
                    bw += 1;
                }
                GraphFamily::Other => {
                    assert!(into_f != 1 && into_f != 2);
                    other += 1;
                }
                f => panic!("unexpected {f:?}"),
            }
        }
        assert_eq!(b + bw + other, list.len());
        assert!(b > 0 && bw > 0 && other > 0);
    }

    #[test]
    fn order_one_product_is_the_bracket() {
        let g = example::algebra();
        let split = Splitting::full(&g);
        let f = parse_poly("U^2*X + V", &split.vars).unwrap();
        let h = parse_poly("V*X + U*Z", &split.vars).unwrap();
        let fg = order_one_product_graph();
        let gf = ColoredGraph::plain(2, vec![[Target::Ground(1), Target::Ground(0)]]).unwrap();
        let half = RatExpr::from_rational(crate::poly::rat(1, 2));
        let sum = compile_operator(&fg, &g, &split, &[f.clone(), h.clone()]).unwrap()[0]
            .scale(&half)
            .sub(
                &compile_operator(&gf, &g, &split, &[f.clone(), h.clone()]).unwrap()[0]
                    .scale(&half),
            );
        // Direct bracket {F,G} = Σ c_ij^k x_k ∂_i F ∂_j G.
        let mut direct = Poly::zero(split.vars.clone());
        for i in 0..5 {
            for j in 0..5 {
                for (k, c) in g.structure_constant(i, j).iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let xk = Poly::var(split.vars.clone(), &split.vars[k]).unwrap();
                    direct = direct.add(
                        &xk.mul(&f.derive_index(i, 1))
                            .mul(&h.derive_index(j, 1))
                            .scale(c),
                    );
                }
            }
        }
        assert_eq!(sum, direct);
    }

    #[test]
    fn vanishing_patterns() {
        let g = example::algebra();
        let split = Splitting::full(&g);
        let one = Poly::one(split.vars.clone());
        let u = parse_poly("U", &split.vars).unwrap();
        assert!(compile_operator(
            &order_one_product_graph(),
            &g,
            &split,
            &[one.clone(), u.clone()]
        )
        .unwrap()[0]
            .is_zero());
        // Two edges into the same ground vertex need a second derivative.
        let double = ColoredGraph::plain(
            2,
            vec![
                [Target::Ground(0), Target::Ground(1)],
                [Target::Ground(0), Target::Ground(1)],
            ],
        )
        .unwrap();
        assert!(
            compile_operator(&double, &g, &split, &[u.clone(), u.clone()]).unwrap()[0].is_zero()
        );
        // An internal vertex receiving two edges is killed by linearity of π.
        let into_one = ColoredGraph::plain(
            2,
            vec![
                [Target::Ground(0), Target::Ground(1)],
                [Target::Internal(0), Target::Ground(0)],
                [Target::Internal(0), Target::Ground(1)],
            ],
        )
        .unwrap();
        let f = parse_poly("U^2*X^2*V^2", &split.vars).unwrap();
        assert!(compile_operator(&into_one, &g, &split, &[f.clone(), f]).unwrap()[0].is_zero());
    }

    #[test]
    fn reduction_graph_is_the_adjoint_operator() {
        let g = example::algebra();
        let q: Vec<_> = ["Z", "U", "V"]
            .iter()
            .map(|n| (n.to_string(), example::vector(n)))
            .collect();
        let h: Vec<_> = ["X", "E"]
            .iter()
            .map(|n| (n.to_string(), example::vector(n)))
            .collect();
        let space = CosetSpace::new(
            &g,
            &q,
            &h,
            &example::character(),
            IdealSign::Plus,
            &example::locus(),
        )
        .unwrap();
        let split = Splitting::from_coset(&space);
        let graph = order_one_reduction_graph();
        for src in ["2*Z*U - V^2", "U", "U^2*V + Z", "V^3*U^2"] {
            let f = parse_poly(src, space.q_gens()).unwrap();
            let compiled = compile_operator(
                &graph,
                space.adapted_algebra(),
                &split,
                std::slice::from_ref(&f),
            )
            .unwrap();
            for (j, c) in compiled.iter().enumerate() {
                assert_eq!(c, &space.d_h(j, &f).unwrap(), "{src}");
            }
        }
        let inv = parse_poly("2*Z*U - V^2", space.q_gens()).unwrap();
        assert!(
            compile_operator(&graph, space.adapted_algebra(), &split, &[inv])
                .unwrap()
                .iter()
                .all(|c| c.is_zero())
        );
    }
}
