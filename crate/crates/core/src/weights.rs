//! Monte-Carlo estimation of graph weights: integrals of wedge products of
//! angle 1-forms over configurations of points in the upper half-plane,
//! modulo horizontal translations and dilations.
//!
//! Gauge: the first ground point sits at 0. With two or more ground points
//! the second sits at 1 and the rest are free on the real axis to its right.
//! With a single ground point the first internal vertex lives on the unit
//! circle, parametrized by its argument. Coordinates are ordered vertex by
//! vertex `(x, y)` (or `theta`), then the free ground points, and the wedge
//! is taken in the graph's edge order.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kgraphs::{Color, ColoredGraph, Target};

pub const SAMPLER_ID: &str = "logradial-mixture";
const SHARD: usize = 1 << 14;
/// Scale of the logistic law on log-distances. Anything above 1 keeps the
/// importance ratio bounded near collisions and at infinity.
const LOG_SCALE: f64 = 1.3;

fn check_point(z1: Complex64, z2: Complex64) -> Result<()> {
    if !(z1.re.is_finite() && z1.im.is_finite() && z2.re.is_finite() && z2.im.is_finite()) {
        return Err(Error::Domain("non-finite point".into()));
    }
    if z1 == z2 {
        return Err(Error::Domain(format!("coincident points {z1}")));
    }
    Ok(())
}

fn normalized(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// Angle at `z1` between the geodesic to `+i∞` and the geodesic to `z2`.
pub fn angle_plain(z1: Complex64, z2: Complex64) -> Result<f64> {
    check_point(z1, z2)?;
    if z1.im <= 0.0 {
        return Err(Error::Domain(format!(
            "{z1} is not in the upper half-plane"
        )));
    }
    Ok(normalized(((z2 - z1) / (z2 - z1.conj())).arg()))
}

pub fn angle_colored(z1: Complex64, z2: Complex64, color: Color) -> Result<f64> {
    check_point(z1, z2)?;
    let w = z1 - z2.conj();
    if w == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(format!("{z1} is the mirror image of {z2}")));
    }
    let a = (z1 - z2).arg();
    let b = w.arg();
    Ok(normalized(match color {
        Color::Plus => a + b,
        Color::Minus => a - b,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Point {
    Internal(usize),
    Ground(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleForm {
    pub from: Point,
    pub to: Point,
    pub color: Color,
}

impl AngleForm {
    /// The same form written on the reversed edge.
    pub fn reversed(self) -> AngleForm {
        AngleForm {
            from: self.to,
            to: self.from,
            color: self.color.flipped(),
        }
    }
}

/// A wedge of angle forms on the configuration space of `n` internal and
/// `m` ground points. Unlike graphs, any point may carry any number of forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormIntegrand {
    pub n: usize,
    pub m: usize,
    pub forms: Vec<AngleForm>,
}

impl FormIntegrand {
    pub fn new(n: usize, m: usize, forms: Vec<AngleForm>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain(
                "at least one ground point is needed for the gauge".into(),
            ));
        }
        if 2 * n + m < 2 || (m == 1 && n == 0) {
            return Err(Error::Domain(format!(
                "empty configuration space for n={n}, m={m}"
            )));
        }
        for f in &forms {
            for p in [f.from, f.to] {
                let ok = match p {
                    Point::Internal(i) => i < n,
                    Point::Ground(k) => k < m,
                };
                if !ok {
                    return Err(Error::Domain(format!("form endpoint {p:?} out of range")));
                }
            }
            if f.from == f.to || matches!((f.from, f.to), (Point::Ground(_), Point::Ground(_))) {
                return Err(Error::Domain(format!(
                    "degenerate form {:?} -> {:?}",
                    f.from, f.to
                )));
            }
        }
        Ok(FormIntegrand { n, m, forms })
    }

    /// Edges to infinity carry no form and are dropped.
    pub fn from_graph(graph: &ColoredGraph) -> Result<Self> {
        let forms = graph
            .edges()
            .filter_map(|(src, _, tgt, color)| {
                let to = match tgt {
                    Target::Internal(j) => Point::Internal(j),
                    Target::Ground(k) => Point::Ground(k),
                    Target::Infinity => return None,
                };
                Some(AngleForm {
                    from: Point::Internal(src),
                    to,
                    color,
                })
            })
            .collect();
        FormIntegrand::new(graph.n, graph.m, forms)
    }

    pub fn configuration_dim(&self) -> usize {
        2 * self.n + self.m - 2
    }

    pub fn with_reversed(&self, k: usize) -> Self {
        let mut out = self.clone();
        out.forms[k] = out.forms[k].reversed();
        out
    }

    fn normalization(&self) -> f64 {
        (2.0 * PI).powi(self.forms.len() as i32).recip()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn agrees_with(&self, target: f64, sigmas: f64) -> bool {
        (self.value - target).abs() <= sigmas * self.std_error
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEstimate {
    #[serde(with = "encoded")]
    pub graph: ColoredGraph,
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl WeightEstimate {
    pub fn agrees_with(&self, target: f64, sigmas: f64) -> bool {
        (self.value - target).abs() <= sigmas * self.std_error
    }
}

impl fmt::Display for WeightEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}  {:.6} ± {:.6}  ({} samples, seed {})",
            self.graph, self.value, self.std_error, self.samples, self.seed
        )?;
        if let Some(note) = &self.note {
            write!(f, "  [{note}]")?;
        }
        Ok(())
    }
}

mod encoded {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::kgraphs::ColoredGraph;

    pub fn serialize<S: Serializer>(g: &ColoredGraph, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(g)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ColoredGraph, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}

pub fn estimate_weight(graph: &ColoredGraph, samples: usize, seed: u64) -> Result<WeightEstimate> {
    graph.check()?;
    let integrand = FormIntegrand::from_graph(graph)?;
    let (est, note) = if integrand.forms.len() != integrand.configuration_dim() {
        let note = format!(
            "dimension mismatch: {} forms on a {}-dimensional configuration space",
            integrand.forms.len(),
            integrand.configuration_dim()
        );
        (
            Estimate {
                value: 0.0,
                std_error: 0.0,
                samples: 0,
            },
            Some(note),
        )
    } else {
        (estimate_forms(&integrand, samples, seed)?, None)
    };
    Ok(WeightEstimate {
        graph: graph.clone(),
        value: est.value,
        std_error: est.std_error,
        samples: est.samples,
        seed,
        method: SAMPLER_ID.to_string(),
        note,
    })
}

/// Importance-sampled integral of the normalized wedge. Samples are split
/// into fixed-size shards, each with its own ChaCha stream, and the partial
/// sums are merged in shard order, so the result does not depend on the
/// thread count.
pub fn estimate_forms(integrand: &FormIntegrand, samples: usize, seed: u64) -> Result<Estimate> {
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    if integrand.forms.len() != integrand.configuration_dim() {
        return Ok(Estimate {
            value: 0.0,
            std_error: 0.0,
            samples: 0,
        });
    }
    let layout = Layout::new(integrand.n, integrand.m);
    let scale = integrand.normalization();
    let shards = samples.div_ceil(SHARD);
    let partial: Vec<(f64, f64)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let count = SHARD.min(samples - shard * SHARD);
            let mut cfg = Config::new(&layout);
            let mut jac = vec![0.0; layout.dim * layout.dim];
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..count {
                let v = match layout.sample(&mut rng, &mut cfg) {
                    Some(inv_density) => {
                        integrand_det(integrand, &layout, &cfg, &mut jac) * inv_density * scale
                    }
                    None => 0.0,
                };
                sum += v;
                sq += v * v;
            }
            (sum, sq)
        })
        .collect();
    let (sum, sq) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let nf = samples as f64;
    let mean = sum / nf;
    let var = ((sq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    Ok(Estimate {
        value: mean,
        std_error: (var / nf).sqrt(),
        samples,
    })
}

struct Layout {
    n: usize,
    m: usize,
    dim: usize,
    pinned_scale: bool,
}

impl Layout {
    fn new(n: usize, m: usize) -> Self {
        Layout {
            n,
            m,
            dim: 2 * n + m - 2,
            pinned_scale: m == 1,
        }
    }

    fn internal_coords(&self, i: usize) -> (usize, usize) {
        if self.pinned_scale {
            if i == 0 {
                (0, 1)
            } else {
                (2 * i - 1, 2)
            }
        } else {
            (2 * i, 2)
        }
    }

    fn ground_coord(&self, k: usize) -> Option<usize> {
        (k >= 2).then(|| 2 * self.n + k - 2)
    }

    /// Fills `cfg` and returns the reciprocal proposal density, or `None`
    /// when the draw leaves the upper half-plane.
    fn sample(&self, rng: &mut ChaCha8Rng, cfg: &mut Config) -> Option<f64> {
        let mut log_density = 0.0;
        cfg.ground[0] = 0.0;
        if self.m >= 2 {
            cfg.ground[1] = 1.0;
        }
        for k in 2..self.m {
            let s = logistic(rng);
            cfg.ground[k] = cfg.ground[k - 1] + s.exp();
            log_density += log_logistic_pdf(s) - s;
        }
        for i in 0..self.n {
            if i == 0 && self.pinned_scale {
                let theta = PI * rng.sample::<f64, _>(Open01);
                cfg.internal[0] = Complex64::from_polar(1.0, theta);
                log_density -= PI.ln();
                continue;
            }
            let centers = self.m + i;
            let pick = rng.random_range(0..centers);
            let (center, real) = if pick < self.m {
                (Complex64::new(cfg.ground[pick], 0.0), true)
            } else {
                (cfg.internal[pick - self.m], false)
            };
            let r = logistic(rng).exp();
            let span = if real { PI } else { 2.0 * PI };
            let z = center + Complex64::from_polar(r, span * rng.sample::<f64, _>(Open01));
            if z.im <= 0.0 {
                return None;
            }
            let mut density = 0.0;
            for c in 0..centers {
                let (center, span) = if c < self.m {
                    (Complex64::new(cfg.ground[c], 0.0), PI)
                } else {
                    (cfg.internal[c - self.m], 2.0 * PI)
                };
                let d = (z - center).norm();
                density += log_logistic_pdf(d.ln()).exp() / (span * d * d);
            }
            log_density += (density / centers as f64).ln();
            cfg.internal[i] = z;
        }
        let inv = (-log_density).exp();
        inv.is_finite().then_some(inv)
    }
}

fn logistic(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.sample(Open01);
    LOG_SCALE * (u / (1.0 - u)).ln()
}

fn log_logistic_pdf(s: f64) -> f64 {
    let a = -(s / LOG_SCALE).abs();
    a - 2.0 * a.exp().ln_1p() - LOG_SCALE.ln()
}

struct Config {
    internal: Vec<Complex64>,
    ground: Vec<f64>,
}

impl Config {
    fn new(layout: &Layout) -> Self {
        Config {
            internal: vec![Complex64::new(0.0, 1.0); layout.n],
            ground: vec![0.0; layout.m],
        }
    }

    fn position(&self, p: Point) -> Complex64 {
        match p {
            Point::Internal(i) => self.internal[i],
            Point::Ground(k) => Complex64::new(self.ground[k], 0.0),
        }
    }
}

/// Coordinate indices of a point with the derivative of its position along
/// each coordinate.
fn tangents(layout: &Layout, cfg: &Config, p: Point) -> ([(usize, Complex64); 2], usize) {
    let zero = (0, Complex64::new(0.0, 0.0));
    match p {
        Point::Internal(i) => {
            let (start, len) = layout.internal_coords(i);
            if len == 1 {
                ([(start, Complex64::i() * cfg.internal[i]), zero], 1)
            } else {
                (
                    [
                        (start, Complex64::new(1.0, 0.0)),
                        (start + 1, Complex64::i()),
                    ],
                    2,
                )
            }
        }
        Point::Ground(k) => match layout.ground_coord(k) {
            Some(c) => ([(c, Complex64::new(1.0, 0.0)), zero], 1),
            None => ([zero, zero], 0),
        },
    }
}

/// Gradient of `phi_c(a, b) = arg(a - b) ± arg(a - conj b)` written into `row`.
fn form_row(form: &AngleForm, layout: &Layout, cfg: &Config, row: &mut [f64]) -> bool {
    let a = cfg.position(form.from);
    let b = cfg.position(form.to);
    let w = a - b;
    let wbar = a - b.conj();
    if w.norm_sqr() == 0.0 || wbar.norm_sqr() == 0.0 {
        return false;
    }
    let sign = match form.color {
        Color::Plus => 1.0,
        Color::Minus => -1.0,
    };
    row.iter_mut().for_each(|x| *x = 0.0);
    let (ta, na) = tangents(layout, cfg, form.from);
    for &(c, dz) in &ta[..na] {
        row[c] += (dz / w).im + sign * (dz / wbar).im;
    }
    let (tb, nb) = tangents(layout, cfg, form.to);
    for &(c, dz) in &tb[..nb] {
        row[c] -= (dz / w).im + sign * (dz.conj() / wbar).im;
    }
    true
}

fn integrand_det(integrand: &FormIntegrand, layout: &Layout, cfg: &Config, jac: &mut [f64]) -> f64 {
    let d = layout.dim;
    if d == 0 {
        return 1.0;
    }
    for (r, form) in integrand.forms.iter().enumerate() {
        if !form_row(form, layout, cfg, &mut jac[r * d..(r + 1) * d]) {
            return 0.0;
        }
    }
    determinant(jac, d)
}

/// Gaussian elimination with partial pivoting; destroys `a`.
fn determinant(a: &mut [f64], d: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| a[i * d + col].abs().total_cmp(&a[j * d + col].abs()))
            .unwrap();
        if a[pivot * d + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..d {
                a.swap(pivot * d + k, col * d + k);
            }
            det = -det;
        }
        let p = a[col * d + col];
        det *= p;
        for row in col + 1..d {
            let f = a[row * d + col] / p;
            if f != 0.0 {
                for k in col..d {
                    a[row * d + k] -= f * a[col * d + k];
                }
            }
        }
    }
    det
}
