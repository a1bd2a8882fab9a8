//! Continuous interval-valued functions on `[a, b]` and `[a, b]²`.
//!
//! A function is stored as its pair of endpoint functions, either as
//! callables ([`AnalyticFun`]) or as node values on a dyadic grid with
//! piecewise-(bi)linear interpolation ([`GridFun`], [`GridFun2D`]). The
//! distance between two functions is the sup over the domain of the
//! endpoint-wise Hausdorff distance, and the integral is taken endpoint by
//! endpoint.

use std::fmt;
use std::io;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Largest supported dyadic level. `2^20 + 1` nodes is far beyond any
/// resolution the solvers use.
pub const MAX_LEVEL: u32 = 20;

/// Default number of points of an [`EvalGrid`].
pub const DEFAULT_EVAL_POINTS: usize = 1025;

const ABS_QUAD_TOL: f64 = 1e-12;

/// Closed interval `[a, b]` with `a < b`, the domain of a function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Domain {
    a: f64,
    b: f64,
}

impl Domain {
    pub const UNIT: Domain = Domain { a: 0.0, b: 1.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Argument(format!("non-finite domain [{a}, {b}]")));
        }
        if a >= b {
            return Err(Error::Argument(format!(
                "domain requires a < b, got [{a}, {b}]"
            )));
        }
        Ok(Domain { a, b })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Snaps points within rounding distance of the ends back onto the
    /// domain; anything further out is a domain error.
    pub fn check(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.length();
        if !(t >= self.a - slack && t <= self.b + slack) {
            return Err(Error::Domain {
                t,
                a: self.a,
                b: self.b,
            });
        }
        Ok(t.clamp(self.a, self.b))
    }

    /// The `j`-th of the `2^level + 1` dyadic nodes. The last node is `b` exactly.
    pub fn dyadic_node(&self, level: u32, j: usize) -> f64 {
        let cells = 1usize << level;
        if j == cells {
            self.b
        } else {
            self.a + self.length() * (j as f64 / cells as f64)
        }
    }

    pub fn dyadic_nodes(&self, level: u32) -> Vec<f64> {
        (0..=(1usize << level))
            .map(|j| self.dyadic_node(level, j))
            .collect()
    }
}

impl TryFrom<[f64; 2]> for Domain {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Domain::new(v[0], v[1])
    }
}

impl From<Domain> for [f64; 2] {
    fn from(d: Domain) -> Self {
        [d.a, d.b]
    }
}

/// Node count `2^level + 1` of a dyadic grid.
pub fn node_count(level: u32) -> usize {
    (1usize << level) + 1
}

/// Inverse of [`node_count`]: the level `k` with `q = 2^k + 1`, if any.
pub fn level_of(q: usize) -> Option<u32> {
    if q < 2 {
        return None;
    }
    let cells = q - 1;
    if cells.is_power_of_two() && cells.trailing_zeros() <= MAX_LEVEL {
        Some(cells.trailing_zeros())
    } else {
        None
    }
}

fn check_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::Argument(format!(
            "dyadic level {level} exceeds maximum {MAX_LEVEL}"
        )));
    }
    Ok(())
}

/// Points at which the sup in the distance `H` is sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    points: Vec<f64>,
}

impl EvalGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Argument(
                "evaluation grid needs at least two points".into(),
            ));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Argument(
                "evaluation grid has non-finite points".into(),
            ));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument(
                "evaluation grid must be strictly increasing".into(),
            ));
        }
        Ok(EvalGrid { points })
    }

    /// `count` equispaced points from `a` to `b`, both included.
    pub fn uniform(domain: Domain, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Argument(
                "evaluation grid needs at least two points".into(),
            ));
        }
        let n = (count - 1) as f64;
        let points = (0..count)
            .map(|j| {
                if j == count - 1 {
                    domain.b
                } else {
                    domain.a + domain.length() * (j as f64 / n)
                }
            })
            .collect();
        Ok(EvalGrid { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn covers(&self, domain: Domain) -> Result<()> {
        let (first, last) = (self.points[0], self.points[self.points.len() - 1]);
        if first != domain.a || last != domain.b {
            return Err(Error::Argument(format!(
                "evaluation grid spans [{first}, {last}] but the domain is [{}, {}]",
                domain.a, domain.b
            )));
        }
        Ok(())
    }
}

/// Position of `t` in cell coordinates: the cell index and the local
/// coordinate in `[0, 1]`. Points at rounding distance from a node snap to it.
fn locate(domain: Domain, cells: usize, t: f64) -> (usize, f64) {
    let x = (t - domain.a) / domain.length() * cells as f64;
    let nearest = x.round();
    let x = if (x - nearest).abs() <= 1e-12 * cells as f64 {
        nearest
    } else {
        x
    };
    let x = x.clamp(0.0, cells as f64);
    let i = (x.floor() as usize).min(cells - 1);
    (i, x - i as f64)
}

#[inline]
fn lerp(v0: f64, v1: f64, w: f64) -> f64 {
    if w == 0.0 {
        v0
    } else if w == 1.0 {
        v1
    } else {
        (1.0 - w) * v0 + w * v1
    }
}

/// Interval from interpolated endpoints. Interpolation preserves ordering
/// in exact arithmetic; an inversion of a few ulps is a rounding artefact
/// and collapses onto the lower endpoint.
fn interpolated(t: f64, lo: f64, hi: f64) -> Result<Interval> {
    if lo > hi {
        if lo - hi <= 4.0 * f64::EPSILON * (lo.abs() + hi.abs()) {
            return Interval::new(lo, lo);
        }
        return Err(Error::Validity { t, lo, hi });
    }
    Interval::new(lo, hi)
}

/// Exact integral over `[t0, t1]` of the piecewise-linear interpolant of
/// `values` on the uniform grid of `domain`.
pub(crate) fn piecewise_linear_integral(domain: Domain, values: &[f64], t0: f64, t1: f64) -> f64 {
    let cells = values.len() - 1;
    let h = domain.length() / cells as f64;
    let (i0, u0) = locate(domain, cells, t0);
    let (i1, u1) = locate(domain, cells, t1);
    let partial = |j: usize, from: f64, to: f64| {
        let (v0, v1) = (values[j], values[j + 1]);
        h * ((to - from) * v0 + 0.5 * (to * to - from * from) * (v1 - v0))
    };
    if i0 == i1 {
        return partial(i0, u0, u1);
    }
    let mut sum = partial(i0, u0, 1.0);
    for j in (i0 + 1)..i1 {
        sum += 0.5 * h * (values[j] + values[j + 1]);
    }
    sum + partial(i1, 0.0, u1)
}

fn check_range(domain: Domain, t0: f64, t1: f64) -> Result<(f64, f64)> {
    let t0 = domain.check(t0)?;
    let t1 = domain.check(t1)?;
    if t0 > t1 {
        return Err(Error::Argument(format!(
            "integration bounds reversed: {t0} > {t1}"
        )));
    }
    Ok((t0, t1))
}

/// Endpoint function of an analytic interval-valued function.
pub type EndpointFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Interval-valued function given by two callables.
#[derive(Clone)]
pub struct AnalyticFun {
    domain: Domain,
    lower: EndpointFn,
    upper: EndpointFn,
}

impl AnalyticFun {
    pub fn new(
        domain: Domain,
        lower: impl Fn(f64) -> f64 + Send + Sync + 'static,
        upper: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        AnalyticFun {
            domain,
            lower: Arc::new(lower),
            upper: Arc::new(upper),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eval(&self, t: f64) -> Result<Interval> {
        let t = self.domain.check(t)?;
        let (lo, hi) = ((self.lower)(t), (self.upper)(t));
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite(format!("endpoint value at t = {t}")));
        }
        if lo > hi {
            return Err(Error::Validity { t, lo, hi });
        }
        Ok(Interval::from_ordered(lo, hi))
    }

    pub fn integrate(&self, t0: f64, t1: f64) -> Result<Interval> {
        let (t0, t1) = check_range(self.domain, t0, t1)?;
        if t0 == t1 {
            return Ok(Interval::ZERO);
        }
        let lo = adaptive_integral(&*self.lower, t0, t1);
        let hi = adaptive_integral(&*self.upper, t0, t1);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite(format!("integral over [{t0}, {t1}]")));
        }
        interpolated(t1, lo, hi)
    }
}

impl fmt::Debug for AnalyticFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFun")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

pub(crate) fn adaptive_integral(f: &dyn Fn(f64) -> f64, t0: f64, t1: f64) -> f64 {
    quadrature::double_exponential::integrate(f, t0, t1, ABS_QUAD_TOL).integral
}

/// Interval-valued function stored as node values on the dyadic grid of
/// level `k` (`2^k + 1` nodes) with piecewise-linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFun {
    domain: Domain,
    level: u32,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl GridFun {
    /// Validates lengths (`2^k + 1`), finiteness and `lower <= upper` at every node.
    pub fn new(domain: Domain, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Argument(format!(
                "endpoint arrays differ in length ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        let level = level_of(lower.len()).ok_or_else(|| {
            Error::Argument(format!(
                "{} nodes is not a dyadic node count 2^k + 1",
                lower.len()
            ))
        })?;
        for (j, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            let t = domain.dyadic_node(level, j);
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::NonFinite(format!("node value at t = {t}")));
            }
            if lo > hi {
                return Err(Error::Validity { t, lo, hi });
            }
        }
        Ok(GridFun {
            domain,
            level,
            lower,
            upper,
        })
    }

    /// Samples `f` at the dyadic nodes of `level`.
    pub fn sample(
        domain: Domain,
        level: u32,
        mut f: impl FnMut(f64) -> Result<Interval>,
    ) -> Result<Self> {
        check_level(level)?;
        let q = node_count(level);
        let mut lower = Vec::with_capacity(q);
        let mut upper = Vec::with_capacity(q);
        for j in 0..q {
            let v = f(domain.dyadic_node(level, j))?;
            lower.push(v.lo());
            upper.push(v.hi());
        }
        Ok(GridFun {
            domain,
            level,
            lower,
            upper,
        })
    }

    /// The constant function `value`.
    pub fn constant(domain: Domain, level: u32, value: Interval) -> Result<Self> {
        Self::sample(domain, level, |_| Ok(value))
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.domain.dyadic_nodes(self.level)
    }

    pub fn node(&self, j: usize) -> f64 {
        self.domain.dyadic_node(self.level, j)
    }

    pub fn value_at_node(&self, j: usize) -> Interval {
        Interval::from_ordered(self.lower[j], self.upper[j])
    }

    pub fn eval(&self, t: f64) -> Result<Interval> {
        let t = self.domain.check(t)?;
        let (i, w) = locate(self.domain, self.len() - 1, t);
        let lo = lerp(self.lower[i], self.lower[i + 1], w);
        let hi = lerp(self.upper[i], self.upper[i + 1], w);
        interpolated(t, lo, hi)
    }

    /// Exact integral of the piecewise-linear endpoints over `[t0, t1]`.
    pub fn integrate(&self, t0: f64, t1: f64) -> Result<Interval> {
        let (t0, t1) = check_range(self.domain, t0, t1)?;
        let lo = piecewise_linear_integral(self.domain, &self.lower, t0, t1);
        let hi = piecewise_linear_integral(self.domain, &self.upper, t0, t1);
        interpolated(t1, lo, hi)
    }

    /// Exact sup distance to another function on the same grid. Both
    /// differences are piecewise linear on the shared cells, so the sup is
    /// attained at a node.
    pub fn sup_distance(&self, other: &GridFun) -> Result<f64> {
        if self.domain != other.domain || self.level != other.level {
            return Err(Error::Argument(
                "sup distance needs functions on the same grid".into(),
            ));
        }
        Ok(self
            .lower
            .iter()
            .zip(&other.lower)
            .zip(self.upper.iter().zip(&other.upper))
            .map(|((a, b), (c, d))| (a - b).abs().max((c - d).abs()))
            .fold(0.0, f64::max))
    }

    /// Endpoint-wise sum, node by node.
    pub fn add(&self, other: &GridFun) -> Result<GridFun> {
        if self.domain != other.domain || self.level != other.level {
            return Err(Error::Argument(
                "sum needs functions on the same grid".into(),
            ));
        }
        let lower = self
            .lower
            .iter()
            .zip(&other.lower)
            .map(|(a, b)| a + b)
            .collect();
        let upper = self
            .upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| a + b)
            .collect();
        GridFun::new(self.domain, lower, upper)
    }

    /// Writes `t,lower,upper` rows at 17 significant digits.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "lower", "upper"]).map_err(csv_err)?;
        for j in 0..self.len() {
            w.write_record([
                fmt_f64(self.node(j)),
                fmt_f64(self.lower[j]),
                fmt_f64(self.upper[j]),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Format(e.to_string()))
    }

    /// Reads a table written by [`GridFun::write_csv`]. The domain is taken
    /// from the first and last `t`; every `t` must sit on its dyadic node.
    pub fn read_csv<R: io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers().map_err(csv_err)?.clone();
        let expected = ["t", "lower", "upper"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
            return Err(Error::Format(format!(
                "expected header t,lower,upper, found {:?}",
                headers.iter().collect::<Vec<_>>()
            )));
        }
        let mut ts = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let field = |i: usize| -> Result<f64> {
                let raw = rec.get(i).unwrap_or("").trim();
                raw.parse::<f64>().map_err(|_| {
                    Error::Format(format!("row {}: cannot parse {raw:?} as a number", row + 2))
                })
            };
            ts.push(field(0)?);
            lower.push(field(1)?);
            upper.push(field(2)?);
        }
        if ts.len() < 2 {
            return Err(Error::Format("table needs at least two rows".into()));
        }
        let domain = Domain::new(ts[0], ts[ts.len() - 1])?;
        let level = level_of(ts.len()).ok_or_else(|| {
            Error::Format(format!(
                "{} rows is not a dyadic node count 2^k + 1",
                ts.len()
            ))
        })?;
        for (j, &t) in ts.iter().enumerate() {
            let node = domain.dyadic_node(level, j);
            if (t - node).abs() > 1e-12 * domain.length() {
                return Err(Error::Format(format!(
                    "row {}: t = {t} is not the dyadic node {node}",
                    j + 2
                )));
            }
        }
        GridFun::new(domain, lower, upper)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Scientific notation with 17 significant digits; parses back bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A continuous interval-valued function on `[a, b]`.
#[derive(Debug, Clone)]
pub enum IvFun1D {
    Analytic(AnalyticFun),
    Grid(GridFun),
}

impl IvFun1D {
    pub fn analytic(
        domain: Domain,
        lower: impl Fn(f64) -> f64 + Send + Sync + 'static,
        upper: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        IvFun1D::Analytic(AnalyticFun::new(domain, lower, upper))
    }

    pub fn domain(&self) -> Domain {
        match self {
            IvFun1D::Analytic(f) => f.domain(),
            IvFun1D::Grid(g) => g.domain(),
        }
    }

    pub fn eval(&self, t: f64) -> Result<Interval> {
        match self {
            IvFun1D::Analytic(f) => f.eval(t),
            IvFun1D::Grid(g) => g.eval(t),
        }
    }

    /// Grid functions use exact piecewise-linear quadrature, analytic ones
    /// adaptive quadrature to an absolute tolerance of `1e-12`.
    pub fn integrate(&self, t0: f64, t1: f64) -> Result<Interval> {
        match self {
            IvFun1D::Analytic(f) => f.integrate(t0, t1),
            IvFun1D::Grid(g) => g.integrate(t0, t1),
        }
    }

    /// Explicit conversion to the grid representation at `level`.
    pub fn to_grid(&self, level: u32) -> Result<GridFun> {
        match self {
            IvFun1D::Grid(g) if g.level == level => Ok(g.clone()),
            _ => GridFun::sample(self.domain(), level, |t| self.eval(t)),
        }
    }

    pub fn as_grid(&self) -> Option<&GridFun> {
        match self {
            IvFun1D::Grid(g) => Some(g),
            IvFun1D::Analytic(_) => None,
        }
    }
}

impl From<GridFun> for IvFun1D {
    fn from(g: GridFun) -> Self {
        IvFun1D::Grid(g)
    }
}

impl From<AnalyticFun> for IvFun1D {
    fn from(f: AnalyticFun) -> Self {
        IvFun1D::Analytic(f)
    }
}

/// `H(f, h)` approximated by the max of the pointwise Hausdorff distance
/// over `grid`.
pub fn metric_h(f: &IvFun1D, h: &IvFun1D, grid: &EvalGrid) -> Result<f64> {
    let domain = f.domain();
    if domain != h.domain() {
        return Err(Error::Argument(format!(
            "functions live on different domains {:?} and {:?}",
            domain,
            h.domain()
        )));
    }
    grid.covers(domain)?;
    let mut sup = 0.0f64;
    for &t in grid.points() {
        sup = sup.max(f.eval(t)?.dist(h.eval(t)?));
    }
    Ok(sup)
}

/// Pointwise gH difference `f ⊖ h`.
///
/// Two grid functions on the same grid give the grid function of the nodal
/// differences, which is exact whenever the order of the two endpoint
/// differences does not switch inside a cell. Any other combination is
/// composed lazily and stays exact everywhere.
pub fn gh_sub_fun(f: &IvFun1D, h: &IvFun1D) -> Result<IvFun1D> {
    let domain = f.domain();
    if domain != h.domain() {
        return Err(Error::Argument(
            "gH difference of functions on different domains".into(),
        ));
    }
    if let (IvFun1D::Grid(fg), IvFun1D::Grid(hg)) = (f, h) {
        if fg.level == hg.level {
            let mut lower = Vec::with_capacity(fg.len());
            let mut upper = Vec::with_capacity(fg.len());
            for j in 0..fg.len() {
                let d = fg.value_at_node(j).gh_sub(hg.value_at_node(j))?;
                lower.push(d.lo());
                upper.push(d.hi());
            }
            return Ok(IvFun1D::Grid(GridFun::new(domain, lower, upper)?));
        }
    }
    let (f1, h1) = (f.clone(), h.clone());
    let (f2, h2) = (f.clone(), h.clone());
    let pointwise = move |f: &IvFun1D, h: &IvFun1D, t: f64| -> (f64, f64) {
        match (f.eval(t), h.eval(t)) {
            (Ok(a), Ok(b)) => {
                let (dl, du) = (a.lo() - b.lo(), a.hi() - b.hi());
                (dl.min(du), dl.max(du))
            }
            _ => (f64::NAN, f64::NAN),
        }
    };
    Ok(IvFun1D::analytic(
        domain,
        move |t| pointwise(&f1, &h1, t).0,
        move |t| pointwise(&f2, &h2, t).1,
    ))
}

/// Interval-valued sampler on the square `[a, b]²`.
pub type SurfaceFn = Arc<dyn Fn(f64, f64) -> Result<Interval> + Send + Sync>;

/// Interval-valued function on `[a, b]²` given by a callable.
#[derive(Clone)]
pub struct AnalyticFun2D {
    domain: Domain,
    f: SurfaceFn,
}

impl AnalyticFun2D {
    pub fn new(
        domain: Domain,
        f: impl Fn(f64, f64) -> Result<Interval> + Send + Sync + 'static,
    ) -> Self {
        AnalyticFun2D {
            domain,
            f: Arc::new(f),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eval(&self, t: f64, s: f64) -> Result<Interval> {
        let t = self.domain.check(t)?;
        let s = self.domain.check(s)?;
        (self.f)(t, s)
    }

    pub fn slice_integrate(&self, t: f64, s0: f64, s1: f64) -> Result<Interval> {
        let t = self.domain.check(t)?;
        let (s0, s1) = check_range(self.domain, s0, s1)?;
        if s0 == s1 {
            return Ok(Interval::ZERO);
        }
        let endpoint = |upper: bool| {
            adaptive_integral(
                &|s| match (self.f)(t, s) {
                    Ok(v) if upper => v.hi(),
                    Ok(v) => v.lo(),
                    Err(_) => f64::NAN,
                },
                s0,
                s1,
            )
        };
        let (lo, hi) = (endpoint(false), endpoint(true));
        if !lo.is_finite() || !hi.is_finite() {
            // Surface the sampler's own error if it has one.
            self.eval(t, s0)?;
            self.eval(t, s1)?;
            return Err(Error::NonFinite(format!(
                "slice integral at t = {t} over [{s0}, {s1}]"
            )));
        }
        interpolated(t, lo, hi)
    }
}

impl fmt::Debug for AnalyticFun2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFun2D")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// Interval-valued function on `[a, b]²` stored on the `q × q` dyadic grid
/// with bilinear interpolation. Values are row-major with the first
/// argument `t` selecting the row.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFun2D {
    domain: Domain,
    level: u32,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl GridFun2D {
    pub fn sample(
        domain: Domain,
        level: u32,
        mut f: impl FnMut(f64, f64) -> Result<Interval>,
    ) -> Result<Self> {
        check_level(level)?;
        let nodes = domain.dyadic_nodes(level);
        let q = nodes.len();
        let mut lower = Vec::with_capacity(q * q);
        let mut upper = Vec::with_capacity(q * q);
        for &t in &nodes {
            for &s in &nodes {
                let v = f(t, s)?;
                lower.push(v.lo());
                upper.push(v.hi());
            }
        }
        Ok(GridFun2D {
            domain,
            level,
            lower,
            upper,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn side(&self) -> usize {
        node_count(self.level)
    }

    pub fn value_at_node(&self, i: usize, j: usize) -> Interval {
        let k = i * self.side() + j;
        Interval::from_ordered(self.lower[k], self.upper[k])
    }

    pub fn eval(&self, t: f64, s: f64) -> Result<Interval> {
        let t = self.domain.check(t)?;
        let s = self.domain.check(s)?;
        let cells = self.side() - 1;
        let (i, wt) = locate(self.domain, cells, t);
        let (j, ws) = locate(self.domain, cells, s);
        let q = self.side();
        let bilinear = |v: &[f64]| {
            let r0 = lerp(v[i * q + j], v[i * q + j + 1], ws);
            let r1 = lerp(v[(i + 1) * q + j], v[(i + 1) * q + j + 1], ws);
            lerp(r0, r1, wt)
        };
        interpolated(t, bilinear(&self.lower), bilinear(&self.upper))
    }

    /// Restriction to fixed `t`: node values in `s` of the bilinear interpolant.
    fn slice(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let q = self.side();
        let (i, w) = locate(self.domain, q - 1, t);
        let row = |v: &[f64]| -> Vec<f64> {
            (0..q)
                .map(|j| lerp(v[i * q + j], v[(i + 1) * q + j], w))
                .collect()
        };
        (row(&self.lower), row(&self.upper))
    }

    /// Exact integral in `s` over `[s0, s1]` at fixed `t`; the restriction
    /// of a bilinear interpolant to a line `t = const` is piecewise linear.
    pub fn slice_integrate(&self, t: f64, s0: f64, s1: f64) -> Result<Interval> {
        let t = self.domain.check(t)?;
        let (s0, s1) = check_range(self.domain, s0, s1)?;
        let (lo_row, hi_row) = self.slice(t);
        let lo = piecewise_linear_integral(self.domain, &lo_row, s0, s1);
        let hi = piecewise_linear_integral(self.domain, &hi_row, s0, s1);
        interpolated(t, lo, hi)
    }
}

/// A continuous interval-valued function on `[a, b]²`.
#[derive(Debug, Clone)]
pub enum IvFun2D {
    Analytic(AnalyticFun2D),
    Grid(GridFun2D),
}

impl IvFun2D {
    pub fn domain(&self) -> Domain {
        match self {
            IvFun2D::Analytic(f) => f.domain(),
            IvFun2D::Grid(g) => g.domain(),
        }
    }

    pub fn eval(&self, t: f64, s: f64) -> Result<Interval> {
        match self {
            IvFun2D::Analytic(f) => f.eval(t, s),
            IvFun2D::Grid(g) => g.eval(t, s),
        }
    }

    /// `∫_{s0}^{s1} z(t, s) ds` at fixed `t`.
    pub fn slice_integrate(&self, t: f64, s0: f64, s1: f64) -> Result<Interval> {
        match self {
            IvFun2D::Analytic(f) => f.slice_integrate(t, s0, s1),
            IvFun2D::Grid(g) => g.slice_integrate(t, s0, s1),
        }
    }
}
