//! Faber-Schauder hat bases on dyadic nodes of `[a, b]` and `[a, b]²`.
//!
//! At level `k` the 1D basis has `q = 2^k + 1` functions, listed in the
//! usual Schauder order of their nodes `a, b, (a+b)/2, ...`: the constant
//! `1`, the ramp `(t - a)/(b - a)`, then one hat per remaining node whose
//! support spans the two neighbouring nodes of the previous level. All of
//! them are nonnegative, and the projection onto the first `q` of them is
//! linear interpolation at the level-`k` nodes, so it maps nonnegative
//! functions to nonnegative functions. The interval projection applies it
//! to both endpoints, which therefore keeps `lower <= upper`.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::ivfun::{
    node_count, piecewise_linear_integral, Domain, GridFun, GridFun2D, IvFun1D, IvFun2D, MAX_LEVEL,
};

/// The first `2^k + 1` Faber-Schauder functions on `domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicBasis1D {
    level: u32,
    domain: Domain,
    /// Grid index of the node attached to each basis function, in Schauder order.
    order: Vec<usize>,
}

impl DyadicBasis1D {
    /// Basis of `level` on `[0, 1]`.
    pub fn new(level: u32) -> Result<Self> {
        Self::on(Domain::UNIT, level)
    }

    pub fn on(domain: Domain, level: u32) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::Argument(format!(
                "dyadic level {level} exceeds maximum {MAX_LEVEL}"
            )));
        }
        let cells = 1usize << level;
        let mut order = vec![0, cells];
        for l in 1..=level {
            let stride = cells >> l;
            order.extend((0..(1usize << (l - 1))).map(|m| (2 * m + 1) * stride));
        }
        Ok(DyadicBasis1D {
            level,
            domain,
            order,
        })
    }

    /// Transports the basis to `[a, b]` along `t ↦ a + (b - a) t`.
    pub fn rescale(&self, a: f64, b: f64) -> Result<Self> {
        Self::on(Domain::new(a, b)?, self.level)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Number of basis functions, `q = 2^k + 1`.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Nodes in Schauder order.
    pub fn ordered_nodes(&self) -> Vec<f64> {
        self.order
            .iter()
            .map(|&j| self.domain.dyadic_node(self.level, j))
            .collect()
    }

    /// Nodes in increasing order.
    pub fn sorted_nodes(&self) -> Vec<f64> {
        self.domain.dyadic_nodes(self.level)
    }

    fn cells(&self) -> usize {
        1usize << self.level
    }

    /// Grid index of the node of basis function `m` and the half-width of
    /// its support in cells (zero for the constant and the ramp).
    fn support(&self, m: usize) -> (usize, usize) {
        if m < 2 {
            return (self.order[m], 0);
        }
        // Function m >= 2 sits on level l where 2^(l-1) + 1 <= m < 2^l + 1.
        let l = usize::BITS - (m - 1).leading_zeros();
        (self.order[m], self.cells() >> l)
    }

    /// Value of the `m`-th basis function at `t`.
    pub fn basis_value(&self, m: usize, t: f64) -> Result<f64> {
        if m >= self.len() {
            return Err(Error::Argument(format!(
                "basis index {m} out of range for {} functions",
                self.len()
            )));
        }
        let t = self.domain.check(t)?;
        let x = (t - self.domain.a()) / self.domain.length();
        Ok(match m {
            0 => 1.0,
            1 => x,
            _ => {
                let (c, h) = self.support(m);
                let cells = self.cells() as f64;
                (1.0 - (x * cells - c as f64).abs() / h as f64).max(0.0)
            }
        })
    }

    /// Node values of the `m`-th basis function; every basis function is
    /// piecewise linear on the level grid.
    pub fn basis_nodal(&self, m: usize) -> Vec<f64> {
        let q = self.cells() + 1;
        match m {
            0 => vec![1.0; q],
            1 => (0..q).map(|j| j as f64 / self.cells() as f64).collect(),
            _ => {
                let (c, h) = self.support(m);
                (0..q)
                    .map(|j| (1.0 - (j as f64 - c as f64).abs() / h as f64).max(0.0))
                    .collect()
            }
        }
    }

    /// `∫_{t0}^{t1} f_m(t) dt`, exact.
    pub fn basis_integral(&self, m: usize, t0: f64, t1: f64) -> Result<f64> {
        let t0 = self.domain.check(t0)?;
        let t1 = self.domain.check(t1)?;
        if t0 > t1 {
            return Err(Error::Argument(format!(
                "integration bounds reversed: {t0} > {t1}"
            )));
        }
        Ok(piecewise_linear_integral(
            self.domain,
            &self.basis_nodal(m),
            t0,
            t1,
        ))
    }

    /// `Π_q(g)`: node values (increasing order) of the interpolant of `g`.
    pub fn project_scalar(&self, g: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        self.sorted_nodes()
            .into_iter()
            .map(|t| {
                let v = g(t);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite(format!("sample of g at t = {t}")))
                }
            })
            .collect()
    }

    /// `P_q(f) = [Π_q(lower), Π_q(upper)]` as a grid function.
    pub fn project_interval(&self, f: &IvFun1D) -> Result<GridFun> {
        self.check_domain(f.domain())?;
        GridFun::sample(self.domain, self.level, |t| f.eval(t))
    }

    /// Schauder coefficients (in basis order) of the interpolant with the
    /// given node values, by level-wise interpolation residuals.
    pub fn coefficients(&self, nodal: &[f64]) -> Result<Vec<f64>> {
        let q = self.cells() + 1;
        if nodal.len() != q {
            return Err(Error::Argument(format!(
                "expected {q} node values, got {}",
                nodal.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(q);
        coeffs.push(nodal[0]);
        coeffs.push(nodal[q - 1] - nodal[0]);
        for m in 2..q {
            let (c, h) = self.support(m);
            coeffs.push(nodal[c] - 0.5 * (nodal[c - h] + nodal[c + h]));
        }
        Ok(coeffs)
    }

    /// `Σ c_m f_m(t)`.
    pub fn synthesize(&self, coeffs: &[f64], t: f64) -> Result<f64> {
        if coeffs.len() != self.len() {
            return Err(Error::Argument(format!(
                "expected {} coefficients, got {}",
                self.len(),
                coeffs.len()
            )));
        }
        let mut sum = 0.0;
        for (m, c) in coeffs.iter().enumerate() {
            sum += c * self.basis_value(m, t)?;
        }
        Ok(sum)
    }

    /// Coefficients `α_k` of `Π(lower)` and `β_k` of `Π(upper)`.
    pub fn gh_decompose(&self, f: &IvFun1D) -> Result<GHDecomposition> {
        let p = self.project_interval(f)?;
        Ok(GHDecomposition {
            alpha: self.coefficients(p.lower())?,
            beta: self.coefficients(p.upper())?,
        })
    }

    /// `∫_{t0}^{t1} P_q(f)`, assembled from the decomposition and the
    /// integrals of the basis functions.
    pub fn integrate_projection(&self, f: &IvFun1D, t0: f64, t1: f64) -> Result<Interval> {
        let dec = self.gh_decompose(f)?;
        let integrals = (0..self.len())
            .map(|m| self.basis_integral(m, t0, t1))
            .collect::<Result<Vec<_>>>()?;
        dec.combine(&integrals)
    }

    fn check_domain(&self, domain: Domain) -> Result<()> {
        if domain != self.domain {
            return Err(Error::Argument(format!(
                "function domain {domain:?} differs from basis domain {:?}",
                self.domain
            )));
        }
        Ok(())
    }
}

/// Basis coefficients of the two endpoints of a projected interval function.
///
/// With `φ_k = [f_k, f_k]` and `ψ_k = [0, f_k]`, the projection is
/// `Σ α_k φ_k + (Σ_{β_k ≥ α_k} (β_k - α_k) ψ_k ⊖ Σ_{β_k < α_k} |β_k - α_k| ψ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GHDecomposition {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl GHDecomposition {
    /// Indices with `β_k - α_k >= 0`.
    pub fn nonnegative_indices(&self) -> Vec<usize> {
        (0..self.alpha.len())
            .filter(|&k| self.beta[k] - self.alpha[k] >= 0.0)
            .collect()
    }

    /// Indices with `β_k - α_k < 0`.
    pub fn negative_indices(&self) -> Vec<usize> {
        (0..self.alpha.len())
            .filter(|&k| self.beta[k] - self.alpha[k] < 0.0)
            .collect()
    }

    /// Combines per-basis quantities `w_k >= 0` (values `f_k(t)` or
    /// integrals `∫ f_k`) through the gH formula.
    fn combine(&self, w: &[f64]) -> Result<Interval> {
        let mut base = 0.0;
        let mut pos = 0.0;
        let mut neg = 0.0;
        for (k, &wk) in w.iter().enumerate() {
            base += self.alpha[k] * wk;
            let d = self.beta[k] - self.alpha[k];
            if d >= 0.0 {
                pos += d * wk;
            } else {
                neg += -d * wk;
            }
        }
        let spread = Interval::new(0.0, pos)?.gh_sub(Interval::new(0.0, neg)?)?;
        Interval::degenerate(base)?.add(spread)
    }

    /// Value of the reconstruction at `t`.
    pub fn eval(&self, basis: &DyadicBasis1D, t: f64) -> Result<Interval> {
        if self.alpha.len() != basis.len() || self.beta.len() != basis.len() {
            return Err(Error::Argument(
                "decomposition and basis sizes differ".into(),
            ));
        }
        let w = (0..basis.len())
            .map(|m| basis.basis_value(m, t))
            .collect::<Result<Vec<_>>>()?;
        self.combine(&w)
    }
}

/// Tensor-product hat basis on the `q × q` dyadic grid of `[a, b]²`.
/// The projection onto its first `q²` functions is bilinear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicBasis2D {
    factor: DyadicBasis1D,
}

impl DyadicBasis2D {
    pub fn new(level: u32) -> Result<Self> {
        Self::on(Domain::UNIT, level)
    }

    pub fn on(domain: Domain, level: u32) -> Result<Self> {
        Ok(DyadicBasis2D {
            factor: DyadicBasis1D::on(domain, level)?,
        })
    }

    pub fn rescale(&self, a: f64, b: f64) -> Result<Self> {
        Ok(DyadicBasis2D {
            factor: self.factor.rescale(a, b)?,
        })
    }

    pub fn level(&self) -> u32 {
        self.factor.level
    }

    pub fn domain(&self) -> Domain {
        self.factor.domain
    }

    /// Projection order `n = q²`.
    pub fn order(&self) -> usize {
        self.factor.len() * self.factor.len()
    }

    /// The 1D factor basis.
    pub fn factor(&self) -> &DyadicBasis1D {
        &self.factor
    }

    /// `f_i(t) f_j(s)`.
    pub fn basis_value(&self, i: usize, j: usize, t: f64, s: f64) -> Result<f64> {
        Ok(self.factor.basis_value(i, t)? * self.factor.basis_value(j, s)?)
    }

    /// Node values (row-major, `t` selects the row) of the bilinear interpolant of `g`.
    pub fn project_scalar(&self, g: impl Fn(f64, f64) -> f64) -> Result<Vec<f64>> {
        let nodes = self.factor.sorted_nodes();
        let mut out = Vec::with_capacity(nodes.len() * nodes.len());
        for &t in &nodes {
            for &s in &nodes {
                let v = g(t, s);
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("sample of g at ({t}, {s})")));
                }
                out.push(v);
            }
        }
        Ok(out)
    }

    /// `P_{q²}(z)`: bilinear interpolation of both endpoints on the grid.
    pub fn project_interval(&self, z: &IvFun2D) -> Result<GridFun2D> {
        self.factor.check_domain(z.domain())?;
        GridFun2D::sample(self.domain(), self.level(), |t, s| z.eval(t, s))
    }

    /// Tensor Schauder coefficients `c[i * q + j]` of the interpolant with
    /// the given row-major node values.
    pub fn coefficients(&self, nodal: &[f64]) -> Result<Vec<f64>> {
        let q = node_count(self.level());
        if nodal.len() != q * q {
            return Err(Error::Argument(format!(
                "expected {} node values, got {}",
                q * q,
                nodal.len()
            )));
        }
        // Transform along s within each row, then along t within each column.
        let mut rows = Vec::with_capacity(q * q);
        for r in nodal.chunks(q) {
            rows.extend(self.factor.coefficients(r)?);
        }
        let mut out = vec![0.0; q * q];
        for j in 0..q {
            let col: Vec<f64> = (0..q).map(|i| rows[i * q + j]).collect();
            for (i, c) in self.factor.coefficients(&col)?.into_iter().enumerate() {
                out[i * q + j] = c;
            }
        }
        Ok(out)
    }
}
