//! Volterra interval integral equations `X(t) = G(t) + ∫_a^t K(t, s, X(s)) ds`.
//!
//! The integral operator is evaluated through the bilinear projection of
//! `Z(t, s) = K(t, s, X(s))` on the `q × q` dyadic grid, which makes the
//! inner integral exact piecewise-linear quadrature. Picard iteration of the
//! projected operator gives the forward solver; the remaining functions
//! turn collage distances into error bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::ivfun::{metric_h, AnalyticFun2D, Domain, EvalGrid, GridFun, IvFun1D, IvFun2D};
use crate::schauder::DyadicBasis2D;

/// Built-in kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// `K(t, s, u) = (c1 t + c2 s) u`.
    AffineProduct,
    /// `K(t, s, u) = (c1 cos t + c2 cos s) [atan u.lo, atan u.hi]`.
    CosArctan,
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::AffineProduct => "affine-product",
            KernelKind::CosArctan => "cos-arctan",
        }
    }
}

/// A kernel `K(t, s, u) = c(t, s) · g(u)` with a scalar coefficient and an
/// endpoint-wise nondecreasing, 1-Lipschitz map `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub kind: KernelKind,
    pub c1: f64,
    pub c2: f64,
}

impl Kernel {
    pub fn new(kind: KernelKind, c1: f64, c2: f64) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() {
            return Err(Error::Argument(format!(
                "non-finite kernel parameters ({c1}, {c2})"
            )));
        }
        Ok(Kernel { kind, c1, c2 })
    }

    pub fn affine_product(c1: f64, c2: f64) -> Result<Self> {
        Self::new(KernelKind::AffineProduct, c1, c2)
    }

    pub fn cos_arctan(c1: f64, c2: f64) -> Result<Self> {
        Self::new(KernelKind::CosArctan, c1, c2)
    }

    /// `c(t, s)`.
    pub fn coefficient(&self, t: f64, s: f64) -> f64 {
        match self.kind {
            KernelKind::AffineProduct => self.c1 * t + self.c2 * s,
            KernelKind::CosArctan => self.c1 * t.cos() + self.c2 * s.cos(),
        }
    }

    pub fn eval(&self, t: f64, s: f64, u: Interval) -> Result<Interval> {
        let g = match self.kind {
            KernelKind::AffineProduct => u,
            KernelKind::CosArctan => u.map_monotone(f64::atan)?,
        };
        g.scale(self.coefficient(t, s))
    }

    /// `L` with `D(K(t,s,A), K(t,s,B)) <= L D(A,B)` for `t, s` in `domain`.
    pub fn lipschitz(&self, domain: Domain) -> f64 {
        let weight = self.c1.abs() + self.c2.abs();
        match self.kind {
            KernelKind::AffineProduct => weight * domain.a().abs().max(domain.b().abs()),
            KernelKind::CosArctan => weight,
        }
    }
}

/// `X(t) = G(t) + ∫_a^t K(t, s, X(s)) ds` on `[a, b]`.
#[derive(Debug, Clone)]
pub struct VolterraProblem {
    domain: Domain,
    forcing: IvFun1D,
    kernel: Kernel,
}

impl VolterraProblem {
    pub fn new(forcing: IvFun1D, kernel: Kernel) -> Self {
        VolterraProblem {
            domain: forcing.domain(),
            forcing,
            kernel,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn forcing(&self) -> &IvFun1D {
        &self.forcing
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn lipschitz(&self) -> f64 {
        self.kernel.lipschitz(self.domain)
    }

    /// `Z(t, s) = K(t, s, X(s))` as an interval-valued function on the square.
    pub fn integrand(&self, x: &IvFun1D) -> IvFun2D {
        kernel_integrand(self.kernel, x)
    }

    /// The projected operator
    /// `Φ_n(X)(t) = G(t) + ∫_a^t P_n(Z)(t, s) ds`, `n = q²`, returned at the
    /// `q` dyadic nodes of `level`.
    pub fn apply_phi(&self, x: &IvFun1D, level: u32) -> Result<GridFun> {
        if x.domain() != self.domain {
            return Err(Error::Argument(format!(
                "iterate domain {:?} differs from problem domain {:?}",
                x.domain(),
                self.domain
            )));
        }
        let basis = DyadicBasis2D::on(self.domain, level)?;
        let projected = basis.project_interval(&self.integrand(x))?;
        let a = self.domain.a();
        GridFun::sample(self.domain, level, |t| {
            self.forcing
                .eval(t)?
                .add(projected.slice_integrate(t, a, t)?)
        })
    }

    /// Picard iteration `X_j = Φ_n(X_{j-1})` from `x0` (default: the forcing).
    pub fn solve_forward(
        &self,
        level: u32,
        stopping: Stopping,
        x0: Option<&IvFun1D>,
    ) -> Result<PicardRun> {
        stopping.validate()?;
        let start = x0.unwrap_or(&self.forcing);
        if start.domain() != self.domain {
            return Err(Error::Argument(
                "initial iterate lives on another domain".into(),
            ));
        }
        let mut iterates = vec![start.to_grid(level)?];
        let mut successive = Vec::new();
        let status = loop {
            let j = successive.len();
            if let Stopping::Iterations(m) = stopping {
                if j == m {
                    break PicardStatus::Completed;
                }
            }
            if let Stopping::Tolerance { max_iter, .. } = stopping {
                if j == max_iter {
                    break PicardStatus::MaxIterations;
                }
            }
            let prev = &iterates[j];
            let next = self.apply_phi(&IvFun1D::Grid(prev.clone()), level)?;
            let d = next.sup_distance(prev)?;
            successive.push(d);
            iterates.push(next);
            if let Stopping::Tolerance { eps, .. } = stopping {
                if d < eps {
                    break PicardStatus::Converged;
                }
            }
        };
        Ok(PicardRun {
            level,
            iterates,
            successive,
            status,
        })
    }
}

/// `Z(t, s) = K(t, s, X(s))` on the square over the domain of `x`.
pub fn kernel_integrand(kernel: Kernel, x: &IvFun1D) -> IvFun2D {
    let x = x.clone();
    IvFun2D::Analytic(AnalyticFun2D::new(x.domain(), move |t, s| {
        let u = x.eval(s)?;
        kernel.eval(t, s, u).map_err(|e| Error::Kernel {
            t,
            s,
            reason: e.to_string(),
        })
    }))
}

/// When Picard iteration stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stopping {
    /// Stop at the first `j` with `H(X_j, X_{j-1}) < eps`, or give up after `max_iter`.
    Tolerance { eps: f64, max_iter: usize },
    /// Exactly `m` applications of the operator.
    Iterations(usize),
}

impl Stopping {
    pub const DEFAULT_MAX_ITER: usize = 200;

    pub fn tolerance(eps: f64) -> Self {
        Stopping::Tolerance {
            eps,
            max_iter: Self::DEFAULT_MAX_ITER,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Stopping::Tolerance { eps, .. } if !(eps > 0.0 && eps.is_finite()) => Err(
                Error::Argument(format!("tolerance must be positive and finite, got {eps}")),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PicardStatus {
    /// Tolerance reached.
    Converged,
    /// The requested fixed number of iterations was performed.
    Completed,
    /// `max_iter` reached without meeting the tolerance.
    MaxIterations,
}

/// Record of a Picard run: every iterate and the successive distances.
#[derive(Debug, Clone)]
pub struct PicardRun {
    pub level: u32,
    /// `X_0, X_1, ..., X_J` on the level grid.
    pub iterates: Vec<GridFun>,
    /// `H(X_j, X_{j-1})` for `j = 1..=J`.
    pub successive: Vec<f64>,
    pub status: PicardStatus,
}

impl PicardRun {
    /// The last iterate `X_J`.
    pub fn solution(&self) -> &GridFun {
        self.iterates.last().expect("a run always holds X_0")
    }

    pub fn iterations(&self) -> usize {
        self.successive.len()
    }

    pub fn final_distance(&self) -> Option<f64> {
        self.successive.last().copied()
    }

    pub fn converged(&self) -> bool {
        self.status != PicardStatus::MaxIterations
    }
}

/// `α_0 = 1` followed by `α_n = Lⁿ (b - a)ⁿ / n!` for `n = 1..=n_max`.
pub fn caccioppoli_alphas(lipschitz: f64, a: f64, b: f64, n_max: usize) -> Vec<f64> {
    let x = lipschitz * (b - a);
    let mut alphas = Vec::with_capacity(n_max + 1);
    let mut term = 1.0;
    alphas.push(term);
    for n in 1..=n_max {
        term *= x / n as f64;
        alphas.push(term);
    }
    alphas
}

/// Smallest `n >= 1` with `α_n < 1`.
pub fn first_contractive_index(alphas: &[f64]) -> Option<usize> {
    alphas.iter().skip(1).position(|&a| a < 1.0).map(|p| p + 1)
}

/// `Σ_{k>=n} Lᵏ (b - a)ᵏ / k!`, the Picard a-posteriori factor.
pub fn caccioppoli_tail(lipschitz: f64, a: f64, b: f64, n: usize) -> f64 {
    let x = lipschitz * (b - a);
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut term = 1.0;
    for k in 1..=n {
        term *= x / k as f64;
    }
    let mut sum = 0.0;
    let mut k = n;
    loop {
        sum += term;
        k += 1;
        term *= x / k as f64;
        if (k as f64) > x && term <= f64::EPSILON * 1e-3 * sum {
            break;
        }
    }
    sum
}

/// `(Σ_{k=0}^{n-1} α_k) / (1 - α_n) · (dxy + eps)`.
pub fn perturbed_collage_bound(alphas: &[f64], n: usize, dxy: f64, eps: f64) -> Result<f64> {
    if n == 0 || n >= alphas.len() {
        return Err(Error::Argument(format!(
            "index n = {n} outside 1..{}",
            alphas.len()
        )));
    }
    if alphas[n] >= 1.0 {
        return Err(Error::Argument(format!(
            "alpha_{n} = {} is not below 1",
            alphas[n]
        )));
    }
    if dxy.is_nan() || eps.is_nan() || dxy < 0.0 || eps < 0.0 {
        return Err(Error::Argument(format!(
            "distances must be nonnegative, got d = {dxy}, eps = {eps}"
        )));
    }
    let head: f64 = alphas[..n].iter().sum();
    Ok(head / (1.0 - alphas[n]) * (dxy + eps))
}

/// Smallest [`perturbed_collage_bound`] over all admissible `n <= n_max`.
pub fn best_collage_bound(alphas: &[f64], dxy: f64, eps: f64) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for n in 1..alphas.len() {
        if alphas[n] >= 1.0 {
            continue;
        }
        let v = perturbed_collage_bound(alphas, n, dxy, eps)?;
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((n, v));
        }
    }
    best.ok_or_else(|| Error::Argument("no alpha_n below 1 in the sequence".into()))
}

/// `e^{L(b-a)} (H(X, Y) + eps)`: bound on the distance from `X` to the
/// fixed point when `Y` approximates `Φ(X)` within `eps`.
pub fn collage_certificate(
    problem: &VolterraProblem,
    x: &IvFun1D,
    y: &IvFun1D,
    eps: f64,
    grid: &EvalGrid,
) -> Result<f64> {
    let h = metric_h(x, y, grid)?;
    Ok(certificate_factor(problem.lipschitz(), problem.domain()) * (h + eps))
}

/// `e^{L(b-a)}`.
pub fn certificate_factor(lipschitz: f64, domain: Domain) -> f64 {
    (lipschitz * domain.length()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit() -> Domain {
        Domain::UNIT
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn forcing() -> IvFun1D {
        IvFun1D::analytic(unit(), |t| 2.0 * t + 0.125, |t| 2.0 * t + 0.375)
    }

    #[test]
    fn kernel_evaluation() {
        let k = Kernel::affine_product(2.0_f64.sqrt(), -1.0).unwrap();
        // Negative coefficient swaps endpoints.
        let v = k.eval(0.0, 1.0, iv(1.0, 2.0)).unwrap();
        assert_eq!(v, iv(-2.0, -1.0));
        assert_abs_diff_eq!(k.lipschitz(unit()), 2.0_f64.sqrt() + 1.0);

        let k = Kernel::cos_arctan(2.0, 1.0).unwrap();
        let v = k.eval(0.0, 0.0, iv(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(v.hi(), 3.0 * std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
        assert_eq!(v.lo(), 0.0);
        assert_eq!(k.lipschitz(unit()), 3.0);
        assert!(Kernel::cos_arctan(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn kernels_respect_their_lipschitz_constants() {
        let kernels = [
            Kernel::affine_product(2.5, -1.25).unwrap(),
            Kernel::cos_arctan(-2.0, 1.5).unwrap(),
        ];
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for k in kernels {
            let l = k.lipschitz(unit());
            for _ in 0..2000 {
                let (t, s) = (next(), next());
                let a_lo = 6.0 * next() - 3.0;
                let b_lo = 6.0 * next() - 3.0;
                let a = iv(a_lo, a_lo + 2.0 * next());
                let b = iv(b_lo, b_lo + 2.0 * next());
                let lhs = k.eval(t, s, a).unwrap().dist(k.eval(t, s, b).unwrap());
                assert!(lhs <= l * a.dist(b) * (1.0 + 1e-12) + 1e-15);
            }
        }
    }

    #[test]
    fn zero_kernel_returns_forcing() {
        let problem = VolterraProblem::new(forcing(), Kernel::affine_product(0.0, 0.0).unwrap());
        let x = IvFun1D::analytic(unit(), |t| t.sin(), |t| t.sin() + 3.0);
        let y = problem.apply_phi(&x, 3).unwrap();
        assert_eq!(y, forcing().to_grid(3).unwrap());

        let zero = IvFun1D::analytic(unit(), |_| 0.0, |_| 0.0);
        let problem = VolterraProblem::new(zero.clone(), Kernel::affine_product(0.0, 0.0).unwrap());
        let y = problem.apply_phi(&x, 2).unwrap();
        assert!(y.lower().iter().chain(y.upper()).all(|&v| v == 0.0));
    }

    #[test]
    fn zero_kernel_converges_in_one_iteration() {
        let problem = VolterraProblem::new(forcing(), Kernel::cos_arctan(0.0, 0.0).unwrap());
        let run = problem
            .solve_forward(3, Stopping::tolerance(1e-12), None)
            .unwrap();
        assert_eq!(run.iterations(), 1);
        assert_eq!(run.status, PicardStatus::Converged);
        assert_eq!(run.solution(), &forcing().to_grid(3).unwrap());
    }

    #[test]
    fn apply_phi_on_linear_problem_matches_hand_quadrature() {
        // G = [0, 0], K = (t + s) u, X = [1, 2]: ∫_0^t (t + s) ds = 3t²/2,
        // and the bilinear projection of (t + s) is exact.
        let zero = IvFun1D::analytic(unit(), |_| 0.0, |_| 0.0);
        let problem = VolterraProblem::new(zero, Kernel::affine_product(1.0, 1.0).unwrap());
        let x = IvFun1D::analytic(unit(), |_| 1.0, |_| 2.0);
        let y = problem.apply_phi(&x, 2).unwrap();
        for (j, t) in y.nodes().into_iter().enumerate() {
            assert_abs_diff_eq!(y.lower()[j], 1.5 * t * t, epsilon = 1e-15);
            assert_abs_diff_eq!(y.upper()[j], 3.0 * t * t, epsilon = 1e-15);
        }
    }

    #[test]
    fn forcing_shift_moves_upper_endpoint_only() {
        let k = Kernel::cos_arctan(2.0, 1.0).unwrap();
        let base = VolterraProblem::new(forcing(), k);
        let c = 0.3;
        let shifted = VolterraProblem::new(
            IvFun1D::analytic(unit(), |t| 2.0 * t + 0.125, move |t| 2.0 * t + 0.375 + c),
            k,
        );
        let x = IvFun1D::analytic(unit(), |t| t, |t| 1.0 + t);
        let y0 = base.apply_phi(&x, 3).unwrap();
        let y1 = shifted.apply_phi(&x, 3).unwrap();
        assert_eq!(y0.lower(), y1.lower());
        for (a, b) in y0.upper().iter().zip(y1.upper()) {
            assert_abs_diff_eq!(b - a, c, epsilon = 1e-14);
        }
    }

    #[test]
    fn fixed_iteration_count_and_non_convergence() {
        let problem = VolterraProblem::new(forcing(), Kernel::cos_arctan(2.0, 1.0).unwrap());
        let run = problem
            .solve_forward(3, Stopping::Iterations(3), None)
            .unwrap();
        assert_eq!(run.iterations(), 3);
        assert_eq!(run.iterates.len(), 4);
        assert_eq!(run.status, PicardStatus::Completed);

        let run = problem
            .solve_forward(
                3,
                Stopping::Tolerance {
                    eps: 1e-300,
                    max_iter: 4,
                },
                None,
            )
            .unwrap();
        assert_eq!(run.status, PicardStatus::MaxIterations);
        assert!(!run.converged());
        assert!(run.final_distance().unwrap() > 0.0);
        assert!(problem
            .solve_forward(3, Stopping::tolerance(0.0), None)
            .is_err());
    }

    #[test]
    fn successive_distances_decrease() {
        let problem = VolterraProblem::new(forcing(), Kernel::cos_arctan(2.0, 1.0).unwrap());
        let run = problem
            .solve_forward(3, Stopping::tolerance(1e-12), None)
            .unwrap();
        assert!(run.converged());
        for w in run.successive.windows(2) {
            assert!(w[1] < w[0], "{:?}", run.successive);
        }
    }

    #[test]
    fn invalid_kernel_output_names_the_point() {
        // A kernel with a non-finite parameter cannot be built; emulate an
        // overflowing evaluation instead.
        let problem = VolterraProblem::new(
            forcing(),
            Kernel::affine_product(f64::MAX, f64::MAX).unwrap(),
        );
        let x = IvFun1D::analytic(unit(), |_| f64::MAX, |_| f64::MAX);
        match problem.apply_phi(&x, 1) {
            Err(Error::Kernel { t, s, .. }) => {
                assert!((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s))
            }
            other => panic!("expected kernel error, got {other:?}"),
        }
    }

    #[test]
    fn alpha_sequence_examples() {
        let a = caccioppoli_alphas(1.0, 0.0, 1.0, 5);
        assert_eq!(a[0], 1.0);
        assert_eq!(a[1], 1.0);
        assert_abs_diff_eq!(a[3], 1.0 / 6.0, epsilon = 1e-16);

        // Oracle: scan Lⁿ/n! directly with factorials.
        let l = 4.5f64;
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        let oracle = (1..).find(|&n| l.powi(n as i32) / fact(n) < 1.0).unwrap();
        assert_eq!(oracle, 10);
        let a = caccioppoli_alphas(l, 0.0, 1.0, 20);
        assert_eq!(first_contractive_index(&a), Some(10));
    }

    #[test]
    fn tail_sums() {
        assert_abs_diff_eq!(
            caccioppoli_tail(1.0, 0.0, 1.0, 0),
            std::f64::consts::E,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            caccioppoli_tail(2.0, 0.0, 1.0, 2),
            2.0f64.exp() - 3.0,
            epsilon = 1e-14
        );
        assert_eq!(caccioppoli_tail(0.0, 0.0, 1.0, 3), 0.0);
    }

    #[test]
    fn collage_bound_examples() {
        let a = [1.0, 0.25, 0.1];
        let (d, e) = (0.3, 0.05);
        assert_abs_diff_eq!(
            perturbed_collage_bound(&a, 1, d, e).unwrap(),
            (d + e) / 0.75,
            epsilon = 1e-15
        );
        let geo: Vec<f64> = (0..6).map(|k| 0.5f64.powi(k)).collect();
        assert_abs_diff_eq!(
            perturbed_collage_bound(&geo, 3, d, e).unwrap(),
            2.0 * (d + e),
            epsilon = 1e-15
        );
        assert!(perturbed_collage_bound(&[1.0, 1.5], 1, d, e).is_err());
        assert!(perturbed_collage_bound(&geo, 0, d, e).is_err());
        assert!(perturbed_collage_bound(&geo, 2, -1.0, e).is_err());
    }

    #[test]
    fn collage_bound_decreases_to_exponential_factor() {
        let (l, d, e) = (2.0, 0.1, 0.01);
        let alphas = caccioppoli_alphas(l, 0.0, 1.0, 60);
        let n0 = first_contractive_index(&alphas).unwrap();
        let bounds: Vec<f64> = (n0..alphas.len())
            .map(|n| perturbed_collage_bound(&alphas, n, d, e).unwrap())
            .collect();
        for w in bounds.windows(2) {
            assert!(w[1] <= w[0]);
        }
        let limit = l.exp() * (d + e);
        assert!(bounds.iter().all(|&b| b >= limit - 1e-12));
        let (_, best) = best_collage_bound(&alphas, d, e).unwrap();
        assert!(best <= limit + 1e-12);
    }

    #[test]
    fn certificate_examples() {
        let problem = VolterraProblem::new(forcing(), Kernel::cos_arctan(0.5, 0.5).unwrap());
        let grid = EvalGrid::uniform(unit(), 65).unwrap();
        let x = forcing();
        assert_eq!(
            collage_certificate(&problem, &x, &x, 0.0, &grid).unwrap(),
            0.0
        );

        let y = IvFun1D::analytic(unit(), |t| 2.0 * t + 0.225, |t| 2.0 * t + 0.475);
        let c = collage_certificate(&problem, &x, &y, 0.01, &grid).unwrap();
        assert_abs_diff_eq!(c, std::f64::consts::E * 0.11, epsilon = 1e-12);
        assert_abs_diff_eq!(c, 0.29901, epsilon = 1e-5);
    }
}
