//! Collage-based recovery of kernel parameters.
//!
//! Given a target `X̃` and a family `λ ↦ (G, K_λ)`, the fixed point of each
//! `Φ_λ` is never computed. Instead the cheap surrogate
//! `Y_λ = G + ∫ P_r(K_λ(·, s, X̃(s))) ds` is compared with `X̃`, and
//! `H(X̃, Y_λ)` is minimized over the parameter box.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::ivfun::{metric_h, Domain, EvalGrid, GridFun, IvFun1D};
use crate::optim::{compare_candidates, nelder_mead, NelderMeadOptions, StartOutcome};
use crate::volterra::{
    certificate_factor, kernel_integrand, Kernel, KernelKind, PicardRun, Stopping, VolterraProblem,
};

/// Largest supported parameter dimension (the multi-start visits all `2^N` corners).
pub const MAX_PARAMS: usize = 4;

/// Fixed forcing `G` with kernel coefficients `λ = (c1, c2)` ranging over a box.
#[derive(Debug, Clone)]
pub struct ParamFamily {
    kind: KernelKind,
    bounds: Vec<Interval>,
    forcing: IvFun1D,
}

impl ParamFamily {
    pub fn new(kind: KernelKind, bounds: Vec<Interval>, forcing: IvFun1D) -> Result<Self> {
        if bounds.len() != 2 {
            return Err(Error::Argument(format!(
                "kernel {} takes 2 parameters, box has {}",
                kind.name(),
                bounds.len()
            )));
        }
        Ok(ParamFamily {
            kind,
            bounds,
            forcing,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn forcing(&self) -> &IvFun1D {
        &self.forcing
    }

    pub fn domain(&self) -> Domain {
        self.forcing.domain()
    }

    pub fn contains(&self, lambda: &[f64]) -> bool {
        lambda.len() == self.bounds.len()
            && lambda
                .iter()
                .zip(&self.bounds)
                .all(|(&x, b)| x >= b.lo() && x <= b.hi())
    }

    pub fn kernel_at(&self, lambda: &[f64]) -> Result<Kernel> {
        if !self.contains(lambda) {
            return Err(Error::Argument(format!(
                "parameter {lambda:?} outside the box {:?}",
                self.bounds
            )));
        }
        Kernel::new(self.kind, lambda[0], lambda[1])
    }

    pub fn problem_at(&self, lambda: &[f64]) -> Result<VolterraProblem> {
        Ok(VolterraProblem::new(
            self.forcing.clone(),
            self.kernel_at(lambda)?,
        ))
    }

    pub fn lipschitz_at(&self, lambda: &[f64]) -> Result<f64> {
        Ok(self.kernel_at(lambda)?.lipschitz(self.domain()))
    }

    /// `sup_λ L_λ`; the Lipschitz constants are convex in `λ`, so the sup sits at a corner.
    pub fn lipschitz_max(&self) -> f64 {
        let c1 = self.bounds[0].norm();
        let c2 = self.bounds[1].norm();
        Kernel {
            kind: self.kind,
            c1,
            c2,
        }
        .lipschitz(self.domain())
    }

    /// `ρ <= e^{L_max (b - a)}`, the stability constant of the family.
    pub fn stability_rho(&self) -> f64 {
        certificate_factor(self.lipschitz_max(), self.domain())
    }

    /// Target `X̃ = X_m` from Picard iteration at `λ0`, started at the forcing.
    pub fn generate_target(
        &self,
        lambda0: &[f64],
        level: u32,
        stopping: Stopping,
    ) -> Result<PicardRun> {
        self.problem_at(lambda0)?
            .solve_forward(level, stopping, None)
    }

    /// `Y_{λ,r} = Φ_{λ,r}(X̃)` at the nodes of `level` (`r = q²`).
    pub fn build_y(&self, lambda: &[f64], target: &IvFun1D, level: u32) -> Result<GridFun> {
        self.problem_at(lambda)?.apply_phi(target, level)
    }

    /// `H(X̃, Y_{λ,r})` sampled on `grid`.
    pub fn objective(
        &self,
        lambda: &[f64],
        target: &IvFun1D,
        level: u32,
        grid: &EvalGrid,
    ) -> Result<f64> {
        let y = IvFun1D::Grid(self.build_y(lambda, target, level)?);
        metric_h(target, &y, grid)
    }

    /// Start points: the box centre followed by every corner.
    pub fn start_points(&self) -> Vec<Vec<f64>> {
        let n = self.bounds.len();
        let mut starts = vec![self
            .bounds
            .iter()
            .map(|b| 0.5 * (b.lo() + b.hi()))
            .collect::<Vec<_>>()];
        for mask in 0..(1usize << n) {
            starts.push(
                (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 0 {
                            self.bounds[i].lo()
                        } else {
                            self.bounds[i].hi()
                        }
                    })
                    .collect(),
            );
        }
        starts
    }

    /// Multi-start minimization of [`ParamFamily::objective`] over the box.
    pub fn minimize(
        &self,
        target: &IvFun1D,
        level: u32,
        grid: &EvalGrid,
        opts: &NelderMeadOptions,
    ) -> Result<InverseResult> {
        if target.domain() != self.domain() {
            return Err(Error::Argument("target lives on another domain".into()));
        }
        let lower: Vec<f64> = self.bounds.iter().map(|b| b.lo()).collect();
        let upper: Vec<f64> = self.bounds.iter().map(|b| b.hi()).collect();
        let degenerate = self.bounds.iter().all(|b| b.is_degenerate());
        let starts = if degenerate {
            vec![lower.clone()]
        } else {
            self.start_points()
        };

        let mut trace: Vec<StartOutcome> = Vec::with_capacity(starts.len());
        for start in &starts {
            let outcome = nelder_mead(
                |lambda| self.objective(lambda, target, level, grid),
                start,
                &lower,
                &upper,
                opts,
            )?;
            trace.push(outcome);
        }
        let best = trace
            .iter()
            .min_by(|a, b| compare_candidates(a.value, &a.best, b.value, &b.best))
            .expect("at least one start");
        let lambda_star = best.best.clone();
        let objective = best.value;
        let no_descent = trace.iter().all(|o| o.value >= o.initial_value) && !degenerate;

        let eps_proj = self.projection_residual(&lambda_star, target, level, grid)?;
        let lipschitz_star = self.lipschitz_at(&lambda_star)?;
        let certificate =
            certificate_factor(lipschitz_star, self.domain()) * (objective + eps_proj);
        Ok(InverseResult {
            lambda_star,
            objective,
            level,
            order: crate::ivfun::node_count(level).pow(2),
            evals: trace.iter().map(|o| o.evals).sum(),
            starts: trace.len(),
            no_descent,
            rho_bound: self.stability_rho(),
            lipschitz_star,
            eps_proj,
            certificate,
            trace,
        })
    }

    /// Surrogate for `ε ≥ H(Φ_λ(X̃), Y_{λ,r})`: the distance between the
    /// projected images at `level` and `level + 2`.
    pub fn projection_residual(
        &self,
        lambda: &[f64],
        target: &IvFun1D,
        level: u32,
        grid: &EvalGrid,
    ) -> Result<f64> {
        let coarse = IvFun1D::Grid(self.build_y(lambda, target, level)?);
        let fine = IvFun1D::Grid(self.build_y(lambda, target, level + 2)?);
        metric_h(&coarse, &fine, grid)
    }
}

/// Outcome of [`ParamFamily::minimize`].
#[derive(Debug, Clone, Serialize)]
pub struct InverseResult {
    pub lambda_star: Vec<f64>,
    /// `H(X̃, Y_{λ*,r})`.
    pub objective: f64,
    pub level: u32,
    /// Projection order `r = q²`.
    pub order: usize,
    pub evals: usize,
    pub starts: usize,
    /// No start improved on its initial value.
    pub no_descent: bool,
    pub rho_bound: f64,
    pub lipschitz_star: f64,
    /// Estimated projection error `ε`.
    pub eps_proj: f64,
    /// `e^{L_{λ*}(b-a)} (objective + ε)`.
    pub certificate: f64,
    pub trace: Vec<StartOutcome>,
}

/// Forcing `G` for which `x_exact` solves `X = G + ∫ K(·, s, X(s)) ds`:
/// `G = [X.lo - I.lo, X.hi - I.hi]` with `I(t) = ∫_a^t K(t, s, X(s)) ds`,
/// evaluated by adaptive quadrature at the nodes of `level`.
pub fn manufacture_forcing(x_exact: &IvFun1D, kernel: Kernel, level: u32) -> Result<GridFun> {
    let z = kernel_integrand(kernel, x_exact);
    let a = x_exact.domain().a();
    GridFun::sample(x_exact.domain(), level, |t| {
        let x = x_exact.eval(t)?;
        let i = z.slice_integrate(t, a, t)?;
        let (lo, hi) = (x.lo() - i.lo(), x.hi() - i.hi());
        if lo > hi {
            return Err(Error::Manufacture {
                t,
                solution_width: x.width(),
                integral_width: i.width(),
            });
        }
        Interval::new(lo, hi)
    })
}
