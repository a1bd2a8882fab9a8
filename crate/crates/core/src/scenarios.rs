//! The two benchmark families and the table runner that reproduces their
//! recovery experiments.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::inverse::{manufacture_forcing, InverseResult, ParamFamily};
use crate::ivfun::{fmt_f64, node_count, Domain, EvalGrid, IvFun1D, DEFAULT_EVAL_POINTS};
use crate::optim::NelderMeadOptions;
use crate::volterra::{Kernel, KernelKind, Stopping};

/// Resolution at which the affine-product forcing is manufactured.
pub const MANUFACTURE_LEVEL: u32 = 10;

/// Which benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Example {
    /// `K = (α t + β s) u`, forcing manufactured from `[cos t - t/2, cos t + t/2]`.
    AffineProduct,
    /// `K = (α cos t + β cos s) atan(u)`, `G = [2t + 1/8, 2t + 3/8]`.
    CosArctan,
}

impl Example {
    pub fn from_number(n: u32) -> Result<Self> {
        match n {
            1 => Ok(Example::AffineProduct),
            2 => Ok(Example::CosArctan),
            _ => Err(Error::Argument(format!(
                "unknown example {n}, expected 1 or 2"
            ))),
        }
    }

    pub fn number(&self) -> u32 {
        match self {
            Example::AffineProduct => 1,
            Example::CosArctan => 2,
        }
    }

    /// The parameters that generate the target.
    pub fn lambda0(&self) -> [f64; 2] {
        match self {
            Example::AffineProduct => [std::f64::consts::SQRT_2, -1.0],
            Example::CosArctan => [2.0, 1.0],
        }
    }

    pub fn kernel_kind(&self) -> KernelKind {
        match self {
            Example::AffineProduct => KernelKind::AffineProduct,
            Example::CosArctan => KernelKind::CosArctan,
        }
    }

    pub fn bounds(&self) -> Vec<Interval> {
        let (a, b) = match self {
            Example::AffineProduct => ((1.0, 3.0), (-1.5, -0.5)),
            Example::CosArctan => ((1.5, 2.5), (0.5, 1.5)),
        };
        vec![
            Interval::new(a.0, a.1).expect("ordered"),
            Interval::new(b.0, b.1).expect("ordered"),
        ]
    }

    /// Closed-form solution at `λ0`, when known.
    pub fn exact_solution(&self) -> Option<IvFun1D> {
        match self {
            Example::AffineProduct => Some(IvFun1D::analytic(
                Domain::UNIT,
                |t| t.cos() - t / 2.0,
                |t| t.cos() + t / 2.0,
            )),
            Example::CosArctan => None,
        }
    }

    pub fn forcing(&self) -> Result<IvFun1D> {
        match self {
            Example::AffineProduct => {
                let [c1, c2] = self.lambda0();
                let exact = self.exact_solution().expect("closed form");
                let kernel = Kernel::affine_product(c1, c2)?;
                Ok(manufacture_forcing(&exact, kernel, MANUFACTURE_LEVEL)?.into())
            }
            Example::CosArctan => Ok(IvFun1D::analytic(
                Domain::UNIT,
                |t| 2.0 * t + 0.125,
                |t| 2.0 * t + 0.375,
            )),
        }
    }

    pub fn family(&self) -> Result<ParamFamily> {
        ParamFamily::new(self.kernel_kind(), self.bounds(), self.forcing()?)
    }

    /// `(m, level)` combinations of the reference recovery table.
    pub fn table_grid(&self) -> Vec<(usize, u32)> {
        match self {
            Example::AffineProduct => [3, 7]
                .into_iter()
                .flat_map(|m| [1, 3, 4].into_iter().map(move |k| (m, k)))
                .collect(),
            Example::CosArctan => vec![(7, 3), (7, 4)],
        }
    }

    pub fn supports(&self, m: usize, level: u32) -> bool {
        self.table_grid().contains(&(m, level))
    }
}

/// One row of a recovery table: target `X_m` and projections of order `n = r = q²`.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub alpha: f64,
    pub beta: f64,
    pub objective: f64,
    #[serde(skip)]
    pub result: InverseResult,
}

/// Generates `X_m` at `λ0` and recovers `λ*` from it at the same level.
pub fn run_row(
    family: &ParamFamily,
    example: Example,
    m: usize,
    level: u32,
    eval_points: usize,
    opts: &NelderMeadOptions,
) -> Result<TableRow> {
    let run = family.generate_target(&example.lambda0(), level, Stopping::Iterations(m))?;
    let target = IvFun1D::Grid(run.solution().clone());
    let grid = EvalGrid::uniform(family.domain(), eval_points)?;
    let result = family.minimize(&target, level, &grid, opts)?;
    let order = node_count(level).pow(2);
    Ok(TableRow {
        m,
        n: order,
        r: order,
        alpha: result.lambda_star[0],
        beta: result.lambda_star[1],
        objective: result.objective,
        result,
    })
}

/// Runs every requested `(m, level)` pair, or the whole reference grid when
/// `only` is empty. Unsupported pairs are rejected before any work is done.
pub fn reproduce(example: Example, only: &[(usize, u32)]) -> Result<Vec<TableRow>> {
    let pairs = if only.is_empty() {
        example.table_grid()
    } else {
        for &(m, k) in only {
            if !example.supports(m, k) {
                return Err(Error::Argument(format!(
                    "example {} has no table row for m = {m}, level = {k}",
                    example.number()
                )));
            }
        }
        only.to_vec()
    };
    let family = example.family()?;
    let opts = NelderMeadOptions::default();
    pairs
        .into_iter()
        .map(|(m, k)| run_row(&family, example, m, k, DEFAULT_EVAL_POINTS, &opts))
        .collect()
}

/// Header `m,n,r,alpha,beta,H`, floats at 17 significant digits.
pub fn write_table<W: Write>(rows: &[TableRow], mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Format(e.to_string());
    writeln!(out, "m,n,r,alpha,beta,H").map_err(io)?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.m,
            row.n,
            row.r,
            fmt_f64(row.alpha),
            fmt_f64(row.beta),
            fmt_f64(row.objective)
        )
        .map_err(io)?;
    }
    Ok(())
}
