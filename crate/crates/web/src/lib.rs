//! Browser bindings for the two benchmark families.
//!
//! Every export takes plain numbers and returns a JSON string, so the page
//! needs no glue beyond `JSON.parse`. The `*_json` functions hold the logic
//! and are what the native tests call.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ivcollage::inverse::ParamFamily;
use ivcollage::optim::NelderMeadOptions;
use ivcollage::scenarios::Example;
use ivcollage::volterra::Stopping;
use ivcollage::{metric_h, EvalGrid, GridFun, IvFun1D};

/// Highest dyadic level the page offers; keeps the landscape interactive.
pub const MAX_LEVEL: u32 = 4;
/// Picard iterations allowed from the page.
pub const MAX_ITERATIONS: u32 = 30;
/// Landscape resolution cap per axis.
pub const MAX_RESOLUTION: u32 = 80;
/// Sup distances on the page use this many points.
const EVAL_POINTS: usize = 257;

type Outcome = Result<String, String>;

fn checked(example: u32, level: u32, m: u32) -> Result<(Example, ParamFamily), String> {
    if !(1..=MAX_LEVEL).contains(&level) {
        return Err(format!("level must be between 1 and {MAX_LEVEL}"));
    }
    if !(1..=MAX_ITERATIONS).contains(&m) {
        return Err(format!("iterations must be between 1 and {MAX_ITERATIONS}"));
    }
    let ex = Example::from_number(example).map_err(|e| e.to_string())?;
    let family = ex.family().map_err(|e| e.to_string())?;
    Ok((ex, family))
}

fn target(ex: Example, family: &ParamFamily, level: u32, m: u32) -> Result<GridFun, String> {
    family
        .generate_target(&ex.lambda0(), level, Stopping::Iterations(m as usize))
        .map(|run| run.solution().clone())
        .map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Outcome {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Band {
    t: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Band {
    fn of(g: &GridFun) -> Self {
        Band {
            t: g.nodes(),
            lower: g.lower().to_vec(),
            upper: g.upper().to_vec(),
        }
    }
}

#[derive(Serialize)]
struct ForwardView {
    iterates: Vec<Band>,
    successive: Vec<f64>,
    /// Closed-form solution sampled finely, when the example has one.
    exact: Option<Band>,
    error_to_exact: Option<f64>,
}

/// `m` Picard iterates of a benchmark at its generating parameters.
pub fn forward_solve_json(example: u32, level: u32, m: u32) -> Outcome {
    let (ex, family) = checked(example, level, m)?;
    let run = family
        .generate_target(&ex.lambda0(), level, Stopping::Iterations(m as usize))
        .map_err(|e| e.to_string())?;
    let grid = EvalGrid::uniform(family.domain(), EVAL_POINTS).map_err(|e| e.to_string())?;
    let (exact, error_to_exact) = match ex.exact_solution() {
        Some(x) => {
            let fine = x.to_grid(6).map_err(|e| e.to_string())?;
            let err = metric_h(&IvFun1D::Grid(run.solution().clone()), &x, &grid)
                .map_err(|e| e.to_string())?;
            (Some(Band::of(&fine)), Some(err))
        }
        None => (None, None),
    };
    to_json(&ForwardView {
        iterates: run.iterates.iter().map(Band::of).collect(),
        successive: run.successive,
        exact,
        error_to_exact,
    })
}

#[derive(Serialize)]
struct Landscape {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Row-major, `values[i * beta.len() + j]` is the objective at `(alpha[i], beta[j])`.
    values: Vec<f64>,
    lambda0: [f64; 2],
}

/// Collage objective on a `resolution × resolution` grid over the box.
pub fn objective_landscape_json(example: u32, level: u32, m: u32, resolution: u32) -> Outcome {
    if !(2..=MAX_RESOLUTION).contains(&resolution) {
        return Err(format!("resolution must be between 2 and {MAX_RESOLUTION}"));
    }
    let (ex, family) = checked(example, level, m)?;
    let x = IvFun1D::Grid(target(ex, &family, level, m)?);
    let grid = EvalGrid::uniform(family.domain(), EVAL_POINTS).map_err(|e| e.to_string())?;
    let axis = |k: usize| -> Vec<f64> {
        let b = family.bounds()[k];
        let n = resolution as usize;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    b.hi()
                } else {
                    b.lo() + b.width() * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    };
    let (alpha, beta) = (axis(0), axis(1));
    let mut values = Vec::with_capacity(alpha.len() * beta.len());
    for &a in &alpha {
        for &b in &beta {
            values.push(
                family
                    .objective(&[a, b], &x, level, &grid)
                    .map_err(|e| e.to_string())?,
            );
        }
    }
    to_json(&Landscape {
        alpha,
        beta,
        values,
        lambda0: ex.lambda0(),
    })
}

#[derive(Serialize)]
struct Recovery {
    lambda_star: Vec<f64>,
    lambda0: [f64; 2],
    objective: f64,
    evals: usize,
    certificate: f64,
    /// Start point and end point of every Nelder-Mead run.
    paths: Vec<[Vec<f64>; 2]>,
}

/// Multi-start Nelder-Mead recovery of `λ` from the `m`-th iterate.
pub fn recover_json(example: u32, level: u32, m: u32) -> Outcome {
    let (ex, family) = checked(example, level, m)?;
    let x = IvFun1D::Grid(target(ex, &family, level, m)?);
    let grid = EvalGrid::uniform(family.domain(), EVAL_POINTS).map_err(|e| e.to_string())?;
    let r = family
        .minimize(&x, level, &grid, &NelderMeadOptions::default())
        .map_err(|e| e.to_string())?;
    to_json(&Recovery {
        lambda0: ex.lambda0(),
        objective: r.objective,
        evals: r.evals,
        certificate: r.certificate,
        paths: r
            .trace
            .iter()
            .map(|s| [s.start.clone(), s.best.clone()])
            .collect(),
        lambda_star: r.lambda_star,
    })
}

#[wasm_bindgen]
pub fn forward_solve(example: u32, level: u32, m: u32) -> Result<String, JsValue> {
    forward_solve_json(example, level, m).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn objective_landscape(
    example: u32,
    level: u32,
    m: u32,
    resolution: u32,
) -> Result<String, JsValue> {
    objective_landscape_json(example, level, m, resolution).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn recover(example: u32, level: u32, m: u32) -> Result<String, JsValue> {
    recover_json(example, level, m).map_err(|e| JsValue::from_str(&e))
}
