//! Deterministic Nelder-Mead restricted to a box by clamping.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NelderMeadOptions {
    /// Stop once the spread of simplex values is at most this...
    pub f_tol: f64,
    /// ...and every vertex is this close (max norm) to the best one.
    pub x_tol: f64,
    /// Objective evaluations allowed per start.
    pub max_evals: usize,
    /// Initial simplex edge as a fraction of each box side.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            f_tol: 1e-14,
            x_tol: 1e-10,
            max_evals: 5000,
            initial_step: 0.1,
        }
    }
}

/// Outcome of one Nelder-Mead start.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartOutcome {
    pub start: Vec<f64>,
    pub initial_value: f64,
    pub best: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Orders by value, then lexicographically by point.
pub(crate) fn compare_candidates(fa: f64, a: &[f64], fb: f64, b: &[f64]) -> Ordering {
    fa.total_cmp(&fb).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Minimizes `f` over the box `[lower, upper]` starting from `start`.
///
/// Every trial point is clamped into the box before evaluation. Coordinates
/// with `lower == upper` are held fixed; with no free coordinate the start
/// is evaluated once and returned.
pub fn nelder_mead<F>(
    mut f: F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &NelderMeadOptions,
) -> Result<StartOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let dim = start.len();
    if lower.len() != dim || upper.len() != dim {
        return Err(Error::Argument(
            "bounds and start differ in dimension".into(),
        ));
    }
    if (0..dim).any(|i| lower[i].is_nan() || upper[i].is_nan() || lower[i] > upper[i]) {
        return Err(Error::Argument("box has a side with lower > upper".into()));
    }
    let clamp = |x: &mut [f64]| {
        for i in 0..dim {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let mut x0 = start.to_vec();
    clamp(&mut x0);
    let free: Vec<usize> = (0..dim).filter(|&i| upper[i] > lower[i]).collect();

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = f(x)?;
        if v.is_nan() {
            return Err(Error::NonFinite(format!("objective at {x:?}")));
        }
        Ok(v)
    };

    let f0 = eval(&x0, &mut evals)?;
    if free.is_empty() {
        return Ok(StartOutcome {
            start: x0.clone(),
            initial_value: f0,
            best: x0,
            value: f0,
            evals,
            converged: true,
        });
    }

    // Clamping can fold the simplex onto a face of the box, so a converged
    // simplex is rebuilt around its best vertex until a restart stops paying.
    let mut best = (x0.clone(), f0);
    let mut converged = false;
    while evals < opts.max_evals {
        let before = best.1;
        let (point, value, done) =
            nm_pass(&mut eval, &mut evals, &best, &free, lower, upper, opts)?;
        best = (point, value);
        if !done {
            break;
        }
        if before - best.1 <= opts.f_tol {
            converged = true;
            break;
        }
    }
    let (best, value) = best;
    Ok(StartOutcome {
        start: x0,
        initial_value: f0,
        best,
        value,
        evals,
        converged,
    })
}

/// One Nelder-Mead run from a fresh simplex at `start`; returns the best
/// vertex and whether the simplex met the tolerances.
fn nm_pass<E>(
    eval: &mut E,
    evals: &mut usize,
    start: &(Vec<f64>, f64),
    free: &[usize],
    lower: &[f64],
    upper: &[f64],
    opts: &NelderMeadOptions,
) -> Result<(Vec<f64>, f64, bool)>
where
    E: FnMut(&[f64], &mut usize) -> Result<f64>,
{
    let dim = start.0.len();
    let clamp = |x: &mut [f64]| {
        for i in 0..dim {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let x0 = &start.0;
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![start.clone()];
    for &i in free {
        let step = opts.initial_step * (upper[i] - lower[i]);
        let mut v = x0.clone();
        v[i] = if x0[i] + step <= upper[i] {
            x0[i] + step
        } else {
            x0[i] - step
        };
        clamp(&mut v);
        let fv = eval(&v, evals)?;
        simplex.push((v, fv));
    }

    let n = simplex.len() - 1;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| compare_candidates(a.1, &a.0, b.1, &b.0));
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && diameter <= opts.x_tol {
            converged = true;
            break;
        }
        if *evals >= opts.max_evals {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (v, _) in &simplex[..n] {
            for i in 0..dim {
                centroid[i] += v[i] / n as f64;
            }
        }
        let along = |coef: f64, from: &[f64]| -> Vec<f64> {
            let mut p: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + coef * (from[i] - centroid[i]))
                .collect();
            clamp(&mut p);
            p
        };

        let worst = simplex[n].0.clone();
        let (f_best, f_second, f_worst) = (simplex[0].1, simplex[n - 1].1, simplex[n].1);
        let xr = along(-1.0, &worst);
        let fr = eval(&xr, evals)?;
        if fr < f_best {
            let xe = along(-2.0, &worst);
            let fe = eval(&xe, evals)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = along(-0.5, &worst);
            let fc = eval(&xc, evals)?;
            (xc, fc)
        } else {
            let xc = along(0.5, &worst);
            let fc = eval(&xc, evals)?;
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut p: Vec<f64> = (0..dim)
                .map(|i| best[i] + 0.5 * (vertex.0[i] - best[i]))
                .collect();
            clamp(&mut p);
            let fp = eval(&p, evals)?;
            *vertex = (p, fp);
        }
    }

    simplex.sort_by(|a, b| compare_candidates(a.1, &a.0, b.1, &b.0));
    let (best, value) = simplex.swap_remove(0);
    Ok((best, value, converged))
}
