use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use ivcollage::config::{base_dir, load_json, FamilyFile, ProblemFile};
use ivcollage::inverse::{InverseResult, ParamFamily};
use ivcollage::ivfun::node_count;
use ivcollage::optim::NelderMeadOptions;
use ivcollage::scenarios::{reproduce as run_table, write_table, Example};
use ivcollage::volterra::{
    caccioppoli_tail, certificate_factor, PicardRun, PicardStatus, Stopping, VolterraProblem,
};
use ivcollage::{metric_h, EvalGrid, GridFun, IvFun1D};

use crate::{config_error, create_out_dir, Failure, ForwardArgs, InverseArgs, ReproduceArgs, Stop};

const MIN_LEVEL: u32 = 1;
const MAX_LEVEL: u32 = 6;

fn check_level(level: u32) -> Result<(), Failure> {
    if (MIN_LEVEL..=MAX_LEVEL).contains(&level) {
        Ok(())
    } else {
        Err(config_error(format!(
            "--level must be in {MIN_LEVEL}..={MAX_LEVEL}, got {level}"
        )))
    }
}

fn eval_grid(
    problem_domain: ivcollage::Domain,
    points: usize,
    level: u32,
) -> Result<EvalGrid, Failure> {
    if points < node_count(level) {
        return Err(config_error(format!(
            "--eval-grid {points} is coarser than the {} dyadic nodes",
            node_count(level)
        )));
    }
    Ok(EvalGrid::uniform(problem_domain, points)?)
}

fn stopping(stop: &Stop, default: Stopping) -> Result<Stopping, Failure> {
    Ok(match (stop.m, stop.eps) {
        (Some(m), None) => Stopping::Iterations(m),
        (None, Some(eps)) if eps > 0.0 && eps.is_finite() => Stopping::Tolerance {
            eps,
            max_iter: stop.max_iter,
        },
        (None, Some(eps)) => {
            return Err(config_error(format!("--eps must be positive, got {eps}")))
        }
        (None, None) => default,
        (Some(_), Some(_)) => return Err(config_error("give either --m or --eps")),
    })
}

fn example(n: u32) -> Result<Example, Failure> {
    Example::from_number(n).map_err(Failure::from)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_grid(path: &Path, g: &GridFun) -> Result<(), Failure> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    g.write_csv(BufWriter::new(file))?;
    Ok(())
}

#[derive(Serialize)]
struct ForwardReport {
    level: u32,
    nodes: usize,
    order: usize,
    stopping: Stopping,
    status: PicardStatus,
    iterations: usize,
    successive: Vec<f64>,
    lipschitz: f64,
    /// `Σ_{k>=J} α_k · H(X_1, X_0)`, bounding the distance from `X_J` to the fixed point.
    tail_bound: Option<f64>,
    /// `H(X_J, Φ_k(X_J))`.
    collage_distance: f64,
    /// `H(Φ_k(X_J), Φ_{k+2}(X_J))`, the projection-error surrogate.
    eps_proj: f64,
    /// `e^{L(b-a)} (collage_distance + eps_proj)`.
    certificate: f64,
}

fn forward_report(
    problem: &VolterraProblem,
    run: &PicardRun,
    stop: Stopping,
    grid: &EvalGrid,
) -> Result<ForwardReport, Failure> {
    let level = run.level;
    let domain = problem.domain();
    let lipschitz = problem.lipschitz();
    let x = IvFun1D::Grid(run.solution().clone());
    let y = IvFun1D::Grid(problem.apply_phi(&x, level)?);
    let y_fine = IvFun1D::Grid(problem.apply_phi(&x, level + 2)?);
    let collage_distance = metric_h(&x, &y, grid)?;
    let eps_proj = metric_h(&y, &y_fine, grid)?;
    let tail_bound = run
        .successive
        .first()
        .map(|d1| caccioppoli_tail(lipschitz, domain.a(), domain.b(), run.iterations()) * d1);
    Ok(ForwardReport {
        level,
        nodes: node_count(level),
        order: node_count(level).pow(2),
        stopping: stop,
        status: run.status,
        iterations: run.iterations(),
        successive: run.successive.clone(),
        lipschitz,
        tail_bound,
        collage_distance,
        eps_proj,
        certificate: certificate_factor(lipschitz, domain) * (collage_distance + eps_proj),
    })
}

pub fn forward(args: ForwardArgs) -> Result<(), Failure> {
    check_level(args.level)?;
    let stop = stopping(&args.stop, Stopping::tolerance(1e-12))?;
    let problem = match (&args.problem, args.example) {
        (Some(path), _) => {
            let file: ProblemFile = load_json(path)?;
            file.build(&base_dir(path))?
        }
        (None, Some(n)) => {
            let ex = example(n)?;
            ex.family()?.problem_at(&ex.lambda0())?
        }
        (None, None) => return Err(config_error("give --problem or --example")),
    };
    let grid = eval_grid(problem.domain(), args.eval_grid, args.level)?;
    let run = problem.solve_forward(args.level, stop, None)?;

    create_out_dir(&args.out)?;
    write_grid(&args.out.join("solution.csv"), run.solution())?;
    let report = forward_report(&problem, &run, stop, &grid)?;
    write_json(&args.out.join("report.json"), &report)?;
    eprintln!(
        "{} iterations, last step {:.3e}, certificate {:.3e}",
        report.iterations,
        run.final_distance().unwrap_or(0.0),
        report.certificate
    );
    if run.status == PicardStatus::MaxIterations {
        return Err(Failure::NotConverged(format!(
            "{} iterations, last successive distance {:e}",
            run.iterations(),
            run.final_distance().unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct InverseReport<'a> {
    #[serde(flatten)]
    result: &'a InverseResult,
    target_iterations: Option<usize>,
}

pub fn inverse(args: InverseArgs) -> Result<(), Failure> {
    check_level(args.level)?;
    create_out_dir(&args.out)?;
    let (family, target, target_iterations): (ParamFamily, GridFun, Option<usize>) =
        match (&args.family, args.example) {
            (Some(path), _) => {
                let file: FamilyFile = load_json(path)?;
                let family = file.build(&base_dir(path))?;
                let target_path = args
                    .target
                    .as_ref()
                    .ok_or_else(|| config_error("--family needs --target"))?;
                let reader = File::open(target_path)
                    .with_context(|| format!("opening {}", target_path.display()))
                    .map_err(Failure::Config)?;
                let target = GridFun::read_csv(reader)?;
                if target.level() != args.level {
                    return Err(config_error(format!(
                        "target has {} nodes, --level {} needs {}",
                        target.lower().len(),
                        args.level,
                        node_count(args.level)
                    )));
                }
                (family, target, None)
            }
            (None, Some(n)) => {
                let ex = example(n)?;
                let family = ex.family()?;
                let stop = stopping(&args.stop, Stopping::Iterations(7))?;
                let run = family.generate_target(&ex.lambda0(), args.level, stop)?;
                if run.status == PicardStatus::MaxIterations {
                    return Err(Failure::NotConverged(
                        "target generation hit --max-iter".into(),
                    ));
                }
                write_grid(&args.out.join("target.csv"), run.solution())?;
                let j = run.iterations();
                (family, run.solution().clone(), Some(j))
            }
            (None, None) => return Err(config_error("give --family/--target or --example")),
        };

    let grid = eval_grid(family.domain(), args.eval_grid, args.level)?;
    let result = family.minimize(
        &IvFun1D::Grid(target),
        args.level,
        &grid,
        &NelderMeadOptions::default(),
    )?;
    write_json(
        &args.out.join("result.json"),
        &InverseReport {
            result: &result,
            target_iterations,
        },
    )?;
    eprintln!(
        "lambda* = {:?}, objective {:.3e}, {} evaluations{}",
        result.lambda_star,
        result.objective,
        result.evals,
        if result.no_descent {
            ", no descent"
        } else {
            ""
        }
    );
    if result.trace.iter().all(|s| !s.converged) {
        return Err(Failure::NotConverged(
            "no Nelder-Mead start met its tolerances".into(),
        ));
    }
    Ok(())
}

pub fn reproduce(args: ReproduceArgs) -> Result<(), Failure> {
    let ex = example(args.example)?;
    let only = match (args.m, args.level) {
        (Some(m), Some(k)) => vec![(m, k)],
        _ => Vec::new(),
    };
    if let Some(&(m, k)) = only.first() {
        if !ex.supports(m, k) {
            return Err(config_error(format!(
                "example {} has rows for (m, level) in {:?}, not ({m}, {k})",
                args.example,
                ex.table_grid()
            )));
        }
    }
    let rows = run_table(ex, &only)?;
    create_out_dir(&args.out)?;
    let path = args.out.join("table.csv");
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_table(&rows, BufWriter::new(file))?;
    for r in &rows {
        eprintln!(
            "m={} n={} r={} alpha*={:.12} beta*={:.12} H={:.5e}",
            r.m, r.n, r.r, r.alpha, r.beta, r.objective
        );
    }
    Ok(())
}
