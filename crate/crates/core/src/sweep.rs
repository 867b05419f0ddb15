//! Regularization grids over `(gamma, lambda)` with optional warm starts.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{solve, solve_from};
use crate::types::{ProblemSpec, SolveResult, SolverConfig, SolverState, SymMatrix, Termination};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub gammas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub warm_start: bool,
}

impl SweepSpec {
    pub fn new(gammas: Vec<f64>, lambdas: Vec<f64>, warm_start: bool) -> Result<Self> {
        for (name, list) in [("gammas", &gammas), ("lambdas", &lambdas)] {
            if list.is_empty() {
                return Err(Error::InvalidConfig(format!("{name} must not be empty")));
            }
            if let Some(&v) = list.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be nonnegative and finite, got {v}"
                )));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig(format!("{name} must be strictly ascending")));
            }
        }
        Ok(SweepSpec {
            gammas,
            lambdas,
            warm_start,
        })
    }

    /// Grid points in lambda-major order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lambdas
            .iter()
            .flat_map(move |&l| self.gammas.iter().map(move |&g| (g, l)))
    }

    pub fn len(&self) -> usize {
        self.gammas.len() * self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub gamma: f64,
    pub lambda: f64,
    pub result: SolveResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub gamma: f64,
    pub lambda: f64,
    pub objective: Option<f64>,
    pub iters: usize,
    pub termination: Termination,
}

impl SweepPoint {
    pub fn summary(&self) -> SummaryRow {
        let obj = self.result.final_diagnostics.objective;
        SummaryRow {
            gamma: self.gamma,
            lambda: self.lambda,
            objective: obj.is_finite().then_some(obj),
            iters: self.result.iters_used,
            termination: self.result.termination,
        }
    }
}

fn run_chain(
    covariance: &SymMatrix,
    points: &[(f64, f64)],
    warm_start: bool,
    config: &SolverConfig,
) -> Result<Vec<SweepPoint>> {
    let mut out: Vec<SweepPoint> = Vec::with_capacity(points.len());
    for &(gamma, lambda) in points {
        let spec = ProblemSpec::new(covariance.clone(), gamma, lambda)?;
        let result = match out.last() {
            Some(prev) if warm_start => {
                let state = SolverState::warm(&spec, config, &prev.result.theta_star);
                solve_from(&spec, config, state)?
            }
            _ => solve(&spec, config)?,
        };
        log::info!(
            "gamma {gamma} lambda {lambda}: {} in {} iterations",
            result.termination,
            result.iters_used
        );
        out.push(SweepPoint {
            gamma,
            lambda,
            result,
        });
    }
    Ok(out)
}

/// Solves every grid point in lambda-major order.
///
/// With `jobs <= 1` one warm-start chain runs through the whole grid. With
/// more jobs each lambda row is an independent chain and rows run in
/// parallel; results are returned in grid order either way.
pub fn run_sweep(
    covariance: &SymMatrix,
    sweep: &SweepSpec,
    config: &SolverConfig,
    jobs: usize,
) -> Result<Vec<SweepPoint>> {
    if jobs <= 1 {
        let points: Vec<_> = sweep.points().collect();
        return run_chain(covariance, &points, sweep.warm_start, config);
    }
    let rows: Vec<Vec<(f64, f64)>> = sweep
        .lambdas
        .iter()
        .map(|&l| sweep.gammas.iter().map(|&g| (g, l)).collect())
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {jobs} worker threads: {e}")))?;
    let chunks: Vec<Result<Vec<SweepPoint>>> = pool.install(|| {
        rows.par_iter()
            .map(|row| run_chain(covariance, row, sweep.warm_start, config))
            .collect()
    });
    let mut out = Vec::with_capacity(sweep.len());
    for chunk in chunks {
        out.extend(chunk?);
    }
    Ok(out)
}
