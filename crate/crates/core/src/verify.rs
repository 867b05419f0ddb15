//! Randomized agreement between the ADMM solver and the `2 x 2` oracle.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diagnostics::{default_kkt_tol, kkt_report, objective};
use crate::error::Result;
use crate::oracle::{oracle_p2, DEFAULT_GRID_N};
use crate::solver::solve;
use crate::types::{ProblemSpec, SolverConfig, SymMatrix, Termination};

/// Max-norm agreement required between solver and oracle.
pub const AGREEMENT_TOL: f64 = 1e-4;
/// Slack allowed when the oracle objective is compared with the solver's.
pub const OBJECTIVE_SLACK: f64 = 1e-6;
/// Optimality audit threshold for oracle outputs.
pub const ORACLE_KKT_TOL: f64 = 1e-6;

/// `S = M^T M + 0.1 I` with standard normal `M`, `gamma ~ U[0, 1]`,
/// `lambda ~ U[0.01, 2]`.
pub fn random_p2_spec(rng: &mut impl Rng) -> ProblemSpec {
    let m = DMatrix::<f64>::from_fn(2, 2, |_, _| rng.sample(StandardNormal));
    let s = m.transpose() * &m + DMatrix::identity(2, 2) * 0.1;
    let gamma = rng.random_range(0.0..=1.0);
    let lambda = rng.random_range(0.01..=2.0);
    ProblemSpec::new(SymMatrix::symmetrize(s), gamma, lambda).expect("valid random instance")
}

#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub index: usize,
    pub spec: ProblemSpec,
    pub termination: Termination,
    pub iters: usize,
    pub max_abs_diff: f64,
    pub objective_gap: f64,
    pub oracle_kkt: f64,
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        self.max_abs_diff <= AGREEMENT_TOL
            && self.objective_gap <= OBJECTIVE_SLACK
            && self.oracle_kkt <= ORACLE_KKT_TOL
    }
}

#[derive(Clone, Debug)]
pub struct AgreementReport {
    pub seed: u64,
    pub cases: Vec<CaseOutcome>,
}

impl AgreementReport {
    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(CaseOutcome::passed)
    }

    pub fn passed_count(&self) -> usize {
        self.cases.iter().filter(|c| c.passed()).count()
    }

    /// Fixed-width table, deterministic for a given seed.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4}  {:>10} {:>10} {:>10} {:>10} {:>10} {:>15} {:>6} {:>10} {:>10} {:>10}  result",
            "case", "s11", "s12", "s22", "gamma", "lambda", "termination", "iters", "max_diff", "obj_gap", "oracle_kkt"
        );
        for c in &self.cases {
            let s = c.spec.covariance();
            let _ = writeln!(
                out,
                "{:>4}  {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>15} {:>6} {:>10.3e} {:>10.3e} {:>10.3e}  {}",
                c.index,
                s.get(0, 0),
                s.get(0, 1),
                s.get(1, 1),
                c.spec.gamma(),
                c.spec.lambda(),
                c.termination.as_str(),
                c.iters,
                c.max_abs_diff,
                c.objective_gap,
                c.oracle_kkt,
                if c.passed() { "pass" } else { "FAIL" }
            );
        }
        let worst = |f: fn(&CaseOutcome) -> f64| self.cases.iter().map(f).fold(0.0_f64, f64::max);
        let _ = writeln!(
            out,
            "worst: max_diff {:.3e}, obj_gap {:.3e}, oracle_kkt {:.3e}",
            worst(|c| c.max_abs_diff),
            worst(|c| c.objective_gap),
            worst(|c| c.oracle_kkt)
        );
        let _ = writeln!(out, "{}/{} pass (seed {})", self.passed_count(), self.cases.len(), self.seed);
        out
    }
}

/// Solves `cases` random instances with both the solver and the oracle.
pub fn run_agreement_suite(seed: u64, cases: usize, config: &SolverConfig) -> Result<AgreementReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cases);
    for index in 0..cases {
        let spec = random_p2_spec(&mut rng);
        let result = solve(&spec, config)?;
        let reference = oracle_p2(&spec, DEFAULT_GRID_N)?;
        let oracle_kkt = kkt_report(&spec, &reference, default_kkt_tol(spec.lambda()))?;
        let objective_gap = match objective(&spec, &result.theta_star) {
            Ok(solver_obj) => objective(&spec, &reference)? - solver_obj,
            Err(_) => f64::INFINITY,
        };
        out.push(CaseOutcome {
            index,
            max_abs_diff: result.theta_star.max_abs_diff(&reference),
            objective_gap,
            oracle_kkt,
            termination: result.termination,
            iters: result.iters_used,
            spec,
        });
    }
    Ok(AgreementReport { seed, cases: out })
}
