//! Consensus ADMM with penalty continuation.
//!
//! One iteration updates, in order:
//!
//! ```text
//! theta     <- expand(theta_hat - (S + dual_theta) / rho; rho)
//! gamma_mat <- soft_threshold_offdiag(gamma_hat - dual_gamma / rho; gamma / rho)
//! theta_hat <- clip_offdiag((theta + gamma_mat) / 2 + (dual_theta + dual_gamma) / (2 rho); lambda)
//! gamma_hat <- theta_hat
//! dual_theta += rho (theta - theta_hat)
//! dual_gamma += rho (gamma_mat - gamma_hat)
//! ```
//!
//! The first two lines minimize the augmented Lagrangian over the primal
//! block, the next two over the consensus block. The penalty doubles every
//! `doubling_interval` iterations. Multipliers are carried over unchanged
//! when it does, so the scaled multiplier `dual / rho` halves at each
//! doubling.

use log::{debug, info};

use crate::diagnostics::{primal_residual, relative_change, Diagnostics};
use crate::error::{Error, Result};
use crate::prox::{clip_offdiag, expand, soft_threshold_offdiag};
use crate::types::{ProblemSpec, SolveResult, SolverConfig, SolverState, Termination};

/// Penalty schedule `rho_k = rho0 * 2^floor(k / doubling_interval)`, where
/// `k` counts completed iterations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuationPolicy {
    pub rho0: f64,
    pub doubling_interval: usize,
    pub rho_max: f64,
}

impl ContinuationPolicy {
    pub fn from_config(config: &SolverConfig) -> Self {
        ContinuationPolicy {
            rho0: config.rho0,
            doubling_interval: config.doubling_interval,
            rho_max: config.rho_max,
        }
    }

    /// Penalty used by the iteration that follows `completed` iterations.
    pub fn rho_at(&self, completed: usize) -> f64 {
        let doublings = completed / self.doubling_interval;
        self.rho0 * 2f64.powi(doublings.min(i32::MAX as usize) as i32)
    }

    pub fn exceeds_cap(&self, rho: f64) -> bool {
        rho > self.rho_max
    }
}

/// Relative change of `dual_theta` below `epsilon`.
///
/// With the consensus guard, the relative change of `dual_gamma` and the
/// relative dual residual must also be below `epsilon`; in strict mode the
/// primal residual must be too.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StoppingRule {
    pub epsilon: f64,
    pub strict: bool,
    pub consensus_guard: bool,
}

impl StoppingRule {
    pub fn from_config(config: &SolverConfig) -> Self {
        StoppingRule {
            epsilon: config.epsilon,
            strict: config.strict,
            consensus_guard: config.consensus_guard,
        }
    }

    /// The multiplier test alone, ignoring the guard and strict mode.
    pub fn multiplier_test(&self, dual_change: f64) -> bool {
        dual_change < self.epsilon
    }

    pub fn is_met(&self, report: &StepReport) -> bool {
        self.multiplier_test(report.dual_change)
            && (!self.consensus_guard
                || (report.dual_gamma_change < self.epsilon && report.dual_residual < self.epsilon))
            && (!self.strict || report.primal_residual < self.epsilon)
    }
}

/// `rho ||Y_new - Y_old||_F / max(1, ||(dual_theta, dual_gamma)||_F)` for the
/// consensus block `Y = (theta_hat, gamma_hat)`.
pub fn dual_residual(next: &SolverState, prev: &SolverState) -> f64 {
    let dy = next.theta_hat.sub(&prev.theta_hat).frobenius_norm().hypot(
        next.gamma_hat.sub(&prev.gamma_hat).frobenius_norm(),
    );
    let dual = prev
        .dual_theta
        .frobenius_norm()
        .hypot(prev.dual_gamma.frobenius_norm());
    next.rho * dy / dual.max(1.0)
}

/// Minimizes the augmented Lagrangian over `(theta, gamma_mat)`.
pub fn x_step(state: &SolverState, spec: &ProblemSpec) -> Result<SolverState> {
    let rho = state.rho;
    let inv_rho = 1.0 / rho;
    let theta_arg = state
        .theta_hat
        .zip_map(&spec.covariance().add(&state.dual_theta), |h, g| h - g * inv_rho);
    let theta = expand(&theta_arg, rho)?;
    let gamma_arg = state.gamma_hat.zip_map(&state.dual_gamma, |h, l| h - l * inv_rho);
    let gamma_mat = soft_threshold_offdiag(&gamma_arg, spec.gamma() * inv_rho);
    Ok(SolverState {
        theta,
        gamma_mat,
        ..state.clone()
    })
}

/// Minimizes the augmented Lagrangian over `(theta_hat, gamma_hat)`
/// subject to consensus and the off-diagonal bound.
pub fn y_step(state: &SolverState, spec: &ProblemSpec) -> SolverState {
    let half_inv_rho = 0.5 / state.rho;
    let avg = state.theta.zip_map(&state.gamma_mat, |t, g| 0.5 * (t + g));
    let duals = state.dual_theta.add(&state.dual_gamma);
    let theta_hat = clip_offdiag(&avg.zip_map(&duals, |a, l| a + l * half_inv_rho), spec.lambda());
    SolverState {
        gamma_hat: theta_hat.clone(),
        theta_hat,
        ..state.clone()
    }
}

/// Multiplier ascent; also advances the iteration counter.
pub fn dual_step(state: &SolverState) -> SolverState {
    let rho = state.rho;
    let r_theta = state.theta.sub(&state.theta_hat);
    let r_gamma = state.gamma_mat.sub(&state.gamma_hat);
    SolverState {
        dual_theta: state.dual_theta.zip_map(&r_theta, |l, r| l + rho * r),
        dual_gamma: state.dual_gamma.zip_map(&r_gamma, |l, r| l + rho * r),
        iter: state.iter + 1,
        ..state.clone()
    }
}

/// One full iteration at the penalty stored in `state`.
pub fn iterate(state: &SolverState, spec: &ProblemSpec) -> Result<SolverState> {
    let x = x_step(state, spec)?;
    let y = y_step(&x, spec);
    Ok(dual_step(&y))
}

/// Outcome of a single [`Solver::step`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    pub dual_change: f64,
    /// Relative change of `dual_gamma`, measured like `dual_change`.
    pub dual_gamma_change: f64,
    /// See [`dual_residual`].
    pub dual_residual: f64,
    pub primal_residual: f64,
    pub termination: Option<Termination>,
}

/// Drives [`iterate`] under the continuation schedule and stopping rule.
pub struct Solver<'a> {
    spec: &'a ProblemSpec,
    config: SolverConfig,
    policy: ContinuationPolicy,
    rule: StoppingRule,
    state: SolverState,
    trace: Option<Vec<Diagnostics>>,
    last_dual_change: f64,
    termination: Option<Termination>,
}

impl<'a> Solver<'a> {
    pub fn new(spec: &'a ProblemSpec, config: SolverConfig) -> Result<Self> {
        let state = SolverState::initial(spec, &config);
        Self::with_state(spec, config, state)
    }

    /// Starts from an arbitrary state, e.g. a warm start.
    pub fn with_state(spec: &'a ProblemSpec, config: SolverConfig, state: SolverState) -> Result<Self> {
        config.validate()?;
        if state.order() != spec.order() {
            return Err(Error::DimensionError(format!(
                "state has order {}, problem has order {}",
                state.order(),
                spec.order()
            )));
        }
        Ok(Solver {
            spec,
            policy: ContinuationPolicy::from_config(&config),
            rule: StoppingRule::from_config(&config),
            trace: config.trace.then(Vec::new),
            config,
            state,
            last_dual_change: f64::INFINITY,
            termination: None,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn termination(&self) -> Option<Termination> {
        self.termination
    }

    /// Runs one iteration and evaluates the exits in order: stopping rule,
    /// penalty cap for the next iteration, iteration budget.
    pub fn step(&mut self) -> Result<StepReport> {
        let mut current = self.state.clone();
        current.rho = self.policy.rho_at(current.iter);
        let next = iterate(&current, self.spec)?;
        if !next.is_finite() {
            return Err(Error::NumericalBreakdown { iter: next.iter });
        }
        let dual_change = relative_change(&next.dual_theta, &current.dual_theta);
        let mut report = StepReport {
            dual_change,
            dual_gamma_change: relative_change(&next.dual_gamma, &current.dual_gamma),
            dual_residual: dual_residual(&next, &current),
            primal_residual: primal_residual(&next),
            termination: None,
        };
        if let Some(trace) = self.trace.as_mut() {
            trace.push(Diagnostics::evaluate(self.spec, &next, dual_change)?);
        }
        let termination = if self.rule.is_met(&report) {
            Some(Termination::Converged)
        } else if self.policy.exceeds_cap(self.policy.rho_at(next.iter)) {
            Some(Termination::RhoCapReached)
        } else if next.iter >= self.config.max_iters {
            Some(Termination::MaxItersReached)
        } else {
            None
        };
        if next.iter % self.policy.doubling_interval == 0 {
            debug!(
                "iter {}: rho {} -> {}, dual change {:e}, primal residual {:e}",
                next.iter,
                current.rho,
                self.policy.rho_at(next.iter),
                dual_change,
                report.primal_residual
            );
        }
        self.state = next;
        self.last_dual_change = dual_change;
        self.termination = termination;
        report.termination = termination;
        Ok(report)
    }

    /// Iterates until an exit fires.
    pub fn run(mut self) -> Result<SolveResult> {
        let termination = loop {
            if let Some(t) = self.step()?.termination {
                break t;
            }
        };
        let final_diagnostics = Diagnostics::evaluate(self.spec, &self.state, self.last_dual_change)?;
        info!(
            "{} after {} iterations (rho {}, objective {}, kkt {:e})",
            termination, self.state.iter, self.state.rho, final_diagnostics.objective, final_diagnostics.kkt_stationarity
        );
        Ok(SolveResult {
            theta_star: self.state.theta_hat,
            termination,
            iters_used: self.state.iter,
            final_diagnostics,
            trace: self.trace,
        })
    }
}

/// Solves `spec` from the identity start.
pub fn solve(spec: &ProblemSpec, config: &SolverConfig) -> Result<SolveResult> {
    Solver::new(spec, config.clone())?.run()
}

/// Solves `spec` from `state`.
pub fn solve_from(spec: &ProblemSpec, config: &SolverConfig, state: SolverState) -> Result<SolveResult> {
    Solver::with_state(spec, config.clone(), state)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::SymMatrix;

    fn spec(rows: &[&[f64]], gamma: f64, lambda: f64) -> ProblemSpec {
        ProblemSpec::new(SymMatrix::from_rows(rows).unwrap(), gamma, lambda).unwrap()
    }

    #[test]
    fn first_theta_step_from_identity_covariance() {
        let s = ProblemSpec::new(SymMatrix::identity(2), 0.1, 0.05).unwrap();
        let state = SolverState::initial(&s, &SolverConfig::default());
        let x = x_step(&state, &s).unwrap();
        assert!(x.theta.max_abs_diff(&SymMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn zero_residual_leaves_duals_unchanged() {
        let s = spec(&[&[2.0, 0.3], &[0.3, 1.0]], 0.2, 0.5);
        let mut state = SolverState::initial(&s, &SolverConfig::default());
        state.dual_theta = SymMatrix::from_rows(&[&[0.1, -0.4], &[-0.4, 0.3]]).unwrap();
        state.dual_gamma = state.dual_theta.scale(-1.0);
        let next = dual_step(&state);
        assert_eq!(next.dual_theta, state.dual_theta);
        assert_eq!(next.dual_gamma, state.dual_gamma);
        assert_eq!(next.iter, 1);
    }

    #[test]
    fn scalar_problem() {
        let s = ProblemSpec::from_row_major(1, &[4.0], 3.0, 0.0).unwrap();
        let state = SolverState::initial(&s, &SolverConfig::default());
        let x = x_step(&state, &s).unwrap();
        // expand(1 - 4; 1) = (-3 + sqrt(13)) / 2
        assert!((x.theta.get(0, 0) - (-3.0 + 13f64.sqrt()) / 2.0).abs() < 1e-14);
        assert_eq!(x.gamma_mat, state.gamma_hat);
        let y = y_step(&x, &s);
        assert_eq!(y.theta_hat.get(0, 0), 0.5 * (x.theta.get(0, 0) + 1.0));

        let r = solve(&s, &SolverConfig::default()).unwrap();
        assert_eq!(r.termination, Termination::Converged);
        assert!((r.theta_star.get(0, 0) - 0.25).abs() < 1e-8);
    }

    #[test]
    fn identity_covariance_converges_immediately() {
        let s = ProblemSpec::new(SymMatrix::identity(3), 0.1, 0.05).unwrap();
        let r = solve(&s, &SolverConfig::default()).unwrap();
        assert_eq!(r.termination, Termination::Converged);
        assert_eq!(r.iters_used, 1);
        assert_eq!(r.theta_star, SymMatrix::identity(3));
    }

    #[test]
    fn rho_schedule() {
        let p = ContinuationPolicy::from_config(&SolverConfig::default());
        assert_eq!(p.rho_at(0), 1.0);
        assert_eq!(p.rho_at(19), 1.0);
        assert_eq!(p.rho_at(20), 2.0);
        assert_eq!(p.rho_at(399), 2f64.powi(19));
        assert!(!p.exceeds_cap(p.rho_at(399)));
        assert!(p.exceeds_cap(p.rho_at(400)));
    }

    #[test]
    fn unconstrained_two_by_two() {
        let s = spec(&[&[2.0, 1.0], &[1.0, 2.0]], 0.0, 10.0);
        let r = solve(&s, &SolverConfig::default()).unwrap();
        let want = SymMatrix::from_rows(&[&[2.0 / 3.0, -1.0 / 3.0], &[-1.0 / 3.0, 2.0 / 3.0]]).unwrap();
        assert!(r.theta_star.max_abs_diff(&want) < 1e-5);
    }

    #[test]
    fn zero_bound_gives_diagonal() {
        let s = spec(&[&[2.0, 0.8], &[0.8, 1.0]], 0.0, 0.0);
        let r = solve(&s, &SolverConfig::default()).unwrap();
        assert!(r.theta_star.max_abs_diff(&SymMatrix::from_diagonal(&[0.5, 1.0])) < 1e-5);
        assert_eq!(r.theta_star.get(0, 1), 0.0);
    }

    #[test]
    fn active_bound_two_by_two() {
        let s = spec(&[&[1.0, 0.9], &[0.9, 1.0]], 0.0, 0.2);
        let r = solve(&s, &SolverConfig::default()).unwrap();
        let t = (1.0 + 1.16f64.sqrt()) / 2.0;
        let want = SymMatrix::from_rows(&[&[t, -0.2], &[-0.2, t]]).unwrap();
        assert!(r.theta_star.max_abs_diff(&want) < 1e-4);
        assert!((r.theta_star.get(0, 0) - 1.0385).abs() < 1e-4);
    }

    #[test]
    fn max_iters_backstop() {
        let s = spec(&[&[2.0, 1.0], &[1.0, 2.0]], 0.1, 0.2);
        let cfg = SolverConfig {
            max_iters: 5,
            ..SolverConfig::default()
        };
        let r = solve(&s, &cfg).unwrap();
        assert_eq!(r.termination, Termination::MaxItersReached);
        assert_eq!(r.iters_used, 5);
    }

    #[test]
    fn rho_cap_exit() {
        let s = spec(&[&[2.0, 1.0], &[1.0, 2.0]], 0.1, 0.2);
        let cfg = SolverConfig {
            epsilon: 1e-300,
            rho_max: 4.0,
            ..SolverConfig::default()
        };
        let r = solve(&s, &cfg).unwrap();
        assert_eq!(r.termination, Termination::RhoCapReached);
        // rho 1, 2, 4 are used; rho 8 would exceed the cap
        assert_eq!(r.iters_used, 60);
    }

    #[test]
    fn strict_mode_never_stops_earlier() {
        let s = spec(&[&[1.0, 0.5, 0.2], &[0.5, 2.0, 0.1], &[0.2, 0.1, 1.5]], 0.05, 0.3);
        let loose = solve(&s, &SolverConfig::default()).unwrap();
        let strict = solve(
            &s,
            &SolverConfig {
                strict: true,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        assert!(strict.iters_used >= loose.iters_used);
    }

    #[test]
    fn trace_has_one_record_per_iteration() {
        let s = spec(&[&[2.0, 1.0], &[1.0, 2.0]], 0.1, 0.2);
        let r = solve(&s, &SolverConfig::default().with_trace(true)).unwrap();
        let trace = r.trace.unwrap();
        assert_eq!(trace.len(), r.iters_used);
        for (k, d) in trace.iter().enumerate() {
            assert_eq!(d.iter, k + 1);
        }
    }

    #[test]
    fn mismatched_state_rejected() {
        let s = ProblemSpec::new(SymMatrix::identity(2), 0.1, 0.1).unwrap();
        let other = ProblemSpec::new(SymMatrix::identity(3), 0.1, 0.1).unwrap();
        let state = SolverState::initial(&other, &SolverConfig::default());
        assert!(Solver::with_state(&s, SolverConfig::default(), state).is_err());
    }
}
