//! Objective, augmented Lagrangian, residuals and a first-order optimality
//! audit.
//!
//! The optimality audit follows from the subdifferential of the objective.
//! With `G = S - inv(T)` the gradient of the smooth part, a point `T` is
//! optimal iff, for every off-diagonal entry,
//!
//! ```text
//! 0 in G_ij + gamma * d|T_ij| + N_[-lambda, lambda](T_ij)
//! ```
//!
//! and `G_ii = 0` on the diagonal. [`kkt_report`] returns the largest
//! violation of these conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sym_eig::{eig_sym, EigenPair};
use crate::types::{ProblemSpec, SolverState, SymMatrix};

/// Tolerance used when testing the indicator constraints of the
/// augmented Lagrangian.
pub const INDICATOR_TOL: f64 = 1e-9;

/// Per-iteration solution-quality record.
///
/// `objective` and `kkt_stationarity` are `f64::INFINITY` when `theta_hat`
/// is not positive definite; `aug_lagrangian` is `f64::INFINITY` when the
/// consensus block violates its constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub objective: f64,
    pub aug_lagrangian: f64,
    pub primal_residual: f64,
    pub dual_change: f64,
    pub constraint_violation: f64,
    pub min_eigenvalue: f64,
    pub kkt_stationarity: f64,
    pub rho: f64,
    pub iter: usize,
}

impl Diagnostics {
    /// Evaluates every field at `state`. `dual_change` is supplied by the
    /// caller since it needs the previous multiplier.
    pub fn evaluate(spec: &ProblemSpec, state: &SolverState, dual_change: f64) -> Result<Self> {
        let eig = eig_sym(&state.theta_hat)?;
        let min_eigenvalue = eig.min_eigenvalue();
        let (objective, kkt_stationarity) = if min_eigenvalue > 0.0 {
            (
                objective_from_eig(spec, &state.theta_hat, &eig),
                kkt_from_eig(spec, &state.theta_hat, &eig, default_kkt_tol(spec.lambda()))?,
            )
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        let aug_lagrangian = match aug_lagrangian(spec, state) {
            Ok(v) => v,
            Err(Error::NotPositiveDefinite { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        Ok(Diagnostics {
            objective,
            aug_lagrangian,
            primal_residual: primal_residual(state),
            dual_change,
            constraint_violation: (state.theta_hat.max_abs_offdiag() - spec.lambda()).max(0.0),
            min_eigenvalue,
            kkt_stationarity,
            rho: state.rho,
            iter: state.iter,
        })
    }
}

/// `||theta - theta_hat||_F + ||gamma_mat - gamma_hat||_F`.
pub fn primal_residual(state: &SolverState) -> f64 {
    state.theta.sub(&state.theta_hat).frobenius_norm()
        + state.gamma_mat.sub(&state.gamma_hat).frobenius_norm()
}

/// `||new - old||_F / max(1, ||old||_F)`.
pub fn relative_change(new: &SymMatrix, old: &SymMatrix) -> f64 {
    new.sub(old).frobenius_norm() / old.frobenius_norm().max(1.0)
}

/// Default zero/at-bound classification tolerance for [`kkt_report`].
pub fn default_kkt_tol(lambda: f64) -> f64 {
    1e-7 * lambda.max(1.0)
}

fn check_pd(eig: &EigenPair) -> Result<()> {
    let min = eig.min_eigenvalue();
    if min > 0.0 {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite { min_eigenvalue: min })
    }
}

fn objective_from_eig(spec: &ProblemSpec, theta: &SymMatrix, eig: &EigenPair) -> f64 {
    let logdet: f64 = eig.eigenvalues.iter().map(|d| d.ln()).sum();
    -logdet + spec.covariance().dot(theta) + spec.gamma() * theta.offdiag_l1()
}

/// `-logdet(T) + <S, T> + gamma * ||offdiag(T)||_1`.
pub fn objective(spec: &ProblemSpec, theta: &SymMatrix) -> Result<f64> {
    let eig = eig_sym(theta)?;
    check_pd(&eig)?;
    Ok(objective_from_eig(spec, theta, &eig))
}

/// The smooth-plus-penalty block `f(theta, gamma_mat)` of the split
/// problem: `-logdet(theta) + <S, theta> + gamma * ||offdiag(gamma_mat)||_1`.
pub fn split_objective(spec: &ProblemSpec, theta: &SymMatrix, gamma_mat: &SymMatrix) -> Result<f64> {
    let eig = eig_sym(theta)?;
    check_pd(&eig)?;
    let logdet: f64 = eig.eigenvalues.iter().map(|d| d.ln()).sum();
    Ok(-logdet + spec.covariance().dot(theta) + spec.gamma() * gamma_mat.offdiag_l1())
}

/// Augmented Lagrangian of the split problem at `state`:
///
/// ```text
/// f(theta, gamma_mat) + g(theta_hat, gamma_hat)
///   + <dual_theta, theta - theta_hat> + <dual_gamma, gamma_mat - gamma_hat>
///   + (rho/2) (||theta - theta_hat||_F^2 + ||gamma_mat - gamma_hat||_F^2)
/// ```
///
/// `g` is the indicator of `{theta_hat = gamma_hat, |offdiag(theta_hat)| <= lambda}`;
/// a violation larger than [`INDICATOR_TOL`] yields `f64::INFINITY`.
pub fn aug_lagrangian(spec: &ProblemSpec, state: &SolverState) -> Result<f64> {
    let f = split_objective(spec, &state.theta, &state.gamma_mat)?;
    if state.theta_hat.max_abs_offdiag() > spec.lambda() + INDICATOR_TOL
        || state.theta_hat.max_abs_diff(&state.gamma_hat) > INDICATOR_TOL
    {
        return Ok(f64::INFINITY);
    }
    let r_theta = state.theta.sub(&state.theta_hat);
    let r_gamma = state.gamma_mat.sub(&state.gamma_hat);
    let linear = state.dual_theta.dot(&r_theta) + state.dual_gamma.dot(&r_gamma);
    let quad = r_theta.dot(&r_theta) + r_gamma.dot(&r_gamma);
    Ok(f + linear + 0.5 * state.rho * quad)
}

fn kkt_from_eig(spec: &ProblemSpec, theta: &SymMatrix, eig: &EigenPair, tol: f64) -> Result<f64> {
    let inv = eig.reconstruct_with(|d| 1.0 / d)?;
    let grad = spec.covariance().sub(&inv);
    let (gamma, lambda) = (spec.gamma(), spec.lambda());
    let p = theta.order();
    let mut worst = 0.0_f64;
    for j in 0..p {
        for i in 0..=j {
            let g = grad.get(i, j);
            let t = theta.get(i, j);
            let r = if i == j {
                g.abs()
            } else if lambda <= tol {
                // both bounds active at zero: the normal cone is the whole line
                0.0
            } else if t.abs() > tol && t.abs() < lambda - tol {
                (g + gamma * t.signum()).abs()
            } else if t.abs() <= tol {
                (g.abs() - gamma).max(0.0)
            } else {
                // at the bound, the bound multiplier must be nonnegative
                let s = t.signum();
                (s * (g + gamma * s)).max(0.0)
            };
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// Largest violation of the first-order optimality conditions at `theta`.
///
/// Off-diagonal entries are classified as interior, zero (`|T_ij| <= tol`)
/// or at the bound (`lambda - |T_ij| <= tol`), interior first.
pub fn kkt_report(spec: &ProblemSpec, theta: &SymMatrix, tol: f64) -> Result<f64> {
    let eig = eig_sym(theta)?;
    check_pd(&eig)?;
    kkt_from_eig(spec, theta, &eig, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::SolverConfig;

    fn spec(rows: &[&[f64]], gamma: f64, lambda: f64) -> ProblemSpec {
        ProblemSpec::new(SymMatrix::from_rows(rows).unwrap(), gamma, lambda).unwrap()
    }

    #[test]
    fn objective_identity_pair() {
        let s = ProblemSpec::new(SymMatrix::identity(2), 0.7, 1.0).unwrap();
        let v = objective(&s, &SymMatrix::identity(2)).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn objective_diagonal_theta() {
        let s = spec(&[&[2.0, 0.8], &[0.8, 1.0]], 1.0, 0.0);
        let theta = SymMatrix::from_diagonal(&[0.5, 1.0]);
        let v = objective(&s, &theta).unwrap();
        assert!((v - (2.0 + 0.5f64.ln().abs())).abs() < 1e-14);
        assert!((v - 2.6931).abs() < 1e-4);
    }

    #[test]
    fn objective_rejects_singular() {
        let s = ProblemSpec::new(SymMatrix::identity(2), 0.0, 1.0).unwrap();
        let theta = SymMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(objective(&s, &theta), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn aug_lagrangian_at_consensus_is_split_objective() {
        let s = spec(&[&[2.0, 0.3], &[0.3, 1.0]], 0.4, 0.5);
        let t = SymMatrix::from_rows(&[&[1.0, -0.2], &[-0.2, 2.0]]).unwrap();
        let mut state = SolverState::initial(&s, &SolverConfig::default());
        state.theta = t.clone();
        state.gamma_mat = t.clone();
        state.theta_hat = t.clone();
        state.gamma_hat = t.clone();
        let al = aug_lagrangian(&s, &state).unwrap();
        assert!((al - objective(&s, &t).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn aug_lagrangian_infinite_off_consensus() {
        let s = spec(&[&[2.0, 0.3], &[0.3, 1.0]], 0.4, 0.5);
        let mut state = SolverState::initial(&s, &SolverConfig::default());
        state.gamma_hat = SymMatrix::from_rows(&[&[1.0, 0.1], &[0.1, 1.0]]).unwrap();
        assert_eq!(aug_lagrangian(&s, &state).unwrap(), f64::INFINITY);

        let mut state = SolverState::initial(&s, &SolverConfig::default());
        let far = SymMatrix::from_rows(&[&[1.0, 0.6], &[0.6, 1.0]]).unwrap();
        state.theta_hat = far.clone();
        state.gamma_hat = far;
        assert_eq!(aug_lagrangian(&s, &state).unwrap(), f64::INFINITY);
    }

    #[test]
    fn kkt_zero_at_identity_optimum() {
        let s = ProblemSpec::new(SymMatrix::identity(2), 0.1, 0.05).unwrap();
        let r = kkt_report(&s, &SymMatrix::identity(2), default_kkt_tol(0.05)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn kkt_zero_at_inverse() {
        let s = spec(&[&[2.0, 1.0], &[1.0, 2.0]], 0.0, 10.0);
        let inv = SymMatrix::from_rows(&[&[2.0 / 3.0, -1.0 / 3.0], &[-1.0 / 3.0, 2.0 / 3.0]]).unwrap();
        let r = kkt_report(&s, &inv, default_kkt_tol(10.0)).unwrap();
        assert!(r < 1e-14, "{r}");
    }

    #[test]
    fn kkt_detects_suboptimal_point() {
        let s = spec(&[&[2.0, 1.0], &[1.0, 2.0]], 0.0, 10.0);
        let r = kkt_report(&s, &SymMatrix::identity(2), 1e-7).unwrap();
        // G = S - I has off-diagonal 1 and diagonal 1
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kkt_at_bound_sign() {
        // optimum sits at c = -lambda with G_12 > 0
        let s = spec(&[&[1.0, 0.9], &[0.9, 1.0]], 0.0, 0.2);
        let t = (1.0 + 1.16f64.sqrt()) / 2.0;
        let theta = SymMatrix::from_rows(&[&[t, -0.2], &[-0.2, t]]).unwrap();
        let r = kkt_report(&s, &theta, default_kkt_tol(0.2)).unwrap();
        assert!(r < 1e-12, "{r}");
        // the mirror point +lambda is not optimal
        let wrong = SymMatrix::from_rows(&[&[t, 0.2], &[0.2, t]]).unwrap();
        assert!(kkt_report(&s, &wrong, default_kkt_tol(0.2)).unwrap() > 0.1);
    }

    #[test]
    fn evaluate_records_infinite_objective_for_indefinite_hat() {
        let s = spec(&[&[1.0, 0.5], &[0.5, 1.0]], 0.1, 5.0);
        let mut state = SolverState::initial(&s, &SolverConfig::default());
        let bad = SymMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        state.theta_hat = bad.clone();
        state.gamma_hat = bad;
        let d = Diagnostics::evaluate(&s, &state, 0.0).unwrap();
        assert_eq!(d.objective, f64::INFINITY);
        assert!((d.min_eigenvalue + 1.0).abs() < 1e-14);
        assert_eq!(d.constraint_violation, 0.0);
    }
}
