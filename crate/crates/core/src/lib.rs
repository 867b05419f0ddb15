//! Sparse inverse covariance estimation with an element-wise bound on the
//! off-diagonal precision entries:
//!
//! ```text
//! minimize  -logdet(T) + <S, T> + gamma * sum_{i != j} |T_ij|
//! s.t.      |T_ij| <= lambda for all i != j,   T positive definite
//! ```
//!
//! The problem is split into a smooth-plus-penalty block `(theta, gamma_mat)`
//! and a constrained consensus block `(theta_hat, gamma_hat)` and solved by
//! ADMM. Every subproblem has a closed form (see [`prox`]), the penalty is
//! doubled on a fixed schedule, and the run stops when the `theta`
//! multiplier stops moving.
//!
//! ```
//! use glinf::{solve, ProblemSpec, SolverConfig, SymMatrix};
//!
//! let s = SymMatrix::from_rows(&[&[1.0, 0.9], &[0.9, 1.0]]).unwrap();
//! let spec = ProblemSpec::new(s, 0.0, 0.2).unwrap();
//! let result = solve(&spec, &SolverConfig::default()).unwrap();
//! assert!((result.theta_star.get(0, 1) + 0.2).abs() < 1e-9);
//! ```

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod oracle;
pub mod prox;
pub mod solver;
pub mod sweep;
pub mod sym_eig;
pub mod types;
pub mod verify;

pub use diagnostics::{aug_lagrangian, kkt_report, objective, Diagnostics};
pub use error::{Error, Result};
pub use solver::{iterate, solve, solve_from, ContinuationPolicy, Solver, StoppingRule};
pub use types::{ProblemSpec, SolveResult, SolverConfig, SolverState, SymMatrix, Termination};
