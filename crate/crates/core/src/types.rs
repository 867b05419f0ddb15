//! Problem instances, solver configuration, iterate state and results.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};

/// Relative tolerance for accepting floating-point asymmetry in user input.
pub const ASYMMETRY_RTOL: f64 = 1e-12;

/// A dense real symmetric matrix whose entries `(i, j)` and `(j, i)` are
/// always bit-identical and always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Validates and symmetrizes `m`.
    ///
    /// Input asymmetry up to `1e-12 * max(1, max|m_ij|)` is accepted and
    /// removed by averaging with the transpose.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::DimensionError(format!(
                "expected a square matrix, got {rows}x{cols}"
            )));
        }
        if rows == 0 {
            return Err(Error::DimensionError("matrix order must be at least 1".into()));
        }
        for j in 0..cols {
            for i in 0..rows {
                if !m[(i, j)].is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        let scale = m.amax().max(1.0);
        let mut max_diff = 0.0_f64;
        for j in 0..cols {
            for i in 0..j {
                max_diff = max_diff.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        let tol = ASYMMETRY_RTOL * scale;
        if max_diff > tol {
            return Err(Error::AsymmetricInput { max_diff, tol });
        }
        Ok(Self::symmetrize(m))
    }

    /// Builds a matrix from `p * p` row-major entries.
    pub fn from_row_major(p: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != p * p {
            return Err(Error::DimensionError(format!(
                "expected {} entries for order {p}, got {}",
                p * p,
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(p, p, entries))
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let p = rows.len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::DimensionError("rows must all have length p".into()));
        }
        Self::from_row_major(p, &flat)
    }

    pub fn identity(p: usize) -> Self {
        SymMatrix(DMatrix::identity(p, p))
    }

    pub fn zeros(p: usize) -> Self {
        SymMatrix(DMatrix::zeros(p, p))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let p = diag.len();
        let mut m = DMatrix::zeros(p, p);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        SymMatrix(m)
    }

    /// Averages `m` with its transpose without validation. Used on the
    /// output of matrix products, which are symmetric only up to rounding.
    pub(crate) fn symmetrize(mut m: DMatrix<f64>) -> Self {
        let p = m.nrows();
        for j in 0..p {
            for i in 0..j {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix(m)
    }

    /// Element-wise map computed on the upper triangle and mirrored.
    /// `f` receives `(i, j, a_ij)`.
    pub fn map_entries(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Self {
        let p = self.order();
        let mut out = DMatrix::zeros(p, p);
        for j in 0..p {
            for i in 0..=j {
                let v = f(i, j, self.0[(i, j)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        SymMatrix(out)
    }

    /// Element-wise combination of two matrices of equal order.
    pub fn zip_map(&self, other: &SymMatrix, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        assert_eq!(self.order(), other.order(), "matrix order mismatch");
        self.map_entries(|i, j, a| f(a, other.0[(i, j)]))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_entries(|_, _, a| s * a)
    }

    pub fn add(&self, other: &SymMatrix) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SymMatrix) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order()).map(|i| self.0[(i, i)]).collect()
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let p = self.order();
        let mut out = Vec::with_capacity(p * p);
        for i in 0..p {
            for j in 0..p {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Frobenius inner product `<A, B> = trace(A B)`.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    /// Largest off-diagonal magnitude; zero for `p = 1`.
    pub fn max_abs_offdiag(&self) -> f64 {
        let p = self.order();
        let mut m = 0.0_f64;
        for j in 0..p {
            for i in 0..j {
                m = m.max(self.0[(i, j)].abs());
            }
        }
        m
    }

    /// Sum of off-diagonal magnitudes (both triangles).
    pub fn offdiag_l1(&self) -> f64 {
        let p = self.order();
        let mut s = 0.0;
        for j in 0..p {
            for i in 0..j {
                s += self.0[(i, j)].abs();
            }
        }
        2.0 * s
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Exact symmetry check.
    pub fn is_exactly_symmetric(&self) -> bool {
        let p = self.order();
        (0..p).all(|j| (0..j).all(|i| self.0[(i, j)].to_bits() == self.0[(j, i)].to_bits()))
    }

    /// Max-norm distance `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        (&self.0 - &other.0).amax()
    }
}

#[derive(Serialize, Deserialize)]
struct SymMatrixRepr {
    p: usize,
    entries: Vec<f64>,
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SymMatrixRepr {
            p: self.order(),
            entries: self.to_row_major(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SymMatrixRepr::deserialize(deserializer)?;
        SymMatrix::from_row_major(repr.p, &repr.entries).map_err(serde::de::Error::custom)
    }
}

/// One instance `(S, gamma, lambda)` of the bounded graphical lasso:
///
/// ```text
/// minimize  -logdet(T) + <S, T> + gamma * ||offdiag(T)||_1
/// s.t.      max_{i != j} |T_ij| <= lambda,   T positive definite
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemSpecRepr", into = "ProblemSpecRepr")]
pub struct ProblemSpec {
    covariance: SymMatrix,
    gamma: f64,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct ProblemSpecRepr {
    covariance: SymMatrix,
    gamma: f64,
    lambda: f64,
}

impl TryFrom<ProblemSpecRepr> for ProblemSpec {
    type Error = Error;
    fn try_from(r: ProblemSpecRepr) -> Result<Self> {
        ProblemSpec::new(r.covariance, r.gamma, r.lambda)
    }
}

impl From<ProblemSpec> for ProblemSpecRepr {
    fn from(s: ProblemSpec) -> Self {
        ProblemSpecRepr {
            covariance: s.covariance,
            gamma: s.gamma,
            lambda: s.lambda,
        }
    }
}

impl ProblemSpec {
    /// Validates an instance. `S` need not be positive semidefinite, but its
    /// diagonal must be nonnegative.
    pub fn new(covariance: SymMatrix, gamma: f64, lambda: f64) -> Result<Self> {
        for (name, value) in [("gamma", gamma), ("lambda", lambda)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeParameter { name, value });
            }
        }
        if let Some((_, &d)) = covariance
            .diagonal()
            .iter()
            .enumerate()
            .find(|(_, d)| **d < 0.0)
        {
            return Err(Error::NegativeParameter {
                name: "covariance diagonal",
                value: d,
            });
        }
        Ok(ProblemSpec {
            covariance,
            gamma,
            lambda,
        })
    }

    /// Validates a row-major covariance with the input asymmetry tolerance.
    pub fn from_row_major(p: usize, covariance: &[f64], gamma: f64, lambda: f64) -> Result<Self> {
        Self::new(SymMatrix::from_row_major(p, covariance)?, gamma, lambda)
    }

    pub fn covariance(&self) -> &SymMatrix {
        &self.covariance
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn order(&self) -> usize {
        self.covariance.order()
    }

    /// Same covariance, different penalty and bound.
    pub fn with_params(&self, gamma: f64, lambda: f64) -> Result<Self> {
        Self::new(self.covariance.clone(), gamma, lambda)
    }
}

/// Penalty schedule, stopping tolerance and bookkeeping options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Initial penalty parameter.
    pub rho0: f64,
    /// The penalty doubles after every `doubling_interval` iterations.
    pub doubling_interval: usize,
    /// The run stops once the penalty would exceed this value.
    pub rho_max: f64,
    /// Tolerance on the relative change of the `Theta` multiplier.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Record per-iteration diagnostics.
    pub trace: bool,
    /// Additionally require the primal residual to fall below `epsilon`.
    pub strict: bool,
    /// Additionally require the `gamma_mat` multiplier and the consensus
    /// block to stop moving. The `theta` multiplier test alone can fire
    /// while the iterate is far from optimal: at iteration 2 whenever
    /// `gamma = 0` and the bound is inactive, and whenever clipping pins
    /// `theta_hat` while `dual_gamma` is still growing.
    pub consensus_guard: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rho0: 1.0,
            doubling_interval: 20,
            rho_max: 1e6,
            epsilon: 1e-8,
            max_iters: 10_000,
            trace: false,
            strict: false,
            consensus_guard: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("rho0", self.rho0)?;
        positive("rho_max", self.rho_max)?;
        positive("epsilon", self.epsilon)?;
        if self.rho0 > self.rho_max {
            return Err(Error::InvalidConfig(format!(
                "rho0 ({}) exceeds rho_max ({})",
                self.rho0, self.rho_max
            )));
        }
        if self.doubling_interval == 0 {
            return Err(Error::InvalidConfig("doubling_interval must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }
}

/// The ADMM iterate: primal blocks `(theta, gamma_mat)`, their consensus
/// copies `(theta_hat, gamma_hat)`, one multiplier per block, the current
/// penalty and the number of completed iterations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    pub theta: SymMatrix,
    pub gamma_mat: SymMatrix,
    pub theta_hat: SymMatrix,
    pub gamma_hat: SymMatrix,
    pub dual_theta: SymMatrix,
    pub dual_gamma: SymMatrix,
    pub rho: f64,
    pub iter: usize,
}

impl SolverState {
    /// Primal variables at the identity, multipliers at zero.
    pub fn initial(spec: &ProblemSpec, config: &SolverConfig) -> Self {
        let p = spec.order();
        let eye = SymMatrix::identity(p);
        SolverState {
            theta: eye.clone(),
            gamma_mat: eye.clone(),
            theta_hat: eye.clone(),
            gamma_hat: eye,
            dual_theta: SymMatrix::zeros(p),
            dual_gamma: SymMatrix::zeros(p),
            rho: config.rho0,
            iter: 0,
        }
    }

    /// Primal variables all set to `start` projected onto the bound of
    /// `spec`; multipliers at zero and the penalty back at `rho0`.
    pub fn warm(spec: &ProblemSpec, config: &SolverConfig, start: &SymMatrix) -> Self {
        let start = crate::prox::clip_offdiag(start, spec.lambda());
        SolverState {
            theta: start.clone(),
            gamma_mat: start.clone(),
            theta_hat: start.clone(),
            gamma_hat: start,
            dual_theta: SymMatrix::zeros(spec.order()),
            dual_gamma: SymMatrix::zeros(spec.order()),
            rho: config.rho0,
            iter: 0,
        }
    }

    pub fn order(&self) -> usize {
        self.theta.order()
    }

    pub fn is_finite(&self) -> bool {
        [
            &self.theta,
            &self.gamma_mat,
            &self.theta_hat,
            &self.gamma_hat,
            &self.dual_theta,
            &self.dual_gamma,
        ]
        .iter()
        .all(|m| m.is_finite())
            && self.rho.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    RhoCapReached,
    MaxItersReached,
}

impl Termination {
    pub fn exit_code(self) -> i32 {
        match self {
            Termination::Converged => 0,
            Termination::RhoCapReached => 2,
            Termination::MaxItersReached => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "Converged",
            Termination::RhoCapReached => "RhoCapReached",
            Termination::MaxItersReached => "MaxItersReached",
        }
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// The consensus iterate `theta_hat` at termination.
    pub theta_star: SymMatrix,
    pub termination: Termination,
    pub iters_used: usize,
    pub final_diagnostics: Diagnostics,
    pub trace: Option<Vec<Diagnostics>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_covariance_is_valid() {
        let spec = ProblemSpec::new(SymMatrix::identity(2), 0.1, 0.05).unwrap();
        assert_eq!(spec.order(), 2);
        assert_eq!(spec.gamma(), 0.1);
    }

    #[test]
    fn zero_bound_and_penalty_are_legal() {
        let s = SymMatrix::from_rows(&[&[2.0, 0.8], &[0.8, 1.0]]).unwrap();
        assert!(ProblemSpec::new(s, 0.0, 0.0).is_ok());
    }

    #[test]
    fn asymmetric_input_rejected() {
        let err = SymMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::AsymmetricInput { .. }));
    }

    #[test]
    fn rounding_level_asymmetry_accepted_and_removed() {
        let m = SymMatrix::from_rows(&[&[1.0, 0.3], &[0.3 + 1e-15, 1.0]]).unwrap();
        assert!(m.is_exactly_symmetric());
    }

    #[test]
    fn negative_parameters_rejected() {
        let s = SymMatrix::identity(2);
        assert!(matches!(
            ProblemSpec::new(s.clone(), -0.1, 1.0),
            Err(Error::NegativeParameter { name: "gamma", .. })
        ));
        assert!(matches!(
            ProblemSpec::new(s.clone(), 0.1, -1.0),
            Err(Error::NegativeParameter { name: "lambda", .. })
        ));
        assert!(matches!(
            ProblemSpec::new(s, f64::NAN, 1.0),
            Err(Error::NegativeParameter { .. })
        ));
    }

    #[test]
    fn non_finite_entry_rejected() {
        let err = SymMatrix::from_rows(&[&[1.0, f64::NAN], &[f64::NAN, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry { row: 1, col: 0 }));
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(matches!(
            SymMatrix::from_row_major(0, &[]),
            Err(Error::DimensionError(_))
        ));
    }

    #[test]
    fn initial_state_matches_algorithm_start() {
        let spec = ProblemSpec::new(SymMatrix::identity(3), 0.1, 0.1).unwrap();
        let state = SolverState::initial(&spec, &SolverConfig::default());
        let eye = SymMatrix::identity(3);
        for m in [&state.theta, &state.gamma_mat, &state.theta_hat, &state.gamma_hat] {
            assert_eq!(m, &eye);
        }
        assert_eq!(state.dual_theta, SymMatrix::zeros(3));
        assert_eq!(state.dual_gamma, SymMatrix::zeros(3));
        assert_eq!(state.rho, 1.0);
        assert_eq!(state.iter, 0);
    }

    #[test]
    fn scalar_state_is_legal() {
        let spec = ProblemSpec::from_row_major(1, &[2.0], 0.0, 0.0).unwrap();
        let state = SolverState::initial(&spec, &SolverConfig::default());
        assert_eq!(state.order(), 1);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            rho0: 2e6,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            doubling_interval: 0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn serde_round_trip_is_bit_exact() {
        let s = SymMatrix::from_rows(&[&[0.1, 1.0 / 3.0], &[1.0 / 3.0, std::f64::consts::PI]]).unwrap();
        let spec = ProblemSpec::new(s, 0.7, 1e-300).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: ProblemSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        let state = SolverState::initial(&spec, &SolverConfig::default());
        let json = serde_json::to_string(&state).unwrap();
        let back: SolverState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, state);
    }
}
