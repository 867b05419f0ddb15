//! Closed-form proximal operators used by the ADMM iteration.
//!
//! - [`expand`]: `argmin_T -logdet(T) + (rho/2) ||T - A||_F^2`
//! - [`soft_threshold_offdiag`]: `argmin_G (1/2) ||G - A||_F^2 + tau ||offdiag(G)||_1`
//! - [`clip_offdiag`]: Frobenius projection onto `{T : max_{i != j} |T_ij| <= lambda}`
//!
//! The diagonal is neither penalized nor bounded, so both element-wise
//! operators pass it through unchanged.

use crate::error::Result;
use crate::sym_eig::apply_spectral;
use crate::types::SymMatrix;

/// Positive root of `rho t^2 - rho d t - 1 = 0`, i.e.
/// `(d + sqrt(d^2 + 4/rho)) / 2`, evaluated without cancellation for `d < 0`.
#[inline]
pub fn expand_eigenvalue(d: f64, rho: f64) -> f64 {
    let r = d.hypot(2.0 / rho.sqrt());
    if d >= 0.0 {
        0.5 * (d + r)
    } else {
        (2.0 / rho) / (r - d)
    }
}

/// Proximal map of `-logdet` with penalty `rho`.
///
/// Equals `(rho A + (rho^2 A^2 + 4 rho I)^{1/2}) / (2 rho)`, computed per
/// eigenvalue of `A` so that `A` is never squared. The result is positive
/// definite for any symmetric `A`, including indefinite and singular ones.
pub fn expand(a: &SymMatrix, rho: f64) -> Result<SymMatrix> {
    debug_assert!(rho > 0.0);
    apply_spectral(a, |d| expand_eigenvalue(d, rho))
}

/// Off-diagonal soft-thresholding by `tau` (callers pass `gamma / rho`).
pub fn soft_threshold_offdiag(a: &SymMatrix, tau: f64) -> SymMatrix {
    a.map_entries(|i, j, v| {
        if i == j {
            v
        } else {
            v.signum() * (v.abs() - tau).max(0.0)
        }
    })
}

/// Off-diagonal clipping into `[-lambda, lambda]`.
pub fn clip_offdiag(a: &SymMatrix, lambda: f64) -> SymMatrix {
    a.map_entries(|i, j, v| if i == j { v } else { v.clamp(-lambda, lambda) })
}
