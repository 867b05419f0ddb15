//! Symmetric eigendecomposition and spectral functions of symmetric matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::types::SymMatrix;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// (one per column). Each column's first nonzero component is nonnegative.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenPair {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `Q diag(phi(d)) Q^T`, symmetrized.
    pub fn reconstruct_with(&self, phi: impl Fn(f64) -> f64) -> Result<SymMatrix> {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (k, &d) in self.eigenvalues.iter().enumerate() {
            let v = phi(d);
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { row: k, col: k });
            }
            scaled.column_mut(k).scale_mut(v);
        }
        Ok(SymMatrix::symmetrize(scaled * q.transpose()))
    }
}

/// Decomposes `a = Q diag(d) Q^T`.
pub fn eig_sym(a: &SymMatrix) -> Result<EigenPair> {
    let p = a.order();
    let max_niter = 1000 * p.max(1);
    let eig = SymmetricEigen::try_new(a.as_matrix().clone(), f64::EPSILON, max_niter)
        .ok_or(Error::ConvergenceFailure { order: p })?;

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut eigenvalues = DVector::zeros(p);
    let mut eigenvectors = DMatrix::zeros(p, p);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues[dst] = eig.eigenvalues[src];
        let mut col = eig.eigenvectors.column(src).into_owned();
        if let Some(first) = col.iter().find(|v| **v != 0.0) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(EigenPair {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies the scalar map `phi` to the spectrum of `a`.
pub fn apply_spectral(a: &SymMatrix, phi: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    eig_sym(a)?.reconstruct_with(phi)
}

/// Smallest eigenvalue of `a`.
pub fn min_eigenvalue(a: &SymMatrix) -> Result<f64> {
    Ok(eig_sym(a)?.min_eigenvalue())
}
