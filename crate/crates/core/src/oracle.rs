//! Reference solutions for small or structurally simple instances.
//!
//! Nothing here touches the ADMM iteration or the proximal operators; the
//! only shared numerical kernel is the symmetric eigensolver.

use crate::error::{Error, Result};
use crate::sym_eig::eig_sym;
use crate::types::{ProblemSpec, SymMatrix};

pub const DEFAULT_GRID_N: usize = 2001;
const GOLDEN_WIDTH: f64 = 1e-10;

/// Reduced objective for `p = 2` as a function of the off-diagonal entry
/// `c`, after minimizing over the diagonal `(a, b)` in closed form.
///
/// For fixed `c`, stationarity in `a` and `b` gives `a = s22 t`,
/// `b = s11 t` with `t = ab - c^2` the positive root of
/// `s11 s22 t^2 - t - c^2 = 0`.
#[derive(Clone, Copy, Debug)]
struct Reduced2 {
    s11: f64,
    s22: f64,
    s12: f64,
    gamma: f64,
}

impl Reduced2 {
    fn t(&self, c: f64) -> f64 {
        let k = self.s11 * self.s22;
        (1.0 + (1.0 + 4.0 * k * c * c).sqrt()) / (2.0 * k)
    }

    fn h(&self, c: f64) -> f64 {
        let t = self.t(c);
        -t.ln() + 2.0 * self.s11 * self.s22 * t + 2.0 * self.s12 * c + 2.0 * self.gamma * c.abs()
    }

    fn assemble(&self, c: f64) -> SymMatrix {
        let t = self.t(c);
        SymMatrix::from_rows(&[&[self.s22 * t, c], &[c, self.s11 * t]])
            .expect("finite symmetric 2x2")
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > width {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Minimizer of a `2 x 2` instance by a grid scan of the reduced objective
/// over `c in [-lambda, lambda]` followed by golden-section refinement of
/// the best bracket. The kinks `c = 0` and `c = +-lambda` are compared
/// against the refined point so that exact zeros and exact bound hits are
/// returned exactly.
pub fn oracle_p2(spec: &ProblemSpec, grid_n: usize) -> Result<SymMatrix> {
    if spec.order() != 2 {
        return Err(Error::DimensionError(format!(
            "oracle_p2 needs a 2x2 problem, got order {}",
            spec.order()
        )));
    }
    if grid_n < 2 {
        return Err(Error::InvalidConfig(format!("grid_n must be at least 2, got {grid_n}")));
    }
    let s = spec.covariance();
    for i in 0..2 {
        if s.get(i, i) <= 0.0 {
            return Err(Error::NonPositiveDiagonal {
                index: i,
                value: s.get(i, i),
            });
        }
    }
    let red = Reduced2 {
        s11: s.get(0, 0),
        s22: s.get(1, 1),
        s12: s.get(0, 1),
        gamma: spec.gamma(),
    };
    let lambda = spec.lambda();
    if lambda == 0.0 {
        return Ok(red.assemble(0.0));
    }

    let step = 2.0 * lambda / (grid_n - 1) as f64;
    let grid = |k: usize| (-lambda + k as f64 * step).min(lambda);
    let best = (0..grid_n)
        .min_by(|&i, &j| red.h(grid(i)).total_cmp(&red.h(grid(j))))
        .unwrap_or(0);
    let lo = grid(best.saturating_sub(1));
    let hi = grid((best + 1).min(grid_n - 1));
    let refined = golden_section(|c| red.h(c), lo, hi, GOLDEN_WIDTH);

    // min_by keeps the first of equal elements, so ties go to the kinks
    let c = [0.0, -lambda, lambda, refined]
        .into_iter()
        .min_by(|a, b| red.h(*a).total_cmp(&red.h(*b)))
        .unwrap_or(refined);
    Ok(red.assemble(c))
}

/// `diag(1 / S_11, ..., 1 / S_pp)`, the optimum when `lambda = 0`.
pub fn oracle_diagonal(spec: &ProblemSpec) -> Result<SymMatrix> {
    if spec.lambda() != 0.0 {
        return Err(Error::InvalidConfig(format!(
            "oracle_diagonal needs lambda = 0, got {}",
            spec.lambda()
        )));
    }
    let diag = spec.covariance().diagonal();
    if let Some((index, &value)) = diag.iter().enumerate().find(|(_, d)| **d <= 0.0) {
        return Err(Error::NonPositiveDiagonal { index, value });
    }
    Ok(SymMatrix::from_diagonal(
        &diag.iter().map(|d| 1.0 / d).collect::<Vec<_>>(),
    ))
}

/// `inv(S)`, the optimum when `gamma = 0` and the bound is inactive.
pub fn oracle_unconstrained(spec: &ProblemSpec) -> Result<SymMatrix> {
    if spec.gamma() != 0.0 {
        return Err(Error::InvalidConfig(format!(
            "oracle_unconstrained needs gamma = 0, got {}",
            spec.gamma()
        )));
    }
    let eig = eig_sym(spec.covariance())?;
    let min = eig.min_eigenvalue();
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let inv = eig.reconstruct_with(|d| 1.0 / d)?;
    let max_offdiag = inv.max_abs_offdiag();
    if max_offdiag > spec.lambda() {
        return Err(Error::ConstraintActive {
            max_offdiag,
            lambda: spec.lambda(),
        });
    }
    Ok(inv)
}
