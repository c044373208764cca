//! Numerical null spaces via the singular value decomposition.

use crate::error::{Error, Result};
use crate::operator::{Ket, Operator};

/// Default relative tolerance for null-space membership.
pub const NULLSPACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct NullSpace {
    /// Orthonormal basis, ordered by increasing singular value.
    pub vectors: Vec<Ket>,
    /// All singular values, ascending.
    pub singular_values: Vec<f64>,
    /// Absolute cutoff `tol · max(1, ‖M‖_F)` that was applied.
    pub threshold: f64,
}

impl NullSpace {
    /// Ratio of the second-smallest to the smallest singular value.
    pub fn smallest_gap_ratio(&self) -> f64 {
        match self.singular_values.as_slice() {
            [s0, s1, ..] if *s0 > 0.0 => s1 / s0,
            [_, _, ..] => f64::INFINITY,
            _ => f64::INFINITY,
        }
    }
}

/// Computes the numerical null space of `m`: right singular vectors whose
/// singular value is at most `tol · max(1, ‖m‖_F)`.
pub fn null_space(m: &Operator, tol: f64) -> Result<NullSpace> {
    let n = m.dim();
    let svd = m.as_mat().svd().map_err(|e| Error::Solver(format!("singular value decomposition failed: {e:?}")))?;
    let s = svd.S().column_vector();
    let v = svd.V();
    let threshold = tol * m.frobenius_norm().max(1.0);

    // faer sorts singular values in nonincreasing order.
    let mut singular_values: Vec<f64> = (0..n).map(|k| s[k].re).collect();
    let vectors = (0..n)
        .rev()
        .take_while(|&k| singular_values[k] <= threshold)
        .map(|k| (0..n).map(|i| v[(i, k)]).collect())
        .collect();
    singular_values.reverse();
    Ok(NullSpace { vectors, singular_values, threshold })
}

/// Orthonormal basis of the numerical null space; empty when `m` has full
/// numerical rank.
pub fn nullspace_solve(m: &Operator, tol: f64) -> Result<Vec<Ket>> {
    Ok(null_space(m, tol)?.vectors)
}
