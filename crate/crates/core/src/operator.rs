//! Dense complex square matrices.
//!
//! [`Operator`] is the common currency for Hamiltonians, collapse operators
//! and density matrices. Storage is a [`faer::Mat`], which is column-major:
//! entry `(i, j)` lives at offset `i + j * dim` of the backing buffer. All
//! index arithmetic elsewhere in the crate (tensor products, vectorization)
//! is written in terms of `(row, col)` pairs and never depends on the buffer
//! order.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use faer::{Mat, Side};

use crate::error::{Error, Result};

pub use faer::c64;

/// State vector in the computational basis.
pub type Ket = Vec<c64>;

/// Default tolerance for hermiticity and unitarity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const I: c64 = c64 { re: 0.0, im: 1.0 };

#[derive(Clone, PartialEq)]
pub struct Operator {
    mat: Mat<c64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self { mat: Mat::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self { mat: Mat::identity(dim, dim) }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> c64) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self { mat: Mat::from_fn(dim, dim, f) }
    }

    /// Wraps a square matrix.
    pub fn from_mat(mat: Mat<c64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "operator must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { mat })
    }

    /// Builds an operator from row-major nested rows.
    pub fn from_rows(rows: &[Vec<c64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("rows must form a non-empty square".into()));
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    /// `|ket⟩⟨bra|`
    pub fn outer(ket: &[c64], bra: &[c64]) -> Self {
        assert_eq!(ket.len(), bra.len(), "outer product of mismatched vectors");
        Self::from_fn(ket.len(), |i, j| ket[i] * bra[j].conj())
    }

    pub fn projector(ket: &[c64]) -> Self {
        Self::outer(ket, ket)
    }

    /// Single-entry matrix `|i⟩⟨j|`.
    pub fn basis(dim: usize, i: usize, j: usize) -> Self {
        let mut op = Self::zeros(dim);
        op.mat[(i, j)] = ONE;
        op
    }

    pub fn diagonal(entries: &[c64]) -> Self {
        let mut op = Self::zeros(entries.len());
        for (k, &v) in entries.iter().enumerate() {
            op.mat[(k, k)] = v;
        }
        op
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: c64) {
        self.mat[(i, j)] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: c64) {
        self.mat[(i, j)] += v;
    }

    pub fn as_mat(&self) -> &Mat<c64> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint().to_owned() }
    }

    pub fn transpose(&self) -> Self {
        Self { mat: self.mat.transpose().to_owned() }
    }

    pub fn conj(&self) -> Self {
        Self { mat: self.mat.conjugate().to_owned() }
    }

    pub fn scale(&self, s: c64) -> Self {
        Self::from_fn(self.dim(), |i, j| self.mat[(i, j)] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64::new(s, 0.0))
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|k| self.mat[(k, k)]).sum()
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm_l2()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.dim();
        (0..n).map(|j| (0..n).map(|i| self.mat[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.norm_max()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        m
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                m = m.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        m
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = &self.adjoint() * self;
        prod.max_abs_diff(&Operator::identity(self.dim())) <= tol
    }

    /// `(A + A†)/2`
    pub fn hermitian_part(&self) -> Operator {
        let n = self.dim();
        Self::from_fn(n, |i, j| (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5)
    }

    /// Eigenvalues of the hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let h = self.hermitian_part();
        h.mat
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Solver(format!("hermitian eigensolve failed: {e:?}")))
    }

    /// Smallest eigenvalue of the hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.hermitian_eigenvalues()?.first().copied().unwrap_or(0.0))
    }

    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.is_hermitian(tol.max(HERMITIAN_TOL)) && self.min_eigenvalue().map(|m| m >= -tol).unwrap_or(false)
    }

    /// Checks the density-matrix contract (hermitian, unit trace, PSD) at `tol`.
    pub fn check_density_matrix(&self, tol: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(Error::InvalidArgument(format!("density matrix is not hermitian (error {herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidArgument(format!("density matrix trace is {tr} instead of 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < -tol {
            return Err(Error::InvalidArgument(format!("density matrix has negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// `self · ket`
    pub fn apply(&self, ket: &[c64]) -> Ket {
        let n = self.dim();
        assert_eq!(ket.len(), n, "ket dimension mismatch");
        let mut out = vec![ZERO; n];
        for (j, &kj) in ket.iter().enumerate() {
            if kj == ZERO {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.mat[(i, j)] * kj;
            }
        }
        out
    }

    /// `⟨ket|self|ket⟩`
    pub fn expectation(&self, ket: &[c64]) -> c64 {
        inner(ket, &self.apply(ket))
    }

    /// `⟨bra|self|ket⟩`
    pub fn matrix_element(&self, bra: &[c64], ket: &[c64]) -> c64 {
        inner(bra, &self.apply(ket))
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn nonzeros(&self) -> Vec<(usize, usize, c64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let v = self.mat[(i, j)];
                if v != ZERO {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Operator) -> c64 {
        let n = self.dim();
        assert_eq!(n, other.dim());
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.mat[(i, k)] * other.mat[(k, i)];
            }
        }
        acc
    }
}

/// `⟨a|b⟩`
pub fn inner(a: &[c64], b: &[c64]) -> c64 {
    assert_eq!(a.len(), b.len(), "inner product of mismatched vectors");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim(), self.dim())?;
        if self.dim() <= 8 {
            for i in 0..self.dim() {
                let row: Vec<String> = (0..self.dim())
                    .map(|j| {
                        let v = self.get(i, j);
                        format!("{:+.3}{:+.3}i", v.re, v.im)
                    })
                    .collect();
                writeln!(f, "  [{}]", row.join(", "))?;
            }
        }
        Ok(())
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator product dimension mismatch");
        Operator { mat: &self.mat * &rhs.mat }
    }
}

impl Mul<c64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: c64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: f64) -> Operator {
        self.scale_real(rhs)
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator sum dimension mismatch");
        Operator { mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator difference dimension mismatch");
        Operator { mat: &self.mat - &rhs.mat }
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        assert_eq!(self.dim(), rhs.dim(), "operator sum dimension mismatch");
        self.mat += &rhs.mat;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn predicates_on_pauli_matrices() {
        let sx = Operator::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        let sy = Operator::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
        assert!(sx.is_hermitian(1e-15));
        assert!(sy.is_unitary(1e-15));
        assert!(!sx.is_positive_semidefinite(1e-12));
        assert_eq!(sx.trace(), ZERO);
        let comm = sx.commutator(&sy);
        // [σx, σy] = 2iσz
        assert_eq!(comm.get(0, 0), c(0.0, 2.0));
        assert_eq!(comm.get(1, 1), c(0.0, -2.0));
    }

    #[test]
    fn density_matrix_check_rejects_bad_inputs() {
        let mut rho = Operator::diagonal(&[c(0.5, 0.0), c(0.5, 0.0)]);
        assert!(rho.check_density_matrix(1e-10).is_ok());
        rho.set(0, 1, c(0.1, 0.0));
        assert!(rho.check_density_matrix(1e-10).is_err());
        let neg = Operator::diagonal(&[c(1.5, 0.0), c(-0.5, 0.0)]);
        assert!(neg.check_density_matrix(1e-10).is_err());
    }

    #[test]
    fn non_square_matrices_are_rejected() {
        assert!(Operator::from_mat(Mat::zeros(2, 3)).is_err());
        assert!(Operator::from_rows(&[vec![ONE, ZERO]]).is_err());
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = Operator::from_fn(3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let b = Operator::from_fn(3, |i, j| c((i * j) as f64, 1.0));
        let direct = (&a * &b).trace();
        assert!((direct - a.trace_product(&b)).norm() < 1e-12);
    }
}
