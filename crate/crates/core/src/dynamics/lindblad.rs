//! Lindblad generator in matrix and superoperator form.
//!
//! Vectorization is column-stacking: `vec(ρ)[i + j·d] = ρ[i, j]`, so that
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use faer::Mat;

use crate::error::{Error, Result};
use crate::operator::{c64, Operator, ZERO};

/// Nonzero entries of an operator as `(row, col, value)` triplets.
#[derive(Debug, Clone)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, c64)>,
}

impl SparseOp {
    pub fn from_operator(op: &Operator) -> Self {
        Self { dim: op.dim(), entries: op.nonzeros() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, c64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }
}

/// A Lindblad generator `ρ ↦ −i[H, ρ] + Σ_j (L_j ρ L_j† − ½{L_j†L_j, ρ})`.
#[derive(Debug, Clone)]
pub struct Lindbladian {
    dim: usize,
    hamiltonian: Operator,
    collapse: Vec<Operator>,
    /// `K = H − (i/2) Σ L_j†L_j`, so the no-jump part is `−i(Kρ − ρK†)`.
    k: SparseOp,
    jumps: Vec<SparseOp>,
}

impl Lindbladian {
    pub fn new(hamiltonian: &Operator, collapse: &[Operator]) -> Result<Self> {
        let dim = hamiltonian.dim();
        for (j, l) in collapse.iter().enumerate() {
            if l.dim() != dim {
                return Err(Error::Dimension(format!(
                    "collapse operator {j} has dim {}, Hamiltonian has dim {dim}",
                    l.dim()
                )));
            }
        }
        let mut k = hamiltonian.clone();
        for l in collapse {
            k += &(&l.adjoint() * l).scale(c64::new(0.0, -0.5));
        }
        Ok(Self {
            dim,
            hamiltonian: hamiltonian.clone(),
            collapse: collapse.to_vec(),
            k: SparseOp::from_operator(&k),
            jumps: collapse.iter().map(SparseOp::from_operator).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn collapse(&self) -> &[Operator] {
        &self.collapse
    }

    /// `out ← L(ρ)` on column-stacked buffers of length `dim²`.
    pub fn apply_vec(&self, rho: &[c64], out: &mut [c64]) {
        let d = self.dim;
        debug_assert_eq!(rho.len(), d * d);
        debug_assert_eq!(out.len(), d * d);
        out.fill(ZERO);
        let mi = c64::new(0.0, -1.0);

        // −iKρ: row i of the result picks up K[i,k]·row k of ρ.
        for &(i, k, v) in self.k.entries() {
            let c = mi * v;
            for j in 0..d {
                out[i + j * d] += c * rho[k + j * d];
            }
        }
        // +iρK†: column j picks up conj(K[j,k])·column k of ρ.
        for &(j, k, v) in self.k.entries() {
            let c = c64::new(0.0, 1.0) * v.conj();
            let (src, dst) = (k * d, j * d);
            for i in 0..d {
                out[dst + i] += c * rho[src + i];
            }
        }
        for l in &self.jumps {
            let e = l.entries();
            for &(j, lj, b) in e {
                let bc = b.conj();
                for &(i, k, a) in e {
                    out[i + j * d] += a * rho[k + lj * d] * bc;
                }
            }
        }
    }

    /// `L(ρ)` as an operator.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        if rho.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "density matrix has dim {}, generator has dim {}",
                rho.dim(),
                self.dim
            )));
        }
        let v = to_vec(rho);
        let mut out = vec![ZERO; v.len()];
        self.apply_vec(&v, &mut out);
        Ok(from_vec(&out, self.dim))
    }

    /// Dense `d² × d²` superoperator.
    pub fn superoperator(&self) -> Mat<c64> {
        let d = self.dim;
        let mut m = Mat::<c64>::zeros(d * d, d * d);
        let mi = c64::new(0.0, -1.0);
        // Kρ = (I ⊗ K) vec ρ
        for &(i, k, v) in self.k.entries() {
            for j in 0..d {
                m[(i + j * d, k + j * d)] += mi * v;
            }
        }
        // ρK† = ((K†)ᵀ ⊗ I) vec ρ = (conj K ⊗ I) vec ρ
        for &(j, l, v) in self.k.entries() {
            for i in 0..d {
                m[(i + j * d, i + l * d)] += c64::new(0.0, 1.0) * v.conj();
            }
        }
        // LρL† = (conj L ⊗ L) vec ρ
        for jump in &self.jumps {
            let e = jump.entries();
            for &(j, l, b) in e {
                for &(i, k, a) in e {
                    m[(i + j * d, k + l * d)] += a * b.conj();
                }
            }
        }
        m
    }
}

/// Time derivative `dρ/dt` of the Lindblad master equation.
pub fn lindblad_apply(h: &Operator, collapse: &[Operator], rho: &Operator) -> Result<Operator> {
    Lindbladian::new(h, collapse)?.apply(rho)
}

/// Column-stacked Liouvillian `L` with `vec(dρ/dt) = L vec(ρ)`.
pub fn liouvillian_matrix(h: &Operator, collapse: &[Operator]) -> Result<Mat<c64>> {
    Ok(Lindbladian::new(h, collapse)?.superoperator())
}

/// Column-stacked copy of `rho`.
pub fn to_vec(rho: &Operator) -> Vec<c64> {
    let d = rho.dim();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            v.push(rho.get(i, j));
        }
    }
    v
}

/// Inverse of [`to_vec`].
pub fn from_vec(v: &[c64], dim: usize) -> Operator {
    Operator::from_fn(dim, |i, j| v[i + j * dim])
}
