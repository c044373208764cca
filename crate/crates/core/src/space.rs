//! Tensor-product structure of the Hilbert space.
//!
//! Conventions, fixed for every run:
//! - subsystem order is `[atom 1, atom 2, cavity]`;
//! - atomic levels are ordered `|g⟩=0, |e⟩=1, |p⟩=2, |r⟩=3`;
//! - the cavity ladder is ordered by photon number `0..=N_c`;
//! - the Kronecker convention makes the first subsystem the most significant
//!   digit of a flat index: `idx = ((a1 * 4) + a2) * (N_c + 1) + n`.

use crate::error::{Error, Result};
use crate::operator::{c64, Operator, ZERO};

pub const ATOM_DIM: usize = 4;
pub const ATOM1: usize = 0;
pub const ATOM2: usize = 1;
pub const CAVITY: usize = 2;

/// Atomic levels of the four-level N-type scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    G = 0,
    E = 1,
    P = 2,
    R = 3,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::G, Level::E, Level::P, Level::R];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

/// `|a⟩⟨b|` on a single atom.
pub fn atom_op(a: Level, b: Level) -> Operator {
    Operator::basis(ATOM_DIM, a.index(), b.index())
}

/// Ordered subsystem dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceLayout {
    dims: Vec<usize>,
}

impl SpaceLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Dimension(format!("invalid subsystem dimensions {dims:?}")));
        }
        Ok(Self { dims })
    }

    /// Two atoms and a cavity truncated at `fock_cutoff` photons.
    pub fn atoms_and_cavity(fock_cutoff: usize) -> Self {
        Self { dims: vec![ATOM_DIM, ATOM_DIM, fock_cutoff + 1] }
    }

    /// Two atoms without a cavity factor.
    pub fn atoms() -> Self {
        Self { dims: vec![ATOM_DIM, ATOM_DIM] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn has_cavity(&self) -> bool {
        self.dims.len() > CAVITY
    }

    /// Photon-number levels (`N_c + 1`), or 1 when there is no cavity.
    pub fn cavity_dim(&self) -> usize {
        self.dims.get(CAVITY).copied().unwrap_or(1)
    }

    /// Flat index of a product basis state.
    pub fn index(&self, digits: &[usize]) -> usize {
        assert_eq!(digits.len(), self.dims.len(), "digit count does not match layout");
        digits.iter().zip(&self.dims).fold(0, |acc, (&d, &n)| {
            assert!(d < n, "digit {d} out of range for subsystem of dim {n}");
            acc * n + d
        })
    }

    /// Inverse of [`SpaceLayout::index`].
    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &n) in self.dims.iter().enumerate().rev() {
            out[slot] = idx % n;
            idx /= n;
        }
        out
    }

    /// Layout of the subsystems in `keep` (sorted, deduplicated).
    pub fn subset(&self, keep: &[usize]) -> Result<Self> {
        let keep = normalize_keep(keep, self.dims.len())?;
        Ok(Self { dims: keep.iter().map(|&s| self.dims[s]).collect() })
    }
}

fn normalize_keep(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace needs at least one kept subsystem".into()));
    }
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if let Some(&bad) = k.iter().find(|&&s| s >= n) {
        return Err(Error::InvalidArgument(format!("subsystem {bad} out of range (layout has {n})")));
    }
    Ok(k)
}

/// Kronecker product `A ⊗ B`:
/// `(A⊗B)[i·dB + k, j·dB + l] = A[i,j]·B[k,l]`.
pub fn tensor_product(a: &Operator, b: &Operator) -> Operator {
    let (da, db) = (a.dim(), b.dim());
    let mut out = Operator::zeros(da * db);
    for j in 0..da {
        for i in 0..da {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for l in 0..db {
                for k in 0..db {
                    let bkl = b.get(k, l);
                    if bkl != ZERO {
                        out.set(i * db + k, j * db + l, aij * bkl);
                    }
                }
            }
        }
    }
    out
}

/// Kronecker product of column vectors.
pub fn tensor_ket(a: &[c64], b: &[c64]) -> Vec<c64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` acting on `slot`.
pub fn embed(op: &Operator, slot: usize, layout: &SpaceLayout) -> Result<Operator> {
    let dims = layout.dims();
    let Some(&expected) = dims.get(slot) else {
        return Err(Error::Dimension(format!("slot {slot} does not exist in layout {dims:?}")));
    };
    if op.dim() != expected {
        return Err(Error::Dimension(format!(
            "operator of dim {} cannot act on slot {slot}, which expects dim {expected}",
            op.dim()
        )));
    }
    let left: usize = dims[..slot].iter().product();
    let right: usize = dims[slot + 1..].iter().product();
    let n = layout.total_dim();
    let mut out = Operator::zeros(n);
    let entries = op.nonzeros();
    for outer in 0..left {
        for inner in 0..right {
            for &(i, j, v) in &entries {
                let row = (outer * expected + i) * right + inner;
                let col = (outer * expected + j) * right + inner;
                out.set(row, col, v);
            }
        }
    }
    Ok(out)
}

/// Traces out every subsystem not listed in `keep`.
///
/// The kept subsystems appear in ascending slot order in the result.
pub fn partial_trace(rho: &Operator, keep: &[usize], layout: &SpaceLayout) -> Result<Operator> {
    if rho.dim() != layout.total_dim() {
        return Err(Error::Dimension(format!("operator dim {} does not match layout {:?}", rho.dim(), layout.dims())));
    }
    let keep = normalize_keep(keep, layout.dims().len())?;
    let traced: Vec<usize> = (0..layout.dims().len()).filter(|s| !keep.contains(s)).collect();
    let kept_layout = layout.subset(&keep)?;
    let kept_dim = kept_layout.total_dim();
    let traced_dims: Vec<usize> = traced.iter().map(|&s| layout.dims()[s]).collect();
    let traced_total: usize = traced_dims.iter().product();

    // Flat index of (kept digits, traced digits) in the full space.
    let full_index = |kept_flat: usize, traced_flat: usize| -> usize {
        let kd = kept_layout.digits(kept_flat);
        let mut td = vec![0; traced.len()];
        let mut t = traced_flat;
        for (pos, &n) in traced_dims.iter().enumerate().rev() {
            td[pos] = t % n;
            t /= n;
        }
        let mut digits = vec![0; layout.dims().len()];
        for (pos, &s) in keep.iter().enumerate() {
            digits[s] = kd[pos];
        }
        for (pos, &s) in traced.iter().enumerate() {
            digits[s] = td[pos];
        }
        layout.index(&digits)
    };

    let index_table: Vec<Vec<usize>> =
        (0..kept_dim).map(|a| (0..traced_total).map(|t| full_index(a, t)).collect()).collect();

    let mut out = Operator::zeros(kept_dim);
    for a in 0..kept_dim {
        for b in 0..kept_dim {
            let acc = index_table[a].iter().zip(&index_table[b]).map(|(&i, &j)| rho.get(i, j)).sum();
            out.set(a, b, acc);
        }
    }
    Ok(out)
}
