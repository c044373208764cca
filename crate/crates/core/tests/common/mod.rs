//! Seeded random operators shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zeno_core::{c64, Ket, Operator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut impl Rng) -> c64 {
    c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn matrix(rng: &mut impl Rng, d: usize) -> Operator {
    Operator::from_fn(d, |_, _| complex(rng))
}

pub fn ket(rng: &mut impl Rng, d: usize) -> Ket {
    let v: Ket = (0..d).map(|_| complex(rng)).collect();
    let n = zeno_core::operator::norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

pub fn hermitian(rng: &mut impl Rng, d: usize) -> Operator {
    matrix(rng, d).hermitian_part()
}

/// `AA†/tr(AA†)`: full rank with probability one.
pub fn density(rng: &mut impl Rng, d: usize) -> Operator {
    let a = matrix(rng, d);
    let m = &a * &a.adjoint();
    let t = m.trace().re;
    m.scale_real(1.0 / t)
}

/// Random Hamiltonian and `n_ops` collapse operators of moderate norm.
pub fn lindbladian(rng: &mut impl Rng, d: usize, n_ops: usize) -> (Operator, Vec<Operator>) {
    let h = hermitian(rng, d);
    let c = (0..n_ops).map(|_| matrix(rng, d).scale_real(0.5)).collect();
    (h, c)
}
