//! Matrix exponentials.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::operator::{c64, Operator};

/// Hermiticity required of a generator passed to [`unitary_from_generator`].
pub const GENERATOR_HERMITIAN_TOL: f64 = 1e-12;

/// `exp(-iG)` for hermitian `G`, via its eigendecomposition.
pub fn unitary_from_generator(generator: &Operator) -> Result<Operator> {
    let err = generator.hermiticity_error();
    if err > GENERATOR_HERMITIAN_TOL {
        return Err(Error::InvalidArgument(format!("generator is not hermitian (max |G - G†| = {err:.3e})")));
    }
    let h = generator.hermitian_part();
    let eig = h
        .as_mat()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Solver(format!("hermitian eigensolve failed: {e:?}")))?;
    let u = eig.U();
    let s = eig.S();
    let n = generator.dim();
    let phases: Vec<c64> = (0..n)
        .map(|k| {
            let w = s[k].re;
            c64::new(w.cos(), -w.sin())
        })
        .collect();
    let scaled = Mat::from_fn(n, n, |i, k| u[(i, k)] * phases[k]);
    Operator::from_mat(&scaled * u.adjoint())
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(A)` for a general square matrix by scaling and squaring with a
/// degree-13 Padé approximant.
pub fn expm(a: &Operator) -> Result<Operator> {
    let n = a.dim();
    let norm = a.one_norm();
    if !norm.is_finite() {
        return Err(Error::InvalidArgument("matrix exponential of non-finite matrix".into()));
    }
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(squarings);
    let a = a.as_mat() * faer::Scale(c64::new(scale, 0.0));

    let id = Mat::<c64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| faer::Scale(c64::new(PADE13[k], 0.0));

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u_inner = u_inner + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let p = &v + &u;
    let q = &v - &u;
    let lu = q.partial_piv_lu();
    let mut r = p;
    lu.solve_in_place(&mut r);
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.norm_max().is_nan() {
        return Err(Error::Solver("matrix exponential produced NaN".into()));
    }
    Operator::from_mat(r)
}
