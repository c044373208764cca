//! Steady states of the Lindblad generator.
//!
//! The default path takes the right singular vector of the smallest singular
//! value of the column-stacked Liouvillian. The trace-replacement path swaps
//! one diagonal-index row of `L` for the trace functional and solves by LU;
//! it is cheaper and serves as a cross-check.

use std::fmt;
use std::str::FromStr;

use faer::linalg::solvers::Solve;
use faer::Mat;

use crate::dynamics::{from_vec, Lindbladian};
use crate::error::{Error, Result};
use crate::model::FullModel;
use crate::nullspace::{null_space, NULLSPACE_TOL};
use crate::operator::{c64, Operator, ZERO};
use crate::params::SystemParams;

/// Required ratio between the second-smallest and the smallest singular
/// value for the steady state to count as unique.
pub const UNIQUENESS_RATIO: f64 = 1e3;

/// Agreement required between the two trace-replacement solves.
pub const TRACE_SOLVE_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SteadyMethod {
    #[default]
    Svd,
    TraceSolve,
}

impl fmt::Display for SteadyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SteadyMethod::Svd => "svd",
            SteadyMethod::TraceSolve => "lu",
        })
    }
}

impl FromStr for SteadyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svd" => Ok(SteadyMethod::Svd),
            "lu" => Ok(SteadyMethod::TraceSolve),
            other => Err(Error::InvalidArgument(format!("unknown steady-state method '{other}' (expected svd or lu)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    pub method: SteadyMethod,
    /// Also compute the spectral gap (a full eigensolve of `L`).
    pub compute_gap: bool,
    /// Relative null-space tolerance for the SVD path.
    pub tol: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self { method: SteadyMethod::Svd, compute_gap: false, tol: NULLSPACE_TOL }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyResult {
    pub rho_ss: Operator,
    /// `‖L vec(ρ_ss)‖₂`.
    pub residual: f64,
    pub unique: bool,
    /// Slowest nonzero relaxation rate; `Some(0.0)` when the steady state
    /// is not unique.
    pub gap: Option<f64>,
    /// Smallest two singular values of `L` (SVD path only).
    pub smallest_singular_values: Option<(f64, f64)>,
}

fn normalize(v: &[c64], d: usize) -> Result<Operator> {
    let rho = from_vec(v, d);
    let tr = rho.trace();
    if tr.norm() < 1e-300 || !tr.is_finite() {
        return Err(Error::Solver("null vector has zero trace".into()));
    }
    Ok(rho.scale(tr.inv()).hermitian_part())
}

fn residual(lind: &Lindbladian, rho: &Operator) -> f64 {
    let v = crate::dynamics::to_vec(rho);
    let mut out = vec![ZERO; v.len()];
    lind.apply_vec(&v, &mut out);
    out.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn trace_replaced_solve(l: &Mat<c64>, d: usize, row: usize) -> Result<Vec<c64>> {
    let n = d * d;
    let mut m = l.clone();
    for j in 0..n {
        m[(row, j)] = ZERO;
    }
    for k in 0..d {
        m[(row, k + k * d)] = c64::new(1.0, 0.0);
    }
    let mut rhs = Mat::<c64>::zeros(n, 1);
    rhs[(row, 0)] = c64::new(1.0, 0.0);
    m.partial_piv_lu().solve_in_place(&mut rhs);
    let x: Vec<c64> = (0..n).map(|i| rhs[(i, 0)]).collect();
    if x.iter().any(|z| !z.is_finite()) {
        return Err(Error::Solver("trace-replaced Liouvillian is singular".into()));
    }
    Ok(x)
}

/// Steady state of an explicit generator.
pub fn steady_state_with(h: &Operator, collapse: &[Operator], opts: &SteadyOptions) -> Result<SteadyResult> {
    if collapse.is_empty() {
        return Err(Error::InvalidArgument("steady state needs at least one collapse operator".into()));
    }
    let lind = Lindbladian::new(h, collapse)?;
    let d = lind.dim();
    let l = lind.superoperator();

    let (rho_ss, mut unique, smallest) = match opts.method {
        SteadyMethod::Svd => {
            let m = Operator::from_mat(l.clone())?;
            let ns = null_space(&m, opts.tol)?;
            if ns.vectors.is_empty() {
                return Err(Error::Solver(format!(
                    "Liouvillian has no numerical null space (smallest singular value {:.3e}, \
                     threshold {:.3e})",
                    ns.singular_values[0], ns.threshold
                )));
            }
            let unique = ns.vectors.len() == 1 && ns.smallest_gap_ratio() > UNIQUENESS_RATIO;
            // With a degenerate null space, any vector of maximal trace is a
            // valid representative.
            let best = ns.vectors.iter().max_by(|a, b| trace_of(a, d).total_cmp(&trace_of(b, d))).expect("nonempty");
            let sv = (ns.singular_values[0], ns.singular_values.get(1).copied().unwrap_or(f64::INFINITY));
            (normalize(best, d)?, unique, Some(sv))
        }
        SteadyMethod::TraceSolve => {
            let first = trace_replaced_solve(&l, d, 0)?;
            let last = trace_replaced_solve(&l, d, (d - 1) * (d + 1))?;
            let a = normalize(&first, d)?;
            let b = normalize(&last, d)?;
            let unique = a.max_abs_diff(&b) <= TRACE_SOLVE_AGREEMENT;
            (a, unique, None)
        }
    };

    let res = residual(&lind, &rho_ss);
    let norm_l = l.norm_l2();
    if res > 1e-8 * norm_l.max(1.0) {
        unique = false;
        log::warn!("steady-state residual {res:.3e} exceeds 1e-8 * max(1, |L|_F) = {:.3e}", 1e-8 * norm_l.max(1.0));
    }
    let gap = if opts.compute_gap { Some(if unique { gap_of(&l)? } else { 0.0 }) } else { None };
    Ok(SteadyResult { rho_ss, residual: res, unique, gap, smallest_singular_values: smallest })
}

fn trace_of(v: &[c64], d: usize) -> f64 {
    (0..d).map(|k| v[k + k * d]).sum::<c64>().norm()
}

/// Steady state by the default SVD path.
pub fn steady_state(h: &Operator, collapse: &[Operator]) -> Result<SteadyResult> {
    steady_state_with(h, collapse, &SteadyOptions::default())
}

/// Full-model steady state, with feedback replacing the cavity jump when
/// `feedback` is set.
pub fn steady_state_full(p: &SystemParams, feedback: bool, opts: &SteadyOptions) -> Result<SteadyResult> {
    let model = FullModel::new(p, feedback)?;
    steady_state_with(&model.hamiltonian, &model.collapse, opts)
}

/// Full-model steady state under the feedback master equation.
pub fn steady_state_feedback(p: &SystemParams) -> Result<SteadyResult> {
    steady_state_full(p, true, &SteadyOptions::default())
}

fn gap_of(l: &Mat<c64>) -> Result<f64> {
    let norm = l.norm_l2();
    let ev = l.eigenvalues().map_err(|e| Error::Solver(format!("Liouvillian eigensolve failed: {e:?}")))?;
    let cut = 1e-10 * norm;
    Ok(ev.iter().filter(|z| z.norm() > cut).map(|z| z.re.abs()).fold(f64::INFINITY, f64::min))
}

/// Smallest `|Re λ|` over the nonzero eigenvalues `λ` of the Liouvillian.
pub fn spectral_gap(h: &Operator, collapse: &[Operator]) -> Result<f64> {
    let l = Lindbladian::new(h, collapse)?.superoperator();
    gap_of(&l)
}
