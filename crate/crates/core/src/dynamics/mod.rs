//! Time evolution under the Lindblad master equation.
//!
//! Two propagation methods share one sampling loop:
//! - [`Method::DormandPrince`] integrates the matrix ODE with an adaptive
//!   5(4) Runge–Kutta pair and a sparse right-hand side;
//! - [`Method::Propagator`] multiplies `vec(ρ)` by `exp(L·Δt)` between
//!   samples, with one dense exponential per distinct interval.
//!
//! The Rydberg detunings make the full model stiff (`Δ` up to `200g`
//! against dynamics on the `10⁴/g` scale), so long full-model runs use the
//! propagator.

mod lindblad;
mod observables;
mod rk45;

pub use lindblad::{from_vec, lindblad_apply, liouvillian_matrix, to_vec, Lindbladian, SparseOp};
pub use observables::{atomic_state, fidelity_singlet, observables_record, purity, Observables, StateCheck};
pub use rk45::{DormandPrince, Projection, StepStats, Tolerances};

use std::fmt;
use std::str::FromStr;

use faer::Mat;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::model::FullModel;
use crate::operator::{c64, Operator};
use crate::params::SystemParams;
use crate::space::SpaceLayout;

/// Tolerance on the initial density matrix.
pub const INITIAL_STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    DormandPrince,
    Propagator,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::DormandPrince => "rk45",
            Method::Propagator => "propagator",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk45" => Ok(Method::DormandPrince),
            "propagator" => Ok(Method::Propagator),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}' (expected rk45 or propagator)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Symmetrize after every accepted step instead of only at samples.
    pub hermitize_each_step: bool,
    pub method: Method,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: f64::INFINITY,
            hermitize_each_step: false,
            method: Method::default(),
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "integrator tolerances and max_step must be positive (rel {}, abs {}, max_step {})",
                self.rel_tol, self.abs_tol, self.max_step
            )));
        }
        Ok(())
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

/// Sampled observables and state diagnostics of one evolution.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub rows: Vec<Observables>,
    pub checks: Vec<StateCheck>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Observables> {
        self.rows.last()
    }

    pub fn max_trace_error(&self) -> f64 {
        self.checks.iter().map(|c| c.trace_error).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.checks.iter().map(|c| c.hermiticity_error).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.checks.iter().map(|c| c.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    /// First sample time at which the singlet fidelity reaches `threshold`.
    pub fn time_to_fidelity(&self, threshold: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.fidelity_s >= threshold).map(|r| r.t)
    }
}

/// `0, dt, 2dt, …` up to and including `t_max` (within rounding).
pub fn sample_times(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_max >= 0.0 && dt > 0.0 && t_max.is_finite() && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need t_max >= 0 and sample_dt > 0, got t_max = {t_max}, sample_dt = {dt}"
        )));
    }
    let n = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| k as f64 * dt).collect())
}

fn check_samples(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("no sample times requested".into()));
    }
    if !times[0].is_finite() || times[0] < 0.0 {
        return Err(Error::InvalidArgument(format!("sample times must start at t >= 0, got {}", times[0])));
    }
    if let Some(w) = times.windows(2).find(|w| w[1].is_nan() || w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!(
            "sample times must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn hermitize_vec(v: &mut [c64], d: usize) {
    for j in 0..d {
        let jj = j + j * d;
        v[jj] = c64::new(v[jj].re, 0.0);
        for i in j + 1..d {
            let a = i + j * d;
            let b = j + i * d;
            let m = (v[a] + v[b].conj()) * 0.5;
            v[a] = m;
            v[b] = m.conj();
        }
    }
}

/// Evolves `rho0` from `t = 0` and calls `observe(t, ρ(t), check)` at every
/// sample time, with `ρ(t)` symmetrized. Returns the final state.
pub fn evolve_states(
    lind: &Lindbladian,
    rho0: &Operator,
    sample_times: &[f64],
    cfg: &IntegratorConfig,
    mut observe: impl FnMut(f64, &Operator, StateCheck) -> Result<()>,
) -> Result<(Operator, StepStats)> {
    let (mut finals, stats) =
        evolve_batch(lind, std::slice::from_ref(rho0), sample_times, cfg, |_, t, rho, check| observe(t, rho, check))?;
    Ok((finals.remove(0), stats))
}

/// [`evolve_states`] for several initial states under one generator;
/// `observe` receives the index of the state. With
/// [`Method::Propagator`] the exponentials are computed once and shared.
pub fn evolve_batch(
    lind: &Lindbladian,
    rho0s: &[Operator],
    sample_times: &[f64],
    cfg: &IntegratorConfig,
    mut observe: impl FnMut(usize, f64, &Operator, StateCheck) -> Result<()>,
) -> Result<(Vec<Operator>, StepStats)> {
    cfg.validate()?;
    check_samples(sample_times)?;
    if rho0s.is_empty() {
        return Err(Error::InvalidArgument("no initial states given".into()));
    }
    for rho0 in rho0s {
        if rho0.dim() != lind.dim() {
            return Err(Error::Dimension(format!(
                "initial state has dim {}, generator has dim {}",
                rho0.dim(),
                lind.dim()
            )));
        }
        rho0.check_density_matrix(INITIAL_STATE_TOL)?;
    }

    let d = lind.dim();
    let mut ys: Vec<Vec<c64>> = rho0s.iter().map(to_vec).collect();
    let mut emit = |k: usize, t: f64, y: &mut Vec<c64>| -> Result<()> {
        let raw = from_vec(y, d);
        let check = StateCheck::of(t, &raw)?;
        hermitize_vec(y, d);
        observe(k, t, &from_vec(y, d), check)
    };

    let stats = match cfg.method {
        Method::DormandPrince => {
            let tol = Tolerances { rel: cfg.rel_tol, abs: cfg.abs_tol, max_step: cfg.max_step };
            let mut total = StepStats::default();
            for (k, y) in ys.iter_mut().enumerate() {
                let mut dp = DormandPrince::new(d * d, tol);
                let mut rhs = |y: &[c64], out: &mut [c64]| lind.apply_vec(y, out);
                let mut t = 0.0;
                for &ts in sample_times {
                    let project = |v: &mut [c64]| hermitize_vec(v, d);
                    let hook: Option<Projection<'_>> = if cfg.hermitize_each_step { Some(&project) } else { None };
                    dp.advance_projected(y, t, ts, &mut rhs, hook)?;
                    t = ts;
                    emit(k, t, y)?;
                    dp.invalidate();
                }
                total.accepted += dp.stats.accepted;
                total.rejected += dp.stats.rejected;
                total.rhs_evals += dp.stats.rhs_evals;
            }
            total
        }
        Method::Propagator => {
            let l = lind.superoperator();
            let mut cache: Vec<(f64, Mat<c64>)> = Vec::new();
            let mut steps = 0;
            let mut t = 0.0;
            for &ts in sample_times {
                let dt = ts - t;
                if dt > 0.0 {
                    let idx = match cache.iter().position(|(h, _)| (h - dt).abs() <= 1e-12 * dt) {
                        Some(i) => i,
                        None => {
                            let gen = Operator::from_mat(&l * faer::Scale(c64::new(dt, 0.0)))?;
                            log::debug!("propagator for dt = {dt} (dim {})", d * d);
                            cache.push((dt, expm(&gen)?.into_mat()));
                            cache.len() - 1
                        }
                    };
                    let v = Mat::from_fn(d * d, ys.len(), |i, k| ys[k][i]);
                    let w = &cache[idx].1 * &v;
                    for (k, y) in ys.iter_mut().enumerate() {
                        for (i, yi) in y.iter_mut().enumerate() {
                            *yi = w[(i, k)];
                        }
                    }
                    steps += 1;
                }
                t = ts;
                for (k, y) in ys.iter_mut().enumerate() {
                    emit(k, t, y)?;
                }
            }
            StepStats { accepted: steps, rejected: 0, rhs_evals: 0 }
        }
    };
    Ok((ys.iter().map(|y| from_vec(y, d)).collect(), stats))
}

/// Evolves `rho0` and records [`Observables`] on `layout` at each sample.
pub fn evolve(
    h: &Operator,
    collapse: &[Operator],
    rho0: &Operator,
    sample_times: &[f64],
    cfg: &IntegratorConfig,
    layout: &SpaceLayout,
) -> Result<Trajectory> {
    let lind = Lindbladian::new(h, collapse)?;
    let mut traj = Trajectory::default();
    let (_, stats) = evolve_states(&lind, rho0, sample_times, cfg, |t, rho, check| {
        traj.rows.push(observables_record(t, rho, layout)?);
        traj.checks.push(check);
        Ok(())
    })?;
    traj.stats = stats;
    Ok(traj)
}

/// Full-model evolution with the cavity jump replaced by the feedback jump.
pub fn evolve_with_feedback(
    p: &SystemParams,
    rho0: &Operator,
    sample_times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let model = FullModel::new(p, true)?;
    evolve(&model.hamiltonian, &model.collapse, rho0, sample_times, cfg, &model.layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{ONE, ZERO};

    fn sigma_x(omega: f64) -> Operator {
        Operator::from_rows(&[vec![ZERO, ONE * omega], vec![ONE * omega, ZERO]]).unwrap()
    }

    fn ground() -> Operator {
        Operator::projector(&[ONE, ZERO])
    }

    fn excited() -> Operator {
        Operator::projector(&[ZERO, ONE])
    }

    fn run(h: &Operator, c: &[Operator], rho0: &Operator, times: &[f64], cfg: &IntegratorConfig) -> Vec<Operator> {
        let lind = Lindbladian::new(h, c).unwrap();
        let mut out = Vec::new();
        evolve_states(&lind, rho0, times, cfg, |_, rho, _| {
            out.push(rho.clone());
            Ok(())
        })
        .unwrap();
        out
    }

    #[test]
    fn rabi_oscillation() {
        let times = sample_times(5.0, 0.25).unwrap();
        for method in [Method::DormandPrince, Method::Propagator] {
            let cfg = IntegratorConfig::default().with_method(method);
            let states = run(&sigma_x(0.7), &[], &ground(), &times, &cfg);
            for (t, rho) in times.iter().zip(&states) {
                let want = (0.7 * t).sin().powi(2);
                assert!((rho.get(1, 1).re - want).abs() < 1e-6, "{method} t={t}");
            }
        }
    }

    #[test]
    fn batch_matches_single_runs() {
        let h = sigma_x(0.4);
        let c = [Operator::from_rows(&[vec![ZERO, ONE * 0.3], vec![ZERO, ZERO]]).unwrap()];
        let lind = Lindbladian::new(&h, &c).unwrap();
        let times = sample_times(4.0, 0.5).unwrap();
        let starts = [ground(), excited()];
        for method in [Method::DormandPrince, Method::Propagator] {
            let cfg = IntegratorConfig::default().with_method(method);
            let mut seen = [Vec::new(), Vec::new()];
            let (finals, _) = evolve_batch(&lind, &starts, &times, &cfg, |k, _, rho, _| {
                seen[k].push(rho.clone());
                Ok(())
            })
            .unwrap();
            for (k, rho0) in starts.iter().enumerate() {
                let single = run(&h, &c, rho0, &times, &cfg);
                for (a, b) in single.iter().zip(&seen[k]) {
                    assert!(a.max_abs_diff(b) < 1e-13, "{method}");
                }
                assert!(finals[k].max_abs_diff(single.last().unwrap()) < 1e-13);
            }
        }
    }

    #[test]
    fn amplitude_damping() {
        let gamma: f64 = 0.3;
        let l = Operator::basis(2, 0, 1).scale_real(gamma.sqrt());
        let times = sample_times(10.0, 0.5).unwrap();
        for method in [Method::DormandPrince, Method::Propagator] {
            let cfg = IntegratorConfig::default().with_method(method);
            let states = run(&Operator::zeros(2), std::slice::from_ref(&l), &excited(), &times, &cfg);
            for (t, rho) in times.iter().zip(&states) {
                assert!((rho.get(1, 1).re - (-gamma * t).exp()).abs() < 1e-6, "{method} t={t}");
                assert!((rho.trace().re - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hermitize_each_step_matches() {
        let l = Operator::basis(2, 0, 1).scale_real(0.5);
        let times = sample_times(4.0, 1.0).unwrap();
        let a = run(&sigma_x(1.0), std::slice::from_ref(&l), &ground(), &times, &IntegratorConfig::default());
        let cfg = IntegratorConfig { hermitize_each_step: true, ..Default::default() };
        let b = run(&sigma_x(1.0), &[l], &ground(), &times, &cfg);
        for (x, y) in a.iter().zip(&b) {
            assert!(x.max_abs_diff(y) < 1e-7);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let lind = Lindbladian::new(&sigma_x(1.0), &[]).unwrap();
        let cfg = IntegratorConfig::default();
        let nop = |_: f64, _: &Operator, _: StateCheck| Ok(());
        let not_normalized = Operator::identity(2);
        assert!(evolve_states(&lind, &not_normalized, &[0.0, 1.0], &cfg, nop).is_err());
        assert!(evolve_states(&lind, &ground(), &[1.0, 1.0], &cfg, nop).is_err());
        assert!(evolve_states(&lind, &ground(), &[-1.0], &cfg, nop).is_err());
        assert!(evolve_states(&lind, &Operator::identity(3).scale_real(1.0 / 3.0), &[1.0], &cfg, nop).is_err());
        let bad = IntegratorConfig { rel_tol: 0.0, ..Default::default() };
        assert!(evolve_states(&lind, &ground(), &[1.0], &bad, nop).is_err());
    }

    #[test]
    fn sample_grid() {
        let t = sample_times(2000.0, 10.0).unwrap();
        assert_eq!(t.len(), 201);
        assert_eq!(*t.last().unwrap(), 2000.0);
        assert!(sample_times(1.0, 0.0).is_err());
        assert_eq!(sample_times(0.0, 1.0).unwrap(), vec![0.0]);
    }

    #[test]
    fn method_parses() {
        for m in [Method::DormandPrince, Method::Propagator] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
    }
}
