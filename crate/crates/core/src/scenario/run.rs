//! Time series, single steady states and the parallel sweeps.

use std::io::Write;

use rayon::prelude::*;

use crate::dynamics::{
    evolve_states, fidelity_singlet, observables_record, sample_times, Lindbladian, Observables, Trajectory,
};
use crate::error::{Error, Result};
use crate::model::{build_effective_model, named_state, FullModel, NamedState};
use crate::operator::Operator;
use crate::params::SystemParams;
use crate::space::SpaceLayout;
use crate::steady::{steady_state_with, SteadyMethod, SteadyOptions, SteadyResult};

use super::csv::{write_deviation_csv, write_sweep_csv, write_time_series_csv};
use super::{ModelKind, Scenario};

/// Environment variable consulted for the sweep worker count.
pub const THREADS_ENV: &str = "ZD_THREADS";

/// Worker count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
            if n == 0 {
                return Err(Error::InvalidArgument(format!("{THREADS_ENV} must be positive")));
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

/// Grid of `(γ, κ)` points, traversed with `κ` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub gamma_values: Vec<f64>,
    pub kappa_values: Vec<f64>,
    pub feedback: bool,
    pub eta: f64,
}

impl SweepGrid {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.gamma_values.iter().flat_map(|&g| self.kappa_values.iter().map(move |&k| (g, k))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub kappa: f64,
    /// Absent when `κγ = 0`.
    pub cooperativity: Option<f64>,
    pub fidelity: f64,
    pub residual: f64,
    /// `None` marks a point where the solver failed.
    pub unique: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationRow {
    pub delta_over_delta: f64,
    pub fidelity: f64,
    pub residual: f64,
    pub unique: Option<bool>,
}

/// Re-solve of a sweep point with one more photon level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffCheck {
    pub index: usize,
    pub fidelity: f64,
    pub fidelity_higher_cutoff: f64,
}

impl CutoffCheck {
    pub fn difference(&self) -> f64 {
        (self.fidelity - self.fidelity_higher_cutoff).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable<R> {
    pub rows: Vec<R>,
    pub cutoff_checks: Vec<CutoffCheck>,
}

/// Result of one steady-state solve, with the singlet fidelity.
#[derive(Debug, Clone)]
pub struct SteadyPoint {
    pub fidelity: f64,
    pub result: SteadyResult,
}

fn options(method: SteadyMethod, compute_gap: bool) -> SteadyOptions {
    SteadyOptions { method, compute_gap, ..Default::default() }
}

/// Steady state of `p` under the model and feedback setting of `s`.
///
/// With feedback on and `κ = 0` there are no cavity emissions to trigger
/// it, so the plain model is solved.
pub fn steady_point(s: &Scenario, p: &SystemParams, opts: &SteadyOptions) -> Result<SteadyPoint> {
    match s.model {
        ModelKind::Full => {
            let model = FullModel::new(p, s.feedback && p.kappa > 0.0)?;
            let result = steady_state_with(&model.hamiltonian, &model.collapse, opts)?;
            let fidelity = fidelity_singlet(&result.rho_ss, &model.layout)?;
            Ok(SteadyPoint { fidelity, result })
        }
        ModelKind::Effective => {
            let m = build_effective_model(p)?;
            let result = steady_state_with(&m.hamiltonian, &m.collapse, opts)?;
            let fidelity = result.rho_ss.expectation(&m.state(NamedState::S)?).re;
            Ok(SteadyPoint { fidelity, result })
        }
    }
}

/// Single steady-state solve of the scenario as configured.
pub fn run_steady(s: &Scenario, compute_gap: bool) -> Result<SteadyPoint> {
    s.validate()?;
    steady_point(s, &s.params, &options(s.steady_method, compute_gap))
}

type Recorder = Box<dyn Fn(f64, &Operator) -> Result<Observables>>;

/// Generator, initial state and observable map of the configured model.
fn initial_state(s: &Scenario) -> Result<(Lindbladian, Operator, Recorder)> {
    match s.model {
        ModelKind::Full => {
            let model = FullModel::new(&s.params, s.feedback)?;
            let psi = named_state(s.initial, &model.layout, true)?;
            let lind = Lindbladian::new(&model.hamiltonian, &model.collapse)?;
            let layout = model.layout.clone();
            Ok((lind, Operator::projector(&psi), Box::new(move |t, rho| observables_record(t, rho, &layout))))
        }
        ModelKind::Effective => {
            let m = build_effective_model(&s.params)?;
            let psi = m.state(s.initial)?;
            let lind = Lindbladian::new(&m.hamiltonian, &m.collapse)?;
            let atoms = SpaceLayout::atoms();
            Ok((lind, Operator::projector(&psi), Box::new(move |t, rho| observables_record(t, &m.lift(rho), &atoms))))
        }
    }
}

/// Evolves the scenario's initial state and writes the time-series CSV.
pub fn run_time_series(s: &Scenario, sink: &mut impl Write) -> Result<Trajectory> {
    s.validate()?;
    let times = sample_times(s.t_max, s.sample_dt)?;
    let (lind, rho0, record) = initial_state(s)?;
    let mut traj = Trajectory::default();
    let (_, stats) = evolve_states(&lind, &rho0, &times, &s.integrator(), |t, rho, check| {
        traj.rows.push(record(t, rho)?);
        traj.checks.push(check);
        Ok(())
    })?;
    traj.stats = stats;
    write_time_series_csv(sink, s, &traj)?;
    Ok(traj)
}

/// Runs `job` on `threads` workers, or on the global pool when `None`.
///
/// Dense kernels are switched to sequential mode for the whole process:
/// grid points are the parallel axis, and a kernel that splits its sums
/// by worker count would make rows depend on the thread count.
fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    faer::set_global_parallelism(faer::Par::Seq);
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(job))
        }
        None => Ok(job()),
    }
}

/// Indices re-solved at `fock_cutoff + 1`: every `round(1/fraction)`-th
/// point, starting with the first.
fn verification_indices(n: usize, fraction: f64) -> Vec<usize> {
    if fraction <= 0.0 || n == 0 {
        return Vec::new();
    }
    let stride = (1.0 / fraction).round().max(1.0) as usize;
    (0..n).step_by(stride).collect()
}

struct Solved {
    fidelity: f64,
    residual: f64,
    unique: Option<bool>,
}

fn solve_or_mark(s: &Scenario, p: &SystemParams, label: &str) -> Solved {
    match steady_point(s, p, &options(s.steady_method, false)) {
        Ok(pt) => Solved { fidelity: pt.fidelity, residual: pt.result.residual, unique: Some(pt.result.unique) },
        Err(e) => {
            log::warn!("steady state failed at {label}: {e}");
            Solved { fidelity: f64::NAN, residual: f64::NAN, unique: None }
        }
    }
}

fn cutoff_checks(
    s: &Scenario,
    params: &[SystemParams],
    fidelities: &[f64],
    threads: Option<usize>,
) -> Result<Vec<CutoffCheck>> {
    if s.model == ModelKind::Effective {
        return Ok(Vec::new());
    }
    let idx: Vec<usize> = verification_indices(params.len(), s.verify_fraction)
        .into_iter()
        .filter(|&i| fidelities[i].is_finite())
        .collect();
    let checks = with_pool(threads, || {
        idx.par_iter()
            .map(|&i| {
                let mut p = params[i].clone();
                p.fock_cutoff += 1;
                let opts = options(SteadyMethod::TraceSolve, false);
                steady_point(s, &p, &opts).map(|pt| CutoffCheck {
                    index: i,
                    fidelity: fidelities[i],
                    fidelity_higher_cutoff: pt.fidelity,
                })
            })
            .collect::<Vec<_>>()
    })?;
    let mut out = Vec::new();
    for c in checks {
        match c {
            Ok(c) => {
                if c.difference() >= 1e-3 {
                    log::warn!(
                        "point {}: fidelity moves by {:.2e} with one more photon level",
                        c.index,
                        c.difference()
                    );
                }
                out.push(c);
            }
            Err(e) => log::warn!("cutoff verification failed: {e}"),
        }
    }
    Ok(out)
}

/// Steady-state fidelity over a `(γ, κ)` grid; writes the sweep CSV.
/// Rows follow grid order regardless of the worker count.
pub fn run_steady_sweep(
    s: &Scenario,
    grid: &SweepGrid,
    threads: Option<usize>,
    sink: &mut impl Write,
) -> Result<SweepTable<SweepRow>> {
    s.validate()?;
    let mut s = s.clone();
    s.feedback = grid.feedback;
    s.params.eta = grid.eta;
    if let Some(v) = grid.gamma_values.iter().chain(&grid.kappa_values).find(|v| v.is_nan() || **v < 0.0) {
        return Err(Error::InvalidArgument(format!("sweep rates must be >= 0, got {v}")));
    }
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::InvalidArgument("sweep grid is empty".into()));
    }
    let params: Vec<SystemParams> =
        points.iter().map(|&(gamma, kappa)| SystemParams { gamma, kappa, ..s.params.clone() }).collect();
    let solved: Vec<Solved> = with_pool(threads, || {
        params.par_iter().map(|p| solve_or_mark(&s, p, &format!("gamma = {}, kappa = {}", p.gamma, p.kappa))).collect()
    })?;
    let rows: Vec<SweepRow> = params
        .iter()
        .zip(&solved)
        .map(|(p, r)| SweepRow {
            gamma: p.gamma,
            kappa: p.kappa,
            cooperativity: (p.gamma * p.kappa > 0.0).then(|| p.g * p.g / (p.gamma * p.kappa)),
            fidelity: r.fidelity,
            residual: r.residual,
            unique: r.unique,
        })
        .collect();
    let fids: Vec<f64> = rows.iter().map(|r| r.fidelity).collect();
    let cutoff_checks = cutoff_checks(&s, &params, &fids, threads)?;
    write_sweep_csv(sink, &s, &rows)?;
    Ok(SweepTable { rows, cutoff_checks })
}

/// Steady-state fidelity against `δ/Δ`, with `U_rr = 2Δ − λ + δ`; writes
/// the deviation CSV.
pub fn run_deviation_sweep(
    s: &Scenario,
    ratios: &[f64],
    threads: Option<usize>,
    sink: &mut impl Write,
) -> Result<SweepTable<DeviationRow>> {
    s.validate()?;
    if ratios.is_empty() {
        return Err(Error::InvalidArgument("deviation grid is empty".into()));
    }
    if s.params.delta <= 0.0 {
        return Err(Error::InvalidArgument("deviation scan needs delta > 0".into()));
    }
    let params: Vec<SystemParams> =
        ratios.iter().map(|&r| SystemParams { u_rr_deviation: r * s.params.delta, ..s.params.clone() }).collect();
    let solved: Vec<Solved> = with_pool(threads, || {
        params.par_iter().zip(ratios).map(|(p, r)| solve_or_mark(s, p, &format!("delta/Delta = {r}"))).collect()
    })?;
    let rows: Vec<DeviationRow> = ratios
        .iter()
        .zip(&solved)
        .map(|(&r, x)| DeviationRow {
            delta_over_delta: r,
            fidelity: x.fidelity,
            residual: x.residual,
            unique: x.unique,
        })
        .collect();
    let fids: Vec<f64> = rows.iter().map(|r| r.fidelity).collect();
    let cutoff_checks = cutoff_checks(s, &params, &fids, threads)?;
    write_deviation_csv(sink, s, &rows)?;
    Ok(SweepTable { rows, cutoff_checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioId;

    #[test]
    fn grid_order_is_kappa_fastest() {
        let g =
            SweepGrid { gamma_values: vec![1.0, 2.0], kappa_values: vec![3.0, 4.0, 5.0], feedback: false, eta: 0.0 };
        assert_eq!(g.points(), vec![(1.0, 3.0), (1.0, 4.0), (1.0, 5.0), (2.0, 3.0), (2.0, 4.0), (2.0, 5.0)]);
    }

    #[test]
    fn verification_stride() {
        assert_eq!(verification_indices(21, 0.1), vec![0, 10, 20]);
        assert_eq!(verification_indices(5, 1.0), vec![0, 1, 2, 3, 4]);
        assert!(verification_indices(5, 0.0).is_empty());
    }

    #[test]
    fn effective_steady_is_singlet() {
        let mut s = Scenario::defaults(ScenarioId::Fig2a);
        s.model = ModelKind::Effective;
        let pt = run_steady(&s, true).unwrap();
        assert!(pt.fidelity > 1.0 - 1e-8);
        assert!(pt.result.unique);
        assert!(pt.result.gap.unwrap() > 0.0);
    }

    #[test]
    fn effective_time_series_writes_csv() {
        let mut s = Scenario::defaults(ScenarioId::Fig2b);
        s.model = ModelKind::Effective;
        s.method = crate::dynamics::Method::DormandPrince;
        s.t_max = 50.0;
        let mut buf = Vec::new();
        let traj = run_time_series(&s, &mut buf).unwrap();
        assert_eq!(traj.rows.len(), 6);
        assert_eq!(traj.rows[0].p_gg, 1.0);
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 7);
    }

    #[test]
    fn failed_points_are_marked() {
        // No dissipation at all: the Liouvillian null space is large but
        // the collapse list is empty, so the solver refuses.
        let mut s = Scenario::defaults(ScenarioId::Fig4a);
        s.params.gamma_r = 0.0;
        s.verify_fraction = 0.0;
        let grid = SweepGrid { gamma_values: vec![0.0], kappa_values: vec![0.0, 0.5], feedback: false, eta: 0.0 };
        let mut buf = Vec::new();
        let t = run_steady_sweep(&s, &grid, Some(1), &mut buf).unwrap();
        assert_eq!(t.rows[0].unique, None);
        assert!(t.rows[0].fidelity.is_nan());
        assert_eq!(t.rows[0].cooperativity, None);
        assert!(t.rows[1].unique.is_some());
    }
}
