//! Scenario-level properties of the dynamics and steady states.

use zeno_core::dynamics::{evolve_batch, observables_record, Lindbladian};
use zeno_core::model::{named_state, FullModel, NamedState};
use zeno_core::scenario::{
    parse_config_with, provenance_config, run_steady_sweep, run_time_series, steady_point, ModelKind, Scenario,
    ScenarioId, SweepGrid,
};
use zeno_core::steady::{SteadyMethod, SteadyOptions};
use zeno_core::{build_effective_model, spectral_gap, IntegratorConfig, Method, Operator, SystemParams};

fn fidelities(p: &SystemParams, starts: &[NamedState], times: &[f64]) -> Vec<Vec<f64>> {
    let m = FullModel::new(p, false).unwrap();
    let lind = Lindbladian::new(&m.hamiltonian, &m.collapse).unwrap();
    let rho0: Vec<Operator> =
        starts.iter().map(|s| Operator::projector(&named_state(*s, &m.layout, true).unwrap())).collect();
    let mut out = vec![Vec::new(); starts.len()];
    let cfg = IntegratorConfig::default().with_method(Method::Propagator);
    evolve_batch(&lind, &rho0, times, &cfg, |k, t, rho, _| {
        out[k].push(observables_record(t, rho, &m.layout)?.fidelity_s);
        Ok(())
    })
    .unwrap();
    out
}

#[test]
fn fidelity_grows_between_200_and_2000() {
    // One photon level is enough here: the cavity stays in vacuum to 1e-2.
    let starts = [NamedState::Gg, NamedState::T, NamedState::Ee];
    for id in [ScenarioId::Fig2a, ScenarioId::Fig2b, ScenarioId::Fig2c, ScenarioId::Fig2d] {
        let p = SystemParams { fock_cutoff: 1, ..Scenario::defaults(id).params };
        let f = fidelities(&p, &starts, &[0.0, 200.0, 2000.0]);
        for (k, s) in starts.iter().enumerate() {
            assert!(f[k][2] > f[k][1], "{id} from {s}: F(200) = {}, F(2000) = {}", f[k][1], f[k][2]);
        }
    }
}

#[test]
fn long_time_evolution_reaches_steady_state() {
    // Γ > 0 so the stationary state is reached within the window.
    let p = SystemParams { gamma_r: 0.001, ..Scenario::defaults(ScenarioId::Fig3).params };
    let f = fidelities(&p, &[NamedState::Gg], &[0.0, 10000.0, 20000.0]);
    let mut s = Scenario::defaults(ScenarioId::Fig3);
    s.params = p.clone();
    let opts = SteadyOptions { method: SteadyMethod::TraceSolve, ..Default::default() };
    let ss = steady_point(&s, &p, &opts).unwrap();
    assert!(ss.result.unique);
    assert!((f[0][2] - ss.fidelity).abs() < 0.005, "evolved {} vs steady {}", f[0][2], ss.fidelity);
}

#[test]
fn fidelity_along_c10_at_one_photon() {
    let grid = SweepGrid { gamma_values: vec![0.2], kappa_values: vec![0.5], feedback: false, eta: 0.0 };
    let mut s = Scenario::defaults(ScenarioId::Fig4a);
    s.steady_method = SteadyMethod::TraceSolve;
    s.verify_fraction = 1.0;
    let mut sink = Vec::new();
    let table = run_steady_sweep(&s, &grid, Some(1), &mut sink).unwrap();
    let row = table.rows[0];
    assert_eq!(row.cooperativity, Some(10.0));
    assert!((row.fidelity - 0.90).abs() < 0.04);
    assert_eq!(table.cutoff_checks.len(), 1);
    assert!(table.cutoff_checks[0].difference() < 1e-3);

    let mut fb = grid.clone();
    fb.feedback = true;
    fb.eta = std::f64::consts::FRAC_PI_2;
    let with = run_steady_sweep(&s, &fb, Some(1), &mut Vec::new()).unwrap();
    assert!(with.rows[0].fidelity > row.fidelity);
}

#[test]
fn effective_gaps() {
    // The slowest effective-model mode is the |ee⟩ population, which the
    // blockade slows down: a larger λ gives a smaller gap.
    let gap = |id| {
        let m = build_effective_model(&Scenario::defaults(id).params).unwrap();
        spectral_gap(&m.hamiltonian, &m.collapse).unwrap()
    };
    let (a, c, d) = (gap(ScenarioId::Fig2a), gap(ScenarioId::Fig2c), gap(ScenarioId::Fig2d));
    assert!(a > 0.0 && c > 0.0 && d > 0.0);
    assert!(c < a && d < c, "gaps {a:e}, {c:e}, {d:e}");
}

#[test]
fn time_series_is_reproducible_and_bounded() {
    let text = "scenario = fig2a\nfock_cutoff = 1\nt_max = 300\nsample_dt = 50\n";
    let s = parse_config_with(text, None).unwrap();
    let (mut first, mut second) = (Vec::new(), Vec::new());
    let traj = run_time_series(&s, &mut first).unwrap();
    run_time_series(&s, &mut second).unwrap();
    assert_eq!(first, second);
    for row in &traj.rows {
        for v in [row.purity, row.fidelity_s, row.p_gg, row.p_t, row.p_s, row.p_ee, row.p_rr] {
            assert!((0.0..=1.0 + 1e-9).contains(&v), "{v}");
        }
    }
    let csv = String::from_utf8(first).unwrap();
    let back = parse_config_with(&provenance_config(&csv), None).unwrap();
    assert_eq!(back, s);
}

#[test]
fn effective_and_full_scenarios_share_the_csv_layout() {
    let mut s = Scenario::defaults(ScenarioId::Fig2b);
    s.t_max = 20.0;
    s.params.fock_cutoff = 1;
    let mut full = Vec::new();
    run_time_series(&s, &mut full).unwrap();
    s.model = ModelKind::Effective;
    let mut eff = Vec::new();
    run_time_series(&s, &mut eff).unwrap();
    let header =
        |b: &[u8]| String::from_utf8(b.to_vec()).unwrap().lines().find(|l| !l.starts_with('#')).unwrap().to_string();
    assert_eq!(header(&full), header(&eff));
}
