//! Fixtures shared by the benchmarks in `benches/`.

use zeno_core::dynamics::Lindbladian;
use zeno_core::scenario::{Scenario, ScenarioId};
use zeno_core::{FullModel, Operator, SystemParams};

/// Full-model parameters of the C = 10 operating point at `fock_cutoff`.
pub fn fig4_params(fock_cutoff: usize) -> SystemParams {
    SystemParams { fock_cutoff, ..Scenario::defaults(ScenarioId::Fig4a).params }
}

pub fn fig4_model(fock_cutoff: usize) -> FullModel {
    FullModel::new(&fig4_params(fock_cutoff), false).expect("default parameters are valid")
}

pub fn fig4_lindbladian(fock_cutoff: usize) -> Lindbladian {
    let m = fig4_model(fock_cutoff);
    Lindbladian::new(&m.hamiltonian, &m.collapse).expect("consistent dimensions")
}

/// Maximally mixed state of dimension `d`.
pub fn mixed(d: usize) -> Operator {
    Operator::identity(d).scale_real(1.0 / d as f64)
}
