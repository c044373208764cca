//! Dissipative preparation of a two-atom Bell state in a lossy cavity.
//!
//! Two four-level atoms (`|g⟩, |e⟩, |p⟩, |r⟩`) share a single cavity mode.
//! The crate builds the Hamiltonian and dissipators of the full and the
//! effective model, integrates the Lindblad master equation, solves for
//! steady states and runs the scenario sweeps behind the `zeno` CLI.

pub mod dynamics;
pub mod error;
pub mod expm;
pub mod model;
pub mod nullspace;
pub mod operator;
pub mod params;
pub mod scenario;
pub mod space;
pub mod steady;

pub use dynamics::{evolve, evolve_batch, evolve_with_feedback, IntegratorConfig, Method, Observables, Trajectory};
pub use error::{Error, ErrorKind, Result};
pub use model::{build_effective_model, EffectiveModel, FullModel, NamedState};
pub use operator::{c64, Ket, Operator};
pub use params::{derived_params, Derived, RydbergDecay, SystemParams};
pub use space::{Level, SpaceLayout};
pub use steady::{spectral_gap, steady_state, steady_state_feedback, SteadyMethod, SteadyOptions, SteadyResult};
