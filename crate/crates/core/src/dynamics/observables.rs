//! Scalar observables recorded along a trajectory.

use crate::error::{Error, Result};
use crate::model::NamedState;
use crate::operator::{Operator, ONE};
use crate::space::{partial_trace, SpaceLayout, ATOM1, ATOM2, CAVITY};

/// One sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub t: f64,
    pub purity: f64,
    pub fidelity_s: f64,
    pub p_gg: f64,
    pub p_t: f64,
    pub p_s: f64,
    pub p_ee: f64,
    pub p_rr: f64,
    pub n_photon: f64,
}

impl Observables {
    /// Column names in CSV order.
    pub const COLUMNS: [&'static str; 9] =
        ["t", "purity", "fidelity_S", "p_gg", "p_T", "p_S", "p_ee", "p_rr", "n_photon"];

    pub fn values(&self) -> [f64; 9] {
        [self.t, self.purity, self.fidelity_s, self.p_gg, self.p_t, self.p_s, self.p_ee, self.p_rr, self.n_photon]
    }
}

/// `Tr ρ²`.
pub fn purity(rho: &Operator) -> f64 {
    rho.trace_product(rho).re
}

/// Reduced state of the two atoms; `rho` itself when there is no cavity.
pub fn atomic_state(rho: &Operator, layout: &SpaceLayout) -> Result<Operator> {
    if rho.dim() != layout.total_dim() {
        return Err(Error::Dimension(format!(
            "density matrix has dim {}, layout {:?} needs {}",
            rho.dim(),
            layout.dims(),
            layout.total_dim()
        )));
    }
    if layout.has_cavity() {
        partial_trace(rho, &[ATOM1, ATOM2], layout)
    } else {
        Ok(rho.clone())
    }
}

/// `⟨S| Tr_c ρ |S⟩`.
pub fn fidelity_singlet(rho: &Operator, layout: &SpaceLayout) -> Result<f64> {
    let atoms = atomic_state(rho, layout)?;
    Ok(atoms.expectation(&NamedState::S.atomic()).re)
}

/// Populations, purity, singlet fidelity and mean photon number of `rho`.
pub fn observables_record(t: f64, rho: &Operator, layout: &SpaceLayout) -> Result<Observables> {
    let atoms = atomic_state(rho, layout)?;
    let pop = |s: NamedState| atoms.expectation(&s.atomic()).re;
    let n_photon = if layout.has_cavity() {
        let cav = partial_trace(rho, &[CAVITY], layout)?;
        (0..cav.dim()).map(|n| n as f64 * cav.get(n, n).re).sum()
    } else {
        0.0
    };
    let p_s = pop(NamedState::S);
    Ok(Observables {
        t,
        purity: purity(rho),
        fidelity_s: p_s,
        p_gg: pop(NamedState::Gg),
        p_t: pop(NamedState::T),
        p_s,
        p_ee: pop(NamedState::Ee),
        p_rr: pop(NamedState::Rr),
        n_photon,
    })
}

/// Health of a sampled density matrix, measured before symmetrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateCheck {
    pub t: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl StateCheck {
    pub fn of(t: f64, rho: &Operator) -> Result<Self> {
        let tr = rho.trace();
        Ok(Self {
            t,
            trace_error: (tr - ONE).norm(),
            hermiticity_error: rho.hermiticity_error(),
            min_eigenvalue: rho.hermitian_part().min_eigenvalue()?,
        })
    }
}
