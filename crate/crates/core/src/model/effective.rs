//! Zeno/antiblockade effective model.
//!
//! Strong cavity coupling freezes the dynamics into the zero-photon sector,
//! where the optical pump only couples `|T⟩` and `|D⟩`, and the detuned
//! Rydberg pump reduces to a resonant `|ee⟩ ↔ |rr⟩` coupling of strength
//! `λ`. Together with the microwave drive inside the ground manifold the
//! closed set of reachable states is
//!
//! ```text
//! |gg⟩, |eg⟩, |ge⟩, |ee⟩, |D⟩, |rr⟩
//! ```
//!
//! and the model lives on that six-dimensional span. [`EffectiveModel`]
//! keeps the embedding into the 16-dimensional two-atom space so results can
//! be compared with the full model.
//!
//! Dissipation is the decay of `|D⟩` through either atom's `|p⟩`:
//! `√(γ/4)|S⟩⟨D|`, `√(γ/4)|T⟩⟨D|`, `√(γ/2)|gg⟩⟨D|`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::operator::{c64, inner, Ket, Operator, ZERO};
use crate::params::SystemParams;
use crate::space::Level;

use super::states::{atom_pair_ket, NamedState};

const GG: usize = 0;
const EG: usize = 1;
const GE: usize = 2;
const EE: usize = 3;
const D: usize = 4;
const RR: usize = 5;
const DIM: usize = 6;

/// Labels of the reduced basis, in order.
pub const EFFECTIVE_BASIS: [&str; DIM] = ["gg", "eg", "ge", "ee", "D", "rr"];

/// Leakage tolerated when projecting a 16-dimensional state onto the span.
const SPAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct EffectiveModel {
    /// Basis kets on the 16-dimensional two-atom space.
    pub basis: Vec<Ket>,
    /// Hamiltonian on the reduced span.
    pub hamiltonian: Operator,
    /// Collapse operators on the reduced span.
    pub collapse: Vec<Operator>,
}

fn unit(k: usize) -> Ket {
    let mut v = vec![ZERO; DIM];
    v[k] = c64::new(1.0, 0.0);
    v
}

fn reduced(state: NamedState) -> Ket {
    let s = FRAC_1_SQRT_2;
    let mut v = vec![ZERO; DIM];
    match state {
        NamedState::S => {
            v[EG] = c64::new(s, 0.0);
            v[GE] = c64::new(-s, 0.0);
        }
        NamedState::T => {
            v[EG] = c64::new(s, 0.0);
            v[GE] = c64::new(s, 0.0);
        }
        NamedState::D => v[D] = c64::new(1.0, 0.0),
        NamedState::Gg => v[GG] = c64::new(1.0, 0.0),
        NamedState::Ee => v[EE] = c64::new(1.0, 0.0),
        NamedState::Rr => v[RR] = c64::new(1.0, 0.0),
        NamedState::B => unreachable!("B is outside the effective span"),
    }
    v
}

/// Effective model for `p`. Cavity parameters are ignored.
pub fn build_effective_model(p: &SystemParams) -> Result<EffectiveModel> {
    p.validate()?;
    let basis = vec![
        atom_pair_ket(Level::G, Level::G),
        atom_pair_ket(Level::E, Level::G),
        atom_pair_ket(Level::G, Level::E),
        atom_pair_ket(Level::E, Level::E),
        NamedState::D.atomic(),
        atom_pair_ket(Level::R, Level::R),
    ];

    let t = reduced(NamedState::T);
    let mut upper = Operator::outer(&t, &unit(D)).scale_real(p.omega_a);
    // |g⟩⟨e| on atom 1 and on atom 2.
    for (lo, hi) in [(GG, EG), (GE, EE), (GG, GE), (EG, EE)] {
        upper.add_at(lo, hi, c64::new(p.omega_mw, 0.0));
    }
    upper.add_at(EE, RR, c64::new(p.lambda(), 0.0));
    let mut hamiltonian = &upper + &upper.adjoint();
    hamiltonian.add_at(RR, RR, c64::new(p.u_rr_deviation, 0.0));

    let mut collapse = Vec::new();
    if p.gamma > 0.0 {
        let d = unit(D);
        let quarter = (p.gamma / 4.0).sqrt();
        collapse.push(Operator::outer(&reduced(NamedState::S), &d).scale_real(quarter));
        collapse.push(Operator::outer(&t, &d).scale_real(quarter));
        collapse.push(Operator::outer(&unit(GG), &d).scale_real((p.gamma / 2.0).sqrt()));
    }
    Ok(EffectiveModel { basis, hamiltonian, collapse })
}

impl EffectiveModel {
    pub fn dim(&self) -> usize {
        DIM
    }

    /// Named state on the reduced span; `B` lies outside it.
    pub fn state(&self, state: NamedState) -> Result<Ket> {
        if state == NamedState::B {
            return Err(Error::InvalidArgument("state B is not part of the effective model".into()));
        }
        Ok(reduced(state))
    }

    /// Embeds a reduced operator `A` as `V A V†` on the two-atom space.
    pub fn lift(&self, op: &Operator) -> Operator {
        let n = self.basis[0].len();
        let mut out = Operator::zeros(n);
        for (a, ka) in self.basis.iter().enumerate() {
            for (b, kb) in self.basis.iter().enumerate() {
                let v = op.get(a, b);
                if v == ZERO {
                    continue;
                }
                for (i, &x) in ka.iter().enumerate().filter(|(_, x)| **x != ZERO) {
                    for (j, &y) in kb.iter().enumerate().filter(|(_, y)| **y != ZERO) {
                        out.add_at(i, j, v * x * y.conj());
                    }
                }
            }
        }
        out
    }

    /// Lifts a reduced ket to the two-atom space.
    pub fn lift_ket(&self, ket: &[c64]) -> Ket {
        let mut out = vec![ZERO; self.basis[0].len()];
        for (c, k) in ket.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(k) {
                *o += c * x;
            }
        }
        out
    }

    /// Projects a two-atom ket onto the span; fails if it leaks outside.
    pub fn reduce_ket(&self, ket: &[c64]) -> Result<Ket> {
        let v: Ket = self.basis.iter().map(|b| inner(b, ket)).collect();
        let kept: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let total: f64 = ket.iter().map(|x| x.norm_sqr()).sum();
        if (total - kept).abs() > SPAN_TOL * total.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "state has weight {:.3e} outside the effective span",
                total - kept
            )));
        }
        Ok(v)
    }

    /// Hamiltonian on the two-atom space.
    pub fn hamiltonian_16(&self) -> Operator {
        self.lift(&self.hamiltonian)
    }

    /// Collapse operators on the two-atom space.
    pub fn collapse_16(&self) -> Vec<Operator> {
        self.collapse.iter().map(|l| self.lift(l)).collect()
    }
}
