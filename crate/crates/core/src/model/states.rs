//! Named two-atom states.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::operator::{c64, Ket, ONE, ZERO};
use crate::space::{tensor_ket, Level, SpaceLayout, ATOM_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedState {
    /// `(|eg⟩ − |ge⟩)/√2`, the dark target.
    S,
    /// `(|eg⟩ + |ge⟩)/√2`
    T,
    /// `(|pg⟩ − |gp⟩)/√2`
    D,
    /// `(|pe⟩ − |ep⟩)/√2`
    B,
    Gg,
    Ee,
    Rr,
}

impl NamedState {
    pub const CATALOGUE: [NamedState; 7] =
        [NamedState::S, NamedState::T, NamedState::D, NamedState::B, NamedState::Gg, NamedState::Ee, NamedState::Rr];

    pub fn name(self) -> &'static str {
        match self {
            NamedState::S => "S",
            NamedState::T => "T",
            NamedState::D => "D",
            NamedState::B => "B",
            NamedState::Gg => "gg",
            NamedState::Ee => "ee",
            NamedState::Rr => "rr",
        }
    }

    /// Unit vector on the 16-dimensional two-atom space.
    pub fn atomic(self) -> Ket {
        use Level::*;
        let s = FRAC_1_SQRT_2;
        match self {
            NamedState::S => pair(&[(E, G, s), (G, E, -s)]),
            NamedState::T => pair(&[(E, G, s), (G, E, s)]),
            NamedState::D => pair(&[(P, G, s), (G, P, -s)]),
            NamedState::B => pair(&[(P, E, s), (E, P, -s)]),
            NamedState::Gg => pair(&[(G, G, 1.0)]),
            NamedState::Ee => pair(&[(E, E, 1.0)]),
            NamedState::Rr => pair(&[(R, R, 1.0)]),
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedState::CATALOGUE.into_iter().find(|st| st.name() == s).ok_or_else(|| {
            let names: Vec<&str> = NamedState::CATALOGUE.iter().map(|s| s.name()).collect();
            Error::InvalidArgument(format!("unknown state '{s}'; available: {}", names.join(", ")))
        })
    }
}

/// Product basis ket `|a b⟩` on the two-atom space.
pub fn atom_pair_ket(a: Level, b: Level) -> Ket {
    pair(&[(a, b, 1.0)])
}

fn pair(terms: &[(Level, Level, f64)]) -> Ket {
    let mut v = vec![ZERO; ATOM_DIM * ATOM_DIM];
    for &(a, b, amp) in terms {
        v[a.index() * ATOM_DIM + b.index()] += c64::new(amp, 0.0);
    }
    v
}

/// Cavity Fock state `|n⟩` on `n_levels` levels.
pub fn fock_ket(n: usize, n_levels: usize) -> Ket {
    let mut v = vec![ZERO; n_levels];
    v[n] = ONE;
    v
}

/// Named state on `layout`, tensored with the cavity vacuum when
/// `with_cavity_vacuum` is set.
pub fn named_state(state: NamedState, layout: &SpaceLayout, with_cavity_vacuum: bool) -> Result<Ket> {
    let atomic = state.atomic();
    if !with_cavity_vacuum {
        return Ok(atomic);
    }
    if !layout.has_cavity() {
        return Err(Error::Dimension(format!("layout {:?} has no cavity factor to put in vacuum", layout.dims())));
    }
    Ok(tensor_ket(&atomic, &fock_ket(0, layout.cavity_dim())))
}
