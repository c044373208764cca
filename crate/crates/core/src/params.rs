//! Physical parameters of a run.
//!
//! All rates share one unit, conventionally the cavity coupling `g`; times
//! are then measured in `1/g`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Where the Rydberg level `|r⟩` relaxes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RydbergDecay {
    /// Entire rate `Γ` into `|e⟩`.
    #[default]
    ToE,
    /// Entire rate `Γ` into `|g⟩`.
    ToG,
    /// `Γ/2` into each of `|g⟩` and `|e⟩`.
    Split,
}

impl fmt::Display for RydbergDecay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RydbergDecay::ToE => "e",
            RydbergDecay::ToG => "g",
            RydbergDecay::Split => "split",
        })
    }
}

impl FromStr for RydbergDecay {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" => Ok(RydbergDecay::ToE),
            "g" => Ok(RydbergDecay::ToG),
            "split" => Ok(RydbergDecay::Split),
            other => Err(Error::InvalidArgument(format!("unknown rydberg_decay '{other}' (expected e, g or split)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Atom-cavity coupling on `|g⟩ ↔ |p⟩`.
    pub g: f64,
    /// Pump Rabi frequency on `|e⟩ ↔ |p⟩`, sign alternating between atoms.
    pub omega_a: f64,
    /// Microwave Rabi frequency on `|g⟩ ↔ |e⟩`.
    pub omega_mw: f64,
    /// Rydberg pump Rabi frequency on `|e⟩ ↔ |r⟩`.
    pub omega_b: f64,
    /// Detuning of the Rydberg pump.
    pub delta: f64,
    /// Offset from the antiblockade condition: `U_rr = 2Δ − λ + δ`.
    pub u_rr_deviation: f64,
    /// Total decay rate of `|p⟩`, split evenly into `|g⟩` and `|e⟩`.
    pub gamma: f64,
    /// Decay rate of `|r⟩`.
    pub gamma_r: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Feedback rotation angle in radians.
    pub eta: f64,
    /// Highest retained photon number.
    pub fock_cutoff: usize,
    pub rydberg_decay: RydbergDecay,
    /// Cancel the second-order light shift `Ω_b²/Δ` of `|e⟩`.
    pub stark_compensation: bool,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            g: 1.0,
            omega_a: 0.0,
            omega_mw: 0.0,
            omega_b: 0.0,
            delta: 0.0,
            u_rr_deviation: 0.0,
            gamma: 0.0,
            gamma_r: 0.0,
            kappa: 0.0,
            eta: 0.0,
            fock_cutoff: 2,
            rydberg_decay: RydbergDecay::default(),
            stark_compensation: true,
        }
    }
}

/// Quantities derived from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derived {
    /// Antiblockade coupling `λ = 2Ω_b²/Δ`.
    pub lambda: f64,
    /// Zeno ratio `K = g/Ω_a`; absent when `Ω_a = 0`.
    pub zeno_ratio: Option<f64>,
    /// Single-atom cooperativity `C = g²/(κγ)`; absent when `κγ = 0`.
    pub cooperativity: Option<f64>,
    /// Rydberg pair interaction `U_rr = 2Δ − λ + δ`.
    pub u_rr: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("g", self.g),
            ("omega_a", self.omega_a),
            ("omega_mw", self.omega_mw),
            ("omega_b", self.omega_b),
            ("delta", self.delta),
            ("gamma", self.gamma),
            ("gamma_r", self.gamma_r),
            ("kappa", self.kappa),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!("{name} must be a finite non-negative rate, got {v}")));
            }
        }
        for (name, v) in [("u_rr_deviation", self.u_rr_deviation), ("eta", self.eta)] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite, got {v}")));
            }
        }
        if self.omega_b > 0.0 && self.delta == 0.0 {
            return Err(Error::InvalidArgument(
                "delta must be positive when omega_b > 0 (lambda = 2 omega_b^2 / delta)".into(),
            ));
        }
        Ok(())
    }

    /// `λ = 2Ω_b²/Δ`, zero when the Rydberg pump is off.
    pub fn lambda(&self) -> f64 {
        if self.omega_b == 0.0 {
            0.0
        } else {
            2.0 * self.omega_b * self.omega_b / self.delta
        }
    }

    /// `U_rr = 2Δ − λ + δ`.
    pub fn u_rr(&self) -> f64 {
        2.0 * self.delta - self.lambda() + self.u_rr_deviation
    }

    pub fn derived(&self) -> Result<Derived> {
        self.validate()?;
        let kg = self.kappa * self.gamma;
        Ok(Derived {
            lambda: self.lambda(),
            zeno_ratio: (self.omega_a > 0.0).then(|| self.g / self.omega_a),
            cooperativity: (kg > 0.0).then(|| self.g * self.g / kg),
            u_rr: self.u_rr(),
        })
    }
}

/// Free-function form of [`SystemParams::derived`].
pub fn derived_params(p: &SystemParams) -> Result<Derived> {
    p.derived()
}
