//! Concrete operators for two four-level atoms in a lossy cavity.
//!
//! The full Hamiltonian is written in the frame rotating with the Rydberg
//! pump, where a singly excited `|r⟩` sits at `−Δ` and the pair state
//! `|rr⟩` at `U_rr − 2Δ`:
//!
//! ```text
//! H = Σ_i [ (−1)^(i−1) Ω_a |p⟩_i⟨e| + g |p⟩_i⟨g| a + ω |g⟩_i⟨e| + Ω_b |e⟩_i⟨r| + H.c. ]
//!     − Δ Σ_i |r⟩_i⟨r| + U_rr |rr⟩⟨rr| − s Σ_i |e⟩_i⟨e|
//! ```
//!
//! with `U_rr = 2Δ − λ + δ` and `s = Ω_b²/Δ` when Stark compensation is on
//! (zero otherwise).

mod effective;
mod states;

pub use effective::{build_effective_model, EffectiveModel, EFFECTIVE_BASIS};
pub use states::{atom_pair_ket, fock_ket, named_state, NamedState};

use crate::error::{Error, Result};
use crate::expm::unitary_from_generator;
use crate::operator::{c64, Operator};
use crate::params::{RydbergDecay, SystemParams};
use crate::space::{atom_op, embed, Level, SpaceLayout, ATOM1, ATOM2, ATOM_DIM, CAVITY};

/// Truncated annihilation operator on `n_levels` Fock states.
pub fn annihilation(n_levels: usize) -> Operator {
    let mut a = Operator::zeros(n_levels);
    for n in 1..n_levels {
        a.set(n - 1, n, c64::new((n as f64).sqrt(), 0.0));
    }
    a
}

fn check_layout(layout: &SpaceLayout) -> Result<()> {
    let d = layout.dims();
    if d.len() != 3 || d[ATOM1] != ATOM_DIM || d[ATOM2] != ATOM_DIM {
        return Err(Error::Dimension(format!("full model needs layout [4, 4, N_c + 1], got {d:?}")));
    }
    Ok(())
}

fn on_atom(a: Level, b: Level, slot: usize, layout: &SpaceLayout) -> Operator {
    embed(&atom_op(a, b), slot, layout).expect("layout checked")
}

/// Cavity annihilation operator on the full space.
pub fn cavity_annihilation(layout: &SpaceLayout) -> Result<Operator> {
    check_layout(layout)?;
    embed(&annihilation(layout.cavity_dim()), CAVITY, layout)
}

/// Full interaction Hamiltonian on `[4, 4, N_c + 1]`.
pub fn build_full_hamiltonian(p: &SystemParams, layout: &SpaceLayout) -> Result<Operator> {
    p.validate()?;
    check_layout(layout)?;
    let a = cavity_annihilation(layout)?;
    let n = layout.total_dim();
    let mut coupling = Operator::zeros(n);
    let mut diag = Operator::zeros(n);
    let stark = if p.stark_compensation && p.omega_b > 0.0 { p.omega_b * p.omega_b / p.delta } else { 0.0 };

    for (slot, sign) in [(ATOM1, 1.0), (ATOM2, -1.0)] {
        use Level::*;
        coupling += &on_atom(P, E, slot, layout).scale_real(sign * p.omega_a);
        coupling += &(&on_atom(P, G, slot, layout) * &a).scale_real(p.g);
        coupling += &on_atom(G, E, slot, layout).scale_real(p.omega_mw);
        coupling += &on_atom(E, R, slot, layout).scale_real(p.omega_b);
        diag += &on_atom(R, R, slot, layout).scale_real(-p.delta);
        diag += &on_atom(E, E, slot, layout).scale_real(-stark);
    }
    let rr = &on_atom(Level::R, Level::R, ATOM1, layout) * &on_atom(Level::R, Level::R, ATOM2, layout);
    diag += &rr.scale_real(p.u_rr());

    let mut h = &coupling + &coupling.adjoint();
    h += &diag;
    Ok(h)
}

/// Atomic spontaneous-emission channels, atom 1 first.
pub fn spontaneous_emission_ops(p: &SystemParams, layout: &SpaceLayout) -> Result<Vec<Operator>> {
    p.validate()?;
    check_layout(layout)?;
    let mut ops = Vec::new();
    let optical = (p.gamma / 2.0).sqrt();
    for slot in [ATOM1, ATOM2] {
        if p.gamma > 0.0 {
            ops.push(on_atom(Level::G, Level::P, slot, layout).scale_real(optical));
            ops.push(on_atom(Level::E, Level::P, slot, layout).scale_real(optical));
        }
        if p.gamma_r > 0.0 {
            match p.rydberg_decay {
                RydbergDecay::ToE => ops.push(on_atom(Level::E, Level::R, slot, layout).scale_real(p.gamma_r.sqrt())),
                RydbergDecay::ToG => ops.push(on_atom(Level::G, Level::R, slot, layout).scale_real(p.gamma_r.sqrt())),
                RydbergDecay::Split => {
                    let r = (p.gamma_r / 2.0).sqrt();
                    ops.push(on_atom(Level::G, Level::R, slot, layout).scale_real(r));
                    ops.push(on_atom(Level::E, Level::R, slot, layout).scale_real(r));
                }
            }
        }
    }
    Ok(ops)
}

/// All dissipation channels of the full model: spontaneous emission
/// followed by `√κ·a`. Zero-rate channels are omitted.
pub fn build_full_collapse_ops(p: &SystemParams, layout: &SpaceLayout) -> Result<Vec<Operator>> {
    let mut ops = spontaneous_emission_ops(p, layout)?;
    if p.kappa > 0.0 {
        ops.push(cavity_annihilation(layout)?.scale_real(p.kappa.sqrt()));
    }
    Ok(ops)
}

/// Feedback rotation `exp[−iη(|e⟩₁⟨g| + |g⟩₁⟨e|)]` on the full space.
pub fn feedback_unitary(p: &SystemParams, layout: &SpaceLayout) -> Result<Operator> {
    check_layout(layout)?;
    let flip = &atom_op(Level::E, Level::G) + &atom_op(Level::G, Level::E);
    let u1 = unitary_from_generator(&flip.scale_real(p.eta))?;
    embed(&u1, ATOM1, layout)
}

/// Feedback-modified cavity jump `√κ · U_fb · a`.
pub fn build_feedback_jump(p: &SystemParams, layout: &SpaceLayout) -> Result<Operator> {
    p.validate()?;
    if p.kappa <= 0.0 {
        return Err(Error::InvalidArgument(
            "feedback needs kappa > 0: the jump is triggered by cavity emissions".into(),
        ));
    }
    let u = feedback_unitary(p, layout)?;
    let a = cavity_annihilation(layout)?;
    Ok((&u * &a).scale_real(p.kappa.sqrt()))
}

/// Hamiltonian and dissipators of the full model, ready for evolution.
#[derive(Debug, Clone)]
pub struct FullModel {
    pub layout: SpaceLayout,
    pub hamiltonian: Operator,
    pub collapse: Vec<Operator>,
}

impl FullModel {
    /// Plain cavity decay, or the feedback jump when `feedback` is set.
    pub fn new(p: &SystemParams, feedback: bool) -> Result<Self> {
        let layout = SpaceLayout::atoms_and_cavity(p.fock_cutoff);
        let hamiltonian = build_full_hamiltonian(p, &layout)?;
        let mut collapse = spontaneous_emission_ops(p, &layout)?;
        if feedback {
            collapse.push(build_feedback_jump(p, &layout)?);
        } else if p.kappa > 0.0 {
            collapse.push(cavity_annihilation(&layout)?.scale_real(p.kappa.sqrt()));
        }
        Ok(Self { layout, hamiltonian, collapse })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::states::named_state;
    use crate::operator::{inner, ZERO};
    use crate::space::{partial_trace, tensor_ket};

    fn fig2a() -> SystemParams {
        SystemParams { omega_a: 0.1, omega_mw: 0.05, omega_b: 0.5, delta: 10.0, gamma: 0.1, ..Default::default() }
    }

    fn with_vacuum(v: &[c64], layout: &SpaceLayout) -> Vec<c64> {
        tensor_ket(v, &fock_ket(0, layout.cavity_dim()))
    }

    #[test]
    fn annihilation_ladder() {
        let a = annihilation(3);
        assert_eq!(a.get(0, 1), c64::new(1.0, 0.0));
        assert!((a.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
        let n = &a.adjoint() * &a;
        for k in 0..3 {
            assert!((n.get(k, k).re - k as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let layout = SpaceLayout::atoms_and_cavity(2);
        let h = build_full_hamiltonian(&fig2a(), &layout).unwrap();
        assert_eq!(h.dim(), 48);
        assert!(h.hermiticity_error() < 1e-12);
    }

    #[test]
    fn pair_rydberg_energy_is_minus_lambda() {
        // Only the detuning structure survives: |rr⟩ carries U_rr − 2Δ = −λ.
        let p = SystemParams { omega_b: 0.5, delta: 10.0, stark_compensation: false, ..Default::default() };
        let layout = SpaceLayout::atoms_and_cavity(1);
        let h = build_full_hamiltonian(&p, &layout).unwrap();
        let lambda = p.lambda();
        for n in 0..2 {
            let rr = layout.index(&[3, 3, n]);
            assert!((h.get(rr, rr).re + lambda).abs() < 1e-12);
            let gr = layout.index(&[0, 3, n]);
            assert!((h.get(gr, gr).re + p.delta).abs() < 1e-12);
        }
        let rr_diag: Vec<usize> = (0..h.dim()).filter(|&k| (h.get(k, k).re + lambda).abs() < 1e-12).collect();
        assert_eq!(rr_diag.len(), 2);
    }

    #[test]
    fn zeno_relevant_matrix_elements() {
        let p = fig2a();
        let layout = SpaceLayout::atoms_and_cavity(2);
        let h = build_full_hamiltonian(&p, &layout).unwrap();
        let t0 = named_state(NamedState::T, &layout, true).unwrap();
        let d0 = named_state(NamedState::D, &layout, true).unwrap();
        let s0 = named_state(NamedState::S, &layout, true).unwrap();
        // Hand expansion: Ω_a(|p⟩₁⟨e| − |p⟩₂⟨e|)|T⟩ = Ω_a|D⟩ and maps |S⟩ to the
        // symmetric |p⟩ combination.
        assert!((h.matrix_element(&t0, &d0) - c64::new(0.1, 0.0)).norm() < 1e-14);
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let dplus: Vec<c64> = {
            let mut v = vec![ZERO; 16];
            v[2 * 4] = c64::new(s2, 0.0);
            v[2] = c64::new(s2, 0.0);
            with_vacuum(&v, &layout)
        };
        assert!((inner(&dplus, &h.apply(&s0)) - c64::new(0.1, 0.0)).norm() < 1e-14);

        // |D⟩ is dark to the cavity while the symmetric combination is not.
        let gg1 = tensor_ket(&NamedState::Gg.atomic(), &fock_ket(1, 3));
        assert!(h.matrix_element(&gg1, &d0).norm() < 1e-15);
        let bright = h.matrix_element(&gg1, &dplus);
        assert!((bright.re - 2f64.sqrt() * p.g).abs() < 1e-14);
    }

    #[test]
    fn zero_photon_block_reduces_to_zeno_hamiltonian() {
        for p in [SystemParams { omega_b: 0.0, delta: 0.0, ..fig2a() }, fig2a()] {
            let layout = SpaceLayout::atoms_and_cavity(2);
            let mut q = p.clone();
            q.g = 0.0;
            let h = build_full_hamiltonian(&q, &layout).unwrap();
            let t0 = named_state(NamedState::T, &layout, true).unwrap();
            let d0 = named_state(NamedState::D, &layout, true).unwrap();
            let block = [
                [h.matrix_element(&t0, &t0), h.matrix_element(&t0, &d0)],
                [h.matrix_element(&d0, &t0), h.matrix_element(&d0, &d0)],
            ];
            let shift = if p.omega_b > 0.0 { -p.omega_b * p.omega_b / p.delta } else { 0.0 };
            assert!((block[0][0].re - shift).abs() < 1e-14);
            assert!(block[1][1].norm() < 1e-14);
            assert!((block[0][1].re - p.omega_a).abs() < 1e-14);
            assert!((block[1][0].re - p.omega_a).abs() < 1e-14);
        }
    }

    #[test]
    fn collapse_ops_respect_rates() {
        let layout = SpaceLayout::atoms_and_cavity(2);
        let none = SystemParams::default();
        assert!(build_full_collapse_ops(&none, &layout).unwrap().is_empty());

        let p = SystemParams { gamma: 0.1, ..Default::default() };
        let ops = build_full_collapse_ops(&p, &layout).unwrap();
        assert_eq!(ops.len(), 4);
        for op in &ops {
            let nz = op.nonzeros();
            assert_eq!(nz.len(), 16 / 4 * 3);
            assert!(nz.iter().all(|&(_, _, v)| (v.norm() - 0.05f64.sqrt()).abs() < 1e-15));
        }
    }

    #[test]
    fn rydberg_channels_sum_to_projector() {
        let layout = SpaceLayout::atoms_and_cavity(1);
        for (decay, count) in [(RydbergDecay::Split, 9), (RydbergDecay::ToE, 7), (RydbergDecay::ToG, 7)] {
            let p = SystemParams {
                omega_a: 0.01,
                omega_mw: 0.005,
                omega_b: 1.0,
                delta: 20.0,
                gamma: 0.3,
                gamma_r: 0.001,
                kappa: 0.2,
                rydberg_decay: decay,
                ..Default::default()
            };
            let ops = build_full_collapse_ops(&p, &layout).unwrap();
            assert_eq!(ops.len(), count);
            let ryd = spontaneous_emission_ops(&SystemParams { gamma: 0.0, ..p.clone() }, &layout).unwrap();
            let mut sum = Operator::zeros(layout.total_dim());
            for l in &ryd {
                sum += &(&l.adjoint() * l);
            }
            let want = &on_atom(Level::R, Level::R, ATOM1, &layout) + &on_atom(Level::R, Level::R, ATOM2, &layout);
            assert!(sum.max_abs_diff(&want.scale_real(0.001)) < 1e-15);
        }
    }

    #[test]
    fn feedback_jump_properties() {
        let layout = SpaceLayout::atoms_and_cavity(2);
        let base = SystemParams { kappa: 0.3, ..Default::default() };
        let plain = cavity_annihilation(&layout).unwrap().scale_real(0.3f64.sqrt());
        let j0 = build_feedback_jump(&SystemParams { eta: 0.0, ..base.clone() }, &layout).unwrap();
        assert_eq!(j0.max_abs_diff(&plain), 0.0);

        for eta in [0.3, std::f64::consts::FRAC_PI_2, 2.0] {
            let p = SystemParams { eta, ..base.clone() };
            let u = feedback_unitary(&p, &layout).unwrap();
            assert!(u.is_unitary(1e-10));
            let j = build_feedback_jump(&p, &layout).unwrap();
            let jj = &j.adjoint() * &j;
            let aa = &plain.adjoint() * &plain;
            assert!(jj.max_abs_diff(&aa) < 1e-14);
        }

        let p = SystemParams { eta: std::f64::consts::FRAC_PI_2, ..base.clone() };
        let u = feedback_unitary(&p, &SpaceLayout::atoms_and_cavity(0)).unwrap();
        // Atom-1 block after tracing out atom 2 (identity there).
        let red = partial_trace(&u, &[ATOM1], &SpaceLayout::atoms_and_cavity(0)).unwrap().scale_real(0.25);
        let i = c64::new(0.0, 1.0);
        assert!((red.get(0, 1) + i).norm() < 1e-14 && (red.get(1, 0) + i).norm() < 1e-14);
        assert!(red.get(0, 0).norm() < 1e-14 && red.get(1, 1).norm() < 1e-14);
        assert!((red.get(2, 2).re - 1.0).abs() < 1e-14 && (red.get(3, 3).re - 1.0).abs() < 1e-14);

        assert!(build_feedback_jump(&SystemParams::default(), &layout).is_err());
    }

    #[test]
    fn wrong_layout_rejected() {
        let layout = SpaceLayout::new(vec![4, 2, 3]).unwrap();
        assert!(build_full_hamiltonian(&fig2a(), &layout).is_err());
    }
}
