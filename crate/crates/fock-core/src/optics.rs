//! Linear-optical elements and excitation transfer between atomic and
//! photonic modes.
//!
//! Everything here is either a passive mode unitary (beam splitters,
//! polarizing beam splitters, phase shifters) or an isometry into an
//! enlarged mode space (retrieval with finite efficiency, storage-mode
//! conversion). Loss is a beam splitter onto an ancilla followed by a
//! partial trace, never an amplitude rescale, so mixtures stay exact.

use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{FockError, Result};
use crate::mixed::MixedState;
use crate::mode::{ModeId, ModeKind, ModeRegistry, Polarization};
use crate::state::FockState;

/// Basis a polarizing beam splitter separates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbsBasis {
    /// Transmit `H`, reflect `V`.
    Hv,
    /// Transmit `(H+V)/sqrt(2)`, reflect `(H-V)/sqrt(2)`.
    Diagonal,
}

fn check_eta(name: &'static str, eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) || eta.is_nan() {
        return Err(FockError::OutOfRange { name, value: eta, constraint: "within [0, 1]" });
    }
    Ok(())
}

fn require_photonic(state: &FockState, label: &str) -> Result<()> {
    let idx = state.registry().require(label)?;
    if !state.registry().get(idx).unwrap().kind().is_photonic() {
        return Err(FockError::InvalidModeKind {
            mode: label.to_string(),
            expected: "photonic",
        });
    }
    Ok(())
}

fn require_kind(state: &FockState, label: &str, kind: ModeKind, what: &'static str) -> Result<()> {
    let idx = state.registry().require(label)?;
    if state.registry().get(idx).unwrap().kind() != kind {
        return Err(FockError::InvalidModeKind { mode: label.to_string(), expected: what });
    }
    Ok(())
}

/// 50/50 beam splitter matrix: `a -> (a + e^{i phi} b)/sqrt(2)`,
/// `b -> (a - e^{i phi} b)/sqrt(2)`.
pub fn beamsplitter_matrix(phi: f64) -> [[C64; 2]; 2] {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let e = C64::from_polar(1.0, phi);
    [[s, s], [s * e, -(s * e)]]
}

/// Transmissivity-`eta` coupler: `a -> sqrt(eta) a + sqrt(1-eta) b`.
fn transmission_matrix(eta: f64) -> [[C64; 2]; 2] {
    let t = C64::new(eta.sqrt(), 0.0);
    let r = C64::new((1.0 - eta).sqrt(), 0.0);
    [[t, -r], [r, t]]
}

const SWAP: [[C64; 2]; 2] = [
    [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
];

/// 50/50 beam splitter on two co-polarized photonic modes.
pub fn apply_beamsplitter(state: &FockState, a: &str, b: &str, phi: f64) -> Result<FockState> {
    require_photonic(state, a)?;
    require_photonic(state, b)?;
    state.apply_two_mode(a, b, beamsplitter_matrix(phi))
}

/// Polarizing beam splitter across two spatial ports, each carrying an
/// `(H, V)` mode pair. In the `Hv` basis, `H` is transmitted (stays in its
/// port) and `V` is reflected into the other port; in the `Diagonal` basis
/// the same routing happens for the rotated polarizations.
pub fn apply_pbs(
    state: &FockState,
    port_a: (&str, &str),
    port_b: (&str, &str),
    basis: PbsBasis,
) -> Result<FockState> {
    let (a_h, a_v) = port_a;
    let (b_h, b_v) = port_b;
    require_kind(state, a_h, ModeKind::Photonic(Polarization::H), "photonic H")?;
    require_kind(state, a_v, ModeKind::Photonic(Polarization::V), "photonic V")?;
    require_kind(state, b_h, ModeKind::Photonic(Polarization::H), "photonic H")?;
    require_kind(state, b_v, ModeKind::Photonic(Polarization::V), "photonic V")?;

    let rotate = |st: &FockState| -> Result<FockState> {
        let st = st.apply_two_mode(a_h, a_v, beamsplitter_matrix(0.0))?;
        st.apply_two_mode(b_h, b_v, beamsplitter_matrix(0.0))
    };

    match basis {
        PbsBasis::Hv => state.apply_two_mode(a_v, b_v, SWAP),
        PbsBasis::Diagonal => {
            // Rotate each port into the +/- frame, route, rotate back.
            let st = rotate(state)?;
            let st = st.apply_two_mode(a_v, b_v, SWAP)?;
            rotate(&st)
        }
    }
}

fn fresh_label(registry: &ModeRegistry, base: &str) -> String {
    if registry.index_of(base).is_none() {
        return base.to_string();
    }
    for i in 1.. {
        let candidate = format!("{base}{i}");
        if registry.index_of(&candidate).is_none() {
            return candidate;
        }
    }
    unreachable!()
}

/// Photon loss on one mode with transmissivity `eta`: couple to a fresh
/// ancilla through a transmissivity-`eta` splitter, then trace the ancilla
/// out. Total probability is conserved exactly.
pub fn apply_loss(state: &MixedState, mode: &str, eta: f64) -> Result<MixedState> {
    check_eta("eta", eta)?;
    let mut branches = Vec::new();
    for (w, pure) in state.branches() {
        let anc = fresh_label(pure.registry(), &format!("{mode}.loss"));
        let mut st = pure.clone();
        st.add_mode(ModeId::photon(&anc, Polarization::H))?;
        let st = st.apply_two_mode(mode, &anc, transmission_matrix(eta))?;
        for (_, remainder) in {
            let idx = st.registry().require(&anc)?;
            st.split_by_modes(&[idx])
        } {
            let p = remainder.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut kept = remainder;
            kept.normalize();
            branches.push((w * p, kept));
        }
    }
    Ok(MixedState::from_branches_unchecked(branches))
}

/// Loss applied to a pure state; returns the resulting mixture.
pub fn apply_loss_pure(state: &FockState, mode: &str, eta: f64) -> Result<MixedState> {
    apply_loss(&MixedState::pure(state.clone()), mode, eta)
}

/// Retrieval of a stored excitation into a photon: each quantum in the
/// `source` storage mode leaves the ensemble, entering `photon` with
/// amplitude `sqrt(eta)` or the flagged `fail` mode with `sqrt(1-eta)`.
/// The source mode is left in vacuum. Pure isometry; conditioning on click
/// patterns later discards the failed branches.
pub fn emit(
    state: &FockState,
    source: &str,
    photon: ModeId,
    fail: &str,
    eta: f64,
) -> Result<FockState> {
    check_eta("eta_e", eta)?;
    require_kind(state, source, ModeKind::AtomicS, "retrieval-ready atomic mode")?;
    let mut st = state.clone();
    let photon_label = photon.label().to_string();
    st.add_mode(photon)?;
    st.add_mode(ModeId::photon(fail, Polarization::H))?;
    let st = st.apply_two_mode(source, fail, transmission_matrix(eta))?;
    st.apply_two_mode(source, &photon_label, SWAP)
}

/// Converts a storage excitation into a retrieval-ready excitation plus an
/// emitted photon: `T -> sqrt(eta) (S, photon) + sqrt(1-eta) fail`. Defined
/// for source occupations 0 and 1 only; the conversion does not benefit from
/// collective enhancement and never has to handle more than one quantum per
/// ensemble here.
pub fn convert_storage(
    state: &FockState,
    source: &str,
    s_out: &str,
    photon: ModeId,
    fail: &str,
    eta: f64,
) -> Result<FockState> {
    check_eta("eta_e", eta)?;
    require_kind(state, source, ModeKind::AtomicT, "storage atomic mode")?;
    let mut st = state.clone();
    let photon_label = photon.label().to_string();
    st.add_mode(ModeId::atomic_s(s_out))?;
    st.add_mode(photon)?;
    st.add_mode(ModeId::photon(fail, Polarization::H))?;

    let src = st.registry().require(source)?;
    let is_out = st.registry().require(s_out)?;
    let iph = st.registry().require(&photon_label)?;
    let ifail = st.registry().require(fail)?;

    let ok_amp = C64::new(eta.sqrt(), 0.0);
    let fail_amp = C64::new((1.0 - eta).sqrt(), 0.0);
    let n_max = st.n_max();

    let check = |occ: &[u8], idx: usize| -> Result<()> {
        if occ[idx] > n_max {
            return Err(FockError::TruncationOverflow {
                mode: st.registry().get(idx).unwrap().label().to_string(),
                occupation: occ[idx] as u32,
                n_max,
            });
        }
        Ok(())
    };

    let mut out = FockState::zero(st.registry().clone(), n_max);
    for (occ, amp) in st.terms() {
        match occ[src] {
            0 => out.add_term_raw(occ.to_vec(), amp),
            1 => {
                let mut success = occ.to_vec();
                success[src] = 0;
                success[is_out] += 1;
                success[iph] += 1;
                check(&success, is_out)?;
                check(&success, iph)?;
                out.add_term_raw(success, amp * ok_amp);

                let mut failed = occ.to_vec();
                failed[src] = 0;
                failed[ifail] += 1;
                check(&failed, ifail)?;
                out.add_term_raw(failed, amp * fail_amp);
            }
            _ => return Err(FockError::MultiOccupiedConversion(source.to_string())),
        }
    }
    out.prune();
    Ok(out)
}
