//! Builders for the states the protocol starts from.

use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{FockError, Result};
use crate::mixed::MixedState;
use crate::mode::{ModeId, ModeRegistry, Polarization};
use crate::protocol::Sign;
use crate::state::{FockState, DEFAULT_N_MAX, NORM_TOL};

/// Single photon split over two optical modes:
/// `(|0,1> + e^{i phi} |1,0>)/sqrt(2)` over (`L_in`, `R_in`).
pub fn input_photon_state(phi: f64) -> FockState {
    let reg = ModeRegistry::from_modes([
        ModeId::photon("L_in", Polarization::H),
        ModeId::photon("R_in", Polarization::H),
    ])
    .unwrap();
    let mut st = FockState::zero(reg, DEFAULT_N_MAX);
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    st.add_term(&[("R_in", 1)], s).unwrap();
    st.add_term(&[("L_in", 1)], s * C64::from_polar(1.0, phi)).unwrap();
    st
}

/// Entangled-or-vacuum mixture of two ensembles' storage modes: weight
/// `c0/(c0+1)` on joint vacuum and `1/(c0+1)` on the shared single
/// excitation `(T_left + e^{i phi} T_right)/sqrt(2)`.
pub fn eme_state(c0: f64, phi: f64, left: &str, right: &str) -> Result<MixedState> {
    if c0 < 0.0 || c0.is_nan() {
        return Err(FockError::OutOfRange {
            name: "c0",
            value: c0,
            constraint: ">= 0",
        });
    }
    let t_left = format!("{left}.T");
    let t_right = format!("{right}.T");
    let reg = ModeRegistry::from_modes([
        ModeId::atomic_t(t_left.clone()),
        ModeId::atomic_t(t_right.clone()),
    ])?;

    let mut shared = FockState::zero(reg.clone(), DEFAULT_N_MAX);
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    shared.add_term(&[(&t_left, 1)], s)?;
    shared
        .add_term(&[(&t_right, 1)], s * C64::from_polar(1.0, phi))?;

    let w_vac = c0 / (c0 + 1.0);
    if w_vac == 0.0 {
        return MixedState::from_branches(vec![(1.0, shared)]);
    }
    let vacuum = FockState::vacuum(reg, DEFAULT_N_MAX);
    MixedState::from_branches(vec![(w_vac, vacuum), (1.0 / (c0 + 1.0), shared)])
}

/// Entangled state of four ensembles' retrieval-ready modes:
/// `(S_{e0} S_{e3} +/- S_{e1} S_{e2})/sqrt(2)` for ensembles
/// `[e0, e1, e2, e3] = [L1, L2, R1, R2]`. The excitation pairing is
/// cross-indexed: first-left with second-right and vice versa.
pub fn pme_state(sign: Sign, ensembles: [&str; 4]) -> FockState {
    let labels: Vec<String> = ensembles.iter().map(|e| format!("{e}.S")).collect();
    let reg =
        ModeRegistry::from_modes(labels.iter().map(|l| ModeId::atomic_s(l.clone()))).unwrap();
    let mut st = FockState::zero(reg, DEFAULT_N_MAX);
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    st.add_term(&[(&labels[0], 1), (&labels[3], 1)], s).unwrap();
    st.add_term(&[(&labels[1], 1), (&labels[2], 1)], s * sign.factor())
        .unwrap();
    st
}

/// Qubit encoded in which of two ensembles holds the excitation:
/// `(alpha S_{e1} + beta S_{e2}) |vac>`. Requires `|alpha|^2 + |beta|^2 = 1`.
pub fn polarization_qubit(alpha: C64, beta: C64, e1: &str, e2: &str) -> Result<FockState> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(FockError::UnnormalizedInput { norm });
    }
    let l1 = format!("{e1}.S");
    let l2 = format!("{e2}.S");
    let reg = ModeRegistry::from_modes([
        ModeId::atomic_s(l1.clone()),
        ModeId::atomic_s(l2.clone()),
    ])?;
    let mut st = FockState::zero(reg, DEFAULT_N_MAX);
    st.add_term(&[(&l1, 1)], alpha)?;
    st.add_term(&[(&l2, 1)], beta)?;
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_photon_symmetric_case() {
        let st = input_photon_state(0.0);
        let s = FRAC_1_SQRT_2;
        assert!((st.amplitude(&[("R_in", 1)]).unwrap().re - s).abs() < 1e-15);
        assert!((st.amplitude(&[("L_in", 1)]).unwrap().re - s).abs() < 1e-15);
    }

    #[test]
    fn input_photon_pi_flips_sign() {
        let st = input_photon_state(std::f64::consts::PI);
        let s = FRAC_1_SQRT_2;
        let amp = st.amplitude(&[("L_in", 1)]).unwrap();
        assert!((amp.re + s).abs() < 1e-15);
        assert!(amp.im.abs() < 1e-15);
    }

    #[test]
    fn input_photon_quarter_phase_is_imaginary() {
        let st = input_photon_state(std::f64::consts::FRAC_PI_2);
        let amp = st.amplitude(&[("L_in", 1)]).unwrap();
        assert!(amp.re.abs() < 1e-15);
        assert!((amp.im - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn eme_zero_vacuum_coefficient_is_pure() {
        let rho = eme_state(0.0, 0.0, "L", "R").unwrap();
        assert_eq!(rho.num_branches(), 1);
        let st = &rho.branches()[0].1;
        assert!((st.amplitude(&[("L.T", 1)]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn eme_equal_weights_at_unit_c0() {
        let rho = eme_state(1.0, 0.3, "L", "R").unwrap();
        let weights: Vec<f64> = rho.branches().iter().map(|(w, _)| *w).collect();
        assert!((weights[0] - 0.5).abs() < 1e-15);
        assert!((weights[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eme_vacuum_weight_fraction() {
        let rho = eme_state(3.0, 1.0, "L", "R").unwrap();
        assert!((rho.branches()[0].0 - 0.75).abs() < 1e-15);
        assert!((rho.total_weight() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eme_rejects_negative_c0() {
        assert!(eme_state(-0.1, 0.0, "L", "R").is_err());
    }

    #[test]
    fn pme_cross_pairing() {
        let st = pme_state(Sign::Minus, ["L1", "L2", "R1", "R2"]);
        let s = FRAC_1_SQRT_2;
        let first = st.amplitude(&[("L1.S", 1), ("R2.S", 1)]).unwrap();
        let second = st.amplitude(&[("L2.S", 1), ("R1.S", 1)]).unwrap();
        assert!((first.re - s).abs() < 1e-15);
        assert!((second.re + s).abs() < 1e-15);
    }

    #[test]
    fn polarization_qubit_requires_normalization() {
        let err =
            polarization_qubit(C64::new(1.0, 0.0), C64::new(0.5, 0.0), "I1", "I2").unwrap_err();
        assert!(matches!(err, FockError::UnnormalizedInput { .. }));
    }
}
