//! Heralded entanglement operations: local PME generation, basic-link
//! distribution, entanglement swapping, and teleportation.
//!
//! Every operation follows the same shape: retrieve stored excitations into
//! photons (with finite efficiency the failed branch lands in a flagged mode
//! that coincidence conditioning later removes), interfere the photons, and
//! enumerate threshold-detector click patterns exactly. Four coincidence
//! patterns are accepted per operation; which entangled state each one
//! heralds was derived by enumeration and is frozen in
//! [`COINCIDENCE_PATTERNS`], with a parity rule: same-side detector pairs
//! herald the plus state, mixed pairs herald the minus state and need a
//! pi-phase correction on one output mode.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::detector::{measure_clicks, ClickPattern, DetectorModel, MeasurementOutcomes};
use crate::error::{FockError, Result};
use crate::mixed::MixedState;
use crate::mode::{ModeId, ModeKind, Polarization};
use crate::optics::{apply_beamsplitter, apply_loss, apply_pbs, convert_storage, emit, PbsBasis};
use crate::prepare::pme_state;
use crate::state::FockState;

/// Inputs whose fidelity against either PME sign falls below `1 - this`
/// are rejected.
pub const PME_VALIDATION_TOL: f64 = 1e-9;

/// Which of the two PME branches carries the relative sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(&self) -> C64 {
        match self {
            Sign::Plus => C64::new(1.0, 0.0),
            Sign::Minus => C64::new(-1.0, 0.0),
        }
    }

    pub fn xor(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Local correction the receiver must apply after a heralded operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correction {
    None,
    PiPhase,
}

impl Correction {
    fn flipped(self) -> Correction {
        match self {
            Correction::None => Correction::PiPhase,
            Correction::PiPhase => Correction::None,
        }
    }

    /// Correction and heralded sign are two views of the same bit.
    pub fn sign(&self) -> Sign {
        match self {
            Correction::None => Sign::Plus,
            Correction::PiPhase => Sign::Minus,
        }
    }
}

/// Accepted coincidence patterns over four detectors (bits 0..=3) and the
/// correction each one requires, before folding in input-state signs.
/// Detectors 0/1 watch one interference output pair, detectors 2/3 the
/// other; equal parity heralds the plus state.
pub const COINCIDENCE_PATTERNS: [(u32, Correction); 4] = [
    (0b0101, Correction::None),
    (0b1001, Correction::PiPhase),
    (0b0110, Correction::PiPhase),
    (0b1010, Correction::None),
];

/// One accepted coincidence pattern with its conditional state.
#[derive(Debug, Clone)]
pub struct PatternOutcome {
    pub pattern: ClickPattern,
    /// Labels of the detectors that clicked.
    pub clicked: Vec<String>,
    pub probability: f64,
    pub correction: Correction,
    /// Conditional state over the output modes, before correction; `None`
    /// when the pattern has zero probability.
    pub state: Option<MixedState>,
}

impl PatternOutcome {
    pub fn sign(&self) -> Sign {
        self.correction.sign()
    }
}

/// Result of a heralded operation.
#[derive(Debug, Clone)]
pub struct HeraldedOutcome {
    /// Total probability over the accepted coincidence patterns.
    pub success_prob: f64,
    /// The four accepted patterns.
    pub patterns: Vec<PatternOutcome>,
    /// Correction-applied mixture over all accepted patterns; `None` when
    /// nothing can herald (for example zero detector efficiency).
    pub conditional: Option<MixedState>,
    /// Output mode labels, in canonical order.
    pub output_modes: Vec<String>,
}

impl HeraldedOutcome {
    /// Fidelity of the corrected conditional state against a pure target.
    pub fn conditional_fidelity(&self, target: &FockState) -> Result<f64> {
        match &self.conditional {
            Some(rho) => rho.fidelity_to_pure(target),
            None => Ok(0.0),
        }
    }

    /// The corrected conditional state as a pure state, when all heralded
    /// branches agree up to global phase.
    pub fn conditional_pure(&self, tol: f64) -> Option<&FockState> {
        self.conditional.as_ref().and_then(|rho| rho.as_pure(tol))
    }
}

fn check_eta(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(FockError::OutOfRange { name, value, constraint: "within [0, 1]" });
    }
    Ok(())
}

fn strip(label: &str, suffix: &str) -> String {
    label.strip_suffix(suffix).unwrap_or(label).to_string()
}

/// Ensemble prefixes of a two-ensemble storage-mode state.
fn eme_prefixes(state: &MixedState) -> Result<[String; 2]> {
    let branch = &state
        .branches()
        .first()
        .ok_or_else(|| FockError::MismatchedRegistries("empty mixture".into()))?
        .1;
    let reg = branch.registry();
    if reg.len() != 2 {
        return Err(FockError::MismatchedRegistries(format!(
            "expected 2 storage modes, found {}",
            reg.len()
        )));
    }
    for m in reg.modes() {
        if m.kind() != ModeKind::AtomicT {
            return Err(FockError::InvalidModeKind {
                mode: m.label().to_string(),
                expected: "storage atomic mode",
            });
        }
    }
    Ok([strip(reg.get(0).unwrap().label(), ".T"), strip(reg.get(1).unwrap().label(), ".T")])
}

/// Ensemble prefixes of a four-ensemble PME state, in registry order.
fn pme_prefixes(state: &FockState) -> Result<[String; 4]> {
    let reg = state.registry();
    if reg.len() != 4 {
        return Err(FockError::MismatchedRegistries(format!(
            "expected 4 retrieval-ready modes, found {}",
            reg.len()
        )));
    }
    let mut out: [String; 4] = Default::default();
    for (i, m) in reg.modes().iter().enumerate() {
        if m.kind() != ModeKind::AtomicS {
            return Err(FockError::InvalidModeKind {
                mode: m.label().to_string(),
                expected: "retrieval-ready atomic mode",
            });
        }
        out[i] = strip(m.label(), ".S");
    }
    Ok(out)
}

/// Identifies the sign of a PME input, rejecting states that are not a PME
/// of either sign within [`PME_VALIDATION_TOL`].
pub fn detect_pme_sign(state: &FockState) -> Result<Sign> {
    let ens = pme_prefixes(state)?;
    let names: [&str; 4] = [&ens[0], &ens[1], &ens[2], &ens[3]];
    let f_plus = state.fidelity(&pme_state(Sign::Plus, names))?;
    let f_minus = state.fidelity(&pme_state(Sign::Minus, names))?;
    if f_plus >= 1.0 - PME_VALIDATION_TOL {
        Ok(Sign::Plus)
    } else if f_minus >= 1.0 - PME_VALIDATION_TOL {
        Ok(Sign::Minus)
    } else {
        Err(FockError::NonPmeInput { fidelity: f_plus.max(f_minus) })
    }
}

/// Shared tail of every heralded operation: pick out the accepted
/// coincidence patterns, restrict their conditional states to the output
/// modes (after an optional per-branch canonicalization), and build the
/// corrected merged conditional.
fn assemble_heralded(
    meas: &MeasurementOutcomes,
    extra_flip: bool,
    output_modes: Vec<String>,
    correction_mode: &str,
    canonicalize: &dyn Fn(&FockState) -> Result<FockState>,
) -> Result<HeraldedOutcome> {
    let output_refs: Vec<&str> = output_modes.iter().map(|s| s.as_str()).collect();
    let mut patterns = Vec::with_capacity(4);
    let mut success_prob = 0.0;

    for (bits, base) in COINCIDENCE_PATTERNS {
        let pattern = ClickPattern(bits);
        let outcome = meas
            .outcome(pattern)
            .expect("all patterns are enumerated");
        let correction = if extra_flip { base.flipped() } else { base };
        success_prob += outcome.probability;
        let state = match &outcome.post_state {
            Some(post) => Some(post.map_states(|s| canonicalize(s)?.restricted_to(&output_refs))?),
            None => None,
        };
        let clicked = meas
            .detectors
            .iter()
            .enumerate()
            .filter(|(i, _)| pattern.clicked(*i))
            .map(|(_, l)| l.clone())
            .collect();
        patterns.push(PatternOutcome {
            pattern,
            clicked,
            probability: outcome.probability,
            correction,
            state,
        });
    }

    let conditional = if success_prob > 0.0 {
        let mut branches = Vec::new();
        for p in &patterns {
            let Some(state) = &p.state else { continue };
            for (w, branch) in state.branches() {
                let corrected = match p.correction {
                    Correction::None => branch.clone(),
                    Correction::PiPhase => branch.apply_phase(correction_mode, PI)?,
                };
                branches.push((w * p.probability / success_prob, corrected));
            }
        }
        Some(MixedState::from_branches_unchecked(branches))
    } else {
        None
    };

    Ok(HeraldedOutcome { success_prob, patterns, conditional, output_modes })
}

/// Detector labels of [`local_pme_generation`], in pattern-bit order.
pub const LOCAL_PME_DETECTORS: [&str; 4] = ["D_L+", "D_L-", "D_R+", "D_R-"];

/// Projects two shared-excitation mixtures onto a PME state.
///
/// All four ensembles convert their storage excitations into retrieval-ready
/// excitations while emitting photons (efficiency `eta_e1`); the left-side
/// photons interfere on a 50/50 splitter with phase `phi_l`, the right-side
/// photons with `phi_r`, and a coincidence between one left and one right
/// detector heralds success. Conditioning removes the vacuum and same-side
/// components along with any stationary preparation phase shared by the two
/// input mixtures, so the heralded state is exactly the plus or minus PME
/// over `[L1, L2, R1, R2]`.
pub fn local_pme_generation(
    eme1: &MixedState,
    eme2: &MixedState,
    eta_e1: f64,
    eta_d: f64,
    phi_l: f64,
    phi_r: f64,
) -> Result<HeraldedOutcome> {
    check_eta("eta_e1", eta_e1)?;
    check_eta("eta_d", eta_d)?;
    let [l1, r1] = eme_prefixes(eme1)?;
    let [l2, r2] = eme_prefixes(eme2)?;

    let mut rho = eme1.tensor(eme2)?;
    for ens in [&l1, &r1, &l2, &r2] {
        rho = rho.map_states(|s| {
            convert_storage(
                s,
                &format!("{ens}.T"),
                &format!("{ens}.S"),
                ModeId::photon(format!("{ens}.ph"), Polarization::H),
                &format!("{ens}.x"),
                eta_e1,
            )
        })?;
    }

    let ph = |e: &str| format!("{e}.ph");
    rho = rho.map_states(|s| {
        let s = apply_beamsplitter(s, &ph(&l1), &ph(&l2), phi_l)?;
        apply_beamsplitter(&s, &ph(&r1), &ph(&r2), phi_r)
    })?;
    rho = rho.map_states(|s| {
        let mut s = s.clone();
        s.rename_mode(&ph(&l1), LOCAL_PME_DETECTORS[0])?;
        s.rename_mode(&ph(&l2), LOCAL_PME_DETECTORS[1])?;
        s.rename_mode(&ph(&r1), LOCAL_PME_DETECTORS[2])?;
        s.rename_mode(&ph(&r2), LOCAL_PME_DETECTORS[3])?;
        Ok(s)
    })?;

    let det = DetectorModel::with_efficiency(eta_d)?;
    let meas = measure_clicks(
        &rho,
        &[
            (LOCAL_PME_DETECTORS[0], det),
            (LOCAL_PME_DETECTORS[1], det),
            (LOCAL_PME_DETECTORS[2], det),
            (LOCAL_PME_DETECTORS[3], det),
        ],
    )?;

    let output = vec![
        format!("{l1}.S"),
        format!("{l2}.S"),
        format!("{r1}.S"),
        format!("{r2}.S"),
    ];
    let correction_mode = format!("{l2}.S");
    assemble_heralded(&meas, false, output, &correction_mode, &|s| Ok(s.clone()))
}

/// Detector labels of [`basic_link_generation`] and [`entanglement_swap`].
pub const LINK_DETECTORS: [&str; 4] = ["D1", "D2", "D3", "D4"];

/// Distributes entanglement over one elementary link.
///
/// Node registries are `[L1, L2, R1, R2]`; node A retrieves its R pair into
/// an H/V-polarized channel photon, node B its L pair. The two photons meet
/// at a polarizing beam splitter in the H/V basis, each output port is
/// measured in the diagonal basis (`D1`/`D2` on one port, `D3`/`D4` on the
/// other), and a cross-port coincidence heralds success. Both heralded terms
/// carry one photon per channel, so independent channel phases cancel.
///
/// The two B-side output ensembles are renumbered so the heralded state
/// takes the standard cross-indexed PME form over
/// `[A.L1, A.L2, B.R1, B.R2]`; which physical ensemble receives which number
/// is fixed by the polarization assignment.
pub fn basic_link_generation(
    pme_a: &FockState,
    pme_b: &FockState,
    eta_e2: f64,
    eta_t: f64,
    eta_d: f64,
    channel_phase_a: f64,
    channel_phase_b: f64,
) -> Result<HeraldedOutcome> {
    check_eta("eta_e2", eta_e2)?;
    check_eta("eta_t", eta_t)?;
    check_eta("eta_d", eta_d)?;
    let sign_a = detect_pme_sign(pme_a)?;
    let sign_b = detect_pme_sign(pme_b)?;
    let ens_a = pme_prefixes(pme_a)?;
    let ens_b = pme_prefixes(pme_b)?;

    let st = pme_a.tensor(pme_b)?;
    // retrieval: A's R pair and B's L pair become channel photons
    let retrievals = [
        (&ens_a[2], "ch_a.H", Polarization::H),
        (&ens_a[3], "ch_a.V", Polarization::V),
        (&ens_b[0], "ch_b.H", Polarization::H),
        (&ens_b[1], "ch_b.V", Polarization::V),
    ];
    let mut st = st;
    for (ens, photon, pol) in retrievals {
        st = emit(
            &st,
            &format!("{ens}.S"),
            ModeId::photon(photon, pol),
            &format!("{ens}.x"),
            eta_e2,
        )?;
    }
    // channel propagation phases, common to both polarizations of a channel
    for (mode, phase) in [
        ("ch_a.H", channel_phase_a),
        ("ch_a.V", channel_phase_a),
        ("ch_b.H", channel_phase_b),
        ("ch_b.V", channel_phase_b),
    ] {
        st = st.apply_phase(mode, phase)?;
    }

    let mut rho = MixedState::pure(st);
    for mode in ["ch_a.H", "ch_a.V", "ch_b.H", "ch_b.V"] {
        rho = apply_loss(&rho, mode, eta_t)?;
    }

    rho = rho.map_states(|s| {
        apply_pbs(s, ("ch_a.H", "ch_a.V"), ("ch_b.H", "ch_b.V"), PbsBasis::Hv)
    })?;
    // diagonal-basis analysis of each output port
    rho = rho.map_states(|s| {
        let s = apply_beamsplitter(s, "ch_a.H", "ch_a.V", 0.0)?;
        let mut s = apply_beamsplitter(&s, "ch_b.H", "ch_b.V", 0.0)?;
        s.rename_mode("ch_a.H", LINK_DETECTORS[0])?;
        s.rename_mode("ch_a.V", LINK_DETECTORS[1])?;
        s.rename_mode("ch_b.H", LINK_DETECTORS[2])?;
        s.rename_mode("ch_b.V", LINK_DETECTORS[3])?;
        Ok(s)
    })?;

    let det = DetectorModel::with_efficiency(eta_d)?;
    let meas = measure_clicks(
        &rho,
        &[
            (LINK_DETECTORS[0], det),
            (LINK_DETECTORS[1], det),
            (LINK_DETECTORS[2], det),
            (LINK_DETECTORS[3], det),
        ],
    )?;

    let b_r1 = format!("{}.S", ens_b[2]);
    let b_r2 = format!("{}.S", ens_b[3]);
    let output = vec![
        format!("{}.S", ens_a[0]),
        format!("{}.S", ens_a[1]),
        b_r1.clone(),
        b_r2.clone(),
    ];
    let correction_mode = format!("{}.S", ens_a[1]);
    let canonicalize = move |s: &FockState| -> Result<FockState> {
        let mut s = s.clone();
        s.swap_mode_labels(&b_r1, &b_r2)?;
        Ok(s)
    };
    assemble_heralded(
        &meas,
        sign_a.xor(sign_b) == Sign::Minus,
        output,
        &correction_mode,
        &canonicalize,
    )
}

/// Connects two PME links that share a middle node, doubling the span.
///
/// Input registries are `[A1, A2, BL1, BL2]` and `[BR1, BR2, C1, C2]`; all
/// four middle ensembles retrieve simultaneously, `BL1` interferes with
/// `BR1` (outputs `D1`/`D2`) and `BL2` with `BR2` (outputs `D3`/`D4`), and
/// one click per splitter heralds a PME over `[A1, A2, C1, C2]`.
pub fn entanglement_swap(
    pme_ab: &FockState,
    pme_bc: &FockState,
    eta_e2: f64,
    eta_d: f64,
) -> Result<HeraldedOutcome> {
    check_eta("eta_e2", eta_e2)?;
    check_eta("eta_d", eta_d)?;
    let sign_ab = detect_pme_sign(pme_ab)?;
    let sign_bc = detect_pme_sign(pme_bc)?;
    let ens_ab = pme_prefixes(pme_ab)?;
    let ens_bc = pme_prefixes(pme_bc)?;

    let mut st = pme_ab.tensor(pme_bc)?;
    for ens in [&ens_ab[2], &ens_ab[3], &ens_bc[0], &ens_bc[1]] {
        st = emit(
            &st,
            &format!("{ens}.S"),
            ModeId::photon(format!("{ens}.ph"), Polarization::H),
            &format!("{ens}.x"),
            eta_e2,
        )?;
    }

    let ph = |e: &String| format!("{e}.ph");
    let st = apply_beamsplitter(&st, &ph(&ens_ab[2]), &ph(&ens_bc[0]), 0.0)?;
    let mut st = apply_beamsplitter(&st, &ph(&ens_ab[3]), &ph(&ens_bc[1]), 0.0)?;
    st.rename_mode(&ph(&ens_ab[2]), LINK_DETECTORS[0])?;
    st.rename_mode(&ph(&ens_bc[0]), LINK_DETECTORS[1])?;
    st.rename_mode(&ph(&ens_ab[3]), LINK_DETECTORS[2])?;
    st.rename_mode(&ph(&ens_bc[1]), LINK_DETECTORS[3])?;

    let det = DetectorModel::with_efficiency(eta_d)?;
    let meas = measure_clicks(
        &MixedState::pure(st),
        &[
            (LINK_DETECTORS[0], det),
            (LINK_DETECTORS[1], det),
            (LINK_DETECTORS[2], det),
            (LINK_DETECTORS[3], det),
        ],
    )?;

    let output = vec![
        format!("{}.S", ens_ab[0]),
        format!("{}.S", ens_ab[1]),
        format!("{}.S", ens_bc[2]),
        format!("{}.S", ens_bc[3]),
    ];
    let correction_mode = format!("{}.S", ens_ab[1]);
    assemble_heralded(
        &meas,
        sign_ab.xor(sign_bc) == Sign::Minus,
        output,
        &correction_mode,
        &|s| Ok(s.clone()),
    )
}

/// Detector labels of [`teleport`], in pattern-bit order.
pub const TELEPORT_DETECTORS: [&str; 4] = ["D_I1", "D_L1", "D_I2", "D_L2"];

/// Teleports an unknown two-ensemble excitation qubit through a PME state.
///
/// The unknown state `(alpha S_I1 + beta S_I2)|vac>` is prepared on internal
/// ensembles `I1`, `I2`. `I1` interferes with the PME's `L1`, `I2` with
/// `L2`; exactly one click per splitter heralds success and the qubit
/// reappears over `[R1, R2]` up to a tracked pi-phase correction. Two
/// photons bunching at one splitter leave the other splitter dark, so
/// miscounted double clicks reject rather than corrupt.
pub fn teleport(
    alpha: C64,
    beta: C64,
    pme: &FockState,
    eta_e2: f64,
    eta_d: f64,
) -> Result<HeraldedOutcome> {
    check_eta("eta_e2", eta_e2)?;
    check_eta("eta_d", eta_d)?;
    let sign = detect_pme_sign(pme)?;
    let ens = pme_prefixes(pme)?;

    let unknown = crate::prepare::polarization_qubit(alpha, beta, "I1", "I2")?;
    let mut st = unknown.tensor(pme)?;
    for e in ["I1", ens[0].as_str(), "I2", ens[1].as_str()] {
        st = emit(
            &st,
            &format!("{e}.S"),
            ModeId::photon(format!("{e}.ph"), Polarization::H),
            &format!("{e}.x"),
            eta_e2,
        )?;
    }

    let st = apply_beamsplitter(&st, "I1.ph", &format!("{}.ph", ens[0]), 0.0)?;
    let mut st = apply_beamsplitter(&st, "I2.ph", &format!("{}.ph", ens[1]), 0.0)?;
    st.rename_mode("I1.ph", TELEPORT_DETECTORS[0])?;
    st.rename_mode(&format!("{}.ph", ens[0]), TELEPORT_DETECTORS[1])?;
    st.rename_mode("I2.ph", TELEPORT_DETECTORS[2])?;
    st.rename_mode(&format!("{}.ph", ens[1]), TELEPORT_DETECTORS[3])?;

    let det = DetectorModel::with_efficiency(eta_d)?;
    let meas = measure_clicks(
        &MixedState::pure(st),
        &[
            (TELEPORT_DETECTORS[0], det),
            (TELEPORT_DETECTORS[1], det),
            (TELEPORT_DETECTORS[2], det),
            (TELEPORT_DETECTORS[3], det),
        ],
    )?;

    let output = vec![format!("{}.S", ens[2]), format!("{}.S", ens[3])];
    let correction_mode = output[0].clone();
    assemble_heralded(
        &meas,
        sign == Sign::Minus,
        output,
        &correction_mode,
        &|s| Ok(s.clone()),
    )
}
