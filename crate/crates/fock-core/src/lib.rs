//! Exact few-excitation simulation of atomic-ensemble entanglement
//! distribution with linear optics.
//!
//! States are sparse complex superpositions over occupation vectors of
//! labeled bosonic modes; atomic collective excitations and photonic
//! polarization modes are treated uniformly. Mixtures are kept as explicit
//! pure-state ensembles. Every probability and conditional state in this
//! crate comes from exact enumeration, never from sampling, which makes the
//! heralded operations usable as oracles for the analytic rate formulas.

pub mod dark;
pub mod detector;
pub mod error;
pub mod mixed;
pub mod mode;
pub mod optics;
pub mod prepare;
pub mod protocol;
pub mod state;

pub use dark::{dark_state_check, DarkStateCheck, DarkStateSystem};
pub use detector::{measure_clicks, ClickOutcome, ClickPattern, DetectorModel, MeasurementOutcomes};
pub use error::{FockError, Result};
pub use mixed::MixedState;
pub use mode::{ModeId, ModeKind, ModeRegistry, Polarization};
pub use optics::{
    apply_beamsplitter, apply_loss, apply_loss_pure, apply_pbs, convert_storage, emit, PbsBasis,
};
pub use prepare::{eme_state, input_photon_state, pme_state, polarization_qubit};
pub use protocol::{
    basic_link_generation, detect_pme_sign, entanglement_swap, local_pme_generation, teleport,
    Correction, HeraldedOutcome, PatternOutcome, Sign, COINCIDENCE_PATTERNS, LINK_DETECTORS,
    LOCAL_PME_DETECTORS, TELEPORT_DETECTORS,
};
pub use state::{FockState, DEFAULT_N_MAX, NORM_TOL};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
