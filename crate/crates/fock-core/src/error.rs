//! Error type shared by all state and protocol operations.

use thiserror::Error;

/// Errors raised by state construction, optical elements, and protocol steps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    /// A mode label was registered twice in the same state.
    #[error("duplicate mode label `{0}`")]
    DuplicateMode(String),

    /// A mode label was not found in the state's registry.
    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    /// An operation would push a mode occupation past the truncation cap.
    /// Truncation overflow is a hard error, never a silent clip.
    #[error("occupation {occupation} on mode `{mode}` exceeds truncation cap {n_max}")]
    TruncationOverflow {
        mode: String,
        occupation: u32,
        n_max: u8,
    },

    /// A scalar parameter fell outside its allowed range.
    #[error("parameter `{name}` = {value} out of range ({constraint})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Two states that must share a mode registry did not.
    #[error("mismatched mode registries: {0}")]
    MismatchedRegistries(String),

    /// The same mode was wired to more than one detector.
    #[error("mode `{0}` measured more than once")]
    DuplicateDetector(String),

    /// A mode of the wrong kind was handed to an optical element.
    #[error("mode `{mode}` has the wrong kind for this element (expected {expected})")]
    InvalidModeKind { mode: String, expected: &'static str },

    /// Excitation conversion is only defined for occupations 0 and 1.
    #[error("mode `{0}` holds more than one excitation; conversion undefined")]
    MultiOccupiedConversion(String),

    /// An input state failed its required-form check.
    #[error("input state is not a PME state (best fidelity {fidelity:.3e} against either sign)")]
    NonPmeInput { fidelity: f64 },

    /// An amplitude pair that must be normalized was not.
    #[error("input amplitudes not normalized: |alpha|^2 + |beta|^2 = {norm}")]
    UnnormalizedInput { norm: f64 },

    /// Both couplings of a driven system were zero.
    #[error("both couplings are zero; mixing angle undefined")]
    ZeroField,
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, FockError>;
