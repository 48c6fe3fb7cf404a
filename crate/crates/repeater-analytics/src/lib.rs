//! Closed-form rate, fidelity, and cavity signal-to-noise calculations for
//! an atomic-ensemble repeater protocol, with single-axis parameter sweeps
//! and the cited reference totals for comparison. Pure, stateless
//! arithmetic; the exact enumeration in `fock-core` serves as the oracle for
//! every stage probability here (exercised in this crate's tests).

pub mod cavity;
pub mod error;
pub mod params;
pub mod rates;
pub mod sweep;

pub use cavity::{cavity_snr, CavityParams, SnrEstimate};
pub use error::AnalyticsError;
pub use params::ProtocolParams;
pub use rates::{
    enumerated_p_r, fidelity_imperfection, local_wait, rate_breakdown, reference_comparison,
    success_probs, total_time, RateBreakdown, ReferenceComparison, SuccessProbs,
    DLCZ_TOTAL_TIME_S, SPS_TOTAL_TIME_S,
};
pub use sweep::{sweep, Axis, SweepRow};
