//! Scalar protocol parameters. Units are fixed crate-wide: times in
//! seconds, distances in km, rates in Hz.

use serde::{Deserialize, Serialize};

use crate::error::{AnalyticsError, Result};

/// All scalar knobs of the repeater protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    /// Probability that the on-demand source emits a photon.
    pub eta_p: f64,
    /// Storage efficiency of a photon into an ensemble.
    pub eta_s: f64,
    /// Storage-to-retrieval conversion efficiency (photon emitted).
    pub eta_e1: f64,
    /// Retrieval efficiency of a stored excitation into a photon.
    pub eta_e2: f64,
    /// Single-photon detector efficiency.
    pub eta_d: f64,
    /// Source repetition rate, Hz.
    pub r: f64,
    /// Total communication distance, km.
    pub l_n: f64,
    /// Fiber attenuation length, km.
    pub l_att: f64,
    /// Nesting level: the distance is split into `2^n` elementary links.
    pub n: u32,
    /// Light speed in fiber, km/s.
    pub c: f64,
    /// Vacuum coefficient of the elementary shared-excitation mixture.
    #[serde(default)]
    pub c0: f64,
    /// Detector dark-count probability per detection window.
    #[serde(default)]
    pub p_d: f64,
}

impl ProtocolParams {
    /// The parameter set quoted for the 2500 km benchmark.
    pub fn benchmark() -> Self {
        Self {
            eta_p: 1.0,
            eta_s: 0.9,
            eta_e1: 0.01,
            eta_e2: 0.9,
            eta_d: 0.9,
            r: 5.0e7,
            l_n: 2500.0,
            l_att: 22.0,
            n: 4,
            c: 2.0e5,
            c0: 0.0,
            p_d: 5.0e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("eta_p", self.eta_p),
            ("eta_s", self.eta_s),
            ("eta_e1", self.eta_e1),
            ("eta_e2", self.eta_e2),
            ("eta_d", self.eta_d),
            ("p_d", self.p_d),
        ];
        for (field, value) in probs {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(AnalyticsError::OutOfRange {
                    field,
                    value,
                    constraint: "within [0, 1]",
                });
            }
        }
        let positives = [("r", self.r), ("l_n", self.l_n), ("l_att", self.l_att), ("c", self.c)];
        for (field, value) in positives {
            if !value.is_finite() || value <= 0.0 {
                return Err(AnalyticsError::OutOfRange {
                    field,
                    value,
                    constraint: "strictly positive",
                });
            }
        }
        if !self.c0.is_finite() || self.c0 < 0.0 {
            return Err(AnalyticsError::OutOfRange {
                field: "c0",
                value: self.c0,
                constraint: ">= 0",
            });
        }
        Ok(())
    }

    /// Elementary link length `L0 = L_n / 2^n`, km.
    pub fn l0(&self) -> f64 {
        self.l_n / (1u64 << self.n) as f64
    }

    /// Same elementary link length, truncated at nesting level `level`:
    /// `n = level`, `L_n = L0 * 2^level`. Used to compare simulation and
    /// formula level by level.
    pub fn level_slice(&self, level: u32) -> Self {
        let mut p = *self;
        p.n = level;
        p.l_n = self.l0() * (1u64 << level) as f64;
        p
    }
}
