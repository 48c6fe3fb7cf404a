//! Simulation configuration and outcome records.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use repeater_analytics::{success_probs, AnalyticsError, ProtocolParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Params(#[from] AnalyticsError),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// How waiting time is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TimeModel {
    /// Local generation runs in discrete slots of `1/r`; each link or swap
    /// attempt costs `L0/c` of classical heralding travel.
    #[default]
    AttemptSlotted,
    /// Local waits are exponential with the same mean `1/(r p_r)`.
    Continuous,
}

/// Full description of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub params: ProtocolParams,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// When set, a stored link waiting for its partner survives only an
    /// exponentially sampled lifetime with this mean, in seconds; an expired
    /// link forces both sub-links to be rebuilt.
    #[serde(default)]
    pub memory_coherence_time: Option<f64>,
    #[serde(default)]
    pub time_model: TimeModel,
}

impl SimConfig {
    pub fn new(params: ProtocolParams, trials: u64, seed: u64) -> Self {
        Self { params, trials, seed, memory_coherence_time: None, time_model: TimeModel::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(SimError::InvalidConfig("trials must be at least 1".into()));
        }
        if let Some(t) = self.memory_coherence_time {
            if !t.is_finite() || t <= 0.0 {
                return Err(SimError::InvalidConfig(format!(
                    "memory_coherence_time must be positive, got {t}"
                )));
            }
        }
        let probs = success_probs(&self.params)?;
        if probs.p_r <= 0.0 || probs.p_b <= 0.0 {
            return Err(SimError::InvalidConfig(
                "local or link success probability is zero; the protocol never succeeds".into(),
            ));
        }
        if self.params.n >= 1 && probs.p_i <= 0.0 {
            return Err(SimError::InvalidConfig(
                "swap success probability is zero; the protocol never succeeds".into(),
            ));
        }
        Ok(())
    }
}

/// Aggregated Monte Carlo result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub trials: u64,
    /// Sample mean of the per-trial total time, seconds.
    pub mean_total_time: f64,
    /// Standard error of the mean, seconds.
    pub std_error: f64,
    /// Mean attempt count per trial, indexed by nesting level; index 0
    /// counts elementary-link attempts, index `i > 0` swap attempts.
    pub attempts_per_level: Vec<f64>,
    /// Empirical per-attempt success rate at each level (diagnostics; should
    /// track p_b at level 0 and p_i above).
    pub success_rate_conditional: Vec<f64>,
    /// Mean number of coherence-expiry rebuilds per trial; zero unless a
    /// memory coherence time is configured.
    pub mean_decoherence_events: f64,
}
