//! Run configuration: JSON file with flat sections for the protocol
//! parameters, cavity parameters, and simulation settings. Unknown keys are
//! rejected with location info.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use repeater_analytics::{CavityParams, ProtocolParams};
use repeater_sim::{SimConfig, TimeModel};

/// Environment variable consulted for a default config path when `--config`
/// is not given.
pub const CONFIG_ENV_VAR: &str = "PME_REPEATER_CONFIG";

/// Bundled benchmark preset (also shipped at `presets/paper.json`).
pub const BENCHMARK_PRESET: &str = include_str!("../presets/paper.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Pretty,
}

/// Simulation section of the config file; the protocol parameters come from
/// the `protocol` section rather than being repeated here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_coherence_time: Option<f64>,
    #[serde(default)]
    pub time_model: TimeModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: ProtocolParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity: Option<CavityParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
    #[serde(default)]
    pub output: OutputFormat,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let config: RunConfig =
            serde_json::from_str(text).context("failed to parse config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        RunConfig::parse(&text)
            .with_context(|| format!("in config file {}", path.display()))
    }

    /// Builtin benchmark preset.
    pub fn benchmark() -> RunConfig {
        RunConfig::parse(BENCHMARK_PRESET).expect("bundled preset parses")
    }

    /// Resolution order: explicit path, then `PME_REPEATER_CONFIG`, then the
    /// bundled preset.
    pub fn resolve(explicit: Option<&Path>) -> Result<RunConfig> {
        if let Some(path) = explicit {
            return RunConfig::load(path);
        }
        if let Ok(env_path) = std::env::var(CONFIG_ENV_VAR) {
            if !env_path.is_empty() {
                return RunConfig::load(Path::new(&env_path));
            }
        }
        Ok(RunConfig::benchmark())
    }

    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        if let Some(cavity) = &self.cavity {
            cavity.validate()?;
        }
        if let Some(sim) = &self.sim {
            if sim.trials == 0 {
                bail!("sim.trials must be at least 1");
            }
            if let Some(t) = sim.memory_coherence_time {
                if !t.is_finite() || t <= 0.0 {
                    bail!("sim.memory_coherence_time must be positive, got {t}");
                }
            }
        }
        Ok(())
    }

    /// Simulation config assembled from the `protocol` and `sim` sections.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let sim = self
            .sim
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("config has no `sim` section"))?;
        Ok(SimConfig {
            params: self.protocol,
            trials: sim.trials,
            seed: sim.seed,
            memory_coherence_time: sim.memory_coherence_time,
            time_model: sim.time_model,
        })
    }

    /// Canonical serialized form: stable field order, two-space indent.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn canonical_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("config serializes");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_preset_parses_and_validates() {
        let cfg = RunConfig::benchmark();
        assert_eq!(cfg.protocol.n, 4);
        assert_eq!(cfg.protocol.l_n, 2500.0);
        assert!(cfg.cavity.is_some());
        assert_eq!(cfg.sim.as_ref().unwrap().seed, 42);
    }

    #[test]
    fn unknown_keys_rejected_with_location() {
        let text = r#"{"protocol": {"eta_p": 1.0}, "mystery": 3}"#;
        let err = RunConfig::parse(text).unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("mystery") || msg.contains("eta_s"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn missing_required_field_names_it() {
        let text = r#"{"protocol": {"eta_p": 1.0}}"#;
        let err = RunConfig::parse(text).unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("eta_s"), "{msg}");
    }

    #[test]
    fn canonical_round_trip_is_stable() {
        let cfg = RunConfig::benchmark();
        let canonical = cfg.canonical_json();
        let reparsed = RunConfig::parse(&canonical).unwrap();
        assert_eq!(reparsed, cfg);
        assert_eq!(reparsed.canonical_json(), canonical);
    }

    #[test]
    fn zero_trials_rejected() {
        let mut cfg = RunConfig::benchmark();
        cfg.sim.as_mut().unwrap().trials = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sim_config_requires_section() {
        let mut cfg = RunConfig::benchmark();
        cfg.sim = None;
        assert!(cfg.sim_config().is_err());
    }
}
