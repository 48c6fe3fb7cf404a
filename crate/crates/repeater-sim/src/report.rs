//! Level-by-level comparison of Monte Carlo means against the closed-form
//! total-time formula.

use serde::{Deserialize, Serialize};

use repeater_analytics::total_time;

use crate::config::{Result, SimConfig};
use crate::engine::simulate;

/// Documented agreement band for the MC/analytic ratio. The formula charges
/// the local wait once instead of as the larger of two independent waits and
/// folds all retry correlations into a per-level 3/2, so level means drift
/// from it by tens of percent, not orders of magnitude.
pub const CONVERGENCE_BAND: (f64, f64) = (0.75, 1.35);

/// One nesting level of the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub level: u32,
    pub trials: u64,
    pub mc_mean: f64,
    pub std_error: f64,
    pub analytic: f64,
    pub ratio: f64,
    /// Ratio at three standard errors below / above the MC mean.
    pub ratio_ci_low: f64,
    pub ratio_ci_high: f64,
    pub within_band: bool,
    /// Mean top-level attempt count per trial in this level's run.
    pub attempts_mean: f64,
    /// Empirical per-attempt success rate at the top level of this run.
    pub success_rate: f64,
}

/// Comparison across levels `0..=n` of the config, each level keeping the
/// elementary link length of the full configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub band_low: f64,
    pub band_high: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn all_within_band(&self) -> bool {
        self.rows.iter().all(|r| r.within_band)
    }
}

/// Runs the simulation at every nesting level up to the configured one and
/// compares each mean against the closed-form value for that level.
pub fn convergence_report(cfg: &SimConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.params.n as usize + 1);
    for level in 0..=cfg.params.n {
        let mut level_cfg = cfg.clone();
        level_cfg.params = cfg.params.level_slice(level);
        let outcome = simulate(&level_cfg)?;
        let analytic = total_time(&level_cfg.params)?;
        let ratio = outcome.mean_total_time / analytic;
        let three_sigma = 3.0 * outcome.std_error;
        let top = level as usize;
        rows.push(ConvergenceRow {
            level,
            trials: outcome.trials,
            mc_mean: outcome.mean_total_time,
            std_error: outcome.std_error,
            analytic,
            ratio,
            ratio_ci_low: (outcome.mean_total_time - three_sigma) / analytic,
            ratio_ci_high: (outcome.mean_total_time + three_sigma) / analytic,
            within_band: (CONVERGENCE_BAND.0..=CONVERGENCE_BAND.1).contains(&ratio),
            attempts_mean: outcome.attempts_per_level[top],
            success_rate: outcome.success_rate_conditional[top],
        });
    }
    Ok(ConvergenceReport {
        band_low: CONVERGENCE_BAND.0,
        band_high: CONVERGENCE_BAND.1,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use repeater_analytics::ProtocolParams;

    fn moderate_params(n: u32) -> ProtocolParams {
        let mut p = ProtocolParams::benchmark();
        p.eta_e1 = 0.1;
        p.l_n = 44.0 * (1u64 << n) as f64;
        p.n = n;
        p
    }

    #[test]
    fn level_zero_ratio_is_the_known_offset() {
        // at level 0 the only model/formula gap is max-of-two vs single
        // local wait, so the ratio is fully predictable
        let cfg = SimConfig::new(moderate_params(0), 20_000, 3);
        let report = convergence_report(&cfg).unwrap();
        assert_eq!(report.rows.len(), 1);
        let row = &report.rows[0];
        let exact = crate::engine::closed_form_basic_link_mean(&cfg).unwrap();
        let predicted = exact / row.analytic;
        assert!(
            (row.ratio - predicted).abs() < (row.ratio_ci_high - row.ratio_ci_low) / 2.0,
            "ratio {} vs predicted {predicted}",
            row.ratio
        );
        assert!(row.within_band);
    }

    #[test]
    fn low_levels_stay_within_band() {
        let cfg = SimConfig::new(moderate_params(2), 10_000, 4);
        let report = convergence_report(&cfg).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.all_within_band(), "{:?}", report.rows);
    }

    #[test]
    fn standard_error_shrinks_with_trials() {
        let few = SimConfig::new(moderate_params(0), 100, 8);
        let many = SimConfig::new(moderate_params(0), 10_000, 8);
        let few_out = simulate(&few).unwrap();
        let many_out = simulate(&many).unwrap();
        // 100x the trials should shrink the standard error by about 10x
        let shrink = few_out.std_error / many_out.std_error;
        assert!(
            (6.0..16.0).contains(&shrink),
            "std error shrink factor {shrink} far from sqrt(100)"
        );
    }
}
