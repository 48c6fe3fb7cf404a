//! Scaling estimate of the cavity-enhanced signal-to-noise ratio for the
//! storage-to-retrieval conversion.

use serde::{Deserialize, Serialize};

use crate::error::{AnalyticsError, Result};

/// Vacuum light speed, m/s.
const C_VAC: f64 = 2.99792458e8;

/// Cavity and ensemble parameters. SI units: densities in 1/m^3, lengths
/// and wavelengths in m, rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityParams {
    /// Atomic number density.
    pub rho_n: f64,
    /// Length of the pencil-shaped ensemble.
    pub l_a: f64,
    /// Cavity-mode wavelength.
    pub lambda_s: f64,
    /// Cavity quality factor.
    pub q: f64,
    /// Single-atom coupling rate, informational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_c: Option<f64>,
    /// Atomic decay rate, informational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_s: Option<f64>,
    /// Atom number, informational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_a: Option<f64>,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("rho_n", self.rho_n),
            ("l_a", self.l_a),
            ("lambda_s", self.lambda_s),
            ("q", self.q),
        ];
        for (field, value) in positives {
            if !value.is_finite() || value <= 0.0 {
                return Err(AnalyticsError::OutOfRange {
                    field,
                    value,
                    constraint: "strictly positive",
                });
            }
        }
        Ok(())
    }

    /// Ensemble parameters chosen so the free-space factor comes out at
    /// `factor`, with a given quality factor. Handy for benchmarks.
    pub fn from_free_space_factor(factor: f64, q: f64) -> Self {
        let lambda_s: f64 = 1.5e-6;
        let l_a: f64 = 3.0e-3;
        let rho_n = factor * 4.0 * std::f64::consts::PI.powi(2) / (3.0 * l_a * lambda_s.powi(2));
        Self { rho_n, l_a, lambda_s, q, g_c: None, gamma_s: None, n_a: None }
    }

    /// Free-space signal-to-noise factor `3 rho_n L_a lambda_s^2 / (4 pi^2)`,
    /// which also estimates the on-resonance optical depth.
    pub fn free_space_factor(&self) -> f64 {
        3.0 * self.rho_n * self.l_a * self.lambda_s.powi(2)
            / (4.0 * std::f64::consts::PI.powi(2))
    }

    /// Cavity decay rate `kappa = omega_s / Q`, rad/s.
    pub fn kappa(&self) -> f64 {
        let omega_s = 2.0 * std::f64::consts::PI * C_VAC / self.lambda_s;
        omega_s / self.q
    }
}

/// Signal-to-noise estimate: free-space value and the cavity-enhanced value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrEstimate {
    /// Free-space estimate (quality factor 1).
    pub free_space: f64,
    /// Cavity-enhanced estimate: free-space factor times `Q`.
    pub r_sn: f64,
}

/// Ratio of coherent interaction rate to decay rate; the cavity multiplies
/// the free-space factor by its quality factor.
pub fn cavity_snr(cav: &CavityParams) -> Result<SnrEstimate> {
    cav.validate()?;
    let free_space = cav.free_space_factor();
    Ok(SnrEstimate { free_space, r_sn: free_space * cav.q })
}
