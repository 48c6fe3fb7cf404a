//! One-axis parameter sweeps producing tabular rate records.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AnalyticsError, Result};
use crate::params::ProtocolParams;
use crate::rates::{rate_breakdown, RateBreakdown};

/// A sweepable parameter, named after the corresponding field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    EtaP,
    EtaS,
    EtaE1,
    EtaE2,
    EtaD,
    R,
    LN,
    LAtt,
    N,
    C,
    C0,
    PD,
}

impl Axis {
    pub const ALL: [Axis; 12] = [
        Axis::EtaP,
        Axis::EtaS,
        Axis::EtaE1,
        Axis::EtaE2,
        Axis::EtaD,
        Axis::R,
        Axis::LN,
        Axis::LAtt,
        Axis::N,
        Axis::C,
        Axis::C0,
        Axis::PD,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Axis::EtaP => "eta_p",
            Axis::EtaS => "eta_s",
            Axis::EtaE1 => "eta_e1",
            Axis::EtaE2 => "eta_e2",
            Axis::EtaD => "eta_d",
            Axis::R => "r",
            Axis::LN => "l_n",
            Axis::LAtt => "l_att",
            Axis::N => "n",
            Axis::C => "c",
            Axis::C0 => "c0",
            Axis::PD => "p_d",
        }
    }

    /// Parameter set with this axis set to `value`.
    pub fn apply(&self, params: &ProtocolParams, value: f64) -> Result<ProtocolParams> {
        let mut p = *params;
        match self {
            Axis::EtaP => p.eta_p = value,
            Axis::EtaS => p.eta_s = value,
            Axis::EtaE1 => p.eta_e1 = value,
            Axis::EtaE2 => p.eta_e2 = value,
            Axis::EtaD => p.eta_d = value,
            Axis::R => p.r = value,
            Axis::LN => p.l_n = value,
            Axis::LAtt => p.l_att = value,
            Axis::N => {
                if value < 0.0 || value.fract() != 0.0 || value > u32::MAX as f64 {
                    return Err(AnalyticsError::BadSweepValue {
                        axis: "n",
                        value,
                        reason: "must be a non-negative integer",
                    });
                }
                p.n = value as u32;
            }
            Axis::C => p.c = value,
            Axis::C0 => p.c0 = value,
            Axis::PD => p.p_d = value,
        }
        p.validate()?;
        Ok(p)
    }
}

impl FromStr for Axis {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL
            .iter()
            .find(|a| a.name() == s)
            .copied()
            .ok_or_else(|| AnalyticsError::UnknownAxis(s.to_string()))
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One sweep row: the axis value and the rates at that point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: Axis,
    pub value: f64,
    #[serde(flatten)]
    pub rates: RateBreakdown,
}

/// Evaluates the closed-form rates at each value of one axis, in input
/// order.
pub fn sweep(params: &ProtocolParams, axis: Axis, values: &[f64]) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&value| {
            let p = axis.apply(params, value)?;
            Ok(SweepRow { axis, value, rates: rate_breakdown(&p)? })
        })
        .collect()
}
