//! Threshold single-photon detectors and click-pattern enumeration.

use crate::error::{FockError, Result};
use crate::mixed::MixedState;
use crate::state::FockState;

/// Non-number-resolving detector: it reports click / no-click only.
///
/// On an `n`-photon input the click probability is
/// `1 - (1 - p_d) (1 - eta_d)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    /// Probability that one incident photon registers.
    pub efficiency: f64,
    /// Dark-count probability per detection window.
    pub dark_count_prob: f64,
}

impl DetectorModel {
    pub fn new(efficiency: f64, dark_count_prob: f64) -> Result<Self> {
        for (name, v) in [("eta_d", efficiency), ("p_d", dark_count_prob)] {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(FockError::OutOfRange {
                    name,
                    value: v,
                    constraint: "within [0, 1]",
                });
            }
        }
        Ok(Self { efficiency, dark_count_prob })
    }

    /// Detector with unit efficiency and no dark counts.
    pub fn ideal() -> Self {
        Self { efficiency: 1.0, dark_count_prob: 0.0 }
    }

    /// Lossy detector without dark counts.
    pub fn with_efficiency(efficiency: f64) -> Result<Self> {
        Self::new(efficiency, 0.0)
    }

    /// Threshold detectors cannot distinguish one photon from two.
    pub const fn number_resolving(&self) -> bool {
        false
    }

    /// Click probability on an `n`-photon input:
    /// `1 - (1 - p_d) (1 - eta_d)^n`, evaluated in the algebraically equal
    /// form `(1 - q) + p_d q` with `q = (1 - eta_d)^n` so small dark-count
    /// probabilities survive the subtraction exactly.
    pub fn click_prob(&self, n: u8) -> f64 {
        let q = (1.0 - self.efficiency).powi(n as i32);
        (1.0 - q) + self.dark_count_prob * q
    }

    fn outcome_prob(&self, clicked: bool, n: u8) -> f64 {
        let p = self.click_prob(n);
        if clicked {
            p
        } else {
            1.0 - p
        }
    }
}

/// One click/no-click assignment over an ordered detector list, stored as a
/// bitmask (bit `i` set means detector `i` clicked).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClickPattern(pub u32);

impl ClickPattern {
    pub fn clicked(&self, detector: usize) -> bool {
        self.0 >> detector & 1 == 1
    }

    pub fn num_clicks(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        ClickPattern(indices.iter().fold(0, |acc, i| acc | 1 << i))
    }
}

/// One enumerated measurement outcome.
#[derive(Debug, Clone)]
pub struct ClickOutcome {
    pub pattern: ClickPattern,
    pub probability: f64,
    /// Renormalized conditional state over the unmeasured modes; `None` when
    /// the pattern has zero probability.
    pub post_state: Option<MixedState>,
}

/// Full measurement record: detector names in bit order plus every pattern.
#[derive(Debug, Clone)]
pub struct MeasurementOutcomes {
    pub detectors: Vec<String>,
    pub outcomes: Vec<ClickOutcome>,
}

impl MeasurementOutcomes {
    pub fn probability_of(&self, pattern: ClickPattern) -> f64 {
        self.outcomes
            .iter()
            .find(|o| o.pattern == pattern)
            .map(|o| o.probability)
            .unwrap_or(0.0)
    }

    pub fn outcome(&self, pattern: ClickPattern) -> Option<&ClickOutcome> {
        self.outcomes.iter().find(|o| o.pattern == pattern)
    }

    pub fn detector_index(&self, label: &str) -> Option<usize> {
        self.detectors.iter().position(|d| d == label)
    }

    /// Total probability over all patterns (1 up to rounding).
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

/// Measures the listed modes with threshold detectors, enumerating every
/// click/no-click pattern with its exact probability and conditional state.
/// Measured modes are projected out of the post-states.
pub fn measure_clicks(
    state: &MixedState,
    detectors: &[(&str, DetectorModel)],
) -> Result<MeasurementOutcomes> {
    for (i, (label, _)) in detectors.iter().enumerate() {
        if detectors[..i].iter().any(|(other, _)| other == label) {
            return Err(FockError::DuplicateDetector(label.to_string()));
        }
    }
    let k = detectors.len();
    assert!(k < 32, "detector pattern bitmask limited to 31 detectors");

    let mut probs = vec![0.0f64; 1 << k];
    let mut post: Vec<Vec<(f64, FockState)>> = vec![Vec::new(); 1 << k];

    for (w, pure) in state.branches() {
        let indices = detectors
            .iter()
            .map(|(label, _)| pure.registry().require(label))
            .collect::<Result<Vec<_>>>()?;
        for (measured, remainder) in pure.split_by_modes(&indices) {
            let sector_prob = remainder.norm_sqr();
            if sector_prob == 0.0 {
                continue;
            }
            let mut normalized = remainder;
            normalized.normalize();
            for bits in 0u32..1 << k {
                let pattern = ClickPattern(bits);
                let mut p = w * sector_prob;
                for (i, (_, det)) in detectors.iter().enumerate() {
                    p *= det.outcome_prob(pattern.clicked(i), measured[i]);
                }
                if p == 0.0 {
                    continue;
                }
                probs[bits as usize] += p;
                post[bits as usize].push((p, normalized.clone()));
            }
        }
    }

    let outcomes = probs
        .iter()
        .zip(post)
        .enumerate()
        .map(|(bits, (&probability, branches))| {
            let post_state = if probability > 0.0 {
                let scaled = branches
                    .into_iter()
                    .map(|(p, s)| (p / probability, s))
                    .collect();
                Some(MixedState::from_branches_unchecked(scaled))
            } else {
                None
            };
            ClickOutcome { pattern: ClickPattern(bits as u32), probability, post_state }
        })
        .collect();

    Ok(MeasurementOutcomes {
        detectors: detectors.iter().map(|(l, _)| l.to_string()).collect(),
        outcomes,
    })
}
