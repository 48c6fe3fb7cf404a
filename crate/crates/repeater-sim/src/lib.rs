//! Seeded Monte Carlo of the nested repeater protocol: geometric retries
//! for local generation, pairwise-max waiting for simultaneous sub-links,
//! and full rebuilds after failed swaps. Validates the closed-form total
//! time and quantifies its approximation error level by level.
//!
//! Stage success probabilities come from `repeater-analytics`; this crate
//! never re-derives optics. Classical heralding time `L0/c` is charged per
//! link or swap attempt (charging it only on success would shrink every
//! level mean by `(1/p - 1) * L0/c`, about 30% at the benchmark link
//! rate, which is well inside the formula's own approximation band).

pub mod config;
pub mod engine;
pub mod report;

pub use config::{Result, SimConfig, SimError, SimOutcome, TimeModel};
pub use engine::{
    closed_form_basic_link_mean, expected_max_geometric, simulate, simulate_basic_link,
    simulate_nested, simulate_with_probs, StageProbs,
};
pub use report::{convergence_report, ConvergenceReport, ConvergenceRow, CONVERGENCE_BAND};
