//! Weighted ensembles of pure states.
//!
//! Every mixture this crate produces (vacuum-contaminated entangled pairs,
//! loss channels, measurement conditioning) is low rank, so an explicit
//! pure-state ensemble stays sparse and exact where a dense density matrix
//! would not.

use crate::error::{FockError, Result};
use crate::state::{FockState, NORM_TOL};

/// Weights below this are numerically dead branches.
const WEIGHT_FLOOR: f64 = 1e-300;

/// Probability-weighted ensemble of normalized pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    branches: Vec<(f64, FockState)>,
}

impl MixedState {
    /// Rank-one mixture holding a single pure state.
    pub fn pure(state: FockState) -> Self {
        Self { branches: vec![(1.0, state)] }
    }

    /// Builds a mixture from `(weight, state)` pairs. Weights must be
    /// non-negative and sum to 1 within tolerance; states must be normalized.
    pub fn from_branches(branches: Vec<(f64, FockState)>) -> Result<Self> {
        let mut total = 0.0;
        for (w, state) in &branches {
            if *w < 0.0 {
                return Err(FockError::OutOfRange {
                    name: "branch weight",
                    value: *w,
                    constraint: ">= 0",
                });
            }
            if !state.is_normalized(NORM_TOL) {
                return Err(FockError::UnnormalizedInput { norm: state.norm_sqr() });
            }
            total += w;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(FockError::OutOfRange {
                name: "total weight",
                value: total,
                constraint: "sums to 1",
            });
        }
        Ok(Self { branches })
    }

    pub(crate) fn from_branches_unchecked(branches: Vec<(f64, FockState)>) -> Self {
        Self { branches }
    }

    pub fn branches(&self) -> &[(f64, FockState)] {
        &self.branches
    }

    pub fn num_branches(&self) -> usize {
        self.branches.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|(w, _)| w).sum()
    }

    /// Applies a pure-state map to every branch.
    pub fn map_states<F>(&self, mut f: F) -> Result<MixedState>
    where
        F: FnMut(&FockState) -> Result<FockState>,
    {
        let branches = self
            .branches
            .iter()
            .map(|(w, s)| Ok((*w, f(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { branches })
    }

    /// Product state of two mixtures over disjoint modes (all pairwise
    /// branch products).
    pub fn tensor(&self, other: &MixedState) -> Result<MixedState> {
        let mut branches = Vec::with_capacity(self.branches.len() * other.branches.len());
        for (wa, sa) in &self.branches {
            for (wb, sb) in &other.branches {
                branches.push((wa * wb, sa.tensor(sb)?));
            }
        }
        Ok(Self { branches })
    }

    /// Traces out one mode: each branch splits into its occupation sectors on
    /// that mode, producing a mixture over the remaining modes. Total
    /// probability is conserved exactly.
    pub fn trace_out(&self, mode: &str) -> Result<MixedState> {
        let mut branches = Vec::new();
        for (w, state) in &self.branches {
            let idx = state.registry().require(mode)?;
            for (_, remainder) in state.split_by_modes(&[idx]) {
                let p = remainder.norm_sqr();
                if p * w < WEIGHT_FLOOR {
                    continue;
                }
                let mut kept = remainder;
                kept.normalize();
                branches.push((w * p, kept));
            }
        }
        Ok(Self { branches })
    }

    /// Drops all-but-vacuum modes from every branch.
    pub fn drop_vacuum_modes(&self) -> MixedState {
        Self {
            branches: self
                .branches
                .iter()
                .map(|(w, s)| (*w, s.drop_vacuum_modes()))
                .collect(),
        }
    }

    /// Fidelity `<target| rho |target>` against a normalized pure state.
    pub fn fidelity_to_pure(&self, target: &FockState) -> Result<f64> {
        let mut acc = 0.0;
        for (w, state) in &self.branches {
            acc += w * target.fidelity(state)?;
        }
        Ok(acc)
    }

    /// If every branch is the same pure state up to global phase, returns a
    /// representative; otherwise `None`.
    pub fn as_pure(&self, tol: f64) -> Option<&FockState> {
        let (_, first) = self.branches.first()?;
        for (_, state) in &self.branches[1..] {
            match first.fidelity(state) {
                Ok(f) if (f - 1.0).abs() <= tol => {}
                _ => return None,
            }
        }
        Some(first)
    }
}

impl From<FockState> for MixedState {
    fn from(state: FockState) -> Self {
        MixedState::pure(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::{ModeId, ModeRegistry, Polarization};
    use num_complex::Complex64 as C64;

    fn one_mode_state(amp0: f64, amp1: f64) -> FockState {
        let reg = ModeRegistry::from_modes([ModeId::photon("m", Polarization::H)]).unwrap();
        let mut st = FockState::zero(reg, 2);
        st.add_term(&[("m", 0)], C64::new(amp0, 0.0)).unwrap();
        st.add_term(&[("m", 1)], C64::new(amp1, 0.0)).unwrap();
        st
    }

    #[test]
    fn weights_must_sum_to_one() {
        let s = one_mode_state(1.0, 0.0);
        assert!(MixedState::from_branches(vec![(0.5, s.clone()), (0.4, s)]).is_err());
    }

    #[test]
    fn negative_weight_rejected() {
        let s = one_mode_state(1.0, 0.0);
        assert!(MixedState::from_branches(vec![(-0.1, s.clone()), (1.1, s)]).is_err());
    }

    #[test]
    fn trace_out_gives_occupation_sectors() {
        let s = one_mode_state(0.6, 0.8);
        let rho = MixedState::pure(s).trace_out("m").unwrap();
        let mut weights: Vec<f64> = rho.branches().iter().map(|(w, _)| *w).collect();
        weights.sort_by(f64::total_cmp);
        assert!((weights[0] - 0.36).abs() < 1e-15);
        assert!((weights[1] - 0.64).abs() < 1e-15);
        assert!((rho.total_weight() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn as_pure_detects_common_state() {
        let s = one_mode_state(0.6, 0.8);
        let mut phased = s.clone();
        phased = phased.apply_phase("m", 0.0).unwrap();
        let rho = MixedState::from_branches(vec![(0.5, s), (0.5, phased)]).unwrap();
        assert!(rho.as_pure(1e-12).is_some());

        let other = one_mode_state(0.8, 0.6);
        let rho2 = MixedState::from_branches(vec![(0.5, one_mode_state(0.6, 0.8)), (0.5, other)])
            .unwrap();
        assert!(rho2.as_pure(1e-12).is_none());
    }
}
