//! Labeled bosonic modes and the per-state mode registry.
//!
//! Atomic collective excitations (the storage mode of an ensemble and the
//! retrieval-ready mode it is converted to) and photonic polarization modes
//! are treated uniformly as bosonic modes identified by a string label.

use std::fmt;

use crate::error::{FockError, Result};

/// Linear polarization of a photonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => write!(f, "H"),
            Polarization::V => write!(f, "V"),
        }
    }
}

/// What a mode physically is. Photonic modes always carry a definite
/// polarization; interfering photons are assumed co-polarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    /// Collective storage excitation of an atomic ensemble.
    AtomicT,
    /// Collective retrieval-ready excitation of an atomic ensemble.
    AtomicS,
    /// Optical mode with a definite linear polarization.
    Photonic(Polarization),
}

impl ModeKind {
    pub fn polarization(&self) -> Option<Polarization> {
        match self {
            ModeKind::Photonic(p) => Some(*p),
            _ => None,
        }
    }

    pub fn is_photonic(&self) -> bool {
        matches!(self, ModeKind::Photonic(_))
    }
}

/// A labeled bosonic mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeId {
    label: String,
    kind: ModeKind,
}

impl ModeId {
    pub fn atomic_t(label: impl Into<String>) -> Self {
        Self { label: label.into(), kind: ModeKind::AtomicT }
    }

    pub fn atomic_s(label: impl Into<String>) -> Self {
        Self { label: label.into(), kind: ModeKind::AtomicS }
    }

    pub fn photon(label: impl Into<String>, pol: Polarization) -> Self {
        Self { label: label.into(), kind: ModeKind::Photonic(pol) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> ModeKind {
        self.kind
    }

    pub fn polarization(&self) -> Option<Polarization> {
        self.kind.polarization()
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

/// Ordered set of modes over which a state's occupation vectors are defined.
/// Labels are unique within a registry.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModeRegistry {
    modes: Vec<ModeId>,
}

impl ModeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_modes(modes: impl IntoIterator<Item = ModeId>) -> Result<Self> {
        let mut reg = Self::new();
        for m in modes {
            reg.add(m)?;
        }
        Ok(reg)
    }

    pub fn add(&mut self, mode: ModeId) -> Result<usize> {
        if self.index_of(mode.label()).is_some() {
            return Err(FockError::DuplicateMode(mode.label().to_string()));
        }
        self.modes.push(mode);
        Ok(self.modes.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn get(&self, index: usize) -> Option<&ModeId> {
        self.modes.get(index)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.label() == label)
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| FockError::UnknownMode(label.to_string()))
    }

    /// True when no label appears in both registries.
    pub fn disjoint_from(&self, other: &ModeRegistry) -> bool {
        self.modes
            .iter()
            .all(|m| other.index_of(m.label()).is_none())
    }

    /// Registry with the modes at `keep` (in the given order).
    pub(crate) fn subset(&self, keep: &[usize]) -> ModeRegistry {
        ModeRegistry {
            modes: keep.iter().map(|&i| self.modes[i].clone()).collect(),
        }
    }

    pub(crate) fn push_unchecked(&mut self, mode: ModeId) -> usize {
        self.modes.push(mode);
        self.modes.len() - 1
    }

    pub(crate) fn rename(&mut self, index: usize, label: String) {
        self.modes[index].label = label;
    }
}
