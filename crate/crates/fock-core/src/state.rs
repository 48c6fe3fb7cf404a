//! Sparse pure states over labeled bosonic modes with per-mode truncation.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{FockError, Result};
use crate::mode::{ModeId, ModeRegistry};

/// Norm / probability tolerance used by `normalize` checks.
pub const NORM_TOL: f64 = 1e-12;

/// Default per-mode truncation. No protocol stage here ever puts more than
/// two excitations into one spatial mode.
pub const DEFAULT_N_MAX: u8 = 2;

/// Amplitudes below this magnitude are numerically dead and get pruned.
const AMP_FLOOR: f64 = 1e-30;

const FACTORIALS: [f64; 17] = {
    let mut f = [1.0f64; 17];
    let mut i = 1;
    while i < 17 {
        f[i] = f[i - 1] * i as f64;
        i += 1;
    }
    f
};

fn binomial(n: u8, k: u8) -> f64 {
    FACTORIALS[n as usize] / (FACTORIALS[k as usize] * FACTORIALS[(n - k) as usize])
}

/// Pure state: sparse map from occupation vectors to complex amplitudes.
///
/// Occupation vectors have one entry per registered mode, each capped at
/// `n_max`. Zero amplitudes are pruned so the representation is canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    registry: ModeRegistry,
    n_max: u8,
    amps: BTreeMap<Vec<u8>, C64>,
}

impl FockState {
    /// Vacuum over the given modes.
    pub fn vacuum(registry: ModeRegistry, n_max: u8) -> Self {
        let occ = vec![0u8; registry.len()];
        let mut amps = BTreeMap::new();
        amps.insert(occ, C64::new(1.0, 0.0));
        Self { registry, n_max, amps }
    }

    /// Empty (zero) state; useful as an accumulator.
    pub fn zero(registry: ModeRegistry, n_max: u8) -> Self {
        Self { registry, n_max, amps: BTreeMap::new() }
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn n_max(&self) -> u8 {
        self.n_max
    }

    pub fn num_terms(&self) -> usize {
        self.amps.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], C64)> {
        self.amps.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// Occupation vector for a sparse `(label, occupation)` spec; unlisted
    /// modes are vacuum.
    pub fn basis_occ(&self, pairs: &[(&str, u8)]) -> Result<Vec<u8>> {
        let mut occ = vec![0u8; self.registry.len()];
        for (label, n) in pairs {
            let idx = self.registry.require(label)?;
            if *n > self.n_max {
                return Err(FockError::TruncationOverflow {
                    mode: label.to_string(),
                    occupation: *n as u32,
                    n_max: self.n_max,
                });
            }
            occ[idx] = *n;
        }
        Ok(occ)
    }

    /// Adds `amp` to the coefficient of the basis vector described by `pairs`.
    pub fn add_term(&mut self, pairs: &[(&str, u8)], amp: C64) -> Result<()> {
        let occ = self.basis_occ(pairs)?;
        let entry = self.amps.entry(occ).or_insert(C64::new(0.0, 0.0));
        *entry += amp;
        if entry.norm_sqr() < AMP_FLOOR * AMP_FLOOR {
            let occ = self.basis_occ(pairs)?;
            self.amps.remove(&occ);
        }
        Ok(())
    }

    /// Amplitude of the basis vector described by `pairs` (zero if absent).
    pub fn amplitude(&self, pairs: &[(&str, u8)]) -> Result<C64> {
        let occ = self.basis_occ(pairs)?;
        Ok(self.amps.get(&occ).copied().unwrap_or(C64::new(0.0, 0.0)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Rescales to unit norm. No-op on the zero state.
    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return;
        }
        for amp in self.amps.values_mut() {
            *amp /= n;
        }
    }

    pub(crate) fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm_sqr() >= AMP_FLOOR * AMP_FLOOR);
    }

    /// Adds `amp` at a raw occupation vector. Callers are responsible for
    /// bounds; used by internal mode maps that have already validated.
    pub(crate) fn add_term_raw(&mut self, occ: Vec<u8>, amp: C64) {
        let entry = self.amps.entry(occ).or_insert(C64::new(0.0, 0.0));
        *entry += amp;
    }

    /// Appends a fresh vacuum mode and returns its index.
    pub fn add_mode(&mut self, mode: ModeId) -> Result<usize> {
        if self.registry.index_of(mode.label()).is_some() {
            return Err(FockError::DuplicateMode(mode.label().to_string()));
        }
        let idx = self.registry.push_unchecked(mode);
        let old = std::mem::take(&mut self.amps);
        for (mut occ, amp) in old {
            occ.push(0);
            self.amps.insert(occ, amp);
        }
        Ok(idx)
    }

    /// Renames a mode in place.
    pub fn rename_mode(&mut self, old: &str, new: &str) -> Result<()> {
        let idx = self.registry.require(old)?;
        if old != new && self.registry.index_of(new).is_some() {
            return Err(FockError::DuplicateMode(new.to_string()));
        }
        self.registry.rename(idx, new.to_string());
        Ok(())
    }

    /// Exchanges the labels of two same-kind modes, leaving occupations with
    /// their physical columns.
    pub fn swap_mode_labels(&mut self, a: &str, b: &str) -> Result<()> {
        let ia = self.registry.require(a)?;
        let ib = self.registry.require(b)?;
        if self.registry.get(ia).unwrap().kind() != self.registry.get(ib).unwrap().kind() {
            return Err(FockError::InvalidModeKind {
                mode: b.to_string(),
                expected: "same kind as the partner label",
            });
        }
        let la = self.registry.get(ia).unwrap().label().to_string();
        let lb = self.registry.get(ib).unwrap().label().to_string();
        self.registry.rename(ia, String::new());
        self.registry.rename(ib, la);
        self.registry.rename(ia, lb);
        Ok(())
    }

    /// Tensor product of two states over disjoint mode sets.
    pub fn tensor(&self, other: &FockState) -> Result<FockState> {
        if self.n_max != other.n_max {
            return Err(FockError::MismatchedRegistries(
                "tensor factors have different truncation caps".into(),
            ));
        }
        if !self.registry.disjoint_from(&other.registry) {
            return Err(FockError::MismatchedRegistries(
                "tensor factors share mode labels".into(),
            ));
        }
        let mut registry = self.registry.clone();
        for m in other.registry.modes() {
            registry.push_unchecked(m.clone());
        }
        let mut amps = BTreeMap::new();
        for (ka, va) in &self.amps {
            for (kb, vb) in &other.amps {
                let mut occ = ka.clone();
                occ.extend_from_slice(kb);
                amps.insert(occ, va * vb);
            }
        }
        Ok(FockState { registry, n_max: self.n_max, amps })
    }

    /// Applies a 2x2 unitary `m` to the creation operators of modes `a`, `b`:
    ///
    /// ```text
    /// a' = m[0][0] a + m[1][0] b
    /// b' = m[0][1] a + m[1][1] b
    /// ```
    ///
    /// Exact for any occupations; errors if an output occupation would exceed
    /// the truncation cap.
    pub fn apply_two_mode(&self, a: &str, b: &str, m: [[C64; 2]; 2]) -> Result<FockState> {
        let ia = self.registry.require(a)?;
        let ib = self.registry.require(b)?;
        if ia == ib {
            return Err(FockError::DuplicateMode(a.to_string()));
        }
        let mut out = FockState::zero(self.registry.clone(), self.n_max);
        for (occ, amp) in &self.amps {
            let na = occ[ia];
            let nb = occ[ib];
            let base_norm = (FACTORIALS[na as usize] * FACTORIALS[nb as usize]).sqrt();
            for k in 0..=na {
                for l in 0..=nb {
                    let p = k + l;
                    let q = na + nb - p;
                    if p > self.n_max {
                        return Err(FockError::TruncationOverflow {
                            mode: a.to_string(),
                            occupation: p as u32,
                            n_max: self.n_max,
                        });
                    }
                    if q > self.n_max {
                        return Err(FockError::TruncationOverflow {
                            mode: b.to_string(),
                            occupation: q as u32,
                            n_max: self.n_max,
                        });
                    }
                    let coeff = binomial(na, k)
                        * binomial(nb, l)
                        * (FACTORIALS[p as usize] * FACTORIALS[q as usize]).sqrt()
                        / base_norm;
                    let weight = m[0][0].powu(k as u32)
                        * m[1][0].powu((na - k) as u32)
                        * m[0][1].powu(l as u32)
                        * m[1][1].powu((nb - l) as u32);
                    let mut new_occ = occ.clone();
                    new_occ[ia] = p;
                    new_occ[ib] = q;
                    let entry = out.amps.entry(new_occ).or_insert(C64::new(0.0, 0.0));
                    *entry += amp * weight * coeff;
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Phase shift `exp(i theta n)` on one mode.
    pub fn apply_phase(&self, mode: &str, theta: f64) -> Result<FockState> {
        let idx = self.registry.require(mode)?;
        let mut out = self.clone();
        for (occ, amp) in out.amps.iter_mut() {
            *amp *= C64::from_polar(1.0, theta * occ[idx] as f64);
        }
        Ok(out)
    }

    /// Splits the state by the joint occupation of `indices`: for each
    /// distinct occupation pattern, the (unnormalized) remainder state over
    /// the other modes. Coherence between different patterns is dropped,
    /// which is exactly what happens under occupation-diagonal measurements
    /// and partial traces.
    pub(crate) fn split_by_modes(&self, indices: &[usize]) -> Vec<(Vec<u8>, FockState)> {
        let keep: Vec<usize> =
            (0..self.registry.len()).filter(|i| !indices.contains(i)).collect();
        let remainder_registry = self.registry.subset(&keep);
        let mut groups: BTreeMap<Vec<u8>, BTreeMap<Vec<u8>, C64>> = BTreeMap::new();
        for (occ, amp) in &self.amps {
            let measured: Vec<u8> = indices.iter().map(|&i| occ[i]).collect();
            let rest: Vec<u8> = keep.iter().map(|&i| occ[i]).collect();
            *groups
                .entry(measured)
                .or_default()
                .entry(rest)
                .or_insert(C64::new(0.0, 0.0)) += amp;
        }
        groups
            .into_iter()
            .map(|(measured, amps)| {
                (
                    measured,
                    FockState {
                        registry: remainder_registry.clone(),
                        n_max: self.n_max,
                        amps,
                    },
                )
            })
            .collect()
    }

    /// Keeps only the listed modes, in the given order. Every other mode
    /// must be exactly vacuum in every term.
    pub fn restricted_to(&self, labels: &[&str]) -> Result<FockState> {
        let keep: Vec<usize> = labels
            .iter()
            .map(|l| self.registry.require(l))
            .collect::<Result<_>>()?;
        for occ in self.amps.keys() {
            for (i, &n) in occ.iter().enumerate() {
                if n != 0 && !keep.contains(&i) {
                    return Err(FockError::MismatchedRegistries(format!(
                        "mode `{}` is still occupied",
                        self.registry.get(i).unwrap().label()
                    )));
                }
            }
        }
        let registry = self.registry.subset(&keep);
        let mut amps = BTreeMap::new();
        for (occ, amp) in &self.amps {
            let new_occ: Vec<u8> = keep.iter().map(|&i| occ[i]).collect();
            amps.insert(new_occ, *amp);
        }
        Ok(FockState { registry, n_max: self.n_max, amps })
    }

    /// Drops modes that are vacuum in every basis term.
    pub fn drop_vacuum_modes(&self) -> FockState {
        let occupied: Vec<usize> = (0..self.registry.len())
            .filter(|&i| self.amps.keys().any(|occ| occ[i] != 0))
            .collect();
        let registry = self.registry.subset(&occupied);
        let mut amps = BTreeMap::new();
        for (occ, amp) in &self.amps {
            let new_occ: Vec<u8> = occupied.iter().map(|&i| occ[i]).collect();
            *amps.entry(new_occ).or_insert(C64::new(0.0, 0.0)) += amp;
        }
        FockState { registry, n_max: self.n_max, amps }
    }

    /// Reorders modes to match `target`'s label order. Labels and kinds must
    /// agree as sets.
    pub fn aligned_to(&self, target: &ModeRegistry) -> Result<FockState> {
        if target.len() != self.registry.len() {
            return Err(FockError::MismatchedRegistries(format!(
                "mode counts differ ({} vs {})",
                self.registry.len(),
                target.len()
            )));
        }
        let mut perm = Vec::with_capacity(target.len());
        for mode in target.modes() {
            let idx = self.registry.index_of(mode.label()).ok_or_else(|| {
                FockError::MismatchedRegistries(format!("mode `{}` missing", mode.label()))
            })?;
            if self.registry.get(idx).unwrap().kind() != mode.kind() {
                return Err(FockError::MismatchedRegistries(format!(
                    "mode `{}` has a different kind",
                    mode.label()
                )));
            }
            perm.push(idx);
        }
        let mut amps = BTreeMap::new();
        for (occ, amp) in &self.amps {
            let new_occ: Vec<u8> = perm.iter().map(|&i| occ[i]).collect();
            amps.insert(new_occ, *amp);
        }
        Ok(FockState { registry: target.clone(), n_max: self.n_max, amps })
    }

    /// Inner product `<self|other>`, aligning mode order by label.
    pub fn overlap(&self, other: &FockState) -> Result<C64> {
        let other = if other.registry == self.registry {
            other.clone()
        } else {
            other.aligned_to(&self.registry)?
        };
        let mut acc = C64::new(0.0, 0.0);
        for (occ, amp) in &self.amps {
            if let Some(b) = other.amps.get(occ) {
                acc += amp.conj() * b;
            }
        }
        Ok(acc)
    }

    /// `|<self|other>|^2`; equals 1 iff the states match up to global phase.
    pub fn fidelity(&self, other: &FockState) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.registry.modes().iter().map(|m| m.label()).collect();
        writeln!(f, "modes: [{}]", labels.join(", "))?;
        for (occ, amp) in &self.amps {
            let digits: Vec<String> = occ.iter().map(|n| n.to_string()).collect();
            writeln!(f, "  ({:+.6}{:+.6}i) |{}>", amp.re, amp.im, digits.join(","))?;
        }
        Ok(())
    }
}
