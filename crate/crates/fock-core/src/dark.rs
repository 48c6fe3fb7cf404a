//! Static check of the dark state used for storage-to-retrieval conversion.
//!
//! The conversion couples three collective configurations of an ensemble
//! holding one excitation: retrieval-ready excitation plus one cavity photon,
//! the shared excited configuration, and the storage excitation. The
//! superposition `cos(theta) |S,1> - sin(theta) |T,0>` with
//! `tan(theta) = g / omega_c2` decouples from the excited configuration, so
//! ramping the mixing angle converts `T` into `S` while a photon leaves.

use crate::error::{FockError, Result};

/// Couplings of the conversion system: cavity coupling `g` and control-field
/// Rabi frequency `omega_c2`, both in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkStateSystem {
    pub g: f64,
    pub omega_c2: f64,
}

impl DarkStateSystem {
    pub fn new(g: f64, omega_c2: f64) -> Result<Self> {
        for (name, v) in [("g", g), ("omega_c2", omega_c2)] {
            if v < 0.0 || v.is_nan() {
                return Err(FockError::OutOfRange {
                    name,
                    value: v,
                    constraint: ">= 0",
                });
            }
        }
        Ok(Self { g, omega_c2 })
    }

    /// Mixing angle `theta = atan2(g, omega_c2)`, in `[0, pi/2]`.
    pub fn theta(&self) -> f64 {
        self.g.atan2(self.omega_c2)
    }

    /// Coupling matrix in the basis `{|S,1>, |E,0>, |T,0>}` (units of rad/s).
    pub fn hamiltonian(&self) -> [[f64; 3]; 3] {
        [
            [0.0, self.g, 0.0],
            [self.g, 0.0, self.omega_c2],
            [0.0, self.omega_c2, 0.0],
        ]
    }

    /// Dark-state coefficients `(cos theta, 0, -sin theta)`.
    pub fn dark_state(&self) -> [f64; 3] {
        let theta = self.theta();
        [theta.cos(), 0.0, -theta.sin()]
    }
}

/// Result of [`dark_state_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkStateCheck {
    /// `||H |D>||` relative to the coupling scale `hypot(g, omega_c2)`, so
    /// the residual is meaningful at any field magnitude.
    pub residual_norm: f64,
    /// Mixing angle used to build the dark state.
    pub theta: f64,
}

/// Builds the dark state, applies the coupling matrix to it, and reports the
/// residual norm. A residual at rounding level confirms the state has zero
/// adiabatic eigenvalue.
pub fn dark_state_check(sys: &DarkStateSystem) -> Result<DarkStateCheck> {
    if sys.g == 0.0 && sys.omega_c2 == 0.0 {
        return Err(FockError::ZeroField);
    }
    let h = sys.hamiltonian();
    let d = sys.dark_state();
    let mut hd = [0.0f64; 3];
    for (i, row) in h.iter().enumerate() {
        hd[i] = row.iter().zip(d.iter()).map(|(a, b)| a * b).sum();
    }
    let scale = sys.g.hypot(sys.omega_c2);
    let residual = hd.iter().map(|x| x * x).sum::<f64>().sqrt() / scale;
    Ok(DarkStateCheck { residual_norm: residual, theta: sys.theta() })
}
