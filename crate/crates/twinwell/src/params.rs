//! Physical parameters and unit conventions.
//!
//! The simulation core works in scaled units with c = 1 and (by default)
//! omega0 = 1, so times are in 1/omega0 and lengths in c/omega0. All physics
//! downstream depends only on the dimensionless groups
//!
//! * `beta  = omega0 * b / c` - well separation in reduced wavelengths,
//! * `delta_small = delta_tunnel / omega0` - tunnel splitting vs transition frequency,
//! * `gamma_ratio = gamma_rate / delta_tunnel` - emission rate per tunnel frequency,
//!
//! plus the dipole orientation angle `eta`.

use crate::error::{Error, Result};

/// Largest `delta_small` accepted by [`ModelParams::new`]. Beyond this the
/// counter-rotating terms dropped from the interaction Hamiltonian are no
/// longer negligible.
pub const DELTA_SMALL_LIMIT: f64 = 0.2;

/// `beta` above this value sits at the border of validity of the two-level
/// external approximation; inputs are accepted but flagged.
pub const BETA_TWO_LEVEL_BORDER: f64 = 3.0;

/// Largest accepted `beta`.
pub const BETA_LIMIT: f64 = 4.0;

/// Dimensionless physics inputs plus dimensional anchors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Atomic transition angular frequency (scaled units, default 1).
    pub omega0: f64,
    /// Tunnel splitting of the external doublet, same units as `omega0`.
    pub delta_tunnel: f64,
    /// Spontaneous emission rate, same units as `omega0`.
    pub gamma_rate: f64,
    /// Well-to-well separation, units of c/omega0 (c = 1).
    pub b: f64,
    /// Dipole orientation angle in the x-z plane, radians.
    pub eta: f64,
    /// omega0 * b / c.
    pub beta: f64,
    /// delta_tunnel / omega0.
    pub delta_small: f64,
    /// gamma_rate / delta_tunnel.
    pub gamma_ratio: f64,
}

impl ModelParams {
    /// Build a fully derived parameter set from anchors.
    ///
    /// Rejects non-finite inputs, non-positive rates, `omega0 <= delta_tunnel`,
    /// `delta_small >= 0.2` and `beta` outside [0, 4].
    pub fn new(
        omega0: f64,
        delta_tunnel: f64,
        gamma_rate: f64,
        beta: f64,
        eta: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("omega0", omega0),
            ("delta_tunnel", delta_tunnel),
            ("gamma_rate", gamma_rate),
            ("beta", beta),
            ("eta", eta),
        ] {
            if !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite, got {v}")));
            }
        }
        if omega0 <= 0.0 || delta_tunnel <= 0.0 || gamma_rate <= 0.0 {
            return Err(Error::domain(
                "omega0, delta_tunnel and gamma_rate must be positive",
            ));
        }
        if omega0 <= delta_tunnel {
            return Err(Error::domain(format!(
                "omega0 = {omega0} must exceed delta_tunnel = {delta_tunnel}"
            )));
        }
        let delta_small = delta_tunnel / omega0;
        if delta_small >= DELTA_SMALL_LIMIT {
            return Err(Error::domain(format!(
                "delta_small = {delta_small} out of regime (must be < {DELTA_SMALL_LIMIT})"
            )));
        }
        if !(0.0..=BETA_LIMIT).contains(&beta) {
            return Err(Error::domain(format!(
                "beta = {beta} outside accepted range [0, {BETA_LIMIT}]"
            )));
        }
        if beta > BETA_TWO_LEVEL_BORDER {
            log::warn!(
                "beta = {beta} exceeds {BETA_TWO_LEVEL_BORDER}; two-level external \
                 approximation is at its border of validity"
            );
        }
        Ok(ModelParams {
            omega0,
            delta_tunnel,
            gamma_rate,
            b: beta / omega0,
            eta,
            beta,
            delta_small,
            gamma_ratio: gamma_rate / delta_tunnel,
        })
    }

    /// Rebuild from the dimensionless groups and the anchors (omega0, eta).
    pub fn from_dimensionless(
        omega0: f64,
        beta: f64,
        delta_small: f64,
        gamma_ratio: f64,
        eta: f64,
    ) -> Result<Self> {
        let delta_tunnel = delta_small * omega0;
        let gamma_rate = gamma_ratio * delta_tunnel;
        Self::new(omega0, delta_tunnel, gamma_rate, beta, eta)
    }

    /// True when `beta` sits beyond the two-level validity border.
    pub fn beta_exceeds_two_level_border(&self) -> bool {
        self.beta > BETA_TWO_LEVEL_BORDER
    }
}

/// Real amplitudes of the initial external state (internally excited,
/// no photon): c_plus on |+>, c_minus on |->.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialExternalState {
    pub c_plus: f64,
    pub c_minus: f64,
}

impl InitialExternalState {
    /// Arbitrary real normalized superposition of the external doublet.
    pub fn new(c_plus: f64, c_minus: f64) -> Result<Self> {
        let norm = c_plus * c_plus + c_minus * c_minus;
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "initial amplitudes must be normalized: c+^2 + c-^2 = {norm}"
            )));
        }
        Ok(Self { c_plus, c_minus })
    }

    /// Atom prepared in the right well, |R> = (|+> + |->)/sqrt(2).
    pub fn right_well() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { c_plus: s, c_minus: s }
    }

    /// Atom prepared in the left well, |L> = (|+> - |->)/sqrt(2).
    pub fn left_well() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { c_plus: s, c_minus: -s }
    }

    /// Delocalized energy eigenstate |+>.
    pub fn plus() -> Self {
        Self { c_plus: 1.0, c_minus: 0.0 }
    }

    /// Delocalized energy eigenstate |->.
    pub fn minus() -> Self {
        Self { c_plus: 0.0, c_minus: 1.0 }
    }

    /// Product c_plus * c_minus controlling the tunneling amplitude.
    pub fn product(&self) -> f64 {
        self.c_plus * self.c_minus
    }
}
