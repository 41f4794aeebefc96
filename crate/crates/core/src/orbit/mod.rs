//! Frames, element sets and the conversions between Cartesian, osculating and
//! mean representations.

mod elements;
mod frames;
mod mean;
mod secular;

pub use elements::{
    cart_to_elements, eccentric_to_true, elements_to_cart, mean_to_true, true_to_mean, ElementFlavor, OrbitalElements,
    RelativeElements,
};
pub use frames::{eci_to_relative, relative_to_eci, rsw_frame, RswFrame};
pub use mean::{mean_to_osc, osc_to_mean, CRITICAL_INCLINATION_MARGIN};
pub use secular::{secular_rates, SecularRates};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vector3;

/// Central-body constants used by every force and rate model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GravityConstants {
    /// Gravitational parameter, km^3/s^2.
    pub mu: f64,
    /// Equatorial radius, km.
    pub re: f64,
    /// Second zonal harmonic (dimensionless).
    pub j2: f64,
}

impl GravityConstants {
    pub const EARTH: GravityConstants = GravityConstants {
        mu: 398_600.441_8,
        re: 6_378.137,
        j2: 1.082_626_68e-3,
    };

    /// Same body with the oblateness switched off.
    pub fn without_j2(self) -> Self {
        GravityConstants { j2: 0.0, ..self }
    }
}

impl Default for GravityConstants {
    fn default() -> Self {
        Self::EARTH
    }
}

/// Inertial state of one spacecraft.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EciState {
    /// Seconds since scenario start.
    pub epoch: f64,
    /// Position, km.
    pub r: Vector3,
    /// Velocity, km/s.
    pub v: Vector3,
    /// Mass, kg.
    pub mass: f64,
}

impl EciState {
    pub fn new(epoch: f64, r: Vector3, v: Vector3, mass: f64) -> Self {
        EciState { epoch, r, v, mass }
    }

    /// Checks the physical invariants: above the surface, moving, positive mass.
    pub fn validate(&self, constants: &GravityConstants) -> Result<()> {
        let rmag = self.r.norm();
        if !(rmag.is_finite() && self.v.norm().is_finite()) {
            return Err(Error::InvalidState("non-finite position or velocity".into()));
        }
        if rmag <= constants.re {
            return Err(Error::Decayed {
                epoch: self.epoch,
                radius_km: rmag,
            });
        }
        if self.v.norm() <= 0.0 {
            return Err(Error::InvalidState("zero velocity".into()));
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidState(format!("mass {} kg", self.mass)));
        }
        Ok(())
    }

    /// Specific orbital energy, km^2/s^2.
    pub fn energy(&self, mu: f64) -> f64 {
        0.5 * self.v.norm_squared() - mu / self.r.norm()
    }

    /// Specific angular momentum vector, km^2/s.
    pub fn angular_momentum(&self) -> Vector3 {
        self.r.cross(&self.v)
    }
}
