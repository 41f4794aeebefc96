use serde::{Deserialize, Serialize};

use super::{GravityConstants, OrbitalElements};

/// First-order J2 secular drift rates of the mean elements, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularRates {
    pub raan_dot: f64,
    pub argp_dot: f64,
    /// Total mean-anomaly rate, Keplerian mean motion included.
    pub mean_anomaly_dot: f64,
}

impl SecularRates {
    /// Rate of the mean argument of latitude `ω + M`.
    pub fn arg_latitude_dot(&self) -> f64 {
        self.argp_dot + self.mean_anomaly_dot
    }
}

pub fn secular_rates(oe: &OrbitalElements, constants: &GravityConstants) -> SecularRates {
    let n = (constants.mu / oe.a.powi(3)).sqrt();
    let eta2 = 1.0 - oe.e * oe.e;
    let p = oe.a * eta2;
    let k = constants.j2 * (constants.re / p).powi(2) * n;
    let c = oe.i.cos();
    let c2 = c * c;
    SecularRates {
        raan_dot: -1.5 * k * c,
        argp_dot: 0.75 * k * (5.0 * c2 - 1.0),
        mean_anomaly_dot: n + 0.75 * k * eta2.sqrt() * (3.0 * c2 - 1.0),
    }
}
