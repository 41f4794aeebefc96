//! Rendezvous and proximity operations (RPO) for a CubeSat chaser flying a
//! single body-fixed, power-limited electric thruster.
//!
//! The crate is layered bottom-up:
//!
//! - [`orbit`]: ECI states, the RSW frame, Keplerian elements, first-order
//!   J2 mean/osculating mapping and secular rates.
//! - [`relative`]: Clohessy-Wiltshire machinery, safety ellipse design and
//!   ellipse geometry extraction.
//! - [`propagator`]: two-body + J2 (+ optional drag/SRP) RK4 propagation of
//!   the target/chaser pair with piecewise-constant RSW thrust.
//! - [`maneuver`]: the four mean-element correction blocks (RAAN, argument of
//!   latitude, inclination, eccentricity) and their first-order predictions.
//! - [`mission`]: navigation latency model and the four-phase controller.
//! - [`scenario`]: JSON scenario configuration and the CSV/JSON artifacts.

pub mod angles;
pub mod error;
pub mod maneuver;
pub mod mission;
pub mod orbit;
pub mod propagator;
pub mod relative;
pub mod scenario;

pub use error::{Error, Result};
pub use orbit::{
    cart_to_elements, eci_to_relative, elements_to_cart, mean_to_osc, osc_to_mean, relative_to_eci, rsw_frame,
    secular_rates, EciState, ElementFlavor, GravityConstants, OrbitalElements, RelativeElements, RswFrame,
    SecularRates,
};
pub use relative::{CwContext, EllipseGeometry, RelativeState};

pub type Vector3 = nalgebra::Vector3<f64>;

/// Seconds per day.
pub const DAY: f64 = 86_400.0;
/// Standard gravity, m/s^2.
pub const G0: f64 = 9.80665;
