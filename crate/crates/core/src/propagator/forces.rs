use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::ThrustSegment;
use crate::error::{Error, Result};
use crate::orbit::{rsw_frame, EciState, GravityConstants};
use crate::Vector3;

/// Earth rotation rate, rad/s.
pub const EARTH_ROTATION: f64 = 7.292_115e-5;
const OBLIQUITY_DEG: f64 = 23.439;
const YEAR_S: f64 = 365.256_363 * 86_400.0;

/// Exponential atmosphere with a co-rotating density field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DragConfig {
    pub cd: f64,
    /// m^2
    pub area: f64,
    /// Reference density, kg/m^3.
    pub rho0: f64,
    /// Reference altitude, km.
    pub h0: f64,
    /// Scale height, km.
    pub scale_height: f64,
}

impl Default for DragConfig {
    fn default() -> Self {
        DragConfig {
            cd: 2.2,
            area: 0.01,
            rho0: 3.725e-12,
            h0: 500.0,
            scale_height: 63.822,
        }
    }
}

/// Flat-plate solar radiation pressure with the sun on a circular ecliptic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrpConfig {
    pub cr: f64,
    /// m^2
    pub area: f64,
    /// Pressure at 1 AU, N/m^2.
    pub p0: f64,
    /// Cylindrical Earth shadow.
    pub shadow: bool,
}

impl Default for SrpConfig {
    fn default() -> Self {
        SrpConfig {
            cr: 1.5,
            area: 0.01,
            p0: 4.56e-6,
            shadow: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceModelConfig {
    pub j2_enabled: bool,
    #[serde(default)]
    pub drag: Option<DragConfig>,
    #[serde(default)]
    pub srp: Option<SrpConfig>,
}

impl Default for ForceModelConfig {
    fn default() -> Self {
        ForceModelConfig {
            j2_enabled: true,
            drag: None,
            srp: None,
        }
    }
}

impl ForceModelConfig {
    pub fn two_body() -> Self {
        ForceModelConfig {
            j2_enabled: false,
            ..Default::default()
        }
    }

    /// Constants as seen by this force model (J2 zeroed when disabled).
    pub fn effective_constants(&self, c: &GravityConstants) -> GravityConstants {
        if self.j2_enabled {
            *c
        } else {
            c.without_j2()
        }
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(d) = &self.drag {
            for (k, v) in [
                ("cd", d.cd),
                ("area", d.area),
                ("rho0", d.rho0),
                ("h0", d.h0),
                ("scale_height", d.scale_height),
            ] {
                if !(v > 0.0 && v.is_finite()) {
                    out.push(format!("drag.{k}: must be positive, got {v}"));
                }
            }
        }
        if let Some(s) = &self.srp {
            for (k, v) in [("cr", s.cr), ("area", s.area), ("p0", s.p0)] {
                if !(v > 0.0 && v.is_finite()) {
                    out.push(format!("srp.{k}: must be positive, got {v}"));
                }
            }
        }
        out
    }
}

pub fn two_body_acceleration(r: &Vector3, mu: f64) -> Vector3 {
    let rm = r.norm();
    -mu / (rm * rm * rm) * r
}

pub fn j2_acceleration(r: &Vector3, c: &GravityConstants) -> Vector3 {
    let r2 = r.norm_squared();
    let rm = r2.sqrt();
    let k = -1.5 * c.j2 * c.mu * c.re * c.re / (r2 * r2 * rm);
    let zr = 5.0 * r.z * r.z / r2;
    Vector3::new(k * r.x * (1.0 - zr), k * r.y * (1.0 - zr), k * r.z * (3.0 - zr))
}

fn drag_acceleration(state: &EciState, d: &DragConfig, re: f64) -> Vector3 {
    let h = state.r.norm() - re;
    let rho = d.rho0 * (-(h - d.h0) / d.scale_height).exp();
    let v_rel = state.v - Vector3::new(0.0, 0.0, EARTH_ROTATION).cross(&state.r);
    // m/s^2 in, km/s^2 out: the (1000)^2 of v^2 over the 1000 of the result
    -0.5 * rho * d.cd * d.area / state.mass * v_rel.norm() * v_rel * 1000.0
}

/// Unit vector from Earth to the sun, `t` seconds after scenario start
/// (scenario start placed at the vernal equinox).
pub fn sun_direction(t: f64) -> Vector3 {
    let lon = TAU * t / YEAR_S;
    let eps = OBLIQUITY_DEG.to_radians();
    Vector3::new(lon.cos(), lon.sin() * eps.cos(), lon.sin() * eps.sin())
}

pub fn in_shadow(r: &Vector3, sun: &Vector3, re: f64) -> bool {
    let along = r.dot(sun);
    along < 0.0 && (r - along * sun).norm() < re
}

fn srp_acceleration(state: &EciState, s: &SrpConfig, re: f64) -> Vector3 {
    let sun = sun_direction(state.epoch);
    if s.shadow && in_shadow(&state.r, &sun, re) {
        return Vector3::zeros();
    }
    -s.p0 * s.cr * s.area / state.mass * sun / 1000.0
}

/// Thrust acceleration of `seg` acting on `state`, km/s^2.
pub fn thrust_acceleration(state: &EciState, seg: &ThrustSegment) -> Result<Vector3> {
    let frame = rsw_frame(state)?;
    let dir = frame.to_eci(&seg.direction.unit_rsw());
    Ok(dir * (seg.thrust / state.mass / 1000.0))
}

/// Total acceleration, km/s^2.
pub fn acceleration(
    state: &EciState,
    constants: &GravityConstants,
    config: &ForceModelConfig,
    active_thrust: Option<&ThrustSegment>,
) -> Result<Vector3> {
    let rm = state.r.norm();
    if rm <= constants.re {
        return Err(Error::Decayed {
            epoch: state.epoch,
            radius_km: rm,
        });
    }
    let mut acc = two_body_acceleration(&state.r, constants.mu);
    if config.j2_enabled {
        acc += j2_acceleration(&state.r, constants);
    }
    if let Some(d) = &config.drag {
        acc += drag_acceleration(state, d, constants.re);
    }
    if let Some(s) = &config.srp {
        acc += srp_acceleration(state, s, constants.re);
    }
    if let Some(seg) = active_thrust {
        acc += thrust_acceleration(state, seg)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::ThrustAxis;

    const C: GravityConstants = GravityConstants::EARTH;

    #[test]
    fn two_body_value() {
        let s = EciState::new(0.0, Vector3::new(7000.0, 0.0, 0.0), Vector3::new(0.0, 7.5, 0.0), 4.0);
        let a = acceleration(&s, &C, &ForceModelConfig::two_body(), None).unwrap();
        let oracle = -C.mu / 7000.0f64.powi(2);
        assert!((a.x - oracle).abs() < 1e-15);
        assert!((a.x + 8.1347e-3).abs() < 1e-7);
        assert_eq!((a.y, a.z), (0.0, 0.0));
    }

    #[test]
    fn j2_is_inward_at_equator() {
        let r = Vector3::new(7000.0, 0.0, 0.0);
        let a = j2_acceleration(&r, &C);
        let oracle = -1.5 * C.j2 * C.mu / 7000.0f64.powi(2) * (C.re / 7000.0).powi(2);
        assert!(a.x < 0.0);
        assert!((a.x - oracle).abs() < 1e-18);
    }

    #[test]
    fn j2_matches_potential_gradient() {
        // Perturbing potential; the acceleration is its gradient.
        let pot = |r: &Vector3| {
            let rm = r.norm();
            let s = r.z / rm;
            -C.mu / rm * C.j2 * (C.re / rm).powi(2) * 0.5 * (3.0 * s * s - 1.0)
        };
        let r = Vector3::new(4000.0, -3500.0, 4200.0);
        let h = 1e-3;
        let mut grad = Vector3::zeros();
        for k in 0..3 {
            let mut p = r;
            let mut m = r;
            p[k] += h;
            m[k] -= h;
            grad[k] = (pot(&p) - pot(&m)) / (2.0 * h);
        }
        let a = j2_acceleration(&r, &C);
        assert!((a - grad).norm() < 1e-6 * a.norm());
    }

    #[test]
    fn thrust_magnitude() {
        let s = EciState::new(0.0, Vector3::new(7000.0, 0.0, 0.0), Vector3::new(0.0, 7.5, 0.0), 4.0);
        let seg = ThrustSegment::new(0.0, 900.0, ThrustAxis::PlusS, 0.006);
        let a = thrust_acceleration(&s, &seg).unwrap();
        assert!((a.norm() - 1.5e-6).abs() < 1e-18);
        assert!((a.normalize() - Vector3::y()).norm() < 1e-15);
    }

    #[test]
    fn decayed_state_rejected() {
        let s = EciState::new(3.0, Vector3::new(6000.0, 0.0, 0.0), Vector3::new(0.0, 7.5, 0.0), 4.0);
        assert!(matches!(
            acceleration(&s, &C, &ForceModelConfig::default(), None),
            Err(Error::Decayed { .. })
        ));
    }

    #[test]
    fn drag_opposes_relative_velocity() {
        let s = EciState::new(0.0, Vector3::new(6878.0, 0.0, 0.0), Vector3::new(0.0, 7.6, 0.0), 4.0);
        let d = DragConfig::default();
        let a = drag_acceleration(&s, &d, C.re);
        assert!(a.y < 0.0);
        assert!(a.x.abs() < 1e-20 && a.z.abs() < 1e-20);
    }

    #[test]
    fn shadow_geometry() {
        let sun = Vector3::x();
        assert!(in_shadow(&Vector3::new(-7000.0, 0.0, 0.0), &sun, C.re));
        assert!(!in_shadow(&Vector3::new(7000.0, 0.0, 0.0), &sun, C.re));
        assert!(!in_shadow(&Vector3::new(-7000.0, 7000.0, 0.0), &sun, C.re));
        assert!((sun_direction(0.0) - Vector3::x()).norm() < 1e-15);
    }
}
