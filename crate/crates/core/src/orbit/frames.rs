use nalgebra::Matrix3;

use super::EciState;
use crate::error::{Error, Result};
use crate::relative::RelativeState;
use crate::Vector3;

/// Radial / along-track / cross-track frame attached to a spacecraft.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RswFrame {
    /// ECI position of the frame origin, km.
    pub origin: Vector3,
    pub r_hat: Vector3,
    pub s_hat: Vector3,
    pub w_hat: Vector3,
}

impl RswFrame {
    /// Rows are the basis vectors, so `m * v_eci` gives RSW components.
    pub fn eci_to_rsw_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_rows(&[self.r_hat.transpose(), self.s_hat.transpose(), self.w_hat.transpose()])
    }

    pub fn to_rsw(&self, v_eci: &Vector3) -> Vector3 {
        Vector3::new(self.r_hat.dot(v_eci), self.s_hat.dot(v_eci), self.w_hat.dot(v_eci))
    }

    pub fn to_eci(&self, v_rsw: &Vector3) -> Vector3 {
        self.r_hat * v_rsw.x + self.s_hat * v_rsw.y + self.w_hat * v_rsw.z
    }

    pub fn determinant(&self) -> f64 {
        self.eci_to_rsw_matrix().determinant()
    }
}

pub fn rsw_frame(state: &EciState) -> Result<RswFrame> {
    let rmag = state.r.norm();
    if rmag == 0.0 || !rmag.is_finite() {
        return Err(Error::UndefinedFrame("zero position"));
    }
    let h = state.r.cross(&state.v);
    let hmag = h.norm();
    if hmag <= 1e-14 * rmag * state.v.norm().max(1e-300) || hmag == 0.0 {
        return Err(Error::UndefinedFrame("rectilinear orbit (r x v = 0)"));
    }
    let r_hat = state.r / rmag;
    let w_hat = h / hmag;
    let s_hat = w_hat.cross(&r_hat);
    Ok(RswFrame {
        origin: state.r,
        r_hat,
        s_hat,
        w_hat,
    })
}

fn frame_rate(target: &EciState) -> Vector3 {
    target.r.cross(&target.v) / target.r.norm_squared()
}

/// Chaser state relative to the target, resolved in the target's rotating
/// RSW frame.
pub fn eci_to_relative(target: &EciState, chaser: &EciState) -> Result<RelativeState> {
    if target.epoch != chaser.epoch {
        return Err(Error::EpochMismatch {
            target: target.epoch,
            chaser: chaser.epoch,
        });
    }
    let frame = rsw_frame(target)?;
    let omega = frame_rate(target);
    let dr = chaser.r - target.r;
    let dv = chaser.v - target.v - omega.cross(&dr);
    let p = frame.to_rsw(&dr);
    let v = frame.to_rsw(&dv);
    Ok(RelativeState::new(target.epoch, p, v))
}

/// Inverse of [`eci_to_relative`]. The returned chaser carries the target's
/// mass; callers overwrite it as needed.
pub fn relative_to_eci(target: &EciState, rel: &RelativeState) -> Result<EciState> {
    let frame = rsw_frame(target)?;
    let omega = frame_rate(target);
    let dr = frame.to_eci(&rel.position());
    let dv = frame.to_eci(&rel.velocity()) + omega.cross(&dr);
    Ok(EciState::new(target.epoch, target.r + dr, target.v + dv, target.mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{elements_to_cart, ElementFlavor, GravityConstants, OrbitalElements};
    use proptest::prelude::*;

    fn reference_state() -> EciState {
        let oe =
            OrbitalElements::from_degrees(6925.68, 0.0019, 35.008, 3.006, 0.0, 0.0, ElementFlavor::Osculating).unwrap();
        elements_to_cart(&oe, &GravityConstants::EARTH, 0.0, 4.0).unwrap()
    }

    #[test]
    fn axis_aligned_frame() {
        let s = EciState::new(0.0, Vector3::new(7000.0, 0.0, 0.0), Vector3::new(0.0, 7.5, 0.0), 4.0);
        let f = rsw_frame(&s).unwrap();
        assert!((f.r_hat - Vector3::x()).norm() < 1e-15);
        assert!((f.s_hat - Vector3::y()).norm() < 1e-15);
        assert!((f.w_hat - Vector3::z()).norm() < 1e-15);
    }

    #[test]
    fn orbit_normal_matches_inclination() {
        let f = rsw_frame(&reference_state()).unwrap();
        let oracle = 35.008f64.to_radians().cos();
        assert!((f.w_hat.z - oracle).abs() < 1e-12);
        assert!((f.w_hat.z - 0.8191).abs() < 1e-4);
    }

    #[test]
    fn degenerate_frame_rejected() {
        let s = EciState::new(0.0, Vector3::new(7000.0, 0.0, 0.0), Vector3::new(3.0, 0.0, 0.0), 4.0);
        assert!(matches!(rsw_frame(&s), Err(Error::UndefinedFrame(_))));
    }

    #[test]
    fn coincident_states_are_zero() {
        let s = reference_state();
        let rel = eci_to_relative(&s, &s).unwrap();
        assert_eq!(rel.position().norm(), 0.0);
        assert_eq!(rel.velocity().norm(), 0.0);
    }

    #[test]
    fn radial_offset() {
        let t = reference_state();
        let f = rsw_frame(&t).unwrap();
        let c = EciState::new(0.0, t.r + f.r_hat, t.v, 4.0);
        let rel = eci_to_relative(&t, &c).unwrap();
        assert!((rel.x - 1.0).abs() < 1e-9);
        assert!(rel.y.abs() < 1e-9 && rel.z.abs() < 1e-9);
        // Same inertial velocity seen from the rotating frame: -ω × Δr.
        let omega = t.r.cross(&t.v).norm() / t.r.norm_squared();
        assert!((rel.ydot + omega).abs() < 1e-12);
    }

    #[test]
    fn epoch_mismatch_rejected() {
        let t = reference_state();
        let mut c = t;
        c.epoch = 1.0;
        assert!(matches!(eci_to_relative(&t, &c), Err(Error::EpochMismatch { .. })));
    }

    proptest! {
        #[test]
        fn frame_is_orthonormal_and_right_handed(
            a in 6700.0f64..42000.0, e in 0.0f64..0.3, i in 0.0..std::f64::consts::PI,
            raan in 0.0..std::f64::consts::TAU, argp in 0.0..std::f64::consts::TAU, ta in 0.0..std::f64::consts::TAU,
        ) {
            let oe = OrbitalElements::new(a, e, i, raan, argp, ta, ElementFlavor::Osculating).unwrap();
            let s = elements_to_cart(&oe, &GravityConstants::EARTH, 0.0, 1.0).unwrap();
            let f = rsw_frame(&s).unwrap();
            prop_assert!(f.r_hat.dot(&f.s_hat).abs() < 1e-12);
            prop_assert!(f.r_hat.dot(&f.w_hat).abs() < 1e-12);
            prop_assert!(f.s_hat.dot(&f.w_hat).abs() < 1e-12);
            prop_assert!((f.determinant() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn relative_round_trip(
            x in -50.0f64..50.0, y in -50.0f64..50.0, z in -50.0f64..50.0,
            vx in -0.05f64..0.05, vy in -0.05f64..0.05, vz in -0.05f64..0.05,
        ) {
            let t = reference_state();
            let rel = RelativeState::new(0.0, Vector3::new(x, y, z), Vector3::new(vx, vy, vz));
            let c = relative_to_eci(&t, &rel).unwrap();
            let back = eci_to_relative(&t, &c).unwrap();
            prop_assert!((back.position() - rel.position()).norm() < 1e-9);
            prop_assert!((back.velocity() - rel.velocity()).norm() < 1e-12);
        }
    }
}
