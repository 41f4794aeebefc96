use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{EciState, GravityConstants};
use crate::angles::{wrap_pi, wrap_two_pi};
use crate::error::{Error, Result};
use crate::Vector3;

/// Below this eccentricity the perigee is undefined; `argp` is pinned to zero
/// and the phase is carried by the true anomaly (i.e. `ta == u`).
pub const CIRCULAR_EPS: f64 = 1e-9;
/// Below this inclination the node is undefined; `raan` is pinned to zero.
pub const EQUATORIAL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementFlavor {
    Osculating,
    Mean,
}

/// Classical Keplerian elements. Angles in radians, `a` in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    pub a: f64,
    pub e: f64,
    pub i: f64,
    pub raan: f64,
    pub argp: f64,
    /// True anomaly.
    pub ta: f64,
    pub flavor: ElementFlavor,
}

impl OrbitalElements {
    /// Builds a validated element set with angles normalized to `[0, 2π)`.
    pub fn new(a: f64, e: f64, i: f64, raan: f64, argp: f64, ta: f64, flavor: ElementFlavor) -> Result<Self> {
        let oe = OrbitalElements {
            a,
            e,
            i,
            raan: wrap_two_pi(raan),
            argp: wrap_two_pi(argp),
            ta: wrap_two_pi(ta),
            flavor,
        };
        oe.validate()?;
        Ok(oe)
    }

    /// Degrees-in convenience constructor (a in km).
    pub fn from_degrees(
        a: f64,
        e: f64,
        i_deg: f64,
        raan_deg: f64,
        argp_deg: f64,
        ta_deg: f64,
        flavor: ElementFlavor,
    ) -> Result<Self> {
        Self::new(
            a,
            e,
            i_deg.to_radians(),
            raan_deg.to_radians(),
            argp_deg.to_radians(),
            ta_deg.to_radians(),
            flavor,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.e, self.i, self.raan, self.argp, self.ta]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidElements("non-finite element".into()));
        }
        if self.a <= 0.0 {
            return Err(Error::InvalidElements(format!("a = {} km", self.a)));
        }
        if !(0.0..1.0).contains(&self.e) {
            return Err(Error::Unbound { eccentricity: self.e });
        }
        if !(0.0..=PI).contains(&self.i) {
            return Err(Error::InvalidElements(format!("i = {} rad", self.i)));
        }
        Ok(())
    }

    /// Argument of latitude `u = ω + θ` in `[0, 2π)`.
    pub fn arg_latitude(&self) -> f64 {
        wrap_two_pi(self.argp + self.ta)
    }

    /// Mean argument of latitude `ω + M` in `[0, 2π)`.
    pub fn mean_arg_latitude(&self) -> f64 {
        wrap_two_pi(self.argp + self.mean_anomaly())
    }

    pub fn mean_anomaly(&self) -> f64 {
        true_to_mean(self.ta, self.e)
    }

    /// Same orbit at a different mean anomaly.
    pub fn with_mean_anomaly(&self, m: f64) -> Self {
        OrbitalElements {
            ta: mean_to_true(m, self.e),
            ..*self
        }
    }

    pub fn semi_latus_rectum(&self) -> f64 {
        self.a * (1.0 - self.e * self.e)
    }

    /// Keplerian mean motion, rad/s.
    pub fn mean_motion(&self, mu: f64) -> f64 {
        (mu / self.a.powi(3)).sqrt()
    }

    pub fn period(&self, mu: f64) -> f64 {
        2.0 * PI / self.mean_motion(mu)
    }

    pub fn radius(&self) -> f64 {
        self.semi_latus_rectum() / (1.0 + self.e * self.ta.cos())
    }
}

/// Mean anomaly to true anomaly via Newton iteration on Kepler's equation.
pub fn mean_to_true(m: f64, e: f64) -> f64 {
    let m = wrap_pi(m);
    let mut ea = if e < 0.8 { m } else { PI.copysign(m) };
    for _ in 0..50 {
        let f = ea - e * ea.sin() - m;
        let step = f / (1.0 - e * ea.cos());
        ea -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    wrap_two_pi(eccentric_to_true(ea, e))
}

pub fn eccentric_to_true(ea: f64, e: f64) -> f64 {
    let beta = (1.0 - e * e).sqrt();
    (beta * ea.sin()).atan2(ea.cos() - e)
}

pub fn true_to_mean(ta: f64, e: f64) -> f64 {
    let beta = (1.0 - e * e).sqrt();
    let ea = (beta * ta.sin()).atan2(e + ta.cos());
    wrap_two_pi(ea - e * ea.sin())
}

/// Cartesian state to osculating Keplerian elements.
///
/// Near-circular orbits (`e < 1e-9`) get `argp = 0` with the phase in `ta`;
/// near-equatorial orbits (`i < 1e-9`) get `raan = 0` with the node line on +X.
pub fn cart_to_elements(state: &EciState, constants: &GravityConstants) -> Result<OrbitalElements> {
    let mu = constants.mu;
    let r = state.r;
    let v = state.v;
    let rmag = r.norm();
    let h = r.cross(&v);
    let hmag = h.norm();
    if rmag == 0.0 || hmag <= 1e-12 * rmag * v.norm() {
        return Err(Error::UndefinedFrame("rectilinear or degenerate state"));
    }
    let energy = state.energy(mu);
    let e_vec = ((v.norm_squared() - mu / rmag) * r - r.dot(&v) * v) / mu;
    let e = e_vec.norm();
    if energy >= 0.0 || e >= 1.0 {
        return Err(Error::Unbound { eccentricity: e });
    }
    let a = -mu / (2.0 * energy);
    let w_hat = h / hmag;
    let i = w_hat.z.clamp(-1.0, 1.0).acos();

    // In-plane basis: p toward the ascending node (or +X when equatorial).
    let node = Vector3::new(-h.y, h.x, 0.0);
    let (raan, p_hat) = if i < EQUATORIAL_EPS || node.norm() <= EQUATORIAL_EPS * hmag {
        (0.0, Vector3::x())
    } else {
        let n_hat = node.normalize();
        (n_hat.y.atan2(n_hat.x), n_hat)
    };
    let q_hat = w_hat.cross(&p_hat);
    let u = r.dot(&q_hat).atan2(r.dot(&p_hat));
    let (argp, ta) = if e < CIRCULAR_EPS {
        (0.0, u)
    } else {
        let argp = e_vec.dot(&q_hat).atan2(e_vec.dot(&p_hat));
        (argp, u - argp)
    };
    let e = if e < CIRCULAR_EPS { 0.0 } else { e };
    OrbitalElements::new(a, e, i, raan, argp, ta, ElementFlavor::Osculating)
}

/// Keplerian elements (either flavor, treated as osculating) to an ECI state.
pub fn elements_to_cart(oe: &OrbitalElements, constants: &GravityConstants, epoch: f64, mass: f64) -> Result<EciState> {
    oe.validate()?;
    let p = oe.semi_latus_rectum();
    let r = oe.radius();
    let u = oe.argp + oe.ta;
    let (su, cu) = u.sin_cos();
    let (so, co) = oe.raan.sin_cos();
    let (si, ci) = oe.i.sin_cos();
    let (sw, cw) = oe.argp.sin_cos();
    let pos = Vector3::new(r * (co * cu - so * su * ci), r * (so * cu + co * su * ci), r * su * si);
    let k = (constants.mu / p).sqrt();
    let vel = Vector3::new(
        -k * (co * (su + oe.e * sw) + so * ci * (cu + oe.e * cw)),
        -k * (so * (su + oe.e * sw) - co * ci * (cu + oe.e * cw)),
        k * si * (cu + oe.e * cw),
    );
    Ok(EciState::new(epoch, pos, vel, mass))
}

/// Differences of two element sets, chaser minus target. Angles wrapped to
/// `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RelativeElements {
    /// km
    pub da: f64,
    pub de: f64,
    /// rad
    pub di: f64,
    /// rad
    pub draan: f64,
    /// Argument of latitude difference `Δθ + Δω`, rad.
    pub du: f64,
    /// Mean argument of latitude difference `ΔM + Δω`, rad. Free of the
    /// once-per-orbit eccentricity term carried by `du`.
    pub dlambda: f64,
}

impl RelativeElements {
    pub fn between(target: &OrbitalElements, chaser: &OrbitalElements) -> Self {
        RelativeElements {
            da: chaser.a - target.a,
            de: chaser.e - target.e,
            di: chaser.i - target.i,
            draan: wrap_pi(chaser.raan - target.raan),
            du: wrap_pi(chaser.arg_latitude() - target.arg_latitude()),
            dlambda: wrap_pi(chaser.mean_arg_latitude() - target.mean_arg_latitude()),
        }
    }

    /// Along-track offset of the relative orbit center, rad of arc:
    /// `Δλ + ΔΩ cos i`.
    pub fn along_track_angle(&self, target_inclination: f64) -> f64 {
        self.dlambda + self.draan * target_inclination.cos()
    }

    pub fn is_zero(&self) -> bool {
        [self.da, self.de, self.di, self.draan, self.du, self.dlambda]
            .iter()
            .all(|x| *x == 0.0)
    }
}

impl std::ops::Sub for RelativeElements {
    type Output = RelativeElements;
    fn sub(self, rhs: Self) -> Self {
        RelativeElements {
            da: self.da - rhs.da,
            de: self.de - rhs.de,
            di: self.di - rhs.di,
            draan: wrap_pi(self.draan - rhs.draan),
            du: wrap_pi(self.du - rhs.du),
            dlambda: wrap_pi(self.dlambda - rhs.dlambda),
        }
    }
}
