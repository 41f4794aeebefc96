//! Clohessy-Wiltshire relative motion: closed-form propagation, static and
//! safety ellipse design, and ellipse geometry extraction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::{OrbitalElements, RelativeElements};
use crate::Vector3;

/// Relative distance above which the linearized model is flagged.
pub const LINEAR_REGIME_LIMIT_KM: f64 = 500.0;
/// Default tolerance of [`is_static_ellipse`], km/s.
pub const STATIC_ELLIPSE_TOL: f64 = 1e-6;

/// Chaser state in the target's RSW frame: x radial, y along-track, z cross-track.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RelativeState {
    pub epoch: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub xdot: f64,
    pub ydot: f64,
    pub zdot: f64,
}

impl RelativeState {
    pub fn new(epoch: f64, position: Vector3, velocity: Vector3) -> Self {
        RelativeState {
            epoch,
            x: position.x,
            y: position.y,
            z: position.z,
            xdot: velocity.x,
            ydot: velocity.y,
            zdot: velocity.z,
        }
    }

    pub fn position(&self) -> Vector3 {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn velocity(&self) -> Vector3 {
        Vector3::new(self.xdot, self.ydot, self.zdot)
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.x, self.y, self.z, self.xdot, self.ydot, self.zdot]
    }

    pub fn from_array(epoch: f64, s: [f64; 6]) -> Self {
        RelativeState {
            epoch,
            x: s[0],
            y: s[1],
            z: s[2],
            xdot: s[3],
            ydot: s[4],
            zdot: s[5],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }

    /// True once the separation leaves the range where CW is trustworthy.
    pub fn exceeds_linear_regime(&self) -> bool {
        self.position().norm() > LINEAR_REGIME_LIMIT_KM
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CwContext {
    /// Target mean motion, rad/s.
    pub n: f64,
}

impl CwContext {
    pub fn new(n: f64) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidState(format!("mean motion {n} rad/s")));
        }
        Ok(CwContext { n })
    }

    pub fn from_semi_major_axis(a: f64, mu: f64) -> Result<Self> {
        Self::new((mu / a.powi(3)).sqrt())
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.n
    }
}

/// Peak-to-peak relative ellipse dimensions, km.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EllipseGeometry {
    pub radial_extent: f64,
    pub alongtrack_extent: f64,
    pub crosstrack_extent: f64,
    pub center_y: f64,
    /// km per target period.
    pub center_drift_rate: f64,
}

/// Closed-form unforced CW solution after `t` seconds.
pub fn cw_propagate(s0: &RelativeState, ctx: &CwContext, t: f64) -> RelativeState {
    if s0.exceeds_linear_regime() {
        log::warn!(
            "CW propagation at {:.1} km separation is outside the linear regime",
            s0.position().norm()
        );
    }
    let n = ctx.n;
    let nt = n * t;
    let (s, c) = nt.sin_cos();
    let [x0, y0, z0, vx, vy, vz] = s0.as_array();
    let x = (4.0 - 3.0 * c) * x0 + s / n * vx + 2.0 * (1.0 - c) / n * vy;
    let y = 6.0 * (s - nt) * x0 + y0 - 2.0 * (1.0 - c) / n * vx + (4.0 * s - 3.0 * nt) / n * vy;
    let z = c * z0 + s / n * vz;
    let xd = 3.0 * n * s * x0 + c * vx + 2.0 * s * vy;
    let yd = -6.0 * n * (1.0 - c) * x0 - 2.0 * s * vx + (4.0 * c - 3.0) * vy;
    let zd = -n * s * z0 + c * vz;
    RelativeState::from_array(s0.epoch + t, [x, y, z, xd, yd, zd])
}

/// Right-hand side of the unforced CW equations, for numerical cross-checks.
pub fn cw_derivative(s: &[f64; 6], n: f64) -> [f64; 6] {
    [
        s[3],
        s[4],
        s[5],
        3.0 * n * n * s[0] + 2.0 * n * s[4],
        -2.0 * n * s[3],
        -n * n * s[2],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticEllipseCheck {
    pub satisfied: bool,
    /// `(ẋ − (n/2) y, ẏ + 2 n x)`, km/s.
    pub residuals: (f64, f64),
}

pub fn is_static_ellipse(s: &RelativeState, ctx: &CwContext) -> StaticEllipseCheck {
    is_static_ellipse_with_tol(s, ctx, STATIC_ELLIPSE_TOL)
}

pub fn is_static_ellipse_with_tol(s: &RelativeState, ctx: &CwContext, tol: f64) -> StaticEllipseCheck {
    let r1 = s.xdot - 0.5 * ctx.n * s.y;
    let r2 = s.ydot + 2.0 * ctx.n * s.x;
    StaticEllipseCheck {
        satisfied: r1.abs() <= tol && r2.abs() <= tol,
        residuals: (r1, r2),
    }
}

/// Safety ellipse starting at the radial maximum with cross-track motion in
/// phase with the radial motion. Extents are peak-to-peak.
pub fn design_safety_ellipse(radial_extent: f64, crosstrack_extent: f64, ctx: &CwContext) -> RelativeState {
    let x0 = 0.5 * radial_extent;
    RelativeState {
        epoch: 0.0,
        x: x0,
        y: 0.0,
        z: 0.5 * crosstrack_extent,
        xdot: 0.0,
        ydot: -2.0 * ctx.n * x0,
        zdot: 0.0,
    }
}

/// Adds an along-track center drift of `drift_rate` km per period to `base`
/// while leaving the radial and along-track amplitudes unchanged.
pub fn design_walking_safety_ellipse(base: &RelativeState, drift_rate: f64, ctx: &CwContext) -> RelativeState {
    if drift_rate == 0.0 {
        return *base;
    }
    let n = ctx.n;
    let delta = -drift_rate * n / (6.0 * PI);
    RelativeState {
        x: base.x + 2.0 * delta / n,
        ydot: base.ydot - 3.0 * delta,
        ..*base
    }
}

fn lerp(a: &RelativeState, b: &RelativeState, t: f64) -> RelativeState {
    let span = b.epoch - a.epoch;
    let w = if span > 0.0 { (t - a.epoch) / span } else { 0.0 };
    let (pa, pb) = (a.as_array(), b.as_array());
    let mut out = [0.0; 6];
    for k in 0..6 {
        out[k] = pa[k] + w * (pb[k] - pa[k]);
    }
    RelativeState::from_array(t, out)
}

/// Samples of `traj` restricted to `[t0, t1]`, with interpolated endpoints.
fn window(traj: &[RelativeState], t0: f64, t1: f64) -> Vec<RelativeState> {
    let mut out = Vec::new();
    for pair in traj.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.epoch < t0 || a.epoch > t1 {
            continue;
        }
        if out.is_empty() {
            out.push(if a.epoch >= t0 { *a } else { lerp(a, b, t0) });
        }
        if b.epoch <= t1 {
            out.push(*b);
        } else {
            out.push(lerp(a, b, t1));
            break;
        }
    }
    out
}

fn mean_y(samples: &[RelativeState]) -> f64 {
    let span = samples.last().unwrap().epoch - samples[0].epoch;
    let integral: f64 = samples
        .windows(2)
        .map(|p| 0.5 * (p[0].y + p[1].y) * (p[1].epoch - p[0].epoch))
        .sum();
    integral / span
}

fn peak_to_peak(samples: &[RelativeState], f: impl Fn(&RelativeState) -> f64) -> f64 {
    let (lo, hi) = samples
        .iter()
        .map(f)
        .fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// Measures the relative ellipse of a time-ordered trajectory. Extents and
/// `center_y` use the final period; the drift compares the first and final
/// period means.
pub fn measure_ellipse(trajectory: &[RelativeState], ctx: &CwContext) -> Result<EllipseGeometry> {
    let period = ctx.period();
    let (first, last) = match (trajectory.first(), trajectory.last()) {
        (Some(f), Some(l)) => (f.epoch, l.epoch),
        _ => {
            return Err(Error::TrajectoryTooShort {
                span: 0.0,
                needed: period,
            })
        }
    };
    let span = last - first;
    // Allow for round-off in sampled epochs.
    if span < period * (1.0 - 1e-9) {
        return Err(Error::TrajectoryTooShort { span, needed: period });
    }
    let tail_start = (last - period).max(first);
    let tail = window(trajectory, tail_start, last);
    let head = window(trajectory, first, first + period);
    let center_y = mean_y(&tail);
    let offset = tail_start - first;
    let center_drift_rate = if offset > 1e-6 * period {
        (center_y - mean_y(&head)) / offset * period
    } else {
        0.0
    };
    Ok(EllipseGeometry {
        radial_extent: peak_to_peak(&tail, |s| s.x),
        alongtrack_extent: peak_to_peak(&tail, |s| s.y),
        crosstrack_extent: peak_to_peak(&tail, |s| s.z),
        center_y,
        center_drift_rate,
    })
}

/// First-order ellipse implied by a mean relative element set.
pub fn relative_elements_to_geometry(d: &RelativeElements, target: &OrbitalElements) -> EllipseGeometry {
    let a = target.a;
    let (si, ci) = target.i.sin_cos();
    EllipseGeometry {
        radial_extent: 2.0 * a * d.de.abs(),
        alongtrack_extent: 4.0 * a * d.de.abs(),
        crosstrack_extent: 2.0 * a * d.di.hypot(d.draan * si),
        center_y: a * (d.dlambda + d.draan * ci),
        center_drift_rate: -3.0 * PI * d.da,
    }
}
