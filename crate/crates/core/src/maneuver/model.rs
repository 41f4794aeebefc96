use crate::angles::{wrap_pi, wrap_two_pi};
use crate::orbit::{mean_to_true, secular_rates, ElementFlavor, GravityConstants, OrbitalElements, RelativeElements};
use crate::propagator::{SpacecraftParams, ThrustSegment};
use crate::G0;

/// Mean-element orbit in nonsingular form, coasted with J2 secular rates
/// and driven through burns with the near-circular Gauss equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MeanOrbitModel {
    pub a: f64,
    /// `e cos ω`
    pub ex: f64,
    /// `e sin ω`
    pub ey: f64,
    pub i: f64,
    pub raan: f64,
    /// Mean argument of latitude `ω + M`.
    pub lambda: f64,
    pub mass: f64,
    pub t: f64,
    pub constants: GravityConstants,
}

const BURN_SUBSTEP: f64 = 10.0;

impl MeanOrbitModel {
    pub fn new(oe: &OrbitalElements, epoch: f64, mass: f64, constants: &GravityConstants) -> Self {
        MeanOrbitModel {
            a: oe.a,
            ex: oe.e * oe.argp.cos(),
            ey: oe.e * oe.argp.sin(),
            i: oe.i,
            raan: oe.raan,
            lambda: oe.mean_arg_latitude(),
            mass,
            t: epoch,
            constants: *constants,
        }
    }

    pub fn e(&self) -> f64 {
        self.ex.hypot(self.ey)
    }

    pub fn mean_motion(&self) -> f64 {
        (self.constants.mu / self.a.powi(3)).sqrt()
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.mean_motion()
    }

    /// Circular speed, km/s.
    pub fn speed(&self) -> f64 {
        self.mean_motion() * self.a
    }

    pub fn elements(&self) -> OrbitalElements {
        let e = self.e();
        let argp = if e < 1e-12 { 0.0 } else { self.ey.atan2(self.ex) };
        let m = self.lambda - argp;
        OrbitalElements {
            a: self.a,
            e,
            i: self.i,
            raan: wrap_two_pi(self.raan),
            argp: wrap_two_pi(argp),
            ta: mean_to_true(m, e),
            flavor: ElementFlavor::Mean,
        }
    }

    /// True argument of latitude to first order in `e`.
    pub fn arg_latitude(&self) -> f64 {
        let l = self.lambda;
        wrap_two_pi(l + 2.0 * (self.ex * l.sin() - self.ey * l.cos()))
    }

    /// Rate of the mean argument of latitude, rad/s.
    pub fn lambda_rate(&self) -> f64 {
        secular_rates(&self.elements(), &self.constants).arg_latitude_dot()
    }

    pub fn coast(&mut self, t_end: f64) {
        let dt = t_end - self.t;
        if dt == 0.0 {
            return;
        }
        let r = secular_rates(&self.elements(), &self.constants);
        let dw = r.argp_dot * dt;
        let (s, c) = dw.sin_cos();
        let (ex, ey) = (self.ex, self.ey);
        self.ex = ex * c - ey * s;
        self.ey = ex * s + ey * c;
        self.raan = wrap_two_pi(self.raan + r.raan_dot * dt);
        self.lambda = wrap_two_pi(self.lambda + r.arg_latitude_dot() * dt);
        self.t = t_end;
    }

    fn derivative(&self, x: &[f64; 7], seg: &ThrustSegment, params: &SpacecraftParams) -> [f64; 7] {
        let [a, ex, ey, i, _raan, lambda, m] = *x;
        let probe = MeanOrbitModel {
            a,
            ex,
            ey,
            i,
            lambda,
            mass: m,
            ..*self
        };
        let rates = secular_rates(&probe.elements(), &self.constants);
        let n = probe.mean_motion();
        let v = n * a;
        let acc = seg.thrust / m / 1000.0;
        let dir = seg.direction.unit_rsw();
        let (fr, fs, fw) = (acc * dir.x, acc * dir.y, acc * dir.z);
        let u = probe.arg_latitude();
        let (su, cu) = u.sin_cos();
        let (si, ci) = i.sin_cos();
        let raan_w = su * fw / (v * si.max(1e-9));
        let argp_rate = rates.argp_dot - ci * raan_w;
        [
            2.0 * fs / n,
            (su * fr + 2.0 * cu * fs) / v - ey * argp_rate,
            (-cu * fr + 2.0 * su * fs) / v + ex * argp_rate,
            cu * fw / v,
            rates.raan_dot + raan_w,
            rates.arg_latitude_dot() - 2.0 * fr / v - ci * raan_w,
            -seg.thrust / (params.isp * G0),
        ]
    }

    fn burn(&mut self, t_end: f64, seg: &ThrustSegment, params: &SpacecraftParams) {
        let span = t_end - self.t;
        if span <= 0.0 {
            return;
        }
        let k = (span / BURN_SUBSTEP).ceil().max(1.0) as usize;
        let h = span / k as f64;
        let mut x = [self.a, self.ex, self.ey, self.i, self.raan, self.lambda, self.mass];
        for _ in 0..k {
            let k1 = self.derivative(&x, seg, params);
            let mut mid = x;
            for j in 0..7 {
                mid[j] += 0.5 * h * k1[j];
            }
            let k2 = self.derivative(&mid, seg, params);
            for j in 0..7 {
                x[j] += h * k2[j];
            }
        }
        self.a = x[0];
        self.ex = x[1];
        self.ey = x[2];
        self.i = x[3];
        self.raan = wrap_two_pi(x[4]);
        self.lambda = wrap_two_pi(x[5]);
        self.mass = x[6];
        self.t = t_end;
    }

    /// Advances to `t_end`, burning through any overlapping segments.
    pub fn advance(&mut self, t_end: f64, segments: &[ThrustSegment], params: &SpacecraftParams) {
        for seg in segments {
            if seg.t_end <= self.t {
                continue;
            }
            if seg.t_start >= t_end {
                break;
            }
            if seg.t_start > self.t {
                self.coast(seg.t_start);
            }
            self.burn(seg.t_end.min(t_end), seg, params);
        }
        if t_end > self.t {
            self.coast(t_end);
        }
    }

    /// First time at or after `t_min` when the argument of latitude equals
    /// `u`, assuming an unforced coast from the current state.
    pub fn next_arg_latitude_time(&self, u: f64, t_min: f64) -> f64 {
        let mut probe = *self;
        probe.coast(t_min.max(self.t));
        let rate = probe.lambda_rate();
        let start = probe.t;
        let mut dt = wrap_two_pi(u - probe.arg_latitude()) / rate;
        for _ in 0..4 {
            let mut p = probe;
            p.coast(start + dt);
            dt += wrap_pi(u - p.arg_latitude()) / rate;
        }
        if dt < 0.0 {
            dt += std::f64::consts::TAU / rate;
        }
        start + dt
    }

    /// Eccentricity vector in the node frame of `reference`, which removes
    /// the small node offset between the two orbits.
    pub fn ecc_vector_in(&self, reference: &MeanOrbitModel) -> (f64, f64) {
        let shift = wrap_pi(self.raan - reference.raan) * reference.i.cos();
        let (s, c) = shift.sin_cos();
        (self.ex * c - self.ey * s, self.ex * s + self.ey * c)
    }
}

/// Mean relative elements of `chaser` with respect to `target`.
pub(crate) fn relative(target: &MeanOrbitModel, chaser: &MeanOrbitModel) -> RelativeElements {
    RelativeElements::between(&target.elements(), &chaser.elements())
}

/// Along-track center angle `Δλ + cos i ΔΩ`, rad.
pub(crate) fn along_track_angle(target: &MeanOrbitModel, chaser: &MeanOrbitModel) -> f64 {
    wrap_pi(chaser.lambda - target.lambda) + wrap_pi(chaser.raan - target.raan) * target.i.cos()
}

/// Relative eccentricity vector, chaser minus target, in the target node frame.
pub(crate) fn relative_ecc_vector(target: &MeanOrbitModel, chaser: &MeanOrbitModel) -> (f64, f64) {
    let (cx, cy) = chaser.ecc_vector_in(target);
    (cx - target.ex, cy - target.ey)
}
