use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Vector3;
use crate::G0;

/// Single thrust axis in the chaser's own RSW frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThrustAxis {
    #[serde(rename = "+R")]
    PlusR,
    #[serde(rename = "-R")]
    MinusR,
    #[serde(rename = "+S")]
    PlusS,
    #[serde(rename = "-S")]
    MinusS,
    #[serde(rename = "+W")]
    PlusW,
    #[serde(rename = "-W")]
    MinusW,
}

impl ThrustAxis {
    pub fn unit_rsw(self) -> Vector3 {
        match self {
            ThrustAxis::PlusR => Vector3::new(1.0, 0.0, 0.0),
            ThrustAxis::MinusR => Vector3::new(-1.0, 0.0, 0.0),
            ThrustAxis::PlusS => Vector3::new(0.0, 1.0, 0.0),
            ThrustAxis::MinusS => Vector3::new(0.0, -1.0, 0.0),
            ThrustAxis::PlusW => Vector3::new(0.0, 0.0, 1.0),
            ThrustAxis::MinusW => Vector3::new(0.0, 0.0, -1.0),
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            ThrustAxis::PlusR => ThrustAxis::MinusR,
            ThrustAxis::MinusR => ThrustAxis::PlusR,
            ThrustAxis::PlusS => ThrustAxis::MinusS,
            ThrustAxis::MinusS => ThrustAxis::PlusS,
            ThrustAxis::PlusW => ThrustAxis::MinusW,
            ThrustAxis::MinusW => ThrustAxis::PlusW,
        }
    }

    /// Along-track axis with the sign of `sign`.
    pub fn along_track(sign: f64) -> Self {
        if sign >= 0.0 {
            ThrustAxis::PlusS
        } else {
            ThrustAxis::MinusS
        }
    }

    pub fn cross_track(sign: f64) -> Self {
        if sign >= 0.0 {
            ThrustAxis::PlusW
        } else {
            ThrustAxis::MinusW
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ThrustAxis::PlusR => "+R",
            ThrustAxis::MinusR => "-R",
            ThrustAxis::PlusS => "+S",
            ThrustAxis::MinusS => "-S",
            ThrustAxis::PlusW => "+W",
            ThrustAxis::MinusW => "-W",
        }
    }

    /// +1 or -1.
    pub fn sign(self) -> f64 {
        match self {
            ThrustAxis::PlusR | ThrustAxis::PlusS | ThrustAxis::PlusW => 1.0,
            _ => -1.0,
        }
    }
}

impl fmt::Display for ThrustAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Constant thrust along one RSW axis over `[t_start, t_end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThrustSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub direction: ThrustAxis,
    /// N
    pub thrust: f64,
}

impl ThrustSegment {
    pub fn new(t_start: f64, t_end: f64, direction: ThrustAxis, thrust: f64) -> Self {
        ThrustSegment {
            t_start,
            t_end,
            direction,
            thrust,
        }
    }

    /// Segment of `duration` seconds centered on `t_mid`.
    pub fn centered(t_mid: f64, duration: f64, direction: ThrustAxis, thrust: f64) -> Self {
        Self::new(t_mid - 0.5 * duration, t_mid + 0.5 * duration, direction, thrust)
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    /// N*s
    pub fn impulse(&self) -> f64 {
        self.thrust * self.duration()
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && t < self.t_end
    }

    pub fn shifted(&self, dt: f64) -> Self {
        Self::new(self.t_start + dt, self.t_end + dt, self.direction, self.thrust)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacecraftParams {
    /// kg
    pub wet_mass: f64,
    /// N
    pub thrust: f64,
    /// s
    pub isp: f64,
    /// N*s
    pub total_impulse: f64,
    /// s
    pub max_firing_duration: f64,
}

impl Default for SpacecraftParams {
    fn default() -> Self {
        SpacecraftParams {
            wet_mass: 4.0,
            thrust: 6e-3,
            isp: 100.0,
            total_impulse: 270.0,
            max_firing_duration: 900.0,
        }
    }
}

impl SpacecraftParams {
    /// Nominal ΔV capacity `total_impulse / wet_mass`, m/s.
    pub fn delta_v_capacity(&self) -> f64 {
        self.total_impulse / self.wet_mass
    }

    /// kg/s at the rated thrust.
    pub fn mass_flow(&self) -> f64 {
        self.thrust / (self.isp * G0)
    }

    /// Exhaust velocity, m/s.
    pub fn exhaust_velocity(&self) -> f64 {
        self.isp * G0
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (k, v) in [
            ("wet_mass", self.wet_mass),
            ("thrust", self.thrust),
            ("isp", self.isp),
            ("total_impulse", self.total_impulse),
            ("max_firing_duration", self.max_firing_duration),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("{k}: must be positive, got {v}"));
            }
        }
        out
    }
}

/// One broken scheduling rule. Indices refer to the checked slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleViolation {
    NonPositive {
        index: usize,
        duration: f64,
    },
    FiringLimit {
        index: usize,
        duration: f64,
        limit: f64,
    },
    Overlap {
        index: usize,
        previous_end: f64,
        start: f64,
    },
    ChargingGap {
        index: usize,
        gap: f64,
        required: f64,
    },
    ImpulseBudget {
        required: f64,
        available: f64,
    },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleViolation::NonPositive { index, duration } => {
                write!(f, "segment {index}: non-positive duration or thrust ({duration:.3} s)")
            }
            ScheduleViolation::FiringLimit { index, duration, limit } => {
                write!(f, "segment {index}: firing limit, {duration:.3} s > {limit:.3} s")
            }
            ScheduleViolation::Overlap {
                index,
                previous_end,
                start,
            } => write!(
                f,
                "segment {index}: overlaps previous segment (starts {start:.3} s, previous ends {previous_end:.3} s)"
            ),
            ScheduleViolation::ChargingGap { index, gap, required } => write!(
                f,
                "segment {index}: charging gap {gap:.1} s shorter than {required:.1} s"
            ),
            ScheduleViolation::ImpulseBudget { required, available } => write!(
                f,
                "impulse budget: schedule needs {required:.3} N*s, {available:.3} N*s available"
            ),
        }
    }
}

/// Slack for comparisons against the firing limit and charging gap, s.
const TIME_SLACK: f64 = 1e-6;

/// Checks firing limits, charging gaps of at least `target_period`, ordering,
/// and the full impulse budget of `params`.
pub fn validate_schedule(
    segments: &[ThrustSegment],
    params: &SpacecraftParams,
    target_period: f64,
) -> Vec<ScheduleViolation> {
    validate_schedule_with_budget(segments, params, target_period, params.total_impulse)
}

/// As [`validate_schedule`] against an explicit remaining impulse, N*s.
pub fn validate_schedule_with_budget(
    segments: &[ThrustSegment],
    params: &SpacecraftParams,
    target_period: f64,
    available_impulse: f64,
) -> Vec<ScheduleViolation> {
    let mut out = structural_violations(segments, params);
    for (k, pair) in segments.windows(2).enumerate() {
        let gap = pair[1].t_start - pair[0].t_end;
        if gap >= 0.0 && gap + TIME_SLACK < target_period {
            out.push(ScheduleViolation::ChargingGap {
                index: k + 1,
                gap,
                required: target_period,
            });
        }
    }
    let required: f64 = segments.iter().map(|s| s.impulse().max(0.0)).sum();
    if required > available_impulse + 1e-9 {
        out.push(ScheduleViolation::ImpulseBudget {
            required,
            available: available_impulse,
        });
    }
    out
}

/// Duration, firing-limit and overlap checks only.
pub(crate) fn structural_violations(segments: &[ThrustSegment], params: &SpacecraftParams) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    for (index, seg) in segments.iter().enumerate() {
        let duration = seg.duration();
        if !(duration > 0.0 && seg.thrust > 0.0 && duration.is_finite()) {
            out.push(ScheduleViolation::NonPositive { index, duration });
        } else if duration > params.max_firing_duration + TIME_SLACK {
            out.push(ScheduleViolation::FiringLimit {
                index,
                duration,
                limit: params.max_firing_duration,
            });
        }
        if index > 0 {
            let prev = &segments[index - 1];
            if seg.t_start < prev.t_end {
                out.push(ScheduleViolation::Overlap {
                    index,
                    previous_end: prev.t_end,
                    start: seg.t_start,
                });
            }
        }
    }
    out
}
