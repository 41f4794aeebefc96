//! Mean-element correction blocks. Each planner turns a desired change of
//! one relative mean element into a firing schedule that respects the
//! firing limit and the charging gaps.

mod model;
mod planners;

pub(crate) use model::{along_track_angle, relative, relative_ecc_vector, MeanOrbitModel};
pub use planners::{
    ecc_op_delta_e, incl_firing_delta_i, plan_arglat_correction, plan_eccentricity_correction,
    plan_inclination_correction, plan_raan_correction,
};

use serde::{Deserialize, Serialize};

use crate::orbit::{GravityConstants, OrbitalElements, RelativeElements};
use crate::propagator::{SpacecraftParams, ThrustSegment};
use crate::DAY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    RaanCor,
    UCor,
    ICor,
    ECor,
}

impl BlockKind {
    pub fn label(self) -> &'static str {
        match self {
            BlockKind::RaanCor => "raan_cor",
            BlockKind::UCor => "u_cor",
            BlockKind::ICor => "i_cor",
            BlockKind::ECor => "e_cor",
        }
    }
}

/// Along-track shift requested from an eccentricity correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlongTrackBias {
    /// Balanced operations, no net shift.
    None,
    /// Move the ellipse center toward +y (operation 2 only).
    Positive,
    /// Move the ellipse center toward -y (operation 1 only).
    Negative,
}

/// Durations of one eccentricity operation pair. Quadrature firings last
/// half of their operation's main firing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EccOpParams {
    /// Perigee-centered +S firing, s.
    pub t_e1: f64,
    /// Apogee-centered -S firing, s.
    pub t_e2: f64,
    pub include_op1: bool,
    pub include_op2: bool,
}

/// Convergence tolerances. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deadbands {
    /// km
    pub da: f64,
    pub draan: f64,
    pub du: f64,
    pub di: f64,
    pub de: f64,
}

impl Default for Deadbands {
    fn default() -> Self {
        Deadbands {
            da: 0.5,
            draan: 0.02f64.to_radians(),
            du: 0.1f64.to_radians(),
            di: 0.002f64.to_radians(),
            de: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub deadbands: Deadbands,
    /// Semi-major axis offset held during the RAAN coast, km.
    pub raan_hold_da: f64,
    /// Semi-major axis offset held during the phasing coast, km.
    pub arglat_hold_da: f64,
    /// s
    pub raan_coast_cap: f64,
    /// s
    pub arglat_coast_cap: f64,
    /// Extra slack added to every charging gap, s.
    pub gap_margin: f64,
    /// Upper bound on eccentricity operations per schedule.
    pub max_ecc_ops: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            deadbands: Deadbands::default(),
            raan_hold_da: 7.4,
            arglat_hold_da: 2.5,
            raan_coast_cap: 40.0 * DAY,
            arglat_coast_cap: 5.0 * DAY,
            gap_margin: 60.0,
            max_ecc_ops: 2,
        }
    }
}

/// Inputs shared by every planner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanningContext {
    /// Target mean elements at `epoch`.
    pub target: OrbitalElements,
    /// Chaser mean elements at `epoch`.
    pub chaser: OrbitalElements,
    pub epoch: f64,
    pub chaser_mass: f64,
    /// No firing may begin before this time.
    pub earliest_start: f64,
    pub constants: GravityConstants,
    pub params: SpacecraftParams,
    pub config: PlannerConfig,
}

impl PlanningContext {
    pub fn relative(&self) -> RelativeElements {
        RelativeElements::between(&self.target, &self.chaser)
    }

    /// Target and chaser planning models coasted to `earliest_start`.
    pub(crate) fn models(&self) -> (MeanOrbitModel, MeanOrbitModel) {
        let mut t = MeanOrbitModel::new(&self.target, self.epoch, 1.0, &self.constants);
        let mut c = MeanOrbitModel::new(&self.chaser, self.epoch, self.chaser_mass, &self.constants);
        let start = self.earliest_start.max(self.epoch);
        t.coast(start);
        c.coast(start);
        (t, c)
    }

    /// Relative mean elements coasted to `earliest_start`.
    pub fn relative_at_start(&self) -> RelativeElements {
        let (t, c) = self.models();
        relative(&t, &c)
    }

    /// Along-track center `a (Δλ + cos i ΔΩ)` at `earliest_start`, km.
    pub fn along_track_offset(&self) -> f64 {
        let (t, c) = self.models();
        t.a * along_track_angle(&t, &c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiringSchedule {
    pub block: BlockKind,
    pub segments: Vec<ThrustSegment>,
    /// First-order change of the relative mean elements at the end of the
    /// schedule.
    pub predicted: RelativeElements,
    /// Epoch of the elements the plan was built from.
    pub planned_at: f64,
}

impl FiringSchedule {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn end(&self) -> Option<f64> {
        self.segments.last().map(|s| s.t_end)
    }

    pub fn impulse(&self) -> f64 {
        self.segments.iter().map(|s| s.impulse()).sum()
    }
}

/// First-order effect of `segments` on the chaser's mean elements: forced
/// minus unforced planning model at the end of the last segment.
pub fn predict_effect(
    segments: &[ThrustSegment],
    chaser: &OrbitalElements,
    epoch: f64,
    mass: f64,
    params: &SpacecraftParams,
    constants: &GravityConstants,
) -> RelativeElements {
    let Some(end) = segments.iter().map(|s| s.t_end).reduce(f64::max) else {
        return RelativeElements::default();
    };
    let end = end.max(epoch);
    let mut free = MeanOrbitModel::new(chaser, epoch, mass, constants);
    let mut forced = free;
    free.coast(end);
    forced.advance(end, segments, params);
    relative(&free, &forced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::ElementFlavor;
    use crate::propagator::ThrustAxis;

    #[test]
    fn empty_schedule_predicts_nothing() {
        let oe = OrbitalElements::from_degrees(6925.68, 0.0019, 35.008, 3.006, 0.0, 0.0, ElementFlavor::Mean).unwrap();
        let d = predict_effect(
            &[],
            &oe,
            0.0,
            4.0,
            &SpacecraftParams::default(),
            &GravityConstants::EARTH,
        );
        assert!(d.is_zero());
    }

    #[test]
    fn along_track_firing_prediction() {
        let oe = OrbitalElements::from_degrees(6925.68, 0.0019, 35.008, 3.006, 0.0, 0.0, ElementFlavor::Mean).unwrap();
        let seg = ThrustSegment::new(0.0, 900.0, ThrustAxis::PlusS, 6e-3);
        let d = predict_effect(
            &[seg],
            &oe,
            0.0,
            4.0,
            &SpacecraftParams::default(),
            &GravityConstants::EARTH,
        );
        assert!((d.da - 2.465).abs() < 0.01, "{}", d.da);
    }
}
