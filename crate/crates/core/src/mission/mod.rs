//! The four-phase control loop: RAAN correction, along-track approach,
//! safety ellipse setup, then unforced circumnavigation. Decisions are made
//! only on latency-held navigation updates.

mod navigation;

pub use navigation::{navigation, NavClock, NavUpdate, NavigationModel};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maneuver::{
    plan_arglat_correction, plan_eccentricity_correction, plan_inclination_correction, plan_raan_correction,
    AlongTrackBias, BlockKind, FiringSchedule, PlannerConfig, PlanningContext,
};
use crate::orbit::{
    cart_to_elements, eci_to_relative, elements_to_cart, mean_to_osc, osc_to_mean, rsw_frame, EciState,
    OrbitalElements, RelativeElements,
};
use crate::propagator::{
    validate_schedule_with_budget, PairPropagator, PropagatorSetup, ScheduleViolation, ThrustSegment,
};
use crate::relative::{measure_ellipse, relative_elements_to_geometry, CwContext, EllipseGeometry, RelativeState};
use crate::{Vector3, DAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Commissioning,
    Raan,
    Approach,
    EllipseSetup,
    Circumnavigation,
    Done,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Commissioning => "commissioning",
            Phase::Raan => "raan",
            Phase::Approach => "approach",
            Phase::EllipseSetup => "ellipse_setup",
            Phase::Circumnavigation => "circumnavigation",
            Phase::Done => "done",
        }
    }

    pub fn from_label(label: &str) -> Option<Phase> {
        [
            Phase::Commissioning,
            Phase::Raan,
            Phase::Approach,
            Phase::EllipseSetup,
            Phase::Circumnavigation,
            Phase::Done,
        ]
        .into_iter()
        .find(|p| p.label() == label)
    }

    fn next(self) -> Phase {
        match self {
            Phase::Commissioning => Phase::Raan,
            Phase::Raan => Phase::Approach,
            Phase::Approach => Phase::EllipseSetup,
            Phase::EllipseSetup => Phase::Circumnavigation,
            Phase::Circumnavigation | Phase::Done => Phase::Done,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Final relative mean elements the controller steers to. `Δa`, `ΔΩ` and
/// `Δu` are always driven to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesiredRelativeElements {
    pub de: f64,
    /// rad
    pub di: f64,
}

impl Default for DesiredRelativeElements {
    fn default() -> Self {
        DesiredRelativeElements {
            de: 0.001,
            di: 0.02f64.to_radians(),
        }
    }
}

/// Initial chaser state relative to the target at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Separation {
    /// Instantaneous ejection; `direction` is in the target RSW frame and is
    /// normalized before use.
    Impulse { delta_v: f64, direction: Vector3 },
    /// Chaser mean elements are the target's plus this offset. `du` shifts
    /// the mean anomaly; `dlambda` is ignored.
    MeanOffset(RelativeElements),
}

impl Default for Separation {
    fn default() -> Self {
        // Fitted to a 2.65 km drop in semi-major axis with |Δe| ≈ 4.3e-4.
        Separation::Impulse {
            delta_v: 1.489f64.hypot(1.451),
            direction: Vector3::new(1.489, -1.451, 0.0).normalize(),
        }
    }
}

/// Longest time each controlled phase may take before the run aborts, s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseLimits {
    pub raan: f64,
    pub approach: f64,
    pub ellipse_setup: f64,
}

impl Default for PhaseLimits {
    fn default() -> Self {
        PhaseLimits {
            raan: 60.0 * DAY,
            approach: 20.0 * DAY,
            ellipse_setup: 20.0 * DAY,
        }
    }
}

impl PhaseLimits {
    fn get(&self, phase: Phase) -> Option<f64> {
        match phase {
            Phase::Raan => Some(self.raan),
            Phase::Approach => Some(self.approach),
            Phase::EllipseSetup => Some(self.ellipse_setup),
            _ => None,
        }
    }
}

/// Everything a mission run needs, in internal units (km, rad, s).
#[derive(Debug, Clone, PartialEq)]
pub struct MissionConfig {
    /// Osculating target elements at t = 0.
    pub target: OrbitalElements,
    /// kg
    pub target_mass: f64,
    pub separation: Separation,
    pub setup: PropagatorSetup,
    pub planner: PlannerConfig,
    pub desired: DesiredRelativeElements,
    pub navigation: NavigationModel,
    pub commissioning: f64,
    pub circumnavigation: f64,
    /// Along-track separation that ends the approach phase, km.
    pub approach_threshold: f64,
    /// Along-track distance the approach phase stops short of, km.
    pub approach_reserve: f64,
    pub limits: PhaseLimits,
    /// Minimum delay between a decision and the first firing it commands, s.
    pub lead_time: f64,
    /// Spacing of the recorded time series, s.
    pub output_interval: f64,
}

impl MissionConfig {
    pub fn new(target: OrbitalElements) -> Self {
        MissionConfig {
            target,
            target_mass: 4.0,
            separation: Separation::default(),
            setup: PropagatorSetup::default(),
            planner: PlannerConfig::default(),
            desired: DesiredRelativeElements::default(),
            navigation: NavigationModel::default(),
            commissioning: 30.0 * DAY,
            circumnavigation: 30.0 * DAY,
            approach_threshold: 50.0,
            approach_reserve: 30.0,
            limits: PhaseLimits::default(),
            lead_time: 600.0,
            output_interval: 60.0,
        }
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = self.target.validate() {
            out.push(format!("target: {e}"));
        }
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("{name} must be positive, got {v}"));
            }
        };
        positive("target_mass", self.target_mass);
        positive("desired.de", self.desired.de);
        positive("desired.di", self.desired.di);
        positive("step", self.setup.step);
        positive("output_interval", self.output_interval);
        positive("approach_threshold", self.approach_threshold);
        positive("limits.raan", self.limits.raan);
        positive("limits.approach", self.limits.approach);
        positive("limits.ellipse_setup", self.limits.ellipse_setup);
        let mut non_negative = |name: &str, v: f64| {
            if !(v >= 0.0 && v.is_finite()) {
                out.push(format!("{name} must be non-negative, got {v}"));
            }
        };
        non_negative("commissioning", self.commissioning);
        non_negative("circumnavigation", self.circumnavigation);
        non_negative("approach_reserve", self.approach_reserve);
        non_negative("lead_time", self.lead_time);
        non_negative("navigation.period", self.navigation.period);
        non_negative("navigation.jitter", self.navigation.jitter);
        if self.approach_reserve >= self.approach_threshold {
            out.push(format!(
                "approach_reserve ({} km) must be below approach_threshold ({} km)",
                self.approach_reserve, self.approach_threshold
            ));
        }
        if let Separation::Impulse { delta_v, direction } = self.separation {
            if !(delta_v >= 0.0 && delta_v.is_finite()) {
                out.push(format!("separation.delta_v must be non-negative, got {delta_v}"));
            }
            if delta_v > 0.0 && (direction.norm() == 0.0 || !direction.norm().is_finite()) {
                out.push("separation.direction must be a nonzero vector".into());
            }
        }
        out.extend(
            self.setup
                .params
                .validate()
                .into_iter()
                .map(|m| format!("spacecraft: {m}")),
        );
        out.extend(self.setup.forces.validate().into_iter().map(|m| format!("forces: {m}")));
        out
    }

    pub fn initial_states(&self) -> Result<(EciState, EciState)> {
        let c = &self.setup.constants;
        let target = elements_to_cart(&self.target, c, 0.0, self.target_mass)?;
        let chaser = match self.separation {
            Separation::Impulse { delta_v, direction } => {
                let mut s = target;
                s.mass = self.setup.params.wet_mass;
                if delta_v > 0.0 {
                    let dv_rsw = direction.normalize() * (delta_v / 1000.0);
                    s.v += rsw_frame(&target)?.to_eci(&dv_rsw);
                }
                s
            }
            Separation::MeanOffset(d) => {
                let tm = osc_to_mean(&self.target, c)?;
                let mut cm = OrbitalElements::new(
                    tm.a + d.da,
                    tm.e + d.de,
                    tm.i + d.di,
                    tm.raan + d.draan,
                    tm.argp,
                    tm.ta,
                    tm.flavor,
                )?;
                cm = cm.with_mean_anomaly(cm.mean_anomaly() + d.du);
                elements_to_cart(&mean_to_osc(&cm, c)?, c, 0.0, self.setup.params.wet_mass)?
            }
        };
        Ok((target, chaser))
    }
}

/// Sub-stage of the ellipse setup phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetupStage {
    Inclination,
    Eccentricity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MissionEvent {
    PhaseChange {
        t: f64,
        from: Phase,
        to: Phase,
    },
    Schedule {
        t: f64,
        nav_epoch: f64,
        phase: Phase,
        block: BlockKind,
        firings: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionState {
    pub phase: Phase,
    pub setup_stage: SetupStage,
    pub phase_start: f64,
    /// Relative mean elements from the last navigation update.
    pub estimate: Option<RelativeElements>,
    /// m/s
    pub delta_v_used: f64,
    /// m/s
    pub delta_v_remaining: f64,
    /// N*s
    pub impulse_remaining: f64,
    /// Last commanded firing, for the charging gap into the next block.
    pub last_segment: Option<ThrustSegment>,
    pub events: Vec<MissionEvent>,
}

impl MissionState {
    pub fn new(config: &MissionConfig) -> Self {
        MissionState {
            phase: Phase::Commissioning,
            setup_stage: SetupStage::Inclination,
            phase_start: 0.0,
            estimate: None,
            delta_v_used: 0.0,
            delta_v_remaining: config.setup.params.delta_v_capacity(),
            impulse_remaining: config.setup.params.total_impulse,
            last_segment: None,
            events: Vec::new(),
        }
    }

    fn transition(&mut self, t: f64) {
        let to = self.phase.next();
        self.events.push(MissionEvent::PhaseChange {
            t,
            from: self.phase,
            to,
        });
        self.phase = to;
        self.phase_start = t;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseStep {
    pub state: MissionState,
    pub schedule: Option<FiringSchedule>,
}

fn abort(phase: Phase, epoch: f64, reason: impl Into<String>) -> Error {
    Error::MissionAbort {
        phase: phase.label().into(),
        epoch,
        reason: reason.into(),
    }
}

fn planning_context(state: &MissionState, nav: &NavUpdate, t: f64, config: &MissionConfig) -> PlanningContext {
    let c = &config.setup.constants;
    let gap_ready = state.last_segment.map_or(f64::NEG_INFINITY, |s| {
        s.t_end + nav.target.period(c.mu) + config.planner.gap_margin
    });
    PlanningContext {
        target: nav.target,
        chaser: nav.chaser,
        epoch: nav.epoch,
        chaser_mass: nav.chaser_mass,
        earliest_start: (t + config.lead_time).max(gap_ready),
        constants: *c,
        params: config.setup.params,
        config: config.planner,
    }
}

/// Impulse that would spend exactly `dv` m/s from `mass` kg.
fn impulse_for_delta_v(dv: f64, mass: f64, exhaust_velocity: f64) -> f64 {
    mass * exhaust_velocity * (1.0 - (-dv.max(0.0) / exhaust_velocity).exp())
}

fn check_schedule(
    state: &MissionState,
    nav: &NavUpdate,
    t: f64,
    schedule: &FiringSchedule,
    config: &MissionConfig,
) -> Result<()> {
    let params = &config.setup.params;
    let period = nav.target.period(config.setup.constants.mu);
    let available = state.impulse_remaining.min(impulse_for_delta_v(
        state.delta_v_remaining,
        nav.chaser_mass,
        params.exhaust_velocity(),
    ));
    let mut violations = validate_schedule_with_budget(&schedule.segments, params, period, available);
    if let (Some(prev), Some(first)) = (state.last_segment, schedule.segments.first()) {
        let gap = first.t_start - prev.t_end;
        if gap < period {
            violations.push(ScheduleViolation::ChargingGap {
                index: 0,
                gap,
                required: period,
            });
        }
    }
    if violations.is_empty() {
        return Ok(());
    }
    let budget = violations
        .iter()
        .any(|v| matches!(v, ScheduleViolation::ImpulseBudget { .. }));
    let reason = if budget {
        format!(
            "delta-v budget exhausted: {} block needs {:.3} N*s, {:.3} N*s ({:.2} m/s) left",
            schedule.block.label(),
            schedule.impulse(),
            available,
            state.delta_v_remaining
        )
    } else {
        format!(
            "{} schedule rejected: {}",
            schedule.block.label(),
            Error::Schedule(violations)
        )
    };
    Err(abort(state.phase, t, reason))
}

/// One controller decision at time `t` using only `nav`. Passes through
/// every phase whose exit condition already holds, then plans at most one
/// block for the phase it stops in.
pub fn step_phase(state: &MissionState, nav: &NavUpdate, t: f64, config: &MissionConfig) -> Result<PhaseStep> {
    let mut s = state.clone();
    s.estimate = Some(nav.relative());
    let db = config.planner.deadbands;
    loop {
        if let Some(limit) = config.limits.get(s.phase) {
            if t - s.phase_start > limit {
                return Err(abort(
                    s.phase,
                    t,
                    format!("phase exceeded its {:.1}-day limit", limit / DAY),
                ));
            }
        }
        let ctx = planning_context(&s, nav, t, config);
        let now = PlanningContext {
            earliest_start: t,
            ..ctx
        };
        let rel = now.relative_at_start();
        let planned = match s.phase {
            Phase::Done => {
                return Ok(PhaseStep {
                    state: s,
                    schedule: None,
                })
            }
            Phase::Commissioning => {
                if t >= config.commissioning {
                    s.transition(t);
                    continue;
                }
                None
            }
            Phase::Circumnavigation => {
                if t >= s.phase_start + config.circumnavigation {
                    s.transition(t);
                    continue;
                }
                None
            }
            Phase::Raan => {
                if rel.draan.abs() < db.draan && rel.da.abs() < db.da {
                    s.transition(t);
                    continue;
                }
                Some(plan_raan_correction(&ctx))
            }
            Phase::Approach => {
                if now.along_track_offset().abs() < config.approach_threshold && rel.da.abs() < db.da {
                    s.transition(t);
                    continue;
                }
                Some(plan_arglat_correction(&ctx, config.approach_reserve))
            }
            Phase::EllipseSetup => match s.setup_stage {
                SetupStage::Inclination => {
                    let sched = plan_inclination_correction(&ctx, config.desired.di);
                    if matches!(&sched, Ok(x) if x.is_empty()) {
                        s.setup_stage = SetupStage::Eccentricity;
                        continue;
                    }
                    Some(sched)
                }
                SetupStage::Eccentricity => {
                    // One operation per decision, pushing the center back
                    // toward the target.
                    let bias = if ctx.along_track_offset() >= 0.0 {
                        AlongTrackBias::Negative
                    } else {
                        AlongTrackBias::Positive
                    };
                    let mut one = ctx;
                    one.config.max_ecc_ops = 1;
                    let sched = plan_eccentricity_correction(&one, config.desired.de, bias);
                    if matches!(&sched, Ok(x) if x.is_empty()) {
                        s.transition(t);
                        continue;
                    }
                    Some(sched)
                }
            },
        };
        let schedule = match planned {
            None => None,
            Some(Err(e)) => return Err(abort(s.phase, t, e.to_string())),
            Some(Ok(x)) if x.is_empty() => None,
            Some(Ok(x)) => {
                check_schedule(&s, nav, t, &x, config)?;
                s.events.push(MissionEvent::Schedule {
                    t,
                    nav_epoch: nav.epoch,
                    phase: s.phase,
                    block: x.block,
                    firings: x.segments.len(),
                });
                s.last_segment = x.segments.last().copied();
                Some(x)
            }
        };
        return Ok(PhaseStep { state: s, schedule });
    }
}

/// Recorded state of both spacecraft.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissionSample {
    pub t: f64,
    pub phase: Phase,
    pub target: EciState,
    pub chaser: EciState,
    pub relative: RelativeState,
    /// Cumulative thrust Δv, m/s.
    pub delta_v: f64,
}

/// Time span of one controlled phase and the Δv spent in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub phase: Phase,
    pub start: f64,
    pub end: f64,
    /// m/s
    pub delta_v: f64,
}

/// Truth mean relative elements when a phase ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionSnapshot {
    pub t: f64,
    pub from: Phase,
    pub to: Phase,
    pub relative: RelativeElements,
    /// `a (Δλ + cos i ΔΩ)`, km.
    pub along_track_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutedBlock {
    pub phase: Phase,
    pub decided_at: f64,
    pub nav_epoch: f64,
    pub schedule: FiringSchedule,
}

/// Controller invocation: when it ran and the epoch of the data it saw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub t: f64,
    pub nav_epoch: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MissionOutcome {
    Completed,
    Aborted { phase: Phase, epoch: f64, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionReport {
    pub outcome: MissionOutcome,
    pub phases: Vec<PhaseRecord>,
    pub transitions: Vec<TransitionSnapshot>,
    pub blocks: Vec<ExecutedBlock>,
    pub decisions: Vec<Decision>,
    pub events: Vec<MissionEvent>,
    pub samples: Vec<MissionSample>,
    /// Truth mean relative elements just after separation.
    pub initial_relative: RelativeElements,
    /// Truth mean relative elements at the end of the run.
    pub final_relative: RelativeElements,
    /// Target mean elements at the end of the run.
    pub final_target: OrbitalElements,
    /// m/s
    pub delta_v_used: f64,
    /// N*s
    pub impulse_used: f64,
    pub initial_mass: f64,
    pub final_mass: f64,
    /// Ellipse over the first period of circumnavigation.
    pub nominal_geometry: Option<EllipseGeometry>,
    /// Ellipse over the last period; drift averaged over the whole
    /// circumnavigation.
    pub final_geometry: Option<EllipseGeometry>,
    /// First-order geometry implied by `final_relative`.
    pub element_geometry: EllipseGeometry,
}

impl MissionReport {
    pub fn is_completed(&self) -> bool {
        self.outcome == MissionOutcome::Completed
    }

    /// Samples recorded while `phase` was active.
    pub fn samples_in(&self, phase: Phase) -> impl Iterator<Item = &MissionSample> {
        self.samples.iter().filter(move |s| s.phase == phase)
    }

    pub fn into_result(self) -> Result<MissionReport> {
        match &self.outcome {
            MissionOutcome::Completed => Ok(self),
            MissionOutcome::Aborted { phase, epoch, reason } => Err(abort(*phase, *epoch, reason.clone())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDeltaV {
    pub phase: Phase,
    /// m/s
    pub delta_v: f64,
}

/// Δv per phase, commissioning first. Sums to the run's total.
pub fn delta_v_ledger(report: &MissionReport) -> Vec<PhaseDeltaV> {
    let controlled: f64 = report.phases.iter().map(|r| r.delta_v).sum();
    let mut out = vec![PhaseDeltaV {
        phase: Phase::Commissioning,
        delta_v: report.delta_v_used - controlled,
    }];
    for p in [
        Phase::Raan,
        Phase::Approach,
        Phase::EllipseSetup,
        Phase::Circumnavigation,
    ] {
        let delta_v = report.phases.iter().filter(|r| r.phase == p).map(|r| r.delta_v).sum();
        out.push(PhaseDeltaV { phase: p, delta_v });
    }
    out
}

fn truth_relative(
    target: &EciState,
    chaser: &EciState,
    config: &MissionConfig,
) -> Result<(RelativeElements, OrbitalElements, f64)> {
    let c = &config.setup.constants;
    let t = osc_to_mean(&cart_to_elements(target, c)?, c)?;
    let ch = osc_to_mean(&cart_to_elements(chaser, c)?, c)?;
    let d = RelativeElements::between(&t, &ch);
    Ok((d, t, t.a * d.along_track_angle(t.i)))
}

fn sample(prop: &PairPropagator, phase: Phase) -> Result<MissionSample> {
    Ok(MissionSample {
        t: prop.time(),
        phase,
        target: *prop.target(),
        chaser: *prop.chaser(),
        relative: eci_to_relative(prop.target(), prop.chaser())?,
        delta_v: prop.delta_v_used(),
    })
}

/// Flies the whole mission. Budget, duration and propagation failures end
/// the run early with [`MissionOutcome::Aborted`]; only invalid input is
/// returned as an error.
pub fn run_mission(config: &MissionConfig) -> Result<MissionReport> {
    let problems = config.validate();
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    let c = config.setup.constants;
    let (target0, chaser0) = config.initial_states()?;
    let mut prop = PairPropagator::new(target0, chaser0, config.setup)?;
    let (initial_relative, _, _) = truth_relative(&target0, &chaser0, config)?;

    let mut state = MissionState::new(config);
    let zero_latency = config.navigation.period <= 0.0;
    let mut clock = config.navigation.clock(0.0);
    let mut next_nav = if zero_latency { Some(0.0) } else { clock.next() };
    let dt = config.output_interval;
    let mut k_sample: u64 = 0;
    let mut next_sample = 0.0;
    let mut deadline = Some(config.commissioning);

    let mut samples = Vec::new();
    let mut segments: Vec<ThrustSegment> = Vec::new();
    let mut blocks = Vec::new();
    let mut decisions = Vec::new();
    let mut phases: Vec<PhaseRecord> = Vec::new();
    let mut open: Option<(Phase, f64, f64)> = None;
    let mut transitions = Vec::new();
    let mut last_nav: Option<NavUpdate> = None;
    let mut block_end = f64::NEG_INFINITY;
    let mut outcome = MissionOutcome::Completed;

    loop {
        let t = [Some(next_sample), next_nav, deadline]
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min);
        if let Err(e) = prop.advance_to(t, &segments) {
            outcome = MissionOutcome::Aborted {
                phase: state.phase,
                epoch: prop.time(),
                reason: e.to_string(),
            };
            break;
        }
        if t == next_sample {
            samples.push(sample(&prop, state.phase)?);
            k_sample += 1;
            next_sample = k_sample as f64 * dt;
        }
        let mut decide = false;
        if next_nav == Some(t) {
            next_nav = if zero_latency { Some(next_sample) } else { clock.next() };
            let due = next_nav.unwrap_or(f64::INFINITY);
            last_nav = Some(NavUpdate::from_states(prop.target(), prop.chaser(), due, &c)?);
            decide = t >= block_end;
        }
        if deadline == Some(t) {
            deadline = None;
            decide = true;
        }
        if !decide {
            continue;
        }
        let Some(nav) = last_nav else { continue };
        decisions.push(Decision {
            t,
            nav_epoch: nav.epoch,
            phase: state.phase,
        });
        state.delta_v_used = prop.delta_v_used();
        state.delta_v_remaining = config.setup.params.delta_v_capacity() - prop.delta_v_used();
        state.impulse_remaining = prop.impulse_remaining();
        let before = state.events.len();
        let step = step_phase(&state, &nav, t, config);
        let step = match step {
            Ok(s) => s,
            Err(Error::MissionAbort { phase, reason, .. }) => {
                outcome = MissionOutcome::Aborted {
                    phase: Phase::from_label(&phase).unwrap_or(state.phase),
                    epoch: t,
                    reason,
                };
                break;
            }
            Err(e) => return Err(e),
        };
        state = step.state;
        for ev in &state.events[before..] {
            if let MissionEvent::PhaseChange { t, from, to } = *ev {
                let (relative, _, along) = truth_relative(prop.target(), prop.chaser(), config)?;
                transitions.push(TransitionSnapshot {
                    t,
                    from,
                    to,
                    relative,
                    along_track_offset: along,
                });
                if let Some((phase, start, dv0)) = open.take() {
                    phases.push(PhaseRecord {
                        phase,
                        start,
                        end: t,
                        delta_v: prop.delta_v_used() - dv0,
                    });
                }
                if to != Phase::Done {
                    open = Some((to, t, prop.delta_v_used()));
                }
                if to == Phase::Circumnavigation {
                    deadline = Some(t + config.circumnavigation);
                }
            }
        }
        if let Some(schedule) = step.schedule {
            block_end = schedule.end().unwrap_or(t);
            segments.extend(schedule.segments.iter().copied());
            blocks.push(ExecutedBlock {
                phase: state.phase,
                decided_at: t,
                nav_epoch: nav.epoch,
                schedule,
            });
        }
        if state.phase == Phase::Done {
            break;
        }
    }

    let end = prop.time();
    if samples.last().is_none_or(|s| s.t < end) {
        samples.push(sample(&prop, state.phase)?);
    }
    if let Some((phase, start, dv0)) = open.take() {
        phases.push(PhaseRecord {
            phase,
            start,
            end,
            delta_v: prop.delta_v_used() - dv0,
        });
    }

    let (final_relative, final_target, _) = truth_relative(prop.target(), prop.chaser(), config)?;
    let circ: Vec<RelativeState> = samples
        .iter()
        .filter(|s| s.phase == Phase::Circumnavigation)
        .map(|s| s.relative)
        .collect();
    let cw = CwContext::from_semi_major_axis(final_target.a, c.mu)?;
    let final_geometry = measure_ellipse(&circ, &cw).ok();
    let nominal_geometry = circ.first().and_then(|first| {
        let stop = first.epoch + cw.period();
        let head: Vec<RelativeState> = circ.iter().copied().take_while(|s| s.epoch <= stop + dt).collect();
        measure_ellipse(&head, &cw).ok()
    });

    Ok(MissionReport {
        outcome,
        phases,
        transitions,
        blocks,
        decisions,
        events: state.events,
        samples,
        initial_relative,
        final_relative,
        final_target,
        delta_v_used: prop.delta_v_used(),
        impulse_used: prop.impulse_used(),
        initial_mass: chaser0.mass,
        final_mass: prop.chaser().mass,
        nominal_geometry,
        final_geometry,
        element_geometry: relative_elements_to_geometry(&final_relative, &final_target),
    })
}
