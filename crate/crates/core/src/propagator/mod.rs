//! Fixed-step RK4 propagation of the target/chaser pair under two-body + J2
//! (+ optional drag and SRP) with piecewise-constant RSW thrust on the chaser.

mod forces;
mod schedule;

pub use forces::{
    acceleration, in_shadow, j2_acceleration, sun_direction, thrust_acceleration, two_body_acceleration, DragConfig,
    ForceModelConfig, SrpConfig, EARTH_ROTATION,
};
pub use schedule::{
    validate_schedule, validate_schedule_with_budget, ScheduleViolation, SpacecraftParams, ThrustAxis, ThrustSegment,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::{EciState, GravityConstants};
use crate::{Vector3, G0};

/// Everything the integrator needs besides the states and the schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSetup {
    pub constants: GravityConstants,
    pub forces: ForceModelConfig,
    pub params: SpacecraftParams,
    /// Nominal RK4 step, s.
    pub step: f64,
}

impl Default for PropagatorSetup {
    fn default() -> Self {
        PropagatorSetup {
            constants: GravityConstants::EARTH,
            forces: ForceModelConfig::default(),
            params: SpacecraftParams::default(),
            step: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiringEventKind {
    Start,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiringEvent {
    pub t: f64,
    pub kind: FiringEventKind,
    pub segment: ThrustSegment,
}

#[derive(Debug, Clone, Copy)]
struct Deriv {
    dr: Vector3,
    dv: Vector3,
    dm: f64,
    ddv: f64,
}

fn derivative(
    t: f64,
    r: Vector3,
    v: Vector3,
    m: f64,
    setup: &PropagatorSetup,
    thrust: Option<&ThrustSegment>,
) -> Result<Deriv> {
    let s = EciState::new(t, r, v, m);
    let acc = acceleration(&s, &setup.constants, &setup.forces, thrust)?;
    let (dm, ddv) = match thrust {
        Some(seg) => (-seg.thrust / (setup.params.isp * G0), seg.thrust / m),
        None => (0.0, 0.0),
    };
    Ok(Deriv {
        dr: v,
        dv: acc,
        dm,
        ddv,
    })
}

/// One RK4 step; returns the new state and the ΔV (m/s) gained over it.
fn rk4_step(s: &EciState, h: f64, setup: &PropagatorSetup, thrust: Option<&ThrustSegment>) -> Result<(EciState, f64)> {
    let t = s.epoch;
    let k1 = derivative(t, s.r, s.v, s.mass, setup, thrust)?;
    let k2 = derivative(
        t + 0.5 * h,
        s.r + 0.5 * h * k1.dr,
        s.v + 0.5 * h * k1.dv,
        s.mass + 0.5 * h * k1.dm,
        setup,
        thrust,
    )?;
    let k3 = derivative(
        t + 0.5 * h,
        s.r + 0.5 * h * k2.dr,
        s.v + 0.5 * h * k2.dv,
        s.mass + 0.5 * h * k2.dm,
        setup,
        thrust,
    )?;
    let k4 = derivative(
        t + h,
        s.r + h * k3.dr,
        s.v + h * k3.dv,
        s.mass + h * k3.dm,
        setup,
        thrust,
    )?;
    let w = h / 6.0;
    let next = EciState::new(
        t + h,
        s.r + w * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr),
        s.v + w * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv),
        s.mass + w * (k1.dm + 2.0 * k2.dm + 2.0 * k3.dm + k4.dm),
    );
    let dv = w * (k1.ddv + 2.0 * k2.ddv + 2.0 * k3.ddv + k4.ddv);
    Ok((next, dv))
}

/// Integrates `state` over `[state.epoch, t_end]` in `ceil(span/step)` equal
/// steps under a fixed thrust condition.
fn integrate_span(
    state: &EciState,
    t_end: f64,
    setup: &PropagatorSetup,
    thrust: Option<&ThrustSegment>,
) -> Result<(EciState, f64)> {
    let span = t_end - state.epoch;
    if span <= 0.0 {
        return Ok((*state, 0.0));
    }
    let k = ((span / setup.step) - 1e-9).ceil().max(1.0) as usize;
    let h = span / k as f64;
    let mut s = *state;
    let mut dv = 0.0;
    for _ in 0..k {
        let (next, d) = rk4_step(&s, h, setup, thrust)?;
        s = next;
        dv += d;
    }
    s.epoch = t_end;
    Ok((s, dv))
}

/// Stateful pair integrator that can be advanced incrementally.
#[derive(Debug, Clone)]
pub struct PairPropagator {
    setup: PropagatorSetup,
    target: EciState,
    chaser: EciState,
    delta_v_used: f64,
    impulse_used: f64,
    events: Vec<FiringEvent>,
}

impl PairPropagator {
    pub fn new(target: EciState, chaser: EciState, setup: PropagatorSetup) -> Result<Self> {
        if target.epoch != chaser.epoch {
            return Err(Error::EpochMismatch {
                target: target.epoch,
                chaser: chaser.epoch,
            });
        }
        if !(setup.step > 0.0 && setup.step.is_finite()) {
            return Err(Error::InvalidState(format!("integration step {} s", setup.step)));
        }
        target.validate(&setup.constants)?;
        chaser.validate(&setup.constants)?;
        Ok(PairPropagator {
            setup,
            target,
            chaser,
            delta_v_used: 0.0,
            impulse_used: 0.0,
            events: Vec::new(),
        })
    }

    pub fn time(&self) -> f64 {
        self.target.epoch
    }

    pub fn target(&self) -> &EciState {
        &self.target
    }

    pub fn chaser(&self) -> &EciState {
        &self.chaser
    }

    pub fn setup(&self) -> &PropagatorSetup {
        &self.setup
    }

    /// ∫F/m dt so far, m/s.
    pub fn delta_v_used(&self) -> f64 {
        self.delta_v_used
    }

    /// N*s
    pub fn impulse_used(&self) -> f64 {
        self.impulse_used
    }

    pub fn impulse_remaining(&self) -> f64 {
        self.setup.params.total_impulse - self.impulse_used
    }

    pub fn events(&self) -> &[FiringEvent] {
        &self.events
    }

    /// Instantaneous velocity change applied to the chaser, km/s (ECI).
    /// Does not draw on the thruster budget.
    pub fn apply_impulse(&mut self, dv_eci: Vector3) {
        self.chaser.v += dv_eci;
    }

    /// Advances both spacecraft to `t_end`, firing whatever parts of
    /// `schedule` fall inside the interval. Step boundaries land on every
    /// segment start and stop.
    pub fn advance_to(&mut self, t_end: f64, schedule: &[ThrustSegment]) -> Result<()> {
        let t0 = self.time();
        if t_end <= t0 {
            return Ok(());
        }
        let mut cuts: Vec<f64> = schedule
            .iter()
            .flat_map(|s| [s.t_start, s.t_end])
            .filter(|&t| t > t0 && t < t_end)
            .collect();
        cuts.push(t_end);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut a = t0;
        for b in cuts {
            let mid = 0.5 * (a + b);
            let active = schedule.iter().find(|s| s.contains(mid)).copied();
            if let Some(seg) = active {
                if a == seg.t_start || (a - seg.t_start).abs() < 1e-9 {
                    let available = self.impulse_remaining();
                    if seg.impulse() > available + 1e-9 {
                        return Err(Error::ImpulseBudget {
                            segment: seg,
                            required: seg.impulse(),
                            available,
                        });
                    }
                    self.events.push(FiringEvent {
                        t: a,
                        kind: FiringEventKind::Start,
                        segment: seg,
                    });
                }
            }
            let (target, _) = integrate_span(&self.target, b, &self.setup, None)?;
            let (chaser, dv) = integrate_span(&self.chaser, b, &self.setup, active.as_ref())?;
            self.target = target;
            self.chaser = chaser;
            self.delta_v_used += dv;
            if let Some(seg) = active {
                self.impulse_used += seg.thrust * (b - a);
                if (b - seg.t_end).abs() < 1e-9 {
                    self.events.push(FiringEvent {
                        t: b,
                        kind: FiringEventKind::Stop,
                        segment: seg,
                    });
                }
            }
            a = b;
        }
        self.chaser.validate(&self.setup.constants)?;
        self.target.validate(&self.setup.constants)?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub times: Vec<f64>,
    pub target: Vec<EciState>,
    pub chaser: Vec<EciState>,
    /// Cumulative ΔV at each sample, m/s.
    pub delta_v: Vec<f64>,
    pub delta_v_used: f64,
    /// N*s
    pub impulse_used: f64,
    pub events: Vec<FiringEvent>,
}

/// Output grid `t0, t0 + dt, ...` closed by `t_end`.
pub fn sample_grid(t0: f64, t_end: f64, dt: f64) -> Vec<f64> {
    let mut out = vec![t0];
    if t_end <= t0 {
        return out;
    }
    let k = ((t_end - t0) / dt - 1e-9).ceil() as usize;
    for j in 1..k {
        out.push(t0 + j as f64 * dt);
    }
    out.push(t_end);
    out
}

/// Propagates the pair from their common epoch to `t_end`, sampling every
/// `sample_interval` seconds (defaults to the integration step).
pub fn propagate(
    target: &EciState,
    chaser: &EciState,
    schedule: &[ThrustSegment],
    setup: &PropagatorSetup,
    t_end: f64,
    sample_interval: Option<f64>,
) -> Result<PropagationResult> {
    let violations = schedule::structural_violations(schedule, &setup.params);
    if !violations.is_empty() {
        return Err(Error::Schedule(violations));
    }
    let mut spent = 0.0;
    for seg in schedule {
        spent += seg.impulse();
        if spent > setup.params.total_impulse + 1e-9 {
            return Err(Error::ImpulseBudget {
                segment: *seg,
                required: seg.impulse(),
                available: setup.params.total_impulse - (spent - seg.impulse()),
            });
        }
    }
    let mut prop = PairPropagator::new(*target, *chaser, *setup)?;
    let grid = sample_grid(target.epoch, t_end, sample_interval.unwrap_or(setup.step));
    let mut res = PropagationResult {
        times: Vec::with_capacity(grid.len()),
        target: Vec::with_capacity(grid.len()),
        chaser: Vec::with_capacity(grid.len()),
        delta_v: Vec::with_capacity(grid.len()),
        delta_v_used: 0.0,
        impulse_used: 0.0,
        events: Vec::new(),
    };
    for t in grid {
        prop.advance_to(t, schedule)?;
        res.times.push(t);
        res.target.push(*prop.target());
        res.chaser.push(*prop.chaser());
        res.delta_v.push(prop.delta_v_used());
    }
    res.delta_v_used = prop.delta_v_used();
    res.impulse_used = prop.impulse_used();
    res.events = prop.events().to_vec();
    Ok(res)
}
