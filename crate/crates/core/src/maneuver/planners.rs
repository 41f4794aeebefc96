use std::f64::consts::{FRAC_PI_2, PI};

use super::{
    along_track_angle, predict_effect, relative_ecc_vector, AlongTrackBias, BlockKind, EccOpParams, FiringSchedule,
    MeanOrbitModel, PlanningContext,
};
use crate::angles::{sinc, wrap_pi};
use crate::error::{Error, Result};
use crate::propagator::{ThrustAxis, ThrustSegment};
use crate::DAY;

fn accel(ctx: &PlanningContext, mass: f64) -> f64 {
    ctx.params.thrust / mass / 1000.0
}

fn finish(ctx: &PlanningContext, block: BlockKind, segments: Vec<ThrustSegment>) -> FiringSchedule {
    let predicted = predict_effect(
        &segments,
        &ctx.chaser,
        ctx.epoch,
        ctx.chaser_mass,
        &ctx.params,
        &ctx.constants,
    );
    FiringSchedule {
        block,
        segments,
        predicted,
        planned_at: ctx.epoch,
    }
}

/// Δi of one node-centered cross-track firing of `duration` seconds.
pub fn incl_firing_delta_i(accel_kms2: f64, speed: f64, n: f64, duration: f64) -> f64 {
    accel_kms2 * duration / speed * sinc(0.5 * n * duration)
}

/// Δe of one eccentricity operation whose main firing lasts `duration`.
pub fn ecc_op_delta_e(accel_kms2: f64, speed: f64, n: f64, duration: f64) -> f64 {
    2.0 * incl_firing_delta_i(accel_kms2, speed, n, duration)
}

/// Splits `total` into full firings plus a trimmed one when the remainder
/// exceeds `deadband`. `per_firing` must be increasing on `[0, max]`.
fn split_firings(total: f64, deadband: f64, max: f64, per_firing: impl Fn(f64) -> f64) -> Vec<f64> {
    let full = per_firing(max);
    let n_full = (total / full).floor() as usize;
    let rem = total - n_full as f64 * full;
    let mut out = vec![max; n_full];
    if rem > deadband || (n_full == 0 && rem > 0.0) {
        let (mut lo, mut hi) = (0.0, max);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if per_firing(mid) < rem {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

/// Three-part phasing plan: Δa to a hold value, coast, Δa back to zero.
struct Phasing<'a> {
    ctx: &'a PlanningContext,
    target: MeanOrbitModel,
    chaser: MeanOrbitModel,
    da0: f64,
    quantity: fn(&MeanOrbitModel, &MeanOrbitModel) -> f64,
}

enum PhasingError {
    /// Even a zero coast overshoots the goal.
    HoldTooLarge,
    /// Coast would exceed the cap.
    HoldTooSmall(f64),
    NoRate,
}

impl<'a> Phasing<'a> {
    fn new(ctx: &'a PlanningContext, quantity: fn(&MeanOrbitModel, &MeanOrbitModel) -> f64) -> Self {
        let (target, chaser) = ctx.models();
        Phasing {
            ctx,
            target,
            chaser,
            da0: chaser.a - target.a,
            quantity,
        }
    }

    fn now(&self) -> f64 {
        (self.quantity)(&self.target, &self.chaser)
    }

    /// An even number (at least two) of equal along-track firings spaced
    /// 1.5 periods apart, so their eccentricity kicks cancel pairwise.
    fn series(&self, from: f64, to: f64, first_start: f64) -> Vec<ThrustSegment> {
        let d = to - from;
        if d.abs() < 1e-4 {
            return Vec::new();
        }
        let acc = accel(self.ctx, self.chaser.mass);
        let n = self.chaser.mean_motion();
        let max = self.ctx.params.max_firing_duration;
        let da_full = 2.0 * acc * max / n;
        let mut k = ((d.abs() / da_full) - 1e-9).ceil().max(2.0) as usize;
        if k % 2 == 1 {
            k += 1;
        }
        let duration = (d.abs() / k as f64) * n / (2.0 * acc);
        let spacing = 1.5 * self.chaser.period();
        let axis = ThrustAxis::along_track(d);
        (0..k)
            .map(|j| {
                let t0 = first_start + j as f64 * spacing;
                ThrustSegment::new(t0, t0 + duration, axis, self.ctx.params.thrust)
            })
            .collect()
    }

    fn restore_only(&self) -> Vec<ThrustSegment> {
        self.series(self.da0, 0.0, self.chaser.t)
    }

    fn build(&self, hold: f64, coast: f64) -> Vec<ThrustSegment> {
        let t0 = self.chaser.t;
        let mut segs = self.series(self.da0, hold, t0);
        let spacing = 1.5 * self.chaser.period();
        let second_start = match segs.last() {
            Some(s) => s.t_start + spacing + coast,
            None => t0 + coast,
        };
        segs.extend(self.series(hold, 0.0, second_start));
        segs
    }

    fn evaluate(&self, segs: &[ThrustSegment]) -> f64 {
        let end = segs.last().map_or(self.chaser.t, |s| s.t_end);
        let mut t = self.target;
        let mut c = self.chaser;
        t.advance(end, &[], &self.ctx.params);
        c.advance(end, segs, &self.ctx.params);
        (self.quantity)(&t, &c)
    }

    fn rate(&self, hold: f64) -> f64 {
        let mut t = self.target;
        let mut c = self.chaser;
        c.a = t.a + hold;
        let q0 = (self.quantity)(&t, &c);
        t.coast(t.t + DAY);
        c.coast(c.t + DAY);
        wrap_pi((self.quantity)(&t, &c) - q0) / DAY
    }

    fn solve(&self, hold: f64, goal: f64, cap: f64) -> std::result::Result<Vec<ThrustSegment>, PhasingError> {
        let rate = self.rate(hold);
        if rate.abs() < 1e-15 {
            return Err(PhasingError::NoRate);
        }
        let q0 = self.evaluate(&self.build(hold, 0.0));
        let mut coast = wrap_pi(goal - q0) / rate;
        if coast < 0.0 {
            return Err(PhasingError::HoldTooLarge);
        }
        if coast > cap {
            return Err(PhasingError::HoldTooSmall(coast));
        }
        for _ in 0..3 {
            let q = self.evaluate(&self.build(hold, coast));
            coast = (coast + wrap_pi(goal - q) / rate).max(0.0);
        }
        Ok(self.build(hold, coast))
    }

    /// Hold sign that drives the quantity toward `goal`.
    fn hold_sign(&self, goal: f64) -> f64 {
        let r = self.rate(1.0);
        let needed = wrap_pi(goal - self.now());
        if needed * r >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// RAAN correction using the differential J2 nodal drift of a temporary
/// semi-major axis offset. Drives `ΔΩ` to zero and ends with `Δa` restored.
pub fn plan_raan_correction(ctx: &PlanningContext) -> Result<FiringSchedule> {
    let db = ctx.config.deadbands;
    let p = Phasing::new(ctx, |t, c| wrap_pi(c.raan - t.raan));
    let draan = p.now();
    if draan.abs() < db.draan {
        let segs = if p.da0.abs() > db.da {
            p.restore_only()
        } else {
            Vec::new()
        };
        return Ok(finish(ctx, BlockKind::RaanCor, segs));
    }
    let mut hold = p.hold_sign(0.0) * ctx.config.raan_hold_da.abs();
    for _ in 0..12 {
        match p.solve(hold, 0.0, ctx.config.raan_coast_cap) {
            Ok(segs) => return Ok(finish(ctx, BlockKind::RaanCor, segs)),
            Err(PhasingError::HoldTooLarge) => hold *= 0.6,
            Err(PhasingError::HoldTooSmall(coast)) => {
                return Err(Error::Planner(format!(
                    "RAAN coast of {:.1} days exceeds the {:.1}-day cap; use a larger hold offset than {:.2} km",
                    coast / DAY,
                    ctx.config.raan_coast_cap / DAY,
                    hold.abs()
                )))
            }
            Err(PhasingError::NoRate) => {
                return Err(Error::Planner("no differential nodal drift at this inclination".into()))
            }
        }
    }
    Ok(finish(ctx, BlockKind::RaanCor, p.restore_only()))
}

/// Along-track phasing through a temporary period difference. Steers the
/// along-track center `Δλ + cos i ΔΩ` to `approach_target` km on the side the
/// chaser already occupies, then restores `Δa`.
pub fn plan_arglat_correction(ctx: &PlanningContext, approach_target: f64) -> Result<FiringSchedule> {
    let db = ctx.config.deadbands;
    let p = Phasing::new(ctx, along_track_angle);
    let q = p.now();
    let side = if q >= 0.0 { 1.0 } else { -1.0 };
    let goal = side * approach_target / p.target.a;
    if wrap_pi(goal - q).abs() < db.du {
        let segs = if p.da0.abs() > db.da {
            p.restore_only()
        } else {
            Vec::new()
        };
        return Ok(finish(ctx, BlockKind::UCor, segs));
    }
    let mut hold = p.hold_sign(goal) * ctx.config.arglat_hold_da.abs();
    for _ in 0..16 {
        match p.solve(hold, goal, ctx.config.arglat_coast_cap) {
            Ok(segs) => return Ok(finish(ctx, BlockKind::UCor, segs)),
            Err(PhasingError::HoldTooLarge) => hold *= 0.6,
            Err(PhasingError::HoldTooSmall(_)) => hold *= 1.5,
            Err(PhasingError::NoRate) => break,
        }
    }
    Err(Error::Planner(format!(
        "no along-track phasing plan closes {:.3} deg within {:.1} days",
        wrap_pi(goal - q).to_degrees(),
        ctx.config.arglat_coast_cap / DAY
    )))
}

/// Node-centered cross-track firings, +W at the ascending node and -W at the
/// descending node to raise the inclination, driving `Δi` to `di_desired` rad.
pub fn plan_inclination_correction(ctx: &PlanningContext, di_desired: f64) -> Result<FiringSchedule> {
    let db = ctx.config.deadbands;
    let (target, chaser) = ctx.models();
    let err = di_desired - (chaser.i - target.i);
    if err.abs() < db.di {
        return Ok(finish(ctx, BlockKind::ICor, Vec::new()));
    }
    let acc = accel(ctx, chaser.mass);
    let (v, n) = (chaser.speed(), chaser.mean_motion());
    let durations = split_firings(err.abs(), db.di, ctx.params.max_firing_duration, |d| {
        incl_firing_delta_i(acc, v, n, d)
    });
    let sign = err.signum();
    let mut plan = chaser;
    let mut segs: Vec<ThrustSegment> = Vec::new();
    let mut t_min = chaser.t;
    for d in durations {
        let asc = plan.next_arg_latitude_time(0.0, t_min + 0.5 * d);
        let desc = plan.next_arg_latitude_time(PI, t_min + 0.5 * d);
        let (center, axis) = if asc <= desc {
            (asc, ThrustAxis::cross_track(sign))
        } else {
            (desc, ThrustAxis::cross_track(-sign))
        };
        let seg = ThrustSegment::centered(center, d, axis, ctx.params.thrust);
        plan.advance(seg.t_end, &[seg], &ctx.params);
        t_min = seg.t_end + plan.period() + ctx.config.gap_margin;
        segs.push(seg);
    }
    Ok(finish(ctx, BlockKind::ICor, segs))
}

/// Operation pairs grouped the way [`EccOpParams`] describes them.
fn group_ops(ops: &[(bool, f64)]) -> Vec<EccOpParams> {
    let mut out: Vec<EccOpParams> = Vec::new();
    for &(is_op1, d) in ops {
        match out.last_mut() {
            Some(p) if is_op1 && !p.include_op1 && !p.include_op2 => {
                p.include_op1 = true;
                p.t_e1 = d;
            }
            Some(p) if !is_op1 && !p.include_op2 => {
                p.include_op2 = true;
                p.t_e2 = d;
            }
            _ => out.push(EccOpParams {
                t_e1: if is_op1 { d } else { 0.0 },
                t_e2: if is_op1 { 0.0 } else { d },
                include_op1: is_op1,
                include_op2: !is_op1,
            }),
        }
    }
    out
}

/// Eccentricity correction. The reference "perigee" is the direction of the
/// required change of the chaser's eccentricity vector, chosen so the
/// relative eccentricity vector ends parallel to the target's with magnitude
/// `de_desired`. Operation 1 fires +S there and -S at the two quadratures;
/// operation 2 fires -S half an orbit away and +S at the quadratures.
pub fn plan_eccentricity_correction(
    ctx: &PlanningContext,
    de_desired: f64,
    bias: AlongTrackBias,
) -> Result<FiringSchedule> {
    let (segs, _) = eccentricity_segments(ctx, de_desired, bias)?;
    Ok(finish(ctx, BlockKind::ECor, segs))
}

/// Same as [`plan_eccentricity_correction`] but also returns the operation
/// breakdown.
pub(crate) fn eccentricity_segments(
    ctx: &PlanningContext,
    de_desired: f64,
    bias: AlongTrackBias,
) -> Result<(Vec<ThrustSegment>, Vec<EccOpParams>)> {
    let db = ctx.config.deadbands;
    let (target, chaser) = ctx.models();
    let (rx, ry) = relative_ecc_vector(&target, &chaser);
    let et = target.e();
    let (ux, uy) = if et > 1e-6 {
        (target.ex / et, target.ey / et)
    } else if rx.hypot(ry) > 1e-9 {
        (rx / rx.hypot(ry), ry / rx.hypot(ry))
    } else {
        (1.0, 0.0)
    };
    let (cx, cy) = (de_desired * ux - rx, de_desired * uy - ry);
    let need = cx.hypot(cy);
    if need < db.de {
        return Ok((Vec::new(), Vec::new()));
    }
    let phi = cy.atan2(cx);
    let acc = accel(ctx, chaser.mass);
    let (v, n) = (chaser.speed(), chaser.mean_motion());
    let durations = split_firings(need, db.de, ctx.params.max_firing_duration, |d| {
        ecc_op_delta_e(acc, v, n, d)
    });
    let max_ops = ctx.config.max_ecc_ops.max(1);
    let ops: Vec<(bool, f64)> = durations
        .into_iter()
        .take(max_ops)
        .enumerate()
        .map(|(k, d)| {
            let is_op1 = match bias {
                AlongTrackBias::Negative => true,
                AlongTrackBias::Positive => false,
                AlongTrackBias::None => k % 2 == 0,
            };
            (is_op1, d)
        })
        .collect();

    let thrust = ctx.params.thrust;
    let margin = ctx.config.gap_margin;
    let mut plan = chaser;
    let mut segs = Vec::new();
    let mut t_min = chaser.t;
    for &(is_op1, d) in &ops {
        let (main_u, main_axis) = if is_op1 {
            (phi, ThrustAxis::PlusS)
        } else {
            (phi + PI, ThrustAxis::MinusS)
        };
        let center = plan.next_arg_latitude_time(main_u, t_min + 0.5 * d);
        let mut seg = ThrustSegment::centered(center, d, main_axis, thrust);
        plan.advance(seg.t_end, &[seg], &ctx.params);
        segs.push(seg);
        for k in 0..2 {
            let u = main_u + FRAC_PI_2 + k as f64 * PI;
            let hd = 0.5 * d;
            let earliest = seg.t_end + plan.period() + margin + 0.5 * hd;
            let center = plan.next_arg_latitude_time(u, earliest);
            seg = ThrustSegment::centered(center, hd, main_axis.opposite(), thrust);
            plan.advance(seg.t_end, &[seg], &ctx.params);
            segs.push(seg);
        }
        t_min = seg.t_end + plan.period() + margin;
    }
    Ok((segs, group_ops(&ops)))
}

/// Predicted along-track shift of the center, km.
#[cfg(test)]
fn predicted_center_shift(ctx: &PlanningContext, segs: &[ThrustSegment]) -> f64 {
    let (target, chaser) = ctx.models();
    let end = segs.last().map_or(chaser.t, |s| s.t_end);
    let (mut t, mut c, mut free) = (target, chaser, chaser);
    t.coast(end);
    free.coast(end);
    c.advance(end, segs, &ctx.params);
    target.a * (along_track_angle(&t, &c) - along_track_angle(&t, &free))
}
