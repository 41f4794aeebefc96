//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line to
//! stderr (uncaptured) before asserting.

use std::f64::consts::TAU;
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rpo_core::maneuver::{
    plan_eccentricity_correction, plan_inclination_correction, AlongTrackBias, PlannerConfig, PlanningContext,
};
use rpo_core::mission::{delta_v_ledger, MissionReport, Phase};
use rpo_core::propagator::{
    propagate, validate_schedule, PairPropagator, PropagatorSetup, ScheduleViolation, SpacecraftParams, ThrustAxis,
    ThrustSegment,
};
use rpo_core::relative::{cw_propagate, design_safety_ellipse, measure_ellipse};
use rpo_core::scenario::{run_scenario, write_mission_artifacts, ElementRow, ScenarioConfig, REFERENCE_SCENARIO_JSON};
use rpo_core::{
    cart_to_elements, elements_to_cart, mean_to_osc, osc_to_mean, secular_rates, CwContext, EciState, ElementFlavor,
    GravityConstants, OrbitalElements, RelativeElements, RelativeState, DAY, G0,
};

const C: GravityConstants = GravityConstants::EARTH;

fn report_line(n: u32, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n}: {verdict} - {detail}");
}

fn reference_target() -> OrbitalElements {
    OrbitalElements::from_degrees(6925.68, 0.0019, 35.008, 3.006, 0.0, 0.0, ElementFlavor::Osculating).unwrap()
}

fn mean_of(s: &EciState, c: &GravityConstants) -> OrbitalElements {
    osc_to_mean(&cart_to_elements(s, c).unwrap(), c).unwrap()
}

struct MissionRun {
    report: MissionReport,
    scenario: ScenarioConfig,
    elapsed: Duration,
}

fn mission() -> &'static MissionRun {
    static RUN: OnceLock<MissionRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let scenario = ScenarioConfig::from_json(REFERENCE_SCENARIO_JSON).unwrap();
        let start = Instant::now();
        let report = run_scenario(&scenario).unwrap();
        MissionRun {
            report,
            scenario,
            elapsed: start.elapsed(),
        }
    })
}

/// Hill's equations written out directly.
fn hill_rhs(s: &[f64; 6], n: f64) -> [f64; 6] {
    [
        s[3],
        s[4],
        s[5],
        3.0 * n * n * s[0] + 2.0 * n * s[4],
        -2.0 * n * s[3],
        -n * n * s[2],
    ]
}

fn rk4_hill(mut s: [f64; 6], n: f64, t: f64, h: f64) -> [f64; 6] {
    let steps = (t / h).round() as usize;
    let h = t / steps as f64;
    let add = |a: &[f64; 6], b: &[f64; 6], k: f64| -> [f64; 6] { std::array::from_fn(|i| a[i] + k * b[i]) };
    for _ in 0..steps {
        let k1 = hill_rhs(&s, n);
        let k2 = hill_rhs(&add(&s, &k1, 0.5 * h), n);
        let k3 = hill_rhs(&add(&s, &k2, 0.5 * h), n);
        let k4 = hill_rhs(&add(&s, &k3, h), n);
        s = std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    s
}

#[test]
fn criterion_01_cw_matches_numerical_integration() {
    let start = Instant::now();
    let n = reference_target().mean_motion(C.mu);
    let ctx = CwContext::new(n).unwrap();
    let period = ctx.period();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s: [f64; 6] = std::array::from_fn(|i| {
            if i < 3 {
                rng.random_range(-10.0..10.0)
            } else {
                rng.random_range(-0.01..0.01)
            }
        });
        let analytic = cw_propagate(&RelativeState::from_array(0.0, s), &ctx, period);
        let numeric = rk4_hill(s, n, period, 1.0);
        let err = (analytic.position() - rpo_core::Vector3::new(numeric[0], numeric[1], numeric[2])).norm();
        worst = worst.max(err);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst < 1e-8 && elapsed < 5.0;
    report_line(
        1,
        ok,
        &format!("max position error {worst:.3e} km over 100 ICs, {elapsed:.2} s"),
    );
    assert!(ok);
}

/// Trapezoid mean over a uniformly sampled window.
fn window_mean(f: impl Fn(f64) -> f64, t0: f64, t1: f64, k: usize) -> f64 {
    let h = (t1 - t0) / k as f64;
    let mut sum = 0.5 * (f(t0) + f(t1));
    for j in 1..k {
        sum += f(t0 + j as f64 * h);
    }
    sum * h / (t1 - t0)
}

#[test]
fn criterion_02_static_ellipse_does_not_drift() {
    let n = reference_target().mean_motion(C.mu);
    let ctx = CwContext::new(n).unwrap();
    let period = ctx.period();
    let s0 = design_safety_ellipse(14.0, 8.0, &ctx);
    let y = |t: f64| cw_propagate(&s0, &ctx, t).y;
    let first = window_mean(y, 0.0, period, 2000);
    let last = window_mean(y, 9.0 * period, 10.0 * period, 2000);
    let drift = (last - first).abs();
    let ok = drift < 1e-9;
    report_line(2, ok, &format!("period-mean y drift over 10 periods {drift:.3e} km"));
    assert!(ok);
}

#[test]
fn criterion_03_j2_secular_rates() {
    let target = reference_target();
    let setup = PropagatorSetup {
        step: 10.0,
        ..Default::default()
    };
    let s0 = elements_to_cart(&target, &C, 0.0, 4.0).unwrap();
    let res = propagate(&s0, &s0, &[], &setup, 30.0 * DAY, Some(DAY)).unwrap();
    let means: Vec<OrbitalElements> = res.target.iter().map(|s| mean_of(s, &C)).collect();
    // Least-squares slope of the unwrapped mean RAAN.
    let mut raan = Vec::new();
    let mut prev = means[0].raan;
    let mut acc = prev;
    for m in &means {
        let mut d = m.raan - prev;
        d -= TAU * (d / TAU).round();
        acc += d;
        prev = m.raan;
        raan.push(acc.to_degrees());
    }
    let days: Vec<f64> = res.times.iter().map(|t| t / DAY).collect();
    let nd = days.len() as f64;
    let (mx, my) = (days.iter().sum::<f64>() / nd, raan.iter().sum::<f64>() / nd);
    let slope = days.iter().zip(&raan).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / days.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let analytic = secular_rates(&means[0], &C).raan_dot.to_degrees() * DAY;
    let a_drift = (means.last().unwrap().a - means[0].a).abs() * 1000.0;
    let ok = (slope - analytic).abs() < 0.06 && (slope + 6.12).abs() < 0.06 && a_drift < 10.0;
    report_line(
        3,
        ok,
        &format!("RAAN rate {slope:.4} deg/day (analytic {analytic:.4}), mean a drift {a_drift:.2} m"),
    );
    assert!(ok);
}

#[test]
fn criterion_04_mean_element_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_e, mut worst_i) = (0.0f64, 0.0f64);
    let mut identity = true;
    let mut tested = 0;
    while tested < 100 {
        let i_deg: f64 = rng.random_range(5.0..100.0);
        if (i_deg - 63.435).abs() < 2.0 {
            continue;
        }
        let oe = OrbitalElements::from_degrees(
            rng.random_range(6700.0..7500.0),
            rng.random_range(0.0..0.02),
            i_deg,
            rng.random_range(0.0..360.0),
            rng.random_range(0.0..360.0),
            rng.random_range(0.0..360.0),
            ElementFlavor::Osculating,
        )
        .unwrap();
        let back = mean_to_osc(&osc_to_mean(&oe, &C).unwrap(), &C).unwrap();
        worst_e = worst_e.max((back.e - oe.e).abs());
        worst_i = worst_i.max((back.i - oe.i).abs().to_degrees());
        let c0 = C.without_j2();
        let m0 = osc_to_mean(&oe, &c0).unwrap();
        identity &= (m0.a - oe.a).abs() < 1e-9 && (m0.e - oe.e).abs() < 1e-14 && (m0.i - oe.i).abs() < 1e-14;
        tested += 1;
    }
    let ok = worst_e < 5e-6 && worst_i < 1e-4 && identity;
    report_line(
        4,
        ok,
        &format!("max |de| {worst_e:.2e}, max |di| {worst_i:.2e} deg, J2=0 identity {identity}"),
    );
    assert!(ok);
}

fn block_context(target: &EciState) -> PlanningContext {
    PlanningContext {
        target: mean_of(target, &C),
        chaser: mean_of(target, &C),
        epoch: 0.0,
        chaser_mass: 4.0,
        earliest_start: 600.0,
        constants: C,
        params: SpacecraftParams::default(),
        config: PlannerConfig {
            max_ecc_ops: 8,
            ..Default::default()
        },
    }
}

fn execute_block(target: EciState, segments: &[ThrustSegment]) -> RelativeElements {
    let setup = PropagatorSetup {
        step: 10.0,
        ..Default::default()
    };
    let period = mean_of(&target, &C).period(C.mu);
    let end = segments.last().map_or(0.0, |s| s.t_end) + period;
    let mut chaser = target;
    chaser.mass = 4.0;
    let mut p = PairPropagator::new(target, chaser, setup).unwrap();
    p.advance_to(end, segments).unwrap();
    RelativeElements::between(&mean_of(p.target(), &C), &mean_of(p.chaser(), &C))
}

#[test]
fn criterion_05_block_orthogonality() {
    let target = elements_to_cart(&reference_target(), &C, 0.0, 4.0).unwrap();
    let ctx = block_context(&target);

    let t0 = Instant::now();
    let si = plan_inclination_correction(&ctx, 0.02f64.to_radians()).unwrap();
    let di = execute_block(target, &si.segments);
    let i_time = t0.elapsed().as_secs_f64();
    let i_err = (di.di - si.predicted.di).abs() / si.predicted.di;
    let i_ok = i_err < 0.05 && di.de.abs() < 1e-5 && i_time < 60.0;

    let t1 = Instant::now();
    let se = plan_eccentricity_correction(&ctx, 0.001, AlongTrackBias::None).unwrap();
    let de = execute_block(target, &se.segments);
    let e_time = t1.elapsed().as_secs_f64();
    let e_err = (de.de - se.predicted.de).abs() / se.predicted.de;
    let e_ok = e_err < 0.05 && de.di.abs().to_degrees() < 0.001 && de.da.abs() < 0.5 && e_time < 60.0;

    let ok = i_ok && e_ok;
    report_line(
        5,
        ok,
        &format!(
            "i_cor: di {:.5} deg vs {:.5} ({:.2}%), de {:.1e}, {i_time:.1} s; e_cor: de {:.4e} vs {:.4e} ({:.2}%), di {:.1e} deg, da {:.3} km, {e_time:.1} s",
            di.di.to_degrees(),
            si.predicted.di.to_degrees(),
            100.0 * i_err,
            di.de,
            de.de,
            se.predicted.de,
            100.0 * e_err,
            de.di.to_degrees(),
            de.da
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_06_schedule_constraints() {
    let params = SpacecraftParams::default();
    let period = reference_target().period(C.mu);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut long_rejected = 0;
    let mut short_gap_rejected = 0;
    let mut legal_accepted = 0;
    let cases = 500;
    for _ in 0..cases {
        let t0 = rng.random_range(0.0..1e5);
        let over = rng.random_range(900.001..5000.0);
        let seg = ThrustSegment::new(t0, t0 + over, ThrustAxis::PlusS, params.thrust);
        if validate_schedule(&[seg], &params, period)
            .iter()
            .any(|v| matches!(v, ScheduleViolation::FiringLimit { .. }))
        {
            long_rejected += 1;
        }

        let d1 = rng.random_range(1.0..900.0);
        let d2 = rng.random_range(1.0..900.0);
        let gap = rng.random_range(0.0..period * 0.999_999);
        let a = ThrustSegment::new(t0, t0 + d1, ThrustAxis::PlusW, params.thrust);
        let b = ThrustSegment::new(a.t_end + gap, a.t_end + gap + d2, ThrustAxis::MinusW, params.thrust);
        if validate_schedule(&[a, b], &params, period)
            .iter()
            .any(|v| matches!(v, ScheduleViolation::ChargingGap { .. }))
        {
            short_gap_rejected += 1;
        }
        let ok_gap = rng.random_range(period..3.0 * period);
        let c = ThrustSegment::new(
            a.t_end + ok_gap,
            a.t_end + ok_gap + d2,
            ThrustAxis::MinusW,
            params.thrust,
        );
        if validate_schedule(&[a, c], &params, period).is_empty() {
            legal_accepted += 1;
        }
    }

    let run = mission();
    let mission_period = mean_of(&run.report.samples[0].target, &C).period(C.mu);
    let all: Vec<ThrustSegment> = run
        .report
        .blocks
        .iter()
        .flat_map(|b| b.schedule.segments.clone())
        .collect();
    let mission_violations = validate_schedule(&all, &run.scenario.propagator_setup().params, mission_period);
    let ok = long_rejected == cases
        && short_gap_rejected == cases
        && legal_accepted == cases
        && mission_violations.is_empty()
        && !all.is_empty();
    report_line(
        6,
        ok,
        &format!(
            "{long_rejected}/{cases} long firings and {short_gap_rejected}/{cases} short gaps rejected, {legal_accepted}/{cases} legal pairs accepted; mission schedule of {} firings has {} violations",
            all.len(),
            mission_violations.len()
        ),
    );
    assert!(ok);
}

fn transition(report: &MissionReport, from: Phase) -> Option<&rpo_core::mission::TransitionSnapshot> {
    report.transitions.iter().find(|t| t.from == from)
}

/// Period-mean along-track position over one period starting at `t0`, km.
fn period_mean_y(report: &MissionReport, t0: f64, period: f64) -> f64 {
    let window: Vec<RelativeState> = report
        .samples
        .iter()
        .filter(|s| s.t >= t0 && s.t <= t0 + period + 60.0)
        .map(|s| s.relative)
        .collect();
    let ctx = CwContext::new(TAU / period).unwrap();
    measure_ellipse(&window, &ctx).unwrap().center_y
}

#[test]
fn criterion_07_end_to_end_mission() {
    let run = mission();
    let r = &run.report;
    let order: Vec<(Phase, Phase)> = r.transitions.iter().map(|t| (t.from, t.to)).collect();
    let expected = vec![
        (Phase::Commissioning, Phase::Raan),
        (Phase::Raan, Phase::Approach),
        (Phase::Approach, Phase::EllipseSetup),
        (Phase::EllipseSetup, Phase::Circumnavigation),
        (Phase::Circumnavigation, Phase::Done),
    ];
    let order_ok = order == expected && r.is_completed();

    let raan = transition(r, Phase::Raan).unwrap();
    let raan_ok = raan.relative.draan.abs().to_degrees() < 0.02 && raan.relative.da.abs() < 0.5;

    let approach = transition(r, Phase::Approach).unwrap();
    let period = r.final_target.period(C.mu);
    let sep = period_mean_y(r, approach.t, period).abs();
    let approach_ok = sep < 50.0;

    let setup = transition(r, Phase::EllipseSetup).unwrap();
    let de_ok = (setup.relative.de - 0.001).abs() < 2e-4;
    let di_ok = (setup.relative.di.to_degrees() - 0.02).abs() < 0.005;

    let du_max = r
        .samples_in(Phase::EllipseSetup)
        .map(|s| {
            ElementRow::from_states(&s.target, &s.chaser, &C)
                .unwrap()
                .relative()
                .du
                .abs()
                .to_degrees()
        })
        .fold(0.0, f64::max);
    let du_ok = du_max <= 0.5;
    let secs = run.elapsed.as_secs_f64();
    let time_ok = secs < 300.0;
    let span = r.samples.last().unwrap().t / DAY;

    let ok = order_ok && raan_ok && approach_ok && de_ok && di_ok && du_ok && time_ok;
    report_line(
        7,
        ok,
        &format!(
            "phases in order {order_ok}; post-RAAN dRAAN {:.4} deg da {:.3} km; post-approach |y| {sep:.1} km; post-setup de {:.4e} di {:.4} deg; max |du| in setup {du_max:.3} deg; {span:.1} days in {secs:.1} s",
            raan.relative.draan.to_degrees(),
            raan.relative.da,
            setup.relative.de,
            setup.relative.di.to_degrees()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_08_delta_v_budget() {
    let run = mission();
    let r = &run.report;
    let params = run.scenario.propagator_setup().params;
    let total = r.delta_v_used;
    let ledger = delta_v_ledger(r);
    let sum: f64 = ledger.iter().map(|l| l.delta_v).sum();
    let rocket = params.isp * G0 * (r.initial_mass / r.final_mass).ln();
    let rocket_ok = ((sum - rocket) / rocket).abs() < 1e-3;
    let largest = ledger
        .iter()
        .max_by(|a, b| a.delta_v.total_cmp(&b.delta_v))
        .unwrap()
        .phase;
    let ok = (20.0..=40.0).contains(&total)
        && total <= params.delta_v_capacity()
        && rocket_ok
        && largest == Phase::EllipseSetup;
    let breakdown: Vec<String> = ledger.iter().map(|l| format!("{} {:.2}", l.phase, l.delta_v)).collect();
    report_line(
        8,
        ok,
        &format!(
            "total {total:.2} m/s of {:.1}; rocket equation {rocket:.4} vs ledger {sum:.4}; per phase [{}]",
            params.delta_v_capacity(),
            breakdown.join(", ")
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_09_final_geometry() {
    let r = &mission().report;
    let g = r.final_geometry.expect("circumnavigation geometry");
    let e = r.element_geometry;
    let measured = [g.radial_extent, g.alongtrack_extent, g.crosstrack_extent];
    let reference = [14.0, 27.0, 8.0];
    let mapped = [e.radial_extent, e.alongtrack_extent, e.crosstrack_extent];
    let loose = measured.iter().zip(&reference).all(|(m, p)| ((m - p) / p).abs() <= 0.4);
    let tight = measured.iter().zip(&mapped).all(|(m, p)| ((m - p) / p).abs() <= 0.1);
    let ok = loose && tight;
    report_line(
        9,
        ok,
        &format!(
            "extents ({:.2}, {:.2}, {:.2}) km vs reference (14, 27, 8) and element mapping ({:.2}, {:.2}, {:.2})",
            measured[0], measured[1], measured[2], mapped[0], mapped[1], mapped[2]
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_ellipse_evolution_under_j2() {
    let r = &mission().report;
    let g = r.final_geometry.unwrap();
    let nominal = r.nominal_geometry.unwrap();
    let drift = g.center_drift_rate.abs();
    let drift_ok = drift > 0.0 && drift < 5.0;

    // Day-averaged Δe, and the largest within-day scatter as the noise floor.
    let rows: Vec<f64> = r
        .samples_in(Phase::Circumnavigation)
        .map(|s| ElementRow::from_states(&s.target, &s.chaser, &C).unwrap().relative().de)
        .collect();
    let per_day = (DAY / 60.0) as usize;
    let mut daily = Vec::new();
    let mut noise: f64 = 0.0;
    for chunk in rows.chunks(per_day).filter(|c| c.len() == per_day) {
        let m = chunk.iter().sum::<f64>() / chunk.len() as f64;
        let sd = (chunk.iter().map(|d| (d - m).powi(2)).sum::<f64>() / chunk.len() as f64).sqrt();
        noise = noise.max(sd);
        daily.push(m);
    }
    let (lo, hi) = daily
        .iter()
        .fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
    let de_varies = hi - lo > 5.0 * noise;
    let cross_change = (g.crosstrack_extent - nominal.crosstrack_extent) / nominal.crosstrack_extent;
    let shape_varies = cross_change.abs() > 0.05;

    let ok = drift_ok && de_varies && shape_varies;
    report_line(
        10,
        ok,
        &format!(
            "center drift {:.3} km/period; daily-mean de range {:.2e} vs noise {:.2e}; cross-track extent {:.2} -> {:.2} km",
            g.center_drift_rate,
            hi - lo,
            noise,
            nominal.crosstrack_extent,
            g.crosstrack_extent
        ),
    );
    assert!(ok);
}

fn hash_dir(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for name in ["states.csv", "elements.csv", "schedule.csv", "report.json"] {
        out.push((name.to_string(), std::fs::read(dir.join(name)).unwrap()));
    }
    out
}

#[test]
fn criterion_11_deterministic_artifacts() {
    let scenario = ScenarioConfig::from_json(REFERENCE_SCENARIO_JSON).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_scenario(&scenario).unwrap();
    write_mission_artifacts(a.path(), &first, &scenario).unwrap();
    let second = run_scenario(&scenario).unwrap();
    write_mission_artifacts(b.path(), &second, &scenario).unwrap();
    let (fa, fb) = (hash_dir(a.path()), hash_dir(b.path()));
    let differing: Vec<&str> = fa
        .iter()
        .zip(&fb)
        .filter(|(x, y)| x.1 != y.1)
        .map(|(x, _)| x.0.as_str())
        .collect();
    let bytes: usize = fa.iter().map(|f| f.1.len()).sum();
    let ok = differing.is_empty();
    report_line(
        11,
        ok,
        &format!("two runs, {bytes} bytes of artifacts, differing files: {differing:?}"),
    );
    assert!(ok);
}
