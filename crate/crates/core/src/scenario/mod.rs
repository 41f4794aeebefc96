//! Scenario files and run artifacts.
//!
//! All CSV files carry a header row, a fixed column order and numbers in
//! scientific notation with 12 significant digits. Angles are degrees.

mod config;

pub use config::{
    reference_scenario, DeadbandConfig, DesiredConfig, IntegratorConfig, LimitConfig, NavConfig, PlannerSettings,
    ScenarioConfig, SeparationConfig, SpacecraftConfig, TargetConfig, ThresholdConfig, SCHEMA_VERSION,
};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::maneuver::{
    plan_arglat_correction, plan_eccentricity_correction, plan_inclination_correction, plan_raan_correction,
    AlongTrackBias, BlockKind, FiringSchedule, PlanningContext,
};
use crate::mission::{delta_v_ledger, run_mission, MissionOutcome, MissionReport, Phase};
use crate::orbit::{cart_to_elements, elements_to_cart, osc_to_mean, EciState, OrbitalElements, RelativeElements};
use crate::propagator::{propagate, PairPropagator, PropagationResult, ThrustSegment};
use crate::relative::EllipseGeometry;

/// Bundled scenario reproducing the reference mission.
pub const REFERENCE_SCENARIO_JSON: &str = include_str!("../../scenarios/reference_mission.json");

/// Formats with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(BufWriter::new(File::create(path)?)))
}

fn vec_fields(out: &mut Vec<String>, s: &EciState) {
    for v in [s.r.x, s.r.y, s.r.z, s.v.x, s.v.y, s.v.z] {
        out.push(fmt_num(v));
    }
}

const STATE_HEADER: [&str; 22] = [
    "t_s",
    "phase",
    "target_x_km",
    "target_y_km",
    "target_z_km",
    "target_vx_km_s",
    "target_vy_km_s",
    "target_vz_km_s",
    "chaser_x_km",
    "chaser_y_km",
    "chaser_z_km",
    "chaser_vx_km_s",
    "chaser_vy_km_s",
    "chaser_vz_km_s",
    "rel_r_km",
    "rel_s_km",
    "rel_w_km",
    "rel_vr_km_s",
    "rel_vs_km_s",
    "rel_vw_km_s",
    "chaser_mass_kg",
    "delta_v_m_s",
];

pub fn write_states_csv(path: &Path, report: &MissionReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(STATE_HEADER)?;
    for s in &report.samples {
        let mut row = vec![fmt_num(s.t), s.phase.label().to_string()];
        vec_fields(&mut row, &s.target);
        vec_fields(&mut row, &s.chaser);
        row.extend(s.relative.as_array().iter().map(|&v| fmt_num(v)));
        row.push(fmt_num(s.chaser.mass));
        row.push(fmt_num(s.delta_v));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn element_columns(prefix: &str) -> Vec<String> {
    ["a_km", "e", "i_deg", "raan_deg", "argp_deg", "ta_deg", "u_deg"]
        .iter()
        .map(|c| format!("{prefix}_{c}"))
        .collect()
}

fn element_fields(out: &mut Vec<String>, oe: &OrbitalElements) {
    for v in [
        oe.a,
        oe.e,
        oe.i.to_degrees(),
        oe.raan.to_degrees(),
        oe.argp.to_degrees(),
        oe.ta.to_degrees(),
        oe.arg_latitude().to_degrees(),
    ] {
        out.push(fmt_num(v));
    }
}

/// One row of elements.csv.
#[derive(Debug, Clone, Copy)]
pub struct ElementRow {
    pub t: f64,
    pub target_osc: OrbitalElements,
    pub target_mean: OrbitalElements,
    pub chaser_osc: OrbitalElements,
    pub chaser_mean: OrbitalElements,
}

impl ElementRow {
    pub fn from_states(target: &EciState, chaser: &EciState, constants: &crate::GravityConstants) -> Result<Self> {
        let to = cart_to_elements(target, constants)?;
        let co = cart_to_elements(chaser, constants)?;
        Ok(ElementRow {
            t: target.epoch,
            target_osc: to,
            target_mean: osc_to_mean(&to, constants)?,
            chaser_osc: co,
            chaser_mean: osc_to_mean(&co, constants)?,
        })
    }

    pub fn relative(&self) -> RelativeElements {
        RelativeElements::between(&self.target_mean, &self.chaser_mean)
    }
}

pub fn write_elements_csv(path: &Path, rows: &[ElementRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["t_s".to_string()];
    for p in ["target_osc", "target_mean", "chaser_osc", "chaser_mean"] {
        header.extend(element_columns(p));
    }
    for c in ["da_km", "de", "di_deg", "draan_deg", "du_deg", "dlambda_deg"] {
        header.push(format!("mean_{c}"));
    }
    w.write_record(&header)?;
    for r in rows {
        let mut row = vec![fmt_num(r.t)];
        for oe in [&r.target_osc, &r.target_mean, &r.chaser_osc, &r.chaser_mean] {
            element_fields(&mut row, oe);
        }
        let d = r.relative();
        for v in [
            d.da,
            d.de,
            d.di.to_degrees(),
            d.draan.to_degrees(),
            d.du.to_degrees(),
            d.dlambda.to_degrees(),
        ] {
            row.push(fmt_num(v));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn mission_element_rows(report: &MissionReport, constants: &crate::GravityConstants) -> Result<Vec<ElementRow>> {
    report
        .samples
        .iter()
        .map(|s| ElementRow::from_states(&s.target, &s.chaser, constants))
        .collect()
}

/// Executed schedules, one row per firing, labelled with phase and block.
pub fn write_schedule_csv(path: &Path, report: &MissionReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "index",
        "phase",
        "block",
        "t_start_s",
        "t_end_s",
        "duration_s",
        "axis",
        "thrust_n",
        "impulse_n_s",
        "decided_at_s",
        "nav_epoch_s",
    ])?;
    let mut k = 0usize;
    for b in &report.blocks {
        for s in &b.schedule.segments {
            w.write_record([
                k.to_string(),
                b.phase.label().to_string(),
                b.schedule.block.label().to_string(),
                fmt_num(s.t_start),
                fmt_num(s.t_end),
                fmt_num(s.duration()),
                s.direction.label().to_string(),
                fmt_num(s.thrust),
                fmt_num(s.impulse()),
                fmt_num(b.decided_at),
                fmt_num(b.nav_epoch),
            ])?;
            k += 1;
        }
    }
    w.flush()?;
    Ok(())
}

/// Relative mean elements with angles in degrees.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RelativeElementsDeg {
    pub da_km: f64,
    pub de: f64,
    pub di_deg: f64,
    pub draan_deg: f64,
    pub du_deg: f64,
    pub dlambda_deg: f64,
}

impl From<&RelativeElements> for RelativeElementsDeg {
    fn from(d: &RelativeElements) -> Self {
        RelativeElementsDeg {
            da_km: d.da,
            de: d.de,
            di_deg: d.di.to_degrees(),
            draan_deg: d.draan.to_degrees(),
            du_deg: d.du.to_degrees(),
            dlambda_deg: d.dlambda.to_degrees(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseSummary {
    pub phase: Phase,
    pub start_s: f64,
    pub end_s: f64,
    pub delta_v_m_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionSummary {
    pub t_s: f64,
    pub from: Phase,
    pub to: Phase,
    pub relative: RelativeElementsDeg,
    pub along_track_offset_km: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub schema_version: u32,
    pub scenario: String,
    pub outcome: MissionOutcome,
    pub phases: Vec<PhaseSummary>,
    pub delta_v_ledger: Vec<crate::mission::PhaseDeltaV>,
    pub delta_v_total_m_s: f64,
    pub delta_v_budget_m_s: f64,
    pub impulse_used_n_s: f64,
    pub initial_mass_kg: f64,
    pub final_mass_kg: f64,
    pub blocks: usize,
    pub firings: usize,
    pub decisions: usize,
    pub transitions: Vec<TransitionSummary>,
    pub initial_relative: RelativeElementsDeg,
    pub final_relative: RelativeElementsDeg,
    pub nominal_geometry: Option<EllipseGeometry>,
    pub final_geometry: Option<EllipseGeometry>,
    pub element_geometry: EllipseGeometry,
    pub files: Vec<String>,
}

pub fn summarize(report: &MissionReport, scenario: &ScenarioConfig) -> ReportSummary {
    let setup = scenario.propagator_setup();
    ReportSummary {
        schema_version: SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        outcome: report.outcome.clone(),
        phases: report
            .phases
            .iter()
            .map(|p| PhaseSummary {
                phase: p.phase,
                start_s: p.start,
                end_s: p.end,
                delta_v_m_s: p.delta_v,
            })
            .collect(),
        delta_v_ledger: delta_v_ledger(report),
        delta_v_total_m_s: report.delta_v_used,
        delta_v_budget_m_s: setup.params.delta_v_capacity(),
        impulse_used_n_s: report.impulse_used,
        initial_mass_kg: report.initial_mass,
        final_mass_kg: report.final_mass,
        blocks: report.blocks.len(),
        firings: report.blocks.iter().map(|b| b.schedule.segments.len()).sum(),
        decisions: report.decisions.len(),
        transitions: report
            .transitions
            .iter()
            .map(|t| TransitionSummary {
                t_s: t.t,
                from: t.from,
                to: t.to,
                relative: (&t.relative).into(),
                along_track_offset_km: t.along_track_offset,
            })
            .collect(),
        initial_relative: (&report.initial_relative).into(),
        final_relative: (&report.final_relative).into(),
        nominal_geometry: report.nominal_geometry,
        final_geometry: report.final_geometry,
        element_geometry: report.element_geometry,
        files: ["states.csv", "elements.csv", "schedule.csv"]
            .map(String::from)
            .to_vec(),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

/// Files written for one mission run.
#[derive(Debug, Clone)]
pub struct MissionArtifacts {
    pub states: PathBuf,
    pub elements: PathBuf,
    pub schedule: PathBuf,
    pub report: PathBuf,
}

pub fn write_mission_artifacts(
    dir: &Path,
    report: &MissionReport,
    scenario: &ScenarioConfig,
) -> Result<MissionArtifacts> {
    std::fs::create_dir_all(dir)?;
    let out = MissionArtifacts {
        states: dir.join("states.csv"),
        elements: dir.join("elements.csv"),
        schedule: dir.join("schedule.csv"),
        report: dir.join("report.json"),
    };
    write_states_csv(&out.states, report)?;
    let rows = mission_element_rows(report, &scenario.gravity)?;
    write_elements_csv(&out.elements, &rows)?;
    write_schedule_csv(&out.schedule, report)?;
    write_json(&out.report, &summarize(report, scenario))?;
    Ok(out)
}

/// Runs the scenario's mission.
pub fn run_scenario(scenario: &ScenarioConfig) -> Result<MissionReport> {
    run_mission(&scenario.mission_config()?)
}

/// Unforced propagation of the target and the freshly separated chaser.
pub fn propagate_scenario(scenario: &ScenarioConfig, days: f64) -> Result<PropagationResult> {
    let m = scenario.mission_config()?;
    let (target, chaser) = m.initial_states()?;
    propagate(
        &target,
        &chaser,
        &[],
        &m.setup,
        days * crate::DAY,
        Some(m.output_interval),
    )
}

pub fn propagation_element_rows(
    result: &PropagationResult,
    constants: &crate::GravityConstants,
) -> Result<Vec<ElementRow>> {
    result
        .target
        .iter()
        .zip(&result.chaser)
        .map(|(t, c)| ElementRow::from_states(t, c, constants))
        .collect()
}

/// Outcome of a single-block demonstration.
#[derive(Debug, Clone, Serialize)]
pub struct BlockDemo {
    pub block: BlockKind,
    pub schedule: FiringSchedule,
    /// Relative mean elements before the block.
    pub before: RelativeElementsDeg,
    pub predicted_change: RelativeElementsDeg,
    /// Relative mean elements one period after the last firing.
    pub measured_after: Option<RelativeElementsDeg>,
}

/// Plans one block on the scenario's target orbit at t = 0.
///
/// - `raan`: chaser node `delta` deg behind the target, block closes it.
/// - `u`: chaser `delta` deg ahead in argument of latitude, block closes it.
/// - `i`: co-located chaser, block raises Δi by `delta` deg.
/// - `e`: co-located chaser, block sets Δe to `delta`.
pub fn plan_block(scenario: &ScenarioConfig, block: BlockKind, delta: f64, execute: bool) -> Result<BlockDemo> {
    let m = scenario.mission_config()?;
    let c = m.setup.constants;
    let target = elements_to_cart(&m.target, &c, 0.0, m.target_mass)?;
    let mut chaser_oe = m.target;
    match block {
        BlockKind::RaanCor => chaser_oe.raan -= delta.to_radians(),
        BlockKind::UCor => chaser_oe.ta += delta.to_radians(),
        BlockKind::ICor | BlockKind::ECor => {}
    }
    let chaser = elements_to_cart(&chaser_oe, &c, 0.0, m.setup.params.wet_mass)?;
    let target_mean = osc_to_mean(&m.target, &c)?;
    let chaser_mean = osc_to_mean(&cart_to_elements(&chaser, &c)?, &c)?;
    let mut planner = m.planner;
    planner.max_ecc_ops = usize::MAX;
    let ctx = PlanningContext {
        target: target_mean,
        chaser: chaser_mean,
        epoch: 0.0,
        chaser_mass: chaser.mass,
        earliest_start: m.lead_time,
        constants: c,
        params: m.setup.params,
        config: planner,
    };
    let schedule = match block {
        BlockKind::RaanCor => plan_raan_correction(&ctx)?,
        BlockKind::UCor => plan_arglat_correction(&ctx, 0.0)?,
        BlockKind::ICor => plan_inclination_correction(&ctx, delta.to_radians())?,
        BlockKind::ECor => plan_eccentricity_correction(&ctx, delta, AlongTrackBias::None)?,
    };
    let before = RelativeElements::between(&target_mean, &chaser_mean);
    let measured_after = if execute {
        let end = schedule.end().unwrap_or(0.0) + target_mean.period(c.mu);
        let mut p = PairPropagator::new(target, chaser, m.setup)?;
        p.advance_to(end, &schedule.segments)?;
        let row = ElementRow::from_states(p.target(), p.chaser(), &c)?;
        Some((&row.relative()).into())
    } else {
        None
    };
    Ok(BlockDemo {
        block,
        before: (&before).into(),
        predicted_change: (&schedule.predicted).into(),
        schedule,
        measured_after,
    })
}

/// Human-readable schedule listing.
pub fn format_schedule(segments: &[ThrustSegment]) -> String {
    let mut s = String::new();
    for (k, seg) in segments.iter().enumerate() {
        s.push_str(&format!(
            "{k:>3}  {:>4}  start {:>14.3} s  duration {:>7.2} s  ({:.4} d)\n",
            seg.direction.label(),
            seg.t_start,
            seg.duration(),
            seg.t_start / crate::DAY
        ));
    }
    s
}
