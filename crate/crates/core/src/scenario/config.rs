use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maneuver::{Deadbands, PlannerConfig};
use crate::mission::{DesiredRelativeElements, MissionConfig, NavigationModel, PhaseLimits, Separation};
use crate::orbit::{ElementFlavor, GravityConstants, OrbitalElements, RelativeElements};
use crate::propagator::{ForceModelConfig, PropagatorSetup, SpacecraftParams};
use crate::{Vector3, DAY};

pub const SCHEMA_VERSION: u32 = 1;

/// Osculating target elements at t = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub a_km: f64,
    pub e: f64,
    pub i_deg: f64,
    pub raan_deg: f64,
    pub argp_deg: f64,
    pub ta_deg: f64,
    #[serde(default = "default_mass")]
    pub mass_kg: f64,
}

fn default_mass() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeparationConfig {
    /// Ejection Δv along a direction given in the target RSW frame.
    Impulse { delta_v_mps: f64, direction_rsw: [f64; 3] },
    /// Offset of the chaser's mean elements from the target's.
    MeanOffset {
        #[serde(default)]
        da_km: f64,
        #[serde(default)]
        de: f64,
        #[serde(default)]
        di_deg: f64,
        #[serde(default)]
        draan_deg: f64,
        #[serde(default)]
        du_deg: f64,
    },
}

impl Default for SeparationConfig {
    fn default() -> Self {
        match Separation::default() {
            Separation::Impulse { delta_v, direction } => SeparationConfig::Impulse {
                delta_v_mps: delta_v,
                direction_rsw: [direction.x, direction.y, direction.z],
            },
            Separation::MeanOffset(_) => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacecraftConfig {
    pub wet_mass_kg: f64,
    pub thrust_n: f64,
    pub isp_s: f64,
    pub total_impulse_ns: f64,
    pub max_firing_s: f64,
}

impl Default for SpacecraftConfig {
    fn default() -> Self {
        let p = SpacecraftParams::default();
        SpacecraftConfig {
            wet_mass_kg: p.wet_mass,
            thrust_n: p.thrust,
            isp_s: p.isp,
            total_impulse_ns: p.total_impulse,
            max_firing_s: p.max_firing_duration,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesiredConfig {
    pub de: f64,
    pub di_deg: f64,
}

impl Default for DesiredConfig {
    fn default() -> Self {
        DesiredConfig {
            de: 0.001,
            di_deg: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeadbandConfig {
    pub da_km: f64,
    pub draan_deg: f64,
    pub du_deg: f64,
    pub di_deg: f64,
    pub de: f64,
}

impl Default for DeadbandConfig {
    fn default() -> Self {
        DeadbandConfig {
            da_km: 0.5,
            draan_deg: 0.02,
            du_deg: 0.1,
            di_deg: 0.002,
            de: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdConfig {
    pub approach_km: f64,
    pub approach_reserve_km: f64,
    pub deadbands: DeadbandConfig,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            approach_km: 50.0,
            approach_reserve_km: 30.0,
            deadbands: DeadbandConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerSettings {
    pub raan_hold_da_km: f64,
    pub arglat_hold_da_km: f64,
    pub raan_coast_cap_days: f64,
    pub arglat_coast_cap_days: f64,
    pub gap_margin_s: f64,
    pub lead_time_s: f64,
}

impl Default for PlannerSettings {
    fn default() -> Self {
        let p = PlannerConfig::default();
        PlannerSettings {
            raan_hold_da_km: p.raan_hold_da,
            arglat_hold_da_km: p.arglat_hold_da,
            raan_coast_cap_days: p.raan_coast_cap / DAY,
            arglat_coast_cap_days: p.arglat_coast_cap / DAY,
            gap_margin_s: p.gap_margin,
            lead_time_s: 600.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitConfig {
    pub raan_days: f64,
    pub approach_days: f64,
    pub ellipse_setup_days: f64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        let l = PhaseLimits::default();
        LimitConfig {
            raan_days: l.raan / DAY,
            approach_days: l.approach / DAY,
            ellipse_setup_days: l.ellipse_setup / DAY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NavConfig {
    pub period_min: f64,
    pub jitter_min: f64,
    pub seed: u64,
}

impl Default for NavConfig {
    fn default() -> Self {
        NavConfig {
            period_min: 175.0,
            jitter_min: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub step_s: f64,
    pub output_interval_s: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            step_s: 30.0,
            output_interval_s: 60.0,
        }
    }
}

/// A complete scenario as read from JSON. Angles are degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub target: TargetConfig,
    #[serde(default)]
    pub separation: SeparationConfig,
    #[serde(default = "default_commissioning")]
    pub commissioning_days: f64,
    #[serde(default = "default_circumnavigation")]
    pub circumnavigation_days: f64,
    #[serde(default)]
    pub spacecraft: SpacecraftConfig,
    #[serde(default)]
    pub gravity: GravityConstants,
    #[serde(default)]
    pub forces: ForceModelConfig,
    #[serde(default)]
    pub desired: DesiredConfig,
    #[serde(default)]
    pub thresholds: ThresholdConfig,
    #[serde(default)]
    pub planner: PlannerSettings,
    #[serde(default)]
    pub limits: LimitConfig,
    #[serde(default)]
    pub nav: NavConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_commissioning() -> f64 {
    30.0
}

fn default_circumnavigation() -> f64 {
    30.0
}

/// Scenario with the reference target orbit and every default.
pub fn reference_scenario() -> ScenarioConfig {
    ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        name: "reference".into(),
        target: TargetConfig {
            a_km: 6925.68,
            e: 0.0019,
            i_deg: 35.008,
            raan_deg: 3.006,
            argp_deg: 0.0,
            ta_deg: 0.0,
            mass_kg: 4.0,
        },
        separation: SeparationConfig::default(),
        commissioning_days: default_commissioning(),
        circumnavigation_days: default_circumnavigation(),
        spacecraft: SpacecraftConfig::default(),
        gravity: GravityConstants::EARTH,
        forces: ForceModelConfig::default(),
        desired: DesiredConfig::default(),
        thresholds: ThresholdConfig::default(),
        planner: PlannerSettings::default(),
        limits: LimitConfig::default(),
        nav: NavConfig::default(),
        integrator: IntegratorConfig::default(),
        output_dir: None,
    }
}

impl ScenarioConfig {
    /// Parses and validates. Parse failures name the offending key path;
    /// validation lists every violation.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "<root>".to_string() } else { path };
            Error::Config(vec![format!("{path}: {}", e.inner())])
        })?;
        let problems = cfg.validate();
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(problems))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(v) => Error::Config(v.into_iter().map(|m| format!("{}: {m}", path.display())).collect()),
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Every violated constraint, prefixed with its key path.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |path: &str, ok: bool, what: &str, v: f64| {
            if !ok {
                out.push(format!("{path}: {what}, got {v}"));
            }
        };
        let pos = |v: f64| v > 0.0 && v.is_finite();
        let nonneg = |v: f64| v >= 0.0 && v.is_finite();
        let fin = |v: f64| v.is_finite();

        if self.schema_version != SCHEMA_VERSION {
            check(
                "schema_version",
                false,
                &format!("unsupported schema version, expected {SCHEMA_VERSION}"),
                self.schema_version as f64,
            );
        }
        let t = &self.target;
        check("target.a_km", pos(t.a_km), "must be positive", t.a_km);
        check("target.e", t.e >= 0.0 && t.e < 1.0, "must be in [0, 1)", t.e);
        check(
            "target.i_deg",
            (0.0..=180.0).contains(&t.i_deg),
            "must be in [0, 180]",
            t.i_deg,
        );
        check("target.raan_deg", fin(t.raan_deg), "must be finite", t.raan_deg);
        check("target.argp_deg", fin(t.argp_deg), "must be finite", t.argp_deg);
        check("target.ta_deg", fin(t.ta_deg), "must be finite", t.ta_deg);
        check("target.mass_kg", pos(t.mass_kg), "must be positive", t.mass_kg);
        if pos(t.a_km) && t.e >= 0.0 && t.e < 1.0 && t.a_km * (1.0 - t.e) <= self.gravity.re {
            check(
                "target.a_km",
                false,
                "perigee must be above the central body surface",
                t.a_km * (1.0 - t.e),
            );
        }
        match &self.separation {
            SeparationConfig::Impulse {
                delta_v_mps,
                direction_rsw,
            } => {
                check(
                    "separation.delta_v_mps",
                    nonneg(*delta_v_mps),
                    "must be non-negative",
                    *delta_v_mps,
                );
                let norm = Vector3::from(*direction_rsw).norm();
                if *delta_v_mps > 0.0 {
                    check("separation.direction_rsw", pos(norm), "must be a nonzero vector", norm);
                }
            }
            SeparationConfig::MeanOffset {
                da_km,
                de,
                di_deg,
                draan_deg,
                du_deg,
            } => {
                for (k, v) in [
                    ("da_km", da_km),
                    ("de", de),
                    ("di_deg", di_deg),
                    ("draan_deg", draan_deg),
                    ("du_deg", du_deg),
                ] {
                    check(&format!("separation.{k}"), fin(*v), "must be finite", *v);
                }
            }
        }
        check(
            "commissioning_days",
            nonneg(self.commissioning_days),
            "must be non-negative",
            self.commissioning_days,
        );
        check(
            "circumnavigation_days",
            nonneg(self.circumnavigation_days),
            "must be non-negative",
            self.circumnavigation_days,
        );
        let s = &self.spacecraft;
        check(
            "spacecraft.wet_mass_kg",
            pos(s.wet_mass_kg),
            "must be positive",
            s.wet_mass_kg,
        );
        check("spacecraft.thrust_n", pos(s.thrust_n), "must be positive", s.thrust_n);
        check("spacecraft.isp_s", pos(s.isp_s), "must be positive", s.isp_s);
        check(
            "spacecraft.total_impulse_ns",
            nonneg(s.total_impulse_ns),
            "must be non-negative",
            s.total_impulse_ns,
        );
        check(
            "spacecraft.max_firing_s",
            pos(s.max_firing_s),
            "must be positive",
            s.max_firing_s,
        );
        if pos(s.isp_s) && pos(s.wet_mass_kg) {
            let propellant = s.total_impulse_ns / (s.isp_s * crate::G0);
            check(
                "spacecraft.total_impulse_ns",
                propellant < s.wet_mass_kg,
                "needs more propellant than the wet mass",
                s.total_impulse_ns,
            );
        }
        let g = &self.gravity;
        check("gravity.mu", pos(g.mu), "must be positive", g.mu);
        check("gravity.re", pos(g.re), "must be positive", g.re);
        check("gravity.j2", nonneg(g.j2), "must be non-negative", g.j2);
        for m in self.forces.validate() {
            out.push(format!("forces: {m}"));
        }
        let mut check = |path: &str, ok: bool, what: &str, v: f64| {
            if !ok {
                out.push(format!("{path}: {what}, got {v}"));
            }
        };
        check("desired.de", pos(self.desired.de), "must be positive", self.desired.de);
        check(
            "desired.di_deg",
            pos(self.desired.di_deg),
            "must be positive",
            self.desired.di_deg,
        );
        let th = &self.thresholds;
        check(
            "thresholds.approach_km",
            pos(th.approach_km),
            "must be positive",
            th.approach_km,
        );
        check(
            "thresholds.approach_reserve_km",
            nonneg(th.approach_reserve_km) && th.approach_reserve_km < th.approach_km,
            "must be non-negative and below thresholds.approach_km",
            th.approach_reserve_km,
        );
        let d = &th.deadbands;
        for (k, v) in [
            ("da_km", d.da_km),
            ("draan_deg", d.draan_deg),
            ("du_deg", d.du_deg),
            ("di_deg", d.di_deg),
            ("de", d.de),
        ] {
            check(&format!("thresholds.deadbands.{k}"), pos(v), "must be positive", v);
        }
        let p = &self.planner;
        check(
            "planner.raan_hold_da_km",
            pos(p.raan_hold_da_km),
            "must be positive",
            p.raan_hold_da_km,
        );
        check(
            "planner.arglat_hold_da_km",
            pos(p.arglat_hold_da_km),
            "must be positive",
            p.arglat_hold_da_km,
        );
        check(
            "planner.raan_coast_cap_days",
            pos(p.raan_coast_cap_days),
            "must be positive",
            p.raan_coast_cap_days,
        );
        check(
            "planner.arglat_coast_cap_days",
            pos(p.arglat_coast_cap_days),
            "must be positive",
            p.arglat_coast_cap_days,
        );
        check(
            "planner.gap_margin_s",
            nonneg(p.gap_margin_s),
            "must be non-negative",
            p.gap_margin_s,
        );
        check(
            "planner.lead_time_s",
            nonneg(p.lead_time_s),
            "must be non-negative",
            p.lead_time_s,
        );
        let l = &self.limits;
        check("limits.raan_days", pos(l.raan_days), "must be positive", l.raan_days);
        check(
            "limits.approach_days",
            pos(l.approach_days),
            "must be positive",
            l.approach_days,
        );
        check(
            "limits.ellipse_setup_days",
            pos(l.ellipse_setup_days),
            "must be positive",
            l.ellipse_setup_days,
        );
        let n = &self.nav;
        check(
            "nav.period_min",
            nonneg(n.period_min),
            "must be non-negative",
            n.period_min,
        );
        check(
            "nav.jitter_min",
            nonneg(n.jitter_min) && (n.period_min == 0.0 || n.jitter_min < 0.5 * n.period_min),
            "must be non-negative and below half of nav.period_min",
            n.jitter_min,
        );
        let i = &self.integrator;
        check("integrator.step_s", pos(i.step_s), "must be positive", i.step_s);
        check(
            "integrator.output_interval_s",
            pos(i.output_interval_s),
            "must be positive",
            i.output_interval_s,
        );
        out
    }

    pub fn target_elements(&self) -> Result<OrbitalElements> {
        let t = &self.target;
        OrbitalElements::from_degrees(
            t.a_km,
            t.e,
            t.i_deg,
            t.raan_deg,
            t.argp_deg,
            t.ta_deg,
            ElementFlavor::Osculating,
        )
    }

    pub fn propagator_setup(&self) -> PropagatorSetup {
        let s = &self.spacecraft;
        PropagatorSetup {
            constants: self.gravity,
            forces: self.forces,
            params: SpacecraftParams {
                wet_mass: s.wet_mass_kg,
                thrust: s.thrust_n,
                isp: s.isp_s,
                total_impulse: s.total_impulse_ns,
                max_firing_duration: s.max_firing_s,
            },
            step: self.integrator.step_s,
        }
    }

    pub fn planner_config(&self) -> PlannerConfig {
        let d = &self.thresholds.deadbands;
        let p = &self.planner;
        PlannerConfig {
            deadbands: Deadbands {
                da: d.da_km,
                draan: d.draan_deg.to_radians(),
                du: d.du_deg.to_radians(),
                di: d.di_deg.to_radians(),
                de: d.de,
            },
            raan_hold_da: p.raan_hold_da_km,
            arglat_hold_da: p.arglat_hold_da_km,
            raan_coast_cap: p.raan_coast_cap_days * DAY,
            arglat_coast_cap: p.arglat_coast_cap_days * DAY,
            gap_margin: p.gap_margin_s,
            ..PlannerConfig::default()
        }
    }

    pub fn separation(&self) -> Separation {
        match &self.separation {
            SeparationConfig::Impulse {
                delta_v_mps,
                direction_rsw,
            } => Separation::Impulse {
                delta_v: *delta_v_mps,
                direction: Vector3::from(*direction_rsw),
            },
            SeparationConfig::MeanOffset {
                da_km,
                de,
                di_deg,
                draan_deg,
                du_deg,
            } => Separation::MeanOffset(RelativeElements {
                da: *da_km,
                de: *de,
                di: di_deg.to_radians(),
                draan: draan_deg.to_radians(),
                du: du_deg.to_radians(),
                dlambda: 0.0,
            }),
        }
    }

    /// Converts to internal units. Call after validation.
    pub fn mission_config(&self) -> Result<MissionConfig> {
        let problems = self.validate();
        if !problems.is_empty() {
            return Err(Error::Config(problems));
        }
        let mut m = MissionConfig::new(self.target_elements()?);
        m.target_mass = self.target.mass_kg;
        m.separation = self.separation();
        m.setup = self.propagator_setup();
        m.planner = self.planner_config();
        m.desired = DesiredRelativeElements {
            de: self.desired.de,
            di: self.desired.di_deg.to_radians(),
        };
        m.navigation = NavigationModel {
            period: self.nav.period_min * 60.0,
            jitter: self.nav.jitter_min * 60.0,
            seed: self.nav.seed,
        };
        m.commissioning = self.commissioning_days * DAY;
        m.circumnavigation = self.circumnavigation_days * DAY;
        m.approach_threshold = self.thresholds.approach_km;
        m.approach_reserve = self.thresholds.approach_reserve_km;
        m.limits = PhaseLimits {
            raan: self.limits.raan_days * DAY,
            approach: self.limits.approach_days * DAY,
            ellipse_setup: self.limits.ellipse_setup_days * DAY,
        };
        m.lead_time = self.planner.lead_time_s;
        m.output_interval = self.integrator.output_interval_s;
        Ok(m)
    }
}
