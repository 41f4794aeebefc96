//! Fixtures shared by the benchmarks.

use rpo_core::maneuver::PlanningContext;
use rpo_core::scenario::{ScenarioConfig, REFERENCE_SCENARIO_JSON};
use rpo_core::{osc_to_mean, EciState, OrbitalElements};

pub fn scenario() -> ScenarioConfig {
    ScenarioConfig::from_json(REFERENCE_SCENARIO_JSON).expect("bundled scenario parses")
}

/// Osculating target elements of the reference scenario.
pub fn target_osculating() -> OrbitalElements {
    scenario().target_elements().expect("valid target")
}

/// Target and chaser states right after separation.
pub fn initial_states() -> (EciState, EciState) {
    scenario()
        .mission_config()
        .and_then(|m| m.initial_states())
        .expect("valid separation")
}

/// Context for a node correction with the chaser 0.2 deg behind in RAAN.
pub fn raan_context() -> PlanningContext {
    let sc = scenario();
    let m = sc.mission_config().expect("valid scenario");
    let c = m.setup.constants;
    let target = osc_to_mean(&m.target, &c).expect("mean target");
    let mut chaser = target;
    chaser.raan -= 0.2f64.to_radians();
    PlanningContext {
        target,
        chaser,
        epoch: 0.0,
        chaser_mass: m.setup.params.wet_mass,
        earliest_start: m.lead_time,
        constants: c,
        params: m.setup.params,
        config: m.planner,
    }
}
