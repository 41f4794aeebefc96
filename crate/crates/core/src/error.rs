use thiserror::Error;

use crate::propagator::{ScheduleViolation, ThrustSegment};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("undefined RSW frame: {0}")]
    UndefinedFrame(&'static str),
    #[error("epoch mismatch: target at {target} s, chaser at {chaser} s")]
    EpochMismatch { target: f64, chaser: f64 },
    #[error("orbit is not a bound ellipse (e = {eccentricity})")]
    Unbound { eccentricity: f64 },
    #[error("invalid orbital elements: {0}")]
    InvalidElements(String),
    #[error("mean element conversion undefined: {0}")]
    MeanElements(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("spacecraft decayed: |r| = {radius_km:.3} km at t = {epoch:.1} s")]
    Decayed { epoch: f64, radius_km: f64 },
    #[error("invalid firing schedule: {}", format_violations(.0))]
    Schedule(Vec<ScheduleViolation>),
    #[error("impulse budget exceeded by segment {segment:?}: needs {required:.3} N*s, {available:.3} N*s left")]
    ImpulseBudget {
        segment: ThrustSegment,
        required: f64,
        available: f64,
    },
    #[error("planner: {0}")]
    Planner(String),
    #[error("trajectory too short: spans {span:.1} s, needs at least {needed:.1} s")]
    TrajectoryTooShort { span: f64, needed: f64 },
    #[error("mission aborted in {phase} at t = {epoch:.1} s: {reason}")]
    MissionAbort { phase: String, epoch: f64, reason: String },
    #[error("configuration error:\n{}", .0.join("\n"))]
    Config(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[ScheduleViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
