use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::orbit::{cart_to_elements, osc_to_mean, EciState, GravityConstants, OrbitalElements, RelativeElements};
use crate::propagator::PropagationResult;

/// Ground-processing cadence of relative orbit information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavigationModel {
    /// Mean update period, s. Zero means the estimate is always current.
    pub period: f64,
    /// Half-width of the uniform jitter on each update epoch, s.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for NavigationModel {
    fn default() -> Self {
        NavigationModel {
            period: 175.0 * 60.0,
            jitter: 0.0,
            seed: 0,
        }
    }
}

impl NavigationModel {
    pub fn zero_latency() -> Self {
        NavigationModel {
            period: 0.0,
            jitter: 0.0,
            seed: 0,
        }
    }

    pub fn clock(&self, t0: f64) -> NavClock {
        NavClock {
            model: *self,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            k: 0,
            t0,
        }
    }

    /// Update epochs in `[t0, t_end]`.
    pub fn update_times(&self, t0: f64, t_end: f64) -> Vec<f64> {
        if self.period <= 0.0 {
            return Vec::new();
        }
        self.clock(t0).take_while(|&t| t <= t_end).collect()
    }

    /// Most recent update epoch at or before `t`; `t` itself for a
    /// zero-latency model.
    pub fn last_update_at_or_before(&self, t0: f64, t: f64) -> f64 {
        if self.period <= 0.0 {
            return t;
        }
        self.clock(t0).take_while(|&u| u <= t).last().unwrap_or(t0)
    }
}

/// Deterministic stream of update epochs `t0 + kP + U(-J, J)`, the first one
/// pinned to `t0`.
#[derive(Debug, Clone)]
pub struct NavClock {
    model: NavigationModel,
    rng: ChaCha8Rng,
    k: u64,
    t0: f64,
}

impl Iterator for NavClock {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.model.period <= 0.0 {
            return None;
        }
        let k = self.k;
        self.k += 1;
        let nominal = self.t0 + k as f64 * self.model.period;
        let j = self.model.jitter.min(0.49 * self.model.period);
        if k == 0 || j <= 0.0 {
            return Some(nominal);
        }
        Some(nominal + self.rng.random_range(-j..=j))
    }
}

/// Latency-held mean element estimate of both spacecraft.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavUpdate {
    /// Epoch the elements are valid at, s.
    pub epoch: f64,
    pub target: OrbitalElements,
    pub chaser: OrbitalElements,
    pub chaser_mass: f64,
    /// When the next update is expected, s.
    pub next_due: f64,
}

impl NavUpdate {
    pub fn from_states(
        target: &EciState,
        chaser: &EciState,
        next_due: f64,
        constants: &GravityConstants,
    ) -> Result<Self> {
        Ok(NavUpdate {
            epoch: target.epoch,
            target: osc_to_mean(&cart_to_elements(target, constants)?, constants)?,
            chaser: osc_to_mean(&cart_to_elements(chaser, constants)?, constants)?,
            chaser_mass: chaser.mass,
            next_due,
        })
    }

    pub fn relative(&self) -> RelativeElements {
        RelativeElements::between(&self.target, &self.chaser)
    }
}

/// Estimate available at time `t`: truth at the latest update epoch not
/// after `t`, as mean elements. Uses the nearest recorded sample at or
/// before that epoch.
pub fn navigation(
    truth: &PropagationResult,
    t: f64,
    model: &NavigationModel,
    constants: &GravityConstants,
) -> Result<NavUpdate> {
    let t0 = truth.times.first().copied().unwrap_or(0.0);
    let epoch = model.last_update_at_or_before(t0, t);
    let idx = match truth.times.partition_point(|&x| x <= epoch) {
        0 => 0,
        k => k - 1,
    };
    let next_due = if model.period <= 0.0 {
        t
    } else {
        model.clock(t0).find(|&u| u > epoch).unwrap_or(f64::INFINITY)
    };
    NavUpdate::from_states(&truth.target[idx], &truth.chaser[idx], next_due, constants)
}
