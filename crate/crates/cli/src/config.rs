//! Scenario file schema (TOML).
//!
//! ```toml
//! master_seed = 42
//! noise_sigma = 0.1            # default for devices without their own
//!
//! [[device]]
//! id = "lift-01"
//! kind = "route"
//! waypoints = [[2.0, 2.0], [55.0, 2.0]]
//! speed = 1.2
//! rate_hz = 1.0
//! duration = 1800.0
//! offset = [0.0, 0.0]          # optional, defaults to [0, 0]
//! # seed = 7                   # optional, derived from master_seed + id
//! # noise_sigma = 0.05         # optional per-device override
//!
//! [[device]]
//! id = "store-01"
//! kind = "dwell_discrete"
//! mean_gap = 60.0
//! duration = 1800.0
//! offset = [40.5, 20.5]
//! ```
//!
//! Scenario kinds and their fields: `route` (waypoints, speed, rate_hz),
//! `queue` (step_len, step_period), `dwell_discrete` (mean_gap),
//! `machine_shake` (period, amplitude).

use anyhow::{bail, Context, Result};
use hallmap::sim::{derive_seed, DeviceScenario, Scenario, ScenarioKind};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub master_seed: u64,
    pub noise_sigma: Option<f64>,
    #[serde(default)]
    pub device: Vec<RawDevice>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawKind {
    Route {
        waypoints: Vec<(f64, f64)>,
        speed: f64,
        rate_hz: f64,
    },
    Queue {
        step_len: f64,
        step_period: f64,
    },
    DwellDiscrete {
        mean_gap: f64,
    },
    MachineShake {
        period: f64,
        amplitude: f64,
    },
}

#[derive(Debug, Deserialize)]
pub struct RawDevice {
    id: String,
    #[serde(flatten)]
    kind: RawKind,
    duration: f64,
    noise_sigma: Option<f64>,
    seed: Option<u64>,
    #[serde(default)]
    offset: (f64, f64),
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).context("invalid scenario file")?;
        if file.device.is_empty() {
            bail!("scenario file declares no [[device]] entries");
        }
        Ok(file)
    }

    /// Expands the file into concrete device scenarios, deriving missing
    /// seeds from the master seed and filling the noise default.
    pub fn devices(&self) -> Vec<DeviceScenario> {
        self.device
            .iter()
            .map(|raw| {
                let kind = match &raw.kind {
                    RawKind::Route { waypoints, speed, rate_hz } => ScenarioKind::Route {
                        waypoints: waypoints.clone(),
                        speed: *speed,
                        rate_hz: *rate_hz,
                    },
                    RawKind::Queue { step_len, step_period } => ScenarioKind::Queue {
                        step_len: *step_len,
                        step_period: *step_period,
                    },
                    RawKind::DwellDiscrete { mean_gap } => {
                        ScenarioKind::DwellDiscrete { mean_gap: *mean_gap }
                    }
                    RawKind::MachineShake { period, amplitude } => ScenarioKind::MachineShake {
                        period: *period,
                        amplitude: *amplitude,
                    },
                };
                DeviceScenario {
                    device_id: raw.id.clone(),
                    scenario: Scenario {
                        kind,
                        noise_sigma: raw
                            .noise_sigma
                            .or(self.noise_sigma)
                            .unwrap_or(0.0),
                        duration: raw.duration,
                        seed: raw.seed.unwrap_or_else(|| derive_seed(self.master_seed, &raw.id)),
                    },
                    offset: raw.offset,
                }
            })
            .collect()
    }
}
