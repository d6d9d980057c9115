//! Ready-made scenario layouts.
//!
//! `demo_hall` is a small mixed scene whose map shows all four classes;
//! `paper_scale` stresses the pipeline with 401 devices and a bit over
//! 3.5 million events. Both derive every device seed from one master seed.

use super::{derive_seed, DeviceScenario, Scenario, ScenarioKind};

fn device(
    master_seed: u64,
    id: &str,
    kind: ScenarioKind,
    noise_sigma: f64,
    duration: f64,
    offset: (f64, f64),
) -> DeviceScenario {
    DeviceScenario {
        device_id: id.to_string(),
        scenario: Scenario { kind, noise_sigma, duration, seed: derive_seed(master_seed, id) },
        offset,
    }
}

/// A small hall (about 60 x 30 m) with transport routes, two storage spots,
/// a queue, a quasi-continuously shaking press and a hard-shaking saw.
///
/// With the default parameters (k=10, r=1.5, b=15) the resulting map shows
/// green route bands, red storage cells, a yellow queue/machine region and
/// orange cells around the saw.
pub fn demo_hall(master_seed: u64, noise_sigma: f64) -> Vec<DeviceScenario> {
    vec![
        device(
            master_seed,
            "lift-01",
            ScenarioKind::Route {
                waypoints: vec![(2.0, 2.0), (55.0, 2.0), (55.0, 26.0), (2.0, 26.0), (2.0, 2.0)],
                speed: 1.2,
                rate_hz: 1.0,
            },
            noise_sigma,
            1800.0,
            (0.0, 0.0),
        ),
        device(
            master_seed,
            "lift-02",
            ScenarioKind::Route {
                waypoints: vec![(5.0, 14.0), (50.0, 14.0)],
                speed: 1.0,
                rate_hz: 1.0,
            },
            noise_sigma,
            1800.0,
            (0.0, 0.0),
        ),
        device(
            master_seed,
            "tug-01",
            ScenarioKind::Route {
                waypoints: vec![(10.0, 4.0), (10.0, 22.0), (30.0, 22.0)],
                speed: 0.8,
                rate_hz: 1.0,
            },
            noise_sigma,
            1800.0,
            (0.0, 0.0),
        ),
        device(
            master_seed,
            "queue-01",
            ScenarioKind::Queue { step_len: 0.03, step_period: 1.0 },
            noise_sigma,
            600.0,
            (20.5, 8.5),
        ),
        device(
            master_seed,
            "store-01",
            ScenarioKind::DwellDiscrete { mean_gap: 60.0 },
            noise_sigma,
            1800.0,
            (40.5, 20.5),
        ),
        device(
            master_seed,
            "store-02",
            ScenarioKind::DwellDiscrete { mean_gap: 90.0 },
            noise_sigma,
            1800.0,
            (12.5, 10.5),
        ),
        device(
            master_seed,
            "press-01",
            ScenarioKind::MachineShake { period: 1.0, amplitude: 0.3 },
            noise_sigma,
            1800.0,
            (47.5, 8.5),
        ),
        device(
            master_seed,
            "saw-01",
            ScenarioKind::MachineShake { period: 30.0, amplitude: 1.8 },
            noise_sigma,
            3600.0,
            (33.5, 18.5),
        ),
    ]
}

/// Full-scale preset: 401 devices totalling a bit over 3.5 million events
/// in a 120 x 60 m hall. Device mix: 320 transport routes, 40 queues,
/// 26 quasi-continuous shakers, 10 hard shakers, 5 discrete dwellers.
pub fn paper_scale(master_seed: u64) -> Vec<DeviceScenario> {
    let noise = 0.1;
    let mut devices = Vec::with_capacity(401);
    for i in 0..320u32 {
        let lane = 2.0 + f64::from(i % 29) * 2.0;
        let x0 = 2.0 + f64::from(i % 7);
        let x1 = 118.0 - f64::from(i % 5);
        let kind = if i % 3 == 0 {
            // an L-shaped run to break up the straight lanes
            ScenarioKind::Route {
                waypoints: vec![(x0, lane), (x1, lane), (x1, (lane + 17.0).min(58.0))],
                speed: 0.8 + 0.2 * f64::from(i % 4),
                rate_hz: 1.0,
            }
        } else {
            ScenarioKind::Route {
                waypoints: vec![(x0, lane), (x1, lane)],
                speed: 0.8 + 0.2 * f64::from(i % 4),
                rate_hz: 1.0,
            }
        };
        devices.push(device(master_seed, &format!("lift-{i:03}"), kind, noise, 9800.0, (0.0, 0.0)));
    }
    for i in 0..40u32 {
        devices.push(device(
            master_seed,
            &format!("queue-{i:02}"),
            ScenarioKind::Queue { step_len: 0.01, step_period: 1.0 },
            noise,
            3600.0,
            (4.0 + f64::from(i % 10) * 11.0, 3.5 + f64::from(i / 10) * 14.0),
        ));
    }
    for i in 0..26u32 {
        devices.push(device(
            master_seed,
            &format!("press-{i:02}"),
            ScenarioKind::MachineShake { period: 1.0, amplitude: 0.3 },
            noise,
            9800.0,
            (7.5 + f64::from(i % 13) * 8.0, 12.5 + f64::from(i / 13) * 30.0),
        ));
    }
    for i in 0..10u32 {
        devices.push(device(
            master_seed,
            &format!("saw-{i:02}"),
            ScenarioKind::MachineShake { period: 30.0, amplitude: 2.0 },
            noise,
            9800.0,
            (10.5 + f64::from(i) * 10.0, 47.5),
        ));
    }
    for i in 0..5u32 {
        devices.push(device(
            master_seed,
            &format!("store-{i:02}"),
            ScenarioKind::DwellDiscrete { mean_gap: 60.0 },
            noise,
            9800.0,
            (15.5 + f64::from(i) * 20.0, 55.5),
        ));
    }
    devices
}
