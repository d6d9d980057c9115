//! End-to-end wiring: classify every stream with both criteria, fuse the
//! labels and optionally aggregate onto a grid.
//!
//! Devices are independent, so the per-device pass can fan out across
//! threads (feature `parallel`). Results are reduced by commutative count
//! addition and collected in device order, so the parallelism degree never
//! changes a single output value.

use crate::distance::{self, DistanceParams};
use crate::event::{DeviceStream, EventLog};
use crate::fusion::{fuse, FusedClass};
use crate::grid::{GridMap, GridSpec};
use crate::label::MovementLabel;
use crate::time::{self, TimeParams};

/// Parameter set of a full classification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyParams {
    pub distance: DistanceParams,
    pub time: TimeParams,
}

impl Default for ClassifyParams {
    /// The reference parameterization: k = 10 for both windows,
    /// r = 1.5 m, b = 15 s.
    fn default() -> Self {
        ClassifyParams {
            distance: DistanceParams { k: 10, r: 1.5 },
            time: TimeParams { k: 10, b: 15.0 },
        }
    }
}

/// Full per-event classification of one device, all vectors aligned with
/// the stream's events.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceClassification {
    pub device_id: String,
    /// mscw per event, `None` during the distance burn-in.
    pub mscw: Vec<Option<f64>>,
    pub dist_labels: Vec<MovementLabel>,
    /// Elapsed time per event, `None` during the time burn-in.
    pub time_diffs: Vec<Option<f64>>,
    pub time_labels: Vec<MovementLabel>,
    pub fused: Vec<FusedClass>,
}

/// Runs both classifiers on one stream and fuses the labels.
pub fn classify_stream(stream: &DeviceStream, params: &ClassifyParams) -> DeviceClassification {
    let n = stream.len();
    let mscw_series = distance::mscw(stream, params.distance.k);
    let diff_series = time::time_diffs(stream, params.time.k);

    let dist_burnin = n.min(params.distance.k);
    let mut mscw = vec![None; dist_burnin];
    mscw.extend(mscw_series.values().iter().map(|&v| Some(v)));
    let mut dist_labels = vec![MovementLabel::Burnin; dist_burnin];
    dist_labels.extend(mscw_series.values().iter().map(|&v| params.distance.label(v)));

    let time_burnin = n.min(params.time.k);
    let mut time_diffs = vec![None; time_burnin];
    time_diffs.extend(diff_series.values().iter().map(|&v| Some(v)));
    let mut time_labels = vec![MovementLabel::Burnin; time_burnin];
    time_labels.extend(diff_series.values().iter().map(|&v| params.time.label(v)));

    let fused = dist_labels
        .iter()
        .zip(&time_labels)
        .map(|(&d, &t)| fuse(d, t))
        .collect();

    DeviceClassification {
        device_id: stream.device_id().to_string(),
        mscw,
        dist_labels,
        time_diffs,
        time_labels,
        fused,
    }
}

/// Label and class tallies of one device or a whole run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LabelTally {
    pub events: u64,
    pub dist_ame: u64,
    pub dist_uae: u64,
    pub time_ame: u64,
    pub time_uae: u64,
    /// Fused classes 1..=4, indexed by class number - 1.
    pub classes: [u64; 4],
    pub unfused: u64,
}

impl LabelTally {
    pub fn add(&mut self, dist: MovementLabel, time: MovementLabel, fused: FusedClass) {
        self.events += 1;
        match dist {
            MovementLabel::Ame => self.dist_ame += 1,
            MovementLabel::Uae => self.dist_uae += 1,
            MovementLabel::Burnin => {}
        }
        match time {
            MovementLabel::Ame => self.time_ame += 1,
            MovementLabel::Uae => self.time_uae += 1,
            MovementLabel::Burnin => {}
        }
        match fused.index() {
            Some(i) => self.classes[i] += 1,
            None => self.unfused += 1,
        }
    }

    pub fn merge(&mut self, other: &LabelTally) {
        self.events += other.events;
        self.dist_ame += other.dist_ame;
        self.dist_uae += other.dist_uae;
        self.time_ame += other.time_ame;
        self.time_uae += other.time_uae;
        for (a, b) in self.classes.iter_mut().zip(other.classes) {
            *a += b;
        }
        self.unfused += other.unfused;
    }

    pub fn fused_total(&self) -> u64 {
        self.classes.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSummary {
    pub device_id: String,
    pub tally: LabelTally,
}

/// Outcome of a full run over an event log.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    /// Per-device tallies in device-id order.
    pub devices: Vec<DeviceSummary>,
    pub total: LabelTally,
    /// Present when a grid spec was supplied.
    pub grid: Option<GridMap>,
}

fn device_pass(
    stream: &DeviceStream,
    params: &ClassifyParams,
    grid_spec: Option<GridSpec>,
) -> (DeviceSummary, Option<GridMap>) {
    let n = stream.len();
    let mscw_series = distance::mscw(stream, params.distance.k);
    let diff_series = time::time_diffs(stream, params.time.k);
    let mut tally = LabelTally::default();
    let mut grid = grid_spec.map(GridMap::empty);

    for (idx, event) in stream.events().iter().enumerate() {
        let dist = if idx < params.distance.k {
            MovementLabel::Burnin
        } else {
            params.distance.label(mscw_series.values()[idx - params.distance.k])
        };
        let time = if idx < params.time.k {
            MovementLabel::Burnin
        } else {
            params.time.label(diff_series.values()[idx - params.time.k])
        };
        let fused = fuse(dist, time);
        tally.add(dist, time, fused);
        if let Some(grid) = grid.as_mut() {
            grid.add(event.pos, fused);
        }
    }
    debug_assert_eq!(tally.events, n as u64);

    (
        DeviceSummary { device_id: stream.device_id().to_string(), tally },
        grid,
    )
}

/// Classifies, fuses and (optionally) grids a whole log.
///
/// `threads`: 0 uses the process-wide default pool, 1 forces a sequential
/// pass, n > 1 runs on a dedicated pool of n threads. Without the
/// `parallel` feature every value runs sequentially.
pub fn analyze(
    log: &EventLog,
    params: &ClassifyParams,
    grid_spec: Option<GridSpec>,
    threads: usize,
) -> Analysis {
    let streams: Vec<&DeviceStream> = log.streams().collect();
    let results = run_passes(&streams, params, grid_spec, threads);

    let mut devices = Vec::with_capacity(results.len());
    let mut total = LabelTally::default();
    let mut grid = grid_spec.map(GridMap::empty);
    for (summary, partial) in results {
        total.merge(&summary.tally);
        devices.push(summary);
        if let Some(part) = partial {
            grid = Some(match grid.take() {
                Some(acc) => acc.merge(part),
                None => part,
            });
        }
    }
    Analysis { devices, total, grid }
}

#[cfg(feature = "parallel")]
fn run_passes(
    streams: &[&DeviceStream],
    params: &ClassifyParams,
    grid_spec: Option<GridSpec>,
    threads: usize,
) -> Vec<(DeviceSummary, Option<GridMap>)> {
    use rayon::prelude::*;
    match threads {
        1 => streams
            .iter()
            .map(|s| device_pass(s, params, grid_spec))
            .collect(),
        0 => streams
            .par_iter()
            .map(|s| device_pass(s, params, grid_spec))
            .collect(),
        n => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool");
            pool.install(|| {
                streams
                    .par_iter()
                    .map(|s| device_pass(s, params, grid_spec))
                    .collect()
            })
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run_passes(
    streams: &[&DeviceStream],
    params: &ClassifyParams,
    grid_spec: Option<GridSpec>,
    _threads: usize,
) -> Vec<(DeviceSummary, Option<GridMap>)> {
    streams
        .iter()
        .map(|s| device_pass(s, params, grid_spec))
        .collect()
}

/// Grid spec with the origin fitted to the log's bounding box, the default
/// when no explicit origin is configured.
pub fn fitted_grid_spec(
    log: &EventLog,
    cell_size: f64,
    min_events: usize,
) -> Result<GridSpec, crate::grid::GridError> {
    match log.bounds() {
        Some((lo, _)) => GridSpec::fitted((lo.x, lo.y), cell_size, min_events),
        None => GridSpec::new((0.0, 0.0), cell_size, min_events),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::classify_distance;
    use crate::event::Point3;
    use crate::sim::{self, presets};
    use crate::time::classify_time;

    fn demo_log() -> EventLog {
        sim::compose(&presets::demo_hall(11, 0.1)).unwrap().log
    }

    #[test]
    fn classify_stream_matches_single_classifiers() {
        let log = demo_log();
        let params = ClassifyParams::default();
        for stream in log.streams() {
            let cls = classify_stream(stream, &params);
            assert_eq!(cls.dist_labels, classify_distance(stream, &params.distance));
            assert_eq!(cls.time_labels, classify_time(stream, &params.time));
            assert_eq!(cls.fused.len(), stream.len());
            for ((&d, &t), &f) in cls.dist_labels.iter().zip(&cls.time_labels).zip(&cls.fused) {
                assert_eq!(f, fuse(d, t));
            }
        }
    }

    #[test]
    fn analyze_tallies_match_per_stream_classification() {
        let log = demo_log();
        let params = ClassifyParams::default();
        let analysis = analyze(&log, &params, None, 1);

        let mut expected = LabelTally::default();
        for stream in log.streams() {
            let cls = classify_stream(stream, &params);
            for ((&d, &t), &f) in cls.dist_labels.iter().zip(&cls.time_labels).zip(&cls.fused) {
                expected.add(d, t, f);
            }
        }
        assert_eq!(analysis.total, expected);
        assert_eq!(analysis.total.events, log.total_events() as u64);
        assert_eq!(analysis.devices.len(), log.device_count());
    }

    #[test]
    fn parallel_and_sequential_runs_are_identical() {
        let log = demo_log();
        let params = ClassifyParams::default();
        let spec = fitted_grid_spec(&log, 1.0, 5).unwrap();
        let serial = analyze(&log, &params, Some(spec), 1);
        let parallel = analyze(&log, &params, Some(spec), 4);
        assert_eq!(serial, parallel);
    }

    #[test]
    fn grid_conserves_event_count() {
        let log = demo_log();
        let spec = fitted_grid_spec(&log, 1.0, 5).unwrap();
        let analysis = analyze(&log, &ClassifyParams::default(), Some(spec), 0);
        let grid = analysis.grid.unwrap();
        assert_eq!(grid.total_events(), log.total_events() as u64);
    }

    #[test]
    fn fitted_spec_floors_origin() {
        let (stream, _) = DeviceStream::build(
            "d",
            vec![(Point3::new(3.2, -0.7, 0.0), 0.0), (Point3::new(8.0, 4.0, 0.0), 1.0)],
        );
        let log = EventLog::from_streams([stream]).unwrap();
        let spec = fitted_grid_spec(&log, 1.0, 5).unwrap();
        assert_eq!(spec.origin, (3.0, -1.0));
    }
}
