//! Event data model: position events, per-device streams and the event log.
//!
//! A positioning system emits records of the form (device id, 3-D position,
//! timestamp). Grouped by device and ordered by time they form a
//! [`DeviceStream`], the unit on which both classifiers run. The full
//! collection of streams is an [`EventLog`]. Once built, an `EventLog` is
//! immutable and safe to share across threads.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A position in hall coordinates, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn translated(&self, dx: f64, dy: f64, dz: f64) -> Point3 {
        Point3::new(self.x + dx, self.y + dy, self.z + dz)
    }

    /// Componentwise minimum, used for bounding boxes.
    pub fn min(&self, other: &Point3) -> Point3 {
        Point3::new(self.x.min(other.x), self.y.min(other.y), self.z.min(other.z))
    }

    /// Componentwise maximum.
    pub fn max(&self, other: &Point3) -> Point3 {
        Point3::new(self.x.max(other.x), self.y.max(other.y), self.z.max(other.z))
    }
}

/// One sensor emission: which device reported itself, where and when.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionEvent {
    pub device_id: String,
    /// 1-based chronological ordinal within the device, assigned when the
    /// stream is built.
    pub seq: u32,
    /// Position in meters.
    pub pos: Point3,
    /// Timestamp in seconds since epoch, fractional allowed.
    pub t: f64,
}

/// Chronologically ordered events of one device.
///
/// Invariants, enforced by [`DeviceStream::build`]: timestamps are
/// non-decreasing (ties keep input order), all events carry the stream's
/// device id, and `seq` runs 1..=n contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceStream {
    device_id: String,
    events: Vec<PositionEvent>,
}

impl DeviceStream {
    /// Builds a stream from raw (position, timestamp) samples.
    ///
    /// Samples are stable-sorted by timestamp and `seq` is assigned in the
    /// resulting order. Returns the stream and the number of samples that
    /// arrived with a timestamp strictly below their predecessor's.
    pub fn build(device_id: impl Into<String>, samples: Vec<(Point3, f64)>) -> (Self, usize) {
        let device_id = device_id.into();
        let out_of_order = samples
            .windows(2)
            .filter(|pair| pair[1].1 < pair[0].1)
            .count();
        let mut samples = samples;
        samples.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite timestamps"));
        let events = samples
            .into_iter()
            .enumerate()
            .map(|(idx, (pos, t))| PositionEvent {
                device_id: device_id.clone(),
                seq: idx as u32 + 1,
                pos,
                t,
            })
            .collect();
        (DeviceStream { device_id, events }, out_of_order)
    }

    pub fn device_id(&self) -> &str {
        &self.device_id
    }

    pub fn events(&self) -> &[PositionEvent] {
        &self.events
    }

    /// Number of events, the paper's n per device.
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogError {
    #[error("duplicate device id {0:?}")]
    DuplicateDevice(String),
}

/// All device streams of one observation period.
///
/// Streams iterate in device-id order, so every derived output is
/// deterministic regardless of input interleaving.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    streams: BTreeMap<String, DeviceStream>,
}

impl EventLog {
    pub fn new() -> Self {
        EventLog::default()
    }

    /// Collects streams, rejecting duplicate device ids.
    pub fn from_streams(streams: impl IntoIterator<Item = DeviceStream>) -> Result<Self, LogError> {
        let mut map = BTreeMap::new();
        for stream in streams {
            let id = stream.device_id().to_string();
            if map.insert(id.clone(), stream).is_some() {
                return Err(LogError::DuplicateDevice(id));
            }
        }
        Ok(EventLog { streams: map })
    }

    /// Number of distinct devices, the paper's K.
    pub fn device_count(&self) -> usize {
        self.streams.len()
    }

    pub fn total_events(&self) -> usize {
        self.streams.values().map(DeviceStream::len).sum()
    }

    pub fn get(&self, device_id: &str) -> Option<&DeviceStream> {
        self.streams.get(device_id)
    }

    /// Streams in device-id order.
    pub fn streams(&self) -> impl Iterator<Item = &DeviceStream> {
        self.streams.values()
    }

    /// Bounding box over all event positions, `None` for an empty log.
    pub fn bounds(&self) -> Option<(Point3, Point3)> {
        let mut bounds: Option<(Point3, Point3)> = None;
        for stream in self.streams.values() {
            for event in stream.events() {
                bounds = Some(match bounds {
                    None => (event.pos, event.pos),
                    Some((lo, hi)) => (lo.min(&event.pos), hi.max(&event.pos)),
                });
            }
        }
        bounds
    }
}

/// Per-device statistics reported by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceValidation {
    pub device_id: String,
    pub n: usize,
    /// Events sharing a timestamp with their predecessor.
    pub duplicate_timestamps: usize,
    pub min_pos: Point3,
    pub max_pos: Point3,
    /// Last timestamp minus first, seconds.
    pub time_span: f64,
}

/// Pure inspection report over an event log; never mutates it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub devices: Vec<DeviceValidation>,
    pub warnings: Vec<String>,
}

/// Summarizes each stream: event count, duplicate timestamps, coordinate
/// ranges and time span. Empty streams are excluded with a warning.
pub fn validate(log: &EventLog) -> ValidationReport {
    let mut report = ValidationReport::default();
    for stream in log.streams() {
        let events = stream.events();
        if events.is_empty() {
            report
                .warnings
                .push(format!("device {:?} has no events", stream.device_id()));
            continue;
        }
        let mut min_pos = events[0].pos;
        let mut max_pos = events[0].pos;
        let mut duplicates = 0;
        for pair in events.windows(2) {
            if pair[1].t == pair[0].t {
                duplicates += 1;
            }
        }
        for event in events {
            min_pos = min_pos.min(&event.pos);
            max_pos = max_pos.max(&event.pos);
        }
        report.devices.push(DeviceValidation {
            device_id: stream.device_id().to_string(),
            n: events.len(),
            duplicate_timestamps: duplicates,
            min_pos,
            max_pos,
            time_span: events[events.len() - 1].t - events[0].t,
        });
    }
    report
}
