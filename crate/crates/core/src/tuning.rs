//! Diagnostic series for threshold selection.
//!
//! Neither threshold has a closed-form selection rule; practitioners look at
//! the per-event window values of a device and pick a bound that separates
//! the near-zero periods from the rest. This module emits exactly the values
//! the classifiers use — it delegates to them and never recomputes.

use crate::distance;
use crate::event::DeviceStream;
use crate::time;

/// What a diagnostic series measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Maximum sliding-count-window distance, meters.
    Mscw,
    /// Elapsed time across the window lag, seconds.
    TimeDiff,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::Mscw => "mscw",
            SeriesKind::TimeDiff => "time_diff",
        }
    }
}

/// Per-event window values of one device, ordered by event seq.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSeries {
    pub device_id: String,
    pub kind: SeriesKind,
    pub k: usize,
    /// (seq, value) in seq order; empty when the stream has at most `k`
    /// events.
    pub values: Vec<(u32, f64)>,
}

/// mscw values of a stream, identical to what the distance classifier sees.
pub fn mscw_series(stream: &DeviceStream, k: usize) -> DiagnosticSeries {
    DiagnosticSeries {
        device_id: stream.device_id().to_string(),
        kind: SeriesKind::Mscw,
        k,
        values: distance::mscw(stream, k).iter().collect(),
    }
}

/// Elapsed-time values of a stream, identical to what the time classifier
/// sees.
pub fn timediff_series(stream: &DeviceStream, k: usize) -> DiagnosticSeries {
    DiagnosticSeries {
        device_id: stream.device_id().to_string(),
        kind: SeriesKind::TimeDiff,
        k,
        values: time::time_diffs(stream, k).iter().collect(),
    }
}
