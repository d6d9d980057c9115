//! Time-based classifier.
//!
//! Coordinates are ignored entirely: for each event the elapsed time to its
//! `k`th-last predecessor is computed. An actual movement emits positions
//! quasi-continuously, so a small elapsed time (at most `b` seconds) is
//! labeled AME; a long one hints at discrete awakenings and is labeled UAE.
//! Being free of positions makes this criterion immune to measurement noise.

use thiserror::Error;

use crate::event::DeviceStream;
use crate::label::MovementLabel;

/// Parameters of the time-based classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeParams {
    /// Lag in events across which the elapsed time is measured.
    pub k: usize,
    /// Time threshold, seconds. An elapsed time up to and including `b`
    /// means AME.
    pub b: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("lag k must be >= 1")]
    ZeroLag,
    #[error("threshold must be finite and >= 0, got {0}")]
    BadThreshold(f64),
}

impl TimeParams {
    pub fn new(k: usize, b: f64) -> Result<Self, ParamError> {
        if k == 0 {
            return Err(ParamError::ZeroLag);
        }
        if !b.is_finite() || b < 0.0 {
            return Err(ParamError::BadThreshold(b));
        }
        Ok(TimeParams { k, b })
    }

    /// The classification rule: AME iff the elapsed time is at most `b`.
    pub fn label(&self, diff: f64) -> MovementLabel {
        if diff <= self.b {
            MovementLabel::Ame
        } else {
            MovementLabel::Uae
        }
    }
}

/// Elapsed times of one device, one per event past the burn-in phase.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDiffSeries {
    k: usize,
    values: Vec<f64>,
}

impl TimeDiffSeries {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Values in event order; the first belongs to event `k + 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// (seq, value) pairs, seq being the 1-based event ordinal.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        let k = self.k;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| ((k + 1 + i) as u32, v))
    }
}

/// Computes `t_i - t_{i-k}` for every event past the first `k`.
///
/// Streams are time-sorted, so every value is >= 0. A stream with `n <= k`
/// events yields an empty series.
pub fn time_diffs(stream: &DeviceStream, k: usize) -> TimeDiffSeries {
    assert!(k >= 1, "lag k must be >= 1");
    let events = stream.events();
    let values = (k..events.len())
        .map(|i| events[i].t - events[i - k].t)
        .collect();
    TimeDiffSeries { k, values }
}

/// Labels every event of a stream: `Burnin` for the first `k`, then AME iff
/// the elapsed time over `k` events is at most `b` (a diff equal to `b` is
/// still AME, mirroring the strict inequality of the distance criterion).
pub fn classify_time(stream: &DeviceStream, params: &TimeParams) -> Vec<MovementLabel> {
    let series = time_diffs(stream, params.k);
    let burnin = stream.len().min(params.k);
    let mut labels = vec![MovementLabel::Burnin; burnin];
    labels.extend(series.values().iter().map(|&diff| params.label(diff)));
    labels
}
