//! Distance-based classifier.
//!
//! For each event the maximum Euclidean distance to its `k` predecessors is
//! computed with a sliding count window (the window advances one event at a
//! time, overlapping by `k - 1`). We call that value mscw. An event whose
//! mscw exceeds the radius `r` moved meaningfully and is labeled AME; one
//! whose `k` predecessors all lie within the `r`-sphere is labeled UAE. The
//! first `k` events of a stream have no full window and stay `Burnin`.

use thiserror::Error;

use crate::event::{DeviceStream, Point3};
use crate::label::MovementLabel;

/// Parameters of the distance-based classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceParams {
    /// Width of the sliding count window, events.
    pub k: usize,
    /// Radius threshold, meters. mscw strictly above `r` means AME.
    pub r: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("window width k must be >= 1")]
    ZeroWindow,
    #[error("threshold must be finite and >= 0, got {0}")]
    BadThreshold(f64),
}

impl DistanceParams {
    pub fn new(k: usize, r: f64) -> Result<Self, ParamError> {
        if k == 0 {
            return Err(ParamError::ZeroWindow);
        }
        if !r.is_finite() || r < 0.0 {
            return Err(ParamError::BadThreshold(r));
        }
        Ok(DistanceParams { k, r })
    }

    /// The classification rule: AME iff mscw strictly exceeds `r`.
    pub fn label(&self, mscw: f64) -> MovementLabel {
        if mscw > self.r {
            MovementLabel::Ame
        } else {
            MovementLabel::Uae
        }
    }
}

/// Full 3-D Euclidean distance. The map output is planar but the window
/// distance deliberately includes z.
pub fn euclidean_distance(a: Point3, b: Point3) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Streaming sliding count window over the last `k` positions.
///
/// Memory is a fixed ring of `k` positions regardless of stream length.
#[derive(Debug, Clone)]
pub struct MscwWindow {
    k: usize,
    buf: Vec<Point3>,
    head: usize,
}

impl MscwWindow {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "window width k must be >= 1");
        MscwWindow { k, buf: Vec::with_capacity(k), head: 0 }
    }

    /// Feeds the next event position in stream order.
    ///
    /// Returns the mscw of the fed event, or `None` while fewer than `k`
    /// predecessors are buffered (the burn-in phase).
    pub fn push(&mut self, pos: Point3) -> Option<f64> {
        let value = if self.buf.len() == self.k {
            let mut max = f64::NEG_INFINITY;
            for prev in &self.buf {
                max = max.max(euclidean_distance(pos, *prev));
            }
            Some(max)
        } else {
            None
        };
        if self.buf.len() < self.k {
            self.buf.push(pos);
        } else {
            // overwrite the oldest buffered position
            self.buf[self.head] = pos;
            self.head = (self.head + 1) % self.k;
        }
        value
    }
}

/// mscw values of one device, one per event past the burn-in phase.
#[derive(Debug, Clone, PartialEq)]
pub struct MscwSeries {
    k: usize,
    values: Vec<f64>,
}

impl MscwSeries {
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

/// Computes the mscw series of a stream: for every event past the first `k`,
/// the maximum distance to one of its `k` predecessors.
///
/// A stream with `n <= k` events yields an empty series.
pub fn mscw(stream: &DeviceStream, k: usize) -> MscwSeries {
    assert!(k >= 1, "window width k must be >= 1");
    let mut window = MscwWindow::new(k);
    let mut values = Vec::with_capacity(stream.len().saturating_sub(k));
    for event in stream.events() {
        if let Some(value) = window.push(event.pos) {
            values.push(value);
        }
    }
    MscwSeries { k, values }
}

/// Labels every event of a stream: `Burnin` for the first `k`, then AME iff
/// mscw strictly exceeds `r` (an mscw equal to `r` is UAE).
///
/// The output has exactly one label per event.
pub fn classify_distance(stream: &DeviceStream, params: &DistanceParams) -> Vec<MovementLabel> {
    let series = mscw(stream, params.k);
    let burnin = stream.len().min(params.k);
    let mut labels = vec![MovementLabel::Burnin; burnin];
    labels.extend(series.values().iter().map(|&value| params.label(value)));
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::DeviceStream;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    fn stream_of(positions: &[Point3]) -> DeviceStream {
        let samples = positions
            .iter()
            .enumerate()
            .map(|(i, &pos)| (pos, i as f64))
            .collect();
        DeviceStream::build("test", samples).0
    }

    /// Independent oracle: direct double loop over the defining formula,
    /// no window state.
    fn naive_mscw(positions: &[Point3], k: usize) -> Vec<f64> {
        let n = positions.len();
        let mut out = Vec::new();
        for i in k..n {
            let mut max = f64::NEG_INFINITY;
            for p in 1..=k {
                max = max.max(euclidean_distance(positions[i], positions[i - p]));
            }
            out.push(max);
        }
        out
    }

    #[test]
    fn euclidean_345_triangle() {
        assert_eq!(euclidean_distance(p(0.0, 0.0, 0.0), p(3.0, 4.0, 0.0)), 5.0);
    }

    #[test]
    fn euclidean_identity_is_zero() {
        assert_eq!(euclidean_distance(p(1.0, 2.0, 3.0), p(1.0, 2.0, 3.0)), 0.0);
    }

    #[test]
    fn euclidean_unit_cube_diagonal() {
        let d = euclidean_distance(p(1.0, 1.0, 1.0), p(2.0, 2.0, 2.0));
        assert!((d - 3.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn euclidean_is_symmetric() {
        let a = p(0.3, -1.7, 2.2);
        let b = p(-4.0, 0.1, 9.9);
        assert_eq!(euclidean_distance(a, b), euclidean_distance(b, a));
    }

    #[test]
    fn mscw_two_term_example() {
        // k=2, third event looks back at both predecessors; max(2, 3) = 3
        let stream = stream_of(&[p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(3.0, 0.0, 0.0)]);
        let series = mscw(&stream, 2);
        assert_eq!(series.values(), &[3.0]);
        assert_eq!(series.iter().collect::<Vec<_>>(), vec![(3, 3.0)]);
    }

    #[test]
    fn mscw_stationary_point_is_zero() {
        let positions = vec![p(2.0, 2.0, 2.0); 20];
        for k in [1, 3, 7] {
            let series = mscw(&stream_of(&positions), k);
            assert_eq!(series.len(), 20 - k);
            assert!(series.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn mscw_short_stream_is_empty() {
        let stream = stream_of(&[p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0)]);
        assert!(mscw(&stream, 2).is_empty());
        assert!(mscw(&stream, 5).is_empty());
    }

    #[test]
    fn mscw_matches_naive_oracle_on_random_streams() {
        let mut rng = StdRng::seed_from_u64(7);
        let positions: Vec<Point3> = (0..1000)
            .map(|_| p(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
            .collect();
        let stream = stream_of(&positions);
        for k in [1usize, 5, 10, 50] {
            let streaming = mscw(&stream, k);
            let naive = naive_mscw(&positions, k);
            assert_eq!(streaming.len(), naive.len());
            for (i, (a, b)) in streaming.values().iter().zip(&naive).enumerate() {
                assert_eq!(a.to_bits(), b.to_bits(), "k={k} i={i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn classify_constant_velocity_is_all_ame() {
        // 1 m/s sampled at 1 Hz: mscw = 10 m for every post-burn-in event
        let positions: Vec<Point3> = (0..60).map(|i| p(i as f64, 0.0, 0.0)).collect();
        let stream = stream_of(&positions);
        let params = DistanceParams::new(10, 1.5).unwrap();
        let labels = classify_distance(&stream, &params);
        assert_eq!(labels.len(), 60);
        assert!(labels[..10].iter().all(|l| *l == MovementLabel::Burnin));
        assert!(labels[10..].iter().all(|l| *l == MovementLabel::Ame));
    }

    #[test]
    fn classify_bounded_jitter_is_all_uae() {
        // per-axis jitter within [-0.2, 0.2] caps any pairwise distance at
        // 0.4 * sqrt(3) ~ 0.69 < 1.5
        let mut rng = StdRng::seed_from_u64(11);
        let positions: Vec<Point3> = (0..200)
            .map(|_| {
                p(
                    5.0 + rng.gen_range(-0.2..0.2),
                    5.0 + rng.gen_range(-0.2..0.2),
                    1.0 + rng.gen_range(-0.2..0.2),
                )
            })
            .collect();
        let stream = stream_of(&positions);
        let params = DistanceParams::new(10, 1.5).unwrap();
        let labels = classify_distance(&stream, &params);
        assert!(labels[10..].iter().all(|l| *l == MovementLabel::Uae));
    }

    #[test]
    fn classify_boundary_mscw_equal_r_is_uae() {
        let mut positions = vec![p(0.0, 0.0, 0.0); 10];
        positions.push(p(1.5, 0.0, 0.0));
        let stream = stream_of(&positions);
        let labels = classify_distance(&stream, &DistanceParams::new(10, 1.5).unwrap());
        assert_eq!(labels[10], MovementLabel::Uae, "mscw == r must not be AME");
    }

    #[test]
    fn classify_short_stream_is_all_burnin() {
        let positions: Vec<Point3> = (0..5).map(|i| p(i as f64, 0.0, 0.0)).collect();
        let stream = stream_of(&positions);
        let labels = classify_distance(&stream, &DistanceParams::new(10, 1.5).unwrap());
        assert_eq!(labels, vec![MovementLabel::Burnin; 5]);
    }

    #[test]
    fn params_reject_invalid() {
        assert_eq!(DistanceParams::new(0, 1.0), Err(ParamError::ZeroWindow));
        assert!(DistanceParams::new(1, -0.5).is_err());
        assert!(DistanceParams::new(1, f64::NAN).is_err());
    }

    fn arb_positions(max_len: usize) -> impl Strategy<Value = Vec<Point3>> {
        prop::collection::vec((0.0..10.0f64, 0.0..10.0f64, 0.0..3.0f64), 0..max_len)
            .prop_map(|v| v.into_iter().map(|(x, y, z)| p(x, y, z)).collect())
    }

    proptest! {
        #[test]
        fn raising_r_never_creates_ame(positions in arb_positions(80), k in 1usize..12) {
            let stream = stream_of(&positions);
            let low = classify_distance(&stream, &DistanceParams::new(k, 1.0).unwrap());
            let high = classify_distance(&stream, &DistanceParams::new(k, 2.5).unwrap());
            for (a, b) in low.iter().zip(&high) {
                if *b == MovementLabel::Ame {
                    prop_assert_eq!(*a, MovementLabel::Ame);
                }
            }
        }

        #[test]
        fn window_growth_never_shrinks_mscw(positions in arb_positions(60), k in 1usize..10) {
            let stream = stream_of(&positions);
            let narrow = mscw(&stream, k);
            let wide = mscw(&stream, k + 1);
            // align on shared events: narrow starts at seq k+1, wide at k+2
            for ((seq_n, v_n), (seq_w, v_w)) in narrow.iter().skip(1).zip(wide.iter()) {
                prop_assert_eq!(seq_n, seq_w);
                prop_assert!(v_w >= v_n, "seq {}: k+1 window {} < k window {}", seq_w, v_w, v_n);
            }
        }

        #[test]
        fn rigid_motion_preserves_labels(positions in arb_positions(60), k in 1usize..10) {
            let params = DistanceParams::new(k, 1.5).unwrap();
            let base = stream_of(&positions);
            let base_mscw = mscw(&base, k);
            // stay clear of the threshold so a 1e-9 wobble cannot flip labels
            prop_assume!(base_mscw.values().iter().all(|v| (v - params.r).abs() > 1e-7));

            let angle = 0.6459f64; // 37 degrees in radians
            let (sin, cos) = angle.sin_cos();
            let moved: Vec<Point3> = positions
                .iter()
                .map(|q| {
                    let (x, y) = (q.x * cos - q.y * sin, q.x * sin + q.y * cos);
                    p(x + 100.0, y - 50.0, q.z + 2.0)
                })
                .collect();
            let moved_stream = stream_of(&moved);

            let moved_mscw = mscw(&moved_stream, k);
            for (a, b) in base_mscw.values().iter().zip(moved_mscw.values()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            prop_assert_eq!(
                classify_distance(&base, &params),
                classify_distance(&moved_stream, &params)
            );
        }

        #[test]
        fn timestamps_do_not_affect_labels(positions in arb_positions(60), seed in 0u64..1000) {
            // same position order under two different timestamp assignments
            let even: Vec<(Point3, f64)> =
                positions.iter().enumerate().map(|(i, &q)| (q, i as f64)).collect();
            let mut rng = StdRng::seed_from_u64(seed);
            let mut jittered_times: Vec<f64> =
                (0..positions.len()).map(|_| rng.gen_range(0.0..100.0)).collect();
            jittered_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let jittered: Vec<(Point3, f64)> = positions
                .iter()
                .zip(&jittered_times)
                .map(|(&q, &t)| (q, t))
                .collect();

            let params = DistanceParams::new(5, 1.5).unwrap();
            let a = classify_distance(&DeviceStream::build("d", even).0, &params);
            let b = classify_distance(&DeviceStream::build("d", jittered).0, &params);
            prop_assert_eq!(a, b);
        }
    }
}
