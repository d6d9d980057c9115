//! Spatial grid aggregation of fused events.
//!
//! A grid of square cells is spanned across the hall plane (z is dropped).
//! Every event lands in exactly one half-open cell `[lo, hi)` per axis.
//! A cell with at least `min_events` fused events is assigned the class
//! occurring most frequently among them; everything below that stays
//! unassigned and renders grey.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::event::Point3;
use crate::fusion::FusedClass;

/// Geometry and assignment policy of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// World coordinates of the (0, 0) cell corner, meters.
    pub origin: (f64, f64),
    /// Cell edge length, meters.
    pub cell_size: f64,
    /// Minimum fused (non-`Unfused`) events for a cell to get a dominant
    /// class.
    pub min_events: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("cell size must be finite and > 0, got {0}")]
    BadCellSize(f64),
    #[error("min_events must be >= 1")]
    ZeroMinEvents,
    #[error("origin must be finite")]
    BadOrigin,
}

impl GridSpec {
    pub fn new(origin: (f64, f64), cell_size: f64, min_events: usize) -> Result<Self, GridError> {
        if !cell_size.is_finite() || cell_size <= 0.0 {
            return Err(GridError::BadCellSize(cell_size));
        }
        if min_events == 0 {
            return Err(GridError::ZeroMinEvents);
        }
        if !origin.0.is_finite() || !origin.1.is_finite() {
            return Err(GridError::BadOrigin);
        }
        Ok(GridSpec { origin, cell_size, min_events })
    }

    /// Spec with the origin snapped to the floor of a bounding-box minimum,
    /// the default when no origin is given explicitly.
    pub fn fitted(bbox_min: (f64, f64), cell_size: f64, min_events: usize) -> Result<Self, GridError> {
        GridSpec::new((bbox_min.0.floor(), bbox_min.1.floor()), cell_size, min_events)
    }
}

/// Per-cell class tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CellCounts {
    /// Counts of classes 1..=4, indexed by class number - 1.
    pub classes: [u64; 4],
    /// Burn-in events located in the cell; never dominate.
    pub unfused: u64,
}

impl CellCounts {
    pub fn total(&self) -> u64 {
        self.classes.iter().sum::<u64>() + self.unfused
    }

    /// Fused events only, the basis of the assignment threshold.
    pub fn fused_total(&self) -> u64 {
        self.classes.iter().sum()
    }

    pub fn add(&mut self, class: FusedClass) {
        match class.index() {
            Some(i) => self.classes[i] += 1,
            None => self.unfused += 1,
        }
    }

    pub fn merge(&mut self, other: &CellCounts) {
        for (a, b) in self.classes.iter_mut().zip(other.classes) {
            *a += b;
        }
        self.unfused += other.unfused;
    }

    /// The most frequent class and whether the maximum was tied, or `None`
    /// when fewer than `min_events` fused events were seen.
    ///
    /// Ties resolve to the lowest class number; the flag reports them.
    pub fn dominant(&self, min_events: usize) -> Option<(FusedClass, bool)> {
        if self.fused_total() < min_events as u64 {
            return None;
        }
        let max = *self.classes.iter().max().expect("four classes");
        let winner = self.classes.iter().position(|&c| c == max).expect("max exists");
        let tie = self.classes.iter().filter(|&&c| c == max).count() > 1;
        Some((FusedClass::CLASSES[winner], tie))
    }
}

/// Sparse cell lattice with per-cell class tallies.
///
/// Cells iterate in (ix, iy) order, so derived outputs are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    spec: GridSpec,
    cells: BTreeMap<(i64, i64), CellCounts>,
}

/// Maps a position to its cell index: `floor((x - origin) / cell_size)` per
/// axis. z is ignored, the map is planar. Boundary points belong to the
/// higher-index cell (half-open cells).
pub fn cell_of(pos: Point3, spec: &GridSpec) -> (i64, i64) {
    let ix = ((pos.x - spec.origin.0) / spec.cell_size).floor() as i64;
    let iy = ((pos.y - spec.origin.1) / spec.cell_size).floor() as i64;
    (ix, iy)
}

/// Accumulates fused events onto the grid.
///
/// Every input event is counted; `Unfused` events are tallied separately
/// and never participate in dominance.
pub fn build_grid(
    events: impl IntoIterator<Item = (Point3, FusedClass)>,
    spec: GridSpec,
) -> GridMap {
    let mut map = GridMap::empty(spec);
    for (pos, class) in events {
        map.add(pos, class);
    }
    map
}

impl GridMap {
    pub fn empty(spec: GridSpec) -> Self {
        GridMap { spec, cells: BTreeMap::new() }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn add(&mut self, pos: Point3, class: FusedClass) {
        let cell = cell_of(pos, &self.spec);
        self.cells.entry(cell).or_default().add(class);
    }

    /// Inserts explicit tallies for a cell, merging with existing ones.
    /// Used when reloading a grid from its CSV form.
    pub fn add_counts(&mut self, cell: (i64, i64), counts: CellCounts) {
        self.cells.entry(cell).or_default().merge(&counts);
    }

    /// Cellwise merge; accumulation is associative and commutative, so
    /// partial grids built in parallel can be combined freely.
    pub fn merge(mut self, other: GridMap) -> GridMap {
        for (cell, counts) in other.cells {
            self.cells.entry(cell).or_default().merge(&counts);
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Cells in (ix, iy) order.
    pub fn cells(&self) -> impl Iterator<Item = (&(i64, i64), &CellCounts)> {
        self.cells.iter()
    }

    pub fn counts_at(&self, cell: (i64, i64)) -> Option<&CellCounts> {
        self.cells.get(&cell)
    }

    /// Dominant class of a cell under this grid's `min_events` policy.
    pub fn dominant_at(&self, cell: (i64, i64)) -> Option<(FusedClass, bool)> {
        self.cells.get(&cell)?.dominant(self.spec.min_events)
    }

    /// Sum of all tallies across cells; equals the number of added events.
    pub fn total_events(&self) -> u64 {
        self.cells.values().map(CellCounts::total).sum()
    }

    /// Inclusive index bounds (min_ix, min_iy, max_ix, max_iy), `None` when
    /// empty.
    pub fn index_bounds(&self) -> Option<(i64, i64, i64, i64)> {
        let mut it = self.cells.keys();
        let &(x0, y0) = it.next()?;
        let (mut bounds_x, mut bounds_y) = ((x0, x0), (y0, y0));
        for &(ix, iy) in it {
            bounds_x = (bounds_x.0.min(ix), bounds_x.1.max(ix));
            bounds_y = (bounds_y.0.min(iy), bounds_y.1.max(iy));
        }
        Some((bounds_x.0, bounds_y.0, bounds_x.1, bounds_y.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point3 {
        Point3::new(x, y, 0.0)
    }

    fn unit_spec() -> GridSpec {
        GridSpec::new((0.0, 0.0), 1.0, 5).unwrap()
    }

    #[test]
    fn cell_of_floors_coordinates() {
        assert_eq!(cell_of(Point3::new(2.3, 4.7, 1.0), &unit_spec()), (2, 4));
    }

    #[test]
    fn cell_of_floors_toward_negative_infinity() {
        assert_eq!(cell_of(p(-0.1, 0.0), &unit_spec()), (-1, 0));
    }

    #[test]
    fn cell_boundaries_are_lower_inclusive() {
        assert_eq!(cell_of(p(3.0, 3.0), &unit_spec()), (3, 3));
    }

    #[test]
    fn cell_of_respects_origin_and_size() {
        let spec = GridSpec::new((10.0, -5.0), 2.5, 1).unwrap();
        assert_eq!(cell_of(p(10.0, -5.0), &spec), (0, 0));
        assert_eq!(cell_of(p(12.5, -2.5), &spec), (1, 1));
        assert_eq!(cell_of(p(9.9, -5.0), &spec), (-1, 0));
    }

    #[test]
    fn unique_majority_dominates() {
        let events = (0..10).map(|_| (p(0.5, 0.5), FusedClass::Class1));
        let map = build_grid(events, unit_spec());
        assert_eq!(map.dominant_at((0, 0)), Some((FusedClass::Class1, false)));
    }

    #[test]
    fn below_min_events_stays_unassigned() {
        let events = (0..4).map(|_| (p(0.5, 0.5), FusedClass::Class2));
        let map = build_grid(events, unit_spec());
        assert_eq!(map.dominant_at((0, 0)), None);
        assert_eq!(map.counts_at((0, 0)).unwrap().fused_total(), 4);
    }

    #[test]
    fn ties_resolve_to_lowest_class_and_are_flagged() {
        let mut events = vec![(p(0.5, 0.5), FusedClass::Class1); 3];
        events.extend(vec![(p(0.5, 0.5), FusedClass::Class3); 3]);
        let map = build_grid(events, unit_spec());
        assert_eq!(map.dominant_at((0, 0)), Some((FusedClass::Class1, true)));
    }

    #[test]
    fn unfused_counts_but_never_dominates() {
        let mut events = vec![(p(0.5, 0.5), FusedClass::Unfused); 50];
        events.extend(vec![(p(0.5, 0.5), FusedClass::Class4); 5]);
        let map = build_grid(events, unit_spec());
        assert_eq!(map.dominant_at((0, 0)), Some((FusedClass::Class4, false)));
        let counts = map.counts_at((0, 0)).unwrap();
        assert_eq!(counts.unfused, 50);
        assert_eq!(counts.total(), 55);

        // unfused alone never reaches assignment either
        let only_unfused = build_grid(vec![(p(1.5, 0.5), FusedClass::Unfused); 50], unit_spec());
        assert_eq!(only_unfused.dominant_at((1, 0)), None);
    }

    #[test]
    fn spec_rejects_invalid() {
        assert_eq!(
            GridSpec::new((0.0, 0.0), 0.0, 5),
            Err(GridError::BadCellSize(0.0))
        );
        assert!(GridSpec::new((0.0, 0.0), -1.0, 5).is_err());
        assert_eq!(GridSpec::new((0.0, 0.0), 1.0, 0), Err(GridError::ZeroMinEvents));
        assert!(GridSpec::new((f64::NAN, 0.0), 1.0, 5).is_err());
    }

    #[test]
    fn fitted_spec_floors_bbox_minimum() {
        let spec = GridSpec::fitted((3.7, -2.2), 1.0, 5).unwrap();
        assert_eq!(spec.origin, (3.0, -3.0));
    }

    #[test]
    fn merge_adds_cellwise() {
        let a = build_grid(vec![(p(0.5, 0.5), FusedClass::Class1); 3], unit_spec());
        let b = build_grid(
            vec![(p(0.5, 0.5), FusedClass::Class1), (p(5.5, 0.5), FusedClass::Class2)],
            unit_spec(),
        );
        let merged = a.merge(b);
        assert_eq!(merged.counts_at((0, 0)).unwrap().classes[0], 4);
        assert_eq!(merged.counts_at((5, 0)).unwrap().classes[1], 1);
        assert_eq!(merged.total_events(), 5);
    }

    proptest! {
        #[test]
        fn every_position_lands_in_exactly_one_cell(
            x in -100.0..100.0f64,
            y in -100.0..100.0f64,
            cell_size in 0.1..10.0f64,
        ) {
            let spec = GridSpec::new((0.0, 0.0), cell_size, 1).unwrap();
            let (ix, iy) = cell_of(p(x, y), &spec);
            // the cell's half-open extent really contains the point
            // (up to one rounding step of the index arithmetic)
            let x_lo = ix as f64 * cell_size;
            let y_lo = iy as f64 * cell_size;
            prop_assert!(x_lo - 1e-9 <= x && x < x_lo + cell_size + 1e-9);
            prop_assert!(y_lo - 1e-9 <= y && y < y_lo + cell_size + 1e-9);
        }

        #[test]
        fn perturbation_inside_cell_keeps_index(
            x in -50.0..50.0f64,
            y in -50.0..50.0f64,
        ) {
            let spec = unit_spec();
            let (ix, iy) = cell_of(p(x, y), &spec);
            // distance to the nearest boundary
            let margin_x = (x - x.floor()).min(x.floor() + 1.0 - x);
            let margin_y = (y - y.floor()).min(y.floor() + 1.0 - y);
            let margin = margin_x.min(margin_y);
            prop_assume!(margin > 1e-6);
            let eps = margin * 0.5;
            for (dx, dy) in [(eps, 0.0), (-eps, 0.0), (0.0, eps), (0.0, -eps)] {
                prop_assert_eq!(cell_of(p(x + dx, y + dy), &spec), (ix, iy));
            }
        }

        #[test]
        fn order_invariance_and_count_conservation(
            seed in 0u64..5000,
            n in 0usize..400,
        ) {
            use rand::seq::SliceRandom;
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let mut events: Vec<(Point3, FusedClass)> = (0..n)
                .map(|_| {
                    let class = match rng.gen_range(0..5) {
                        0 => FusedClass::Class1,
                        1 => FusedClass::Class2,
                        2 => FusedClass::Class3,
                        3 => FusedClass::Class4,
                        _ => FusedClass::Unfused,
                    };
                    (p(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)), class)
                })
                .collect();
            let forward = build_grid(events.clone(), unit_spec());
            prop_assert_eq!(forward.total_events(), n as u64);
            events.shuffle(&mut rng);
            let shuffled = build_grid(events, unit_spec());
            prop_assert_eq!(forward, shuffled);
        }

        #[test]
        fn strict_majority_always_dominates(
            majority in 6u64..30,
            minority in 0u64..6,
        ) {
            prop_assume!(majority > minority * 3); // strict majority of fused events
            let mut events = vec![(p(0.5, 0.5), FusedClass::Class3); majority as usize];
            for class in [FusedClass::Class1, FusedClass::Class2, FusedClass::Class4] {
                events.extend(vec![(p(0.5, 0.5), class); minority as usize]);
            }
            let map = build_grid(events, unit_spec());
            let (winner, tie) = map.dominant_at((0, 0)).expect("enough events");
            prop_assert_eq!(winner, FusedClass::Class3);
            prop_assert!(!tie);
        }
    }
}
