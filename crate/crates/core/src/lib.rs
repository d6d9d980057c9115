//! Movement analytics for indoor positioning event streams.
//!
//! Sensors in a production hall emit an event (device id, 3-D position,
//! timestamp) whenever they wake up. Not every awakening is a real movement:
//! vibration from machines or passing vehicles triggers sensors that never
//! left their shelf. This crate tells the two apart using only the event
//! stream itself:
//!
//! - [`distance`] classifies each event by the maximum distance traveled
//!   across a sliding count window of its `k` predecessors (mscw),
//! - [`time`] classifies each event by the elapsed time across the same lag,
//! - [`fusion`] crosses both labels into four classes,
//! - [`grid`] aggregates fused events onto a cell lattice and picks each
//!   cell's dominant class, producing a map of the hall,
//! - [`tuning`] exposes the diagnostic series used to pick the thresholds,
//! - [`sim`] generates labeled synthetic scenarios (routes, queues, dwells,
//!   machine shake) for testing at realistic scale,
//! - [`render`] draws grid maps and diagnostic bar charts as SVG,
//! - [`io`] reads and writes the CSV / NDJSON interchange formats.
//!
//! [`pipeline`] wires ingestion, both classifiers, fusion and gridding
//! together, optionally fanning out across devices with rayon.

pub mod distance;
pub mod event;
pub mod fusion;
pub mod grid;
pub mod io;
pub mod label;
pub mod pipeline;
pub mod render;
pub mod sim;
pub mod time;
pub mod tuning;

pub use distance::DistanceParams;
pub use event::{DeviceStream, EventLog, Point3, PositionEvent};
pub use fusion::FusedClass;
pub use grid::{GridMap, GridSpec};
pub use label::MovementLabel;
pub use pipeline::ClassifyParams;
pub use time::TimeParams;
