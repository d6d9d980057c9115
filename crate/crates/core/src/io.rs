//! CSV and NDJSON interchange formats.
//!
//! Events travel as `device_id,x,y,z,t` (CSV with that header, or one JSON
//! object per line with the same keys). Label, series, grid and truth files
//! are defined here as well, so every producer and consumer shares one
//! definition. Floats are written in shortest round-trip form: re-ingesting
//! a written file reproduces the log exactly, and equal inputs produce
//! byte-identical outputs.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{DeviceStream, EventLog, Point3};
use crate::fusion::FusedClass;
use crate::grid::{CellCounts, GridMap, GridSpec};
use crate::label::MovementLabel;
use crate::pipeline::DeviceClassification;
use crate::sim::DeviceTruth;
use crate::tuning::DiagnosticSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Ndjson,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(InputFormat::Csv),
            "ndjson" => Ok(InputFormat::Ndjson),
            other => Err(format!("unknown format {other:?}, expected csv or ndjson")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IngestOptions {
    pub format: InputFormat,
    /// Abort on the first rejected record instead of skipping and counting.
    pub strict: bool,
}

impl IngestOptions {
    pub fn new(format: InputFormat) -> Self {
        IngestOptions { format, strict: false }
    }
}

/// Bookkeeping of one ingestion pass. Every data record read ends up either
/// in `valid` or in exactly one rejection bucket; nothing is dropped
/// silently.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    /// Data records attempted (header and blank lines excluded).
    pub records: usize,
    pub valid: usize,
    /// Records that did not parse in the declared format.
    pub rejected_parse: usize,
    /// Records with a NaN or infinite coordinate.
    pub rejected_non_finite: usize,
    /// Records with a non-finite or negative timestamp.
    pub rejected_time: usize,
    /// Events that arrived with a timestamp below their device
    /// predecessor's and were re-sorted.
    pub out_of_order: usize,
    pub devices: usize,
}

impl IngestReport {
    pub fn rejected(&self) -> usize {
        self.rejected_parse + self.rejected_non_finite + self.rejected_time
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: unparseable record: {reason}")]
    UnparseableRecord { line: u64, reason: String },
    #[error("line {line}: non-finite coordinate")]
    NonFiniteCoordinate { line: u64 },
    #[error("line {line}: timestamp must be finite and non-negative")]
    InvalidTimestamp { line: u64 },
    #[error("no valid records in input")]
    EmptyInput,
}

#[derive(Debug, Serialize, Deserialize)]
struct EventRecord {
    device_id: String,
    x: f64,
    y: f64,
    z: f64,
    t: f64,
}

type Groups = BTreeMap<String, Vec<(Point3, f64)>>;

fn accept_record(
    record: EventRecord,
    line: u64,
    strict: bool,
    groups: &mut Groups,
    report: &mut IngestReport,
) -> Result<(), IngestError> {
    if record.device_id.is_empty() {
        report.rejected_parse += 1;
        if strict {
            return Err(IngestError::UnparseableRecord {
                line,
                reason: "empty device_id".into(),
            });
        }
        return Ok(());
    }
    let pos = Point3::new(record.x, record.y, record.z);
    if !pos.is_finite() {
        report.rejected_non_finite += 1;
        if strict {
            return Err(IngestError::NonFiniteCoordinate { line });
        }
        return Ok(());
    }
    if !record.t.is_finite() || record.t < 0.0 {
        report.rejected_time += 1;
        if strict {
            return Err(IngestError::InvalidTimestamp { line });
        }
        return Ok(());
    }
    report.valid += 1;
    groups.entry(record.device_id).or_default().push((pos, record.t));
    Ok(())
}

fn ingest_csv<R: BufRead>(
    reader: R,
    strict: bool,
    groups: &mut Groups,
    report: &mut IngestReport,
) -> Result<(), IngestError> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    {
        let headers = csv_reader.headers().map_err(|e| IngestError::UnparseableRecord {
            line: 1,
            reason: e.to_string(),
        })?;
        if headers.len() == 0 || (headers.len() == 1 && headers[0].is_empty()) {
            return Err(IngestError::EmptyInput);
        }
        for required in ["device_id", "x", "y", "z", "t"] {
            if !headers.iter().any(|h| h == required) {
                return Err(IngestError::UnparseableRecord {
                    line: 1,
                    reason: format!("missing column {required:?} in header"),
                });
            }
        }
    }
    for result in csv_reader.deserialize::<EventRecord>() {
        report.records += 1;
        match result {
            Ok(record) => {
                let line = report.records as u64 + 1; // header occupies line 1
                accept_record(record, line, strict, groups, report)?;
            }
            Err(err) => {
                if err.is_io_error() {
                    return Err(IngestError::UnparseableRecord {
                        line: report.records as u64 + 1,
                        reason: err.to_string(),
                    });
                }
                report.rejected_parse += 1;
                if strict {
                    let line = err
                        .position()
                        .map(|p| p.line())
                        .unwrap_or(report.records as u64 + 1);
                    return Err(IngestError::UnparseableRecord { line, reason: err.to_string() });
                }
            }
        }
    }
    Ok(())
}

fn ingest_ndjson<R: BufRead>(
    reader: R,
    strict: bool,
    groups: &mut Groups,
    report: &mut IngestReport,
) -> Result<(), IngestError> {
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        report.records += 1;
        let line_no = idx as u64 + 1;
        match serde_json::from_str::<EventRecord>(&line) {
            Ok(record) => accept_record(record, line_no, strict, groups, report)?,
            Err(err) => {
                report.rejected_parse += 1;
                if strict {
                    return Err(IngestError::UnparseableRecord {
                        line: line_no,
                        reason: err.to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Reads events in the declared format, groups them by device and builds
/// the time-sorted log.
///
/// Malformed records are skipped and counted unless `strict` is set, in
/// which case the first one aborts. An input without a single valid record
/// is an error.
pub fn ingest<R: BufRead>(
    reader: R,
    options: &IngestOptions,
) -> Result<(EventLog, IngestReport), IngestError> {
    let mut groups = Groups::new();
    let mut report = IngestReport::default();
    match options.format {
        InputFormat::Csv => ingest_csv(reader, options.strict, &mut groups, &mut report)?,
        InputFormat::Ndjson => ingest_ndjson(reader, options.strict, &mut groups, &mut report)?,
    }
    if report.valid == 0 {
        return Err(IngestError::EmptyInput);
    }
    let mut streams = Vec::with_capacity(groups.len());
    for (device_id, samples) in groups {
        let (stream, out_of_order) = DeviceStream::build(device_id, samples);
        report.out_of_order += out_of_order;
        streams.push(stream);
    }
    report.devices = streams.len();
    let log = EventLog::from_streams(streams).expect("grouping guarantees unique ids");
    Ok((log, report))
}

fn raw_csv<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

fn fmt(v: f64) -> String {
    v.to_string()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

pub const EVENTS_HEADER: &str = "device_id,x,y,z,t";

pub fn write_events_csv<W: Write>(log: &EventLog, w: &mut W) -> io::Result<()> {
    writeln!(w, "{EVENTS_HEADER}")?;
    let mut csv = raw_csv(&mut *w);
    for stream in log.streams() {
        for event in stream.events() {
            csv.write_record([
                event.device_id.as_str(),
                &fmt(event.pos.x),
                &fmt(event.pos.y),
                &fmt(event.pos.z),
                &fmt(event.t),
            ])?;
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn write_events_ndjson<W: Write>(log: &EventLog, w: &mut W) -> io::Result<()> {
    #[derive(Serialize)]
    struct Out<'a> {
        device_id: &'a str,
        x: f64,
        y: f64,
        z: f64,
        t: f64,
    }
    for stream in log.streams() {
        for event in stream.events() {
            serde_json::to_writer(
                &mut *w,
                &Out {
                    device_id: &event.device_id,
                    x: event.pos.x,
                    y: event.pos.y,
                    z: event.pos.z,
                    t: event.t,
                },
            )?;
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub const DIST_LABELS_HEADER: &str = "device_id,seq,t,x,y,z,mscw,dist_label";
pub const TIME_LABELS_HEADER: &str = "device_id,seq,t,diff,time_label";
pub const FUSED_LABELS_HEADER: &str =
    "device_id,seq,t,x,y,z,mscw,dist_label,diff,time_label,fused_class";

/// Appends one device's distance-label rows; the header is written once by
/// the caller ([`DIST_LABELS_HEADER`]). mscw is empty for burn-in rows.
pub fn append_dist_labels_csv<W: Write>(
    w: &mut W,
    stream: &DeviceStream,
    cls: &DeviceClassification,
) -> io::Result<()> {
    let mut csv = raw_csv(&mut *w);
    for (event, (mscw, label)) in stream
        .events()
        .iter()
        .zip(cls.mscw.iter().zip(&cls.dist_labels))
    {
        csv.write_record([
            event.device_id.as_str(),
            &event.seq.to_string(),
            &fmt(event.t),
            &fmt(event.pos.x),
            &fmt(event.pos.y),
            &fmt(event.pos.z),
            &fmt_opt(*mscw),
            label.as_str(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Appends one device's time-label rows; diff is empty for burn-in rows.
pub fn append_time_labels_csv<W: Write>(
    w: &mut W,
    stream: &DeviceStream,
    cls: &DeviceClassification,
) -> io::Result<()> {
    let mut csv = raw_csv(&mut *w);
    for (event, (diff, label)) in stream
        .events()
        .iter()
        .zip(cls.time_diffs.iter().zip(&cls.time_labels))
    {
        csv.write_record([
            event.device_id.as_str(),
            &event.seq.to_string(),
            &fmt(event.t),
            &fmt_opt(*diff),
            label.as_str(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Appends one device's combined rows: both criteria plus the fused class.
pub fn append_fused_labels_csv<W: Write>(
    w: &mut W,
    stream: &DeviceStream,
    cls: &DeviceClassification,
) -> io::Result<()> {
    let mut csv = raw_csv(&mut *w);
    for (idx, event) in stream.events().iter().enumerate() {
        csv.write_record([
            event.device_id.as_str(),
            &event.seq.to_string(),
            &fmt(event.t),
            &fmt(event.pos.x),
            &fmt(event.pos.y),
            &fmt(event.pos.z),
            &fmt_opt(cls.mscw[idx]),
            cls.dist_labels[idx].as_str(),
            &fmt_opt(cls.time_diffs[idx]),
            cls.time_labels[idx].as_str(),
            cls.fused[idx].as_str(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// NDJSON form of the distance-label records; burn-in mscw is null.
pub fn append_dist_labels_ndjson<W: Write>(
    w: &mut W,
    stream: &DeviceStream,
    cls: &DeviceClassification,
) -> io::Result<()> {
    #[derive(Serialize)]
    struct Out<'a> {
        device_id: &'a str,
        seq: u32,
        t: f64,
        x: f64,
        y: f64,
        z: f64,
        mscw: Option<f64>,
        dist_label: &'a str,
    }
    for (idx, event) in stream.events().iter().enumerate() {
        serde_json::to_writer(
            &mut *w,
            &Out {
                device_id: &event.device_id,
                seq: event.seq,
                t: event.t,
                x: event.pos.x,
                y: event.pos.y,
                z: event.pos.z,
                mscw: cls.mscw[idx],
                dist_label: cls.dist_labels[idx].as_str(),
            },
        )?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// NDJSON form of the time-label records; burn-in diff is null.
pub fn append_time_labels_ndjson<W: Write>(
    w: &mut W,
    stream: &DeviceStream,
    cls: &DeviceClassification,
) -> io::Result<()> {
    #[derive(Serialize)]
    struct Out<'a> {
        device_id: &'a str,
        seq: u32,
        t: f64,
        diff: Option<f64>,
        time_label: &'a str,
    }
    for (idx, event) in stream.events().iter().enumerate() {
        serde_json::to_writer(
            &mut *w,
            &Out {
                device_id: &event.device_id,
                seq: event.seq,
                t: event.t,
                diff: cls.time_diffs[idx],
                time_label: cls.time_labels[idx].as_str(),
            },
        )?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FusedRecordOut<'a> {
    device_id: &'a str,
    seq: u32,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    mscw: Option<f64>,
    dist_label: &'a str,
    diff: Option<f64>,
    time_label: &'a str,
    fused_class: &'a str,
}

/// NDJSON form of the combined label records; burn-in values are null.
pub fn append_fused_labels_ndjson<W: Write>(
    w: &mut W,
    stream: &DeviceStream,
    cls: &DeviceClassification,
) -> io::Result<()> {
    for (idx, event) in stream.events().iter().enumerate() {
        serde_json::to_writer(
            &mut *w,
            &FusedRecordOut {
                device_id: &event.device_id,
                seq: event.seq,
                t: event.t,
                x: event.pos.x,
                y: event.pos.y,
                z: event.pos.z,
                mscw: cls.mscw[idx],
                dist_label: cls.dist_labels[idx].as_str(),
                diff: cls.time_diffs[idx],
                time_label: cls.time_labels[idx].as_str(),
                fused_class: cls.fused[idx].as_str(),
            },
        )?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads positions and fused classes back from a combined label file, the
/// input of grid building from a staged run. Strict: these files are
/// machine-written, any malformed row is an error.
pub fn read_fused_events<R: BufRead>(
    reader: R,
    format: InputFormat,
) -> Result<Vec<(Point3, FusedClass)>, IngestError> {
    #[derive(Deserialize)]
    struct RowIn {
        x: f64,
        y: f64,
        z: f64,
        fused_class: String,
    }
    let mut out = Vec::new();
    let mut push = |row: RowIn, line: u64| -> Result<(), IngestError> {
        let class = FusedClass::parse(&row.fused_class).ok_or_else(|| {
            IngestError::UnparseableRecord {
                line,
                reason: format!("unknown fused_class {:?}", row.fused_class),
            }
        })?;
        out.push((Point3::new(row.x, row.y, row.z), class));
        Ok(())
    };
    match format {
        InputFormat::Csv => {
            let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
            for (idx, result) in csv_reader.deserialize::<RowIn>().enumerate() {
                let line = idx as u64 + 2;
                let row = result.map_err(|e| IngestError::UnparseableRecord {
                    line,
                    reason: e.to_string(),
                })?;
                push(row, line)?;
            }
        }
        InputFormat::Ndjson => {
            for (idx, line) in reader.lines().enumerate() {
                let line_str = line?;
                if line_str.trim().is_empty() {
                    continue;
                }
                let line_no = idx as u64 + 1;
                let row = serde_json::from_str::<RowIn>(&line_str).map_err(|e| {
                    IngestError::UnparseableRecord { line: line_no, reason: e.to_string() }
                })?;
                push(row, line_no)?;
            }
        }
    }
    Ok(out)
}

pub const GRID_HEADER: &str =
    "ix,iy,n_class1,n_class2,n_class3,n_class4,n_unfused,dominant,tie_flag";

/// Writes the grid as one row per cell in (ix, iy) order. `dominant` is the
/// class number or empty for unassigned cells; `tie_flag` is 1 when the
/// majority was tied (and resolved to the lowest class number).
pub fn write_grid_csv<W: Write>(map: &GridMap, w: &mut W) -> io::Result<()> {
    writeln!(w, "{GRID_HEADER}")?;
    let min_events = map.spec().min_events;
    let mut csv = raw_csv(&mut *w);
    for (&(ix, iy), counts) in map.cells() {
        let (dominant, tie) = match counts.dominant(min_events) {
            Some((class, tie)) => (class.as_str(), tie),
            None => ("", false),
        };
        csv.write_record([
            ix.to_string().as_str(),
            &iy.to_string(),
            &counts.classes[0].to_string(),
            &counts.classes[1].to_string(),
            &counts.classes[2].to_string(),
            &counts.classes[3].to_string(),
            &counts.unfused.to_string(),
            dominant,
            if tie { "1" } else { "0" },
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Reloads cell tallies written by [`write_grid_csv`] under a given spec.
/// The dominant/tie columns are derived data and recomputed from the
/// counts, so they are ignored here.
pub fn read_grid_csv<R: BufRead>(reader: R, spec: GridSpec) -> Result<GridMap, IngestError> {
    #[derive(Deserialize)]
    struct RowIn {
        ix: i64,
        iy: i64,
        n_class1: u64,
        n_class2: u64,
        n_class3: u64,
        n_class4: u64,
        n_unfused: u64,
    }
    let mut map = GridMap::empty(spec);
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    for (idx, result) in csv_reader.deserialize::<RowIn>().enumerate() {
        let row: RowIn = result.map_err(|e| IngestError::UnparseableRecord {
            line: idx as u64 + 2,
            reason: e.to_string(),
        })?;
        map.add_counts(
            (row.ix, row.iy),
            CellCounts {
                classes: [row.n_class1, row.n_class2, row.n_class3, row.n_class4],
                unfused: row.n_unfused,
            },
        );
    }
    Ok(map)
}

pub const SERIES_HEADER: &str = "device_id,kind,k,seq,value";

/// Writes diagnostic series (any mix of kinds) as one row per value.
pub fn write_series_csv<W: Write>(series: &[DiagnosticSeries], w: &mut W) -> io::Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    let mut csv = raw_csv(&mut *w);
    for s in series {
        for &(seq, value) in &s.values {
            csv.write_record([
                s.device_id.as_str(),
                s.kind.as_str(),
                &s.k.to_string(),
                &seq.to_string(),
                &fmt(value),
            ])?;
        }
    }
    csv.flush()?;
    Ok(())
}

pub const TRUTH_HEADER: &str = "device_id,seq,truth";

/// Writes the generator's ground-truth sidecar.
pub fn write_truth_csv<W: Write>(truth: &[DeviceTruth], w: &mut W) -> io::Result<()> {
    writeln!(w, "{TRUTH_HEADER}")?;
    let mut csv = raw_csv(&mut *w);
    for device in truth {
        for (idx, t) in device.truth.iter().enumerate() {
            csv.write_record([
                device.device_id.as_str(),
                &(idx as u32 + 1).to_string(),
                t.as_str(),
            ])?;
        }
    }
    csv.flush()?;
    Ok(())
}

/// Tallies labels straight from classification vectors, the shape summaries
/// and tests want.
pub fn count_labels(labels: &[MovementLabel]) -> (usize, usize, usize) {
    let mut ame = 0;
    let mut uae = 0;
    let mut burnin = 0;
    for label in labels {
        match label {
            MovementLabel::Ame => ame += 1,
            MovementLabel::Uae => uae += 1,
            MovementLabel::Burnin => burnin += 1,
        }
    }
    (ame, uae, burnin)
}
