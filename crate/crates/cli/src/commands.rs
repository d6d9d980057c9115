//! Implementations of the five subcommands.
//!
//! Error convention: `Usage` (exit 2) for bad parameters, unknown devices
//! and malformed scenario files; `Data` (exit 1) for I/O failures and
//! ingestion aborts.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use hallmap::grid::{build_grid, GridMap, GridSpec};
use hallmap::io::{self as hio, IngestOptions, IngestReport, InputFormat};
use hallmap::pipeline::{self, classify_stream, ClassifyParams, LabelTally};
use hallmap::render;
use hallmap::sim::{self, presets};
use hallmap::tuning;
use hallmap::EventLog;

use crate::config::ScenarioFile;
use crate::{
    ClassifyArgs, CliError, CliResult, GridArgs, GridOpts, ParamArgs, RenderArgs, SimulateArgs,
    TuneArgs,
};

fn data<E: Into<anyhow::Error>>(err: E) -> CliError {
    CliError::Data(err.into())
}

fn usage<E: Into<anyhow::Error>>(err: E) -> CliError {
    CliError::Usage(err.into())
}

impl ParamArgs {
    pub fn to_params(&self) -> CliResult<ClassifyParams> {
        let distance = hallmap::distance::DistanceParams::new(self.k, self.r).map_err(usage)?;
        let time = hallmap::time::TimeParams::new(self.time_k.unwrap_or(self.k), self.b)
            .map_err(usage)?;
        Ok(ClassifyParams { distance, time })
    }
}

fn ensure_out_dir(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory {}", out.display()))
        .map_err(data)
}

fn create(out: &Path, name: &str) -> CliResult<BufWriter<File>> {
    let path = out.join(name);
    let file = File::create(&path)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(data)?;
    Ok(BufWriter::new(file))
}

fn open_input(path: &Path) -> CliResult<BufReader<File>> {
    let file = File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))
        .map_err(data)?;
    Ok(BufReader::new(file))
}

fn ingest_file(path: &Path, format: InputFormat, strict: bool) -> CliResult<(EventLog, IngestReport)> {
    let reader = open_input(path)?;
    let (log, report) =
        hio::ingest(reader, &IngestOptions { format, strict }).map_err(data)?;
    if report.rejected() > 0 {
        eprintln!(
            "warning: rejected {} of {} records ({} parse, {} non-finite, {} bad timestamp)",
            report.rejected(),
            report.records,
            report.rejected_parse,
            report.rejected_non_finite,
            report.rejected_time
        );
    }
    if report.out_of_order > 0 {
        eprintln!("warning: re-sorted {} out-of-order events", report.out_of_order);
    }
    Ok((log, report))
}

fn events_file_name(format: InputFormat) -> &'static str {
    match format {
        InputFormat::Csv => "events.csv",
        InputFormat::Ndjson => "events.ndjson",
    }
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let devices = match (&args.scenario, args.preset.as_deref()) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))
                .map_err(data)?;
            let mut file = ScenarioFile::parse(&text).map_err(usage)?;
            if let Some(seed) = args.seed {
                file.master_seed = seed;
            }
            file.devices()
        }
        (None, Some("demo-hall")) => presets::demo_hall(args.seed.unwrap_or(42), args.noise),
        (None, Some("paper-scale")) => presets::paper_scale(args.seed.unwrap_or(42)),
        (None, Some(other)) => return Err(usage(anyhow!("unknown preset {other:?}"))),
        _ => return Err(usage(anyhow!("exactly one of --scenario or --preset is required"))),
    };

    let composed = sim::compose(&devices).map_err(usage)?;
    ensure_out_dir(&args.out)?;

    let mut events_out = create(&args.out, events_file_name(args.format))?;
    match args.format {
        InputFormat::Csv => hio::write_events_csv(&composed.log, &mut events_out).map_err(data)?,
        InputFormat::Ndjson => {
            hio::write_events_ndjson(&composed.log, &mut events_out).map_err(data)?
        }
    }
    events_out.flush().map_err(data)?;

    let mut truth_out = create(&args.out, "truth.csv")?;
    hio::write_truth_csv(&composed.truth, &mut truth_out).map_err(data)?;
    truth_out.flush().map_err(data)?;

    println!(
        "simulated {} devices, {} events -> {}",
        composed.log.device_count(),
        composed.log.total_events(),
        args.out.join(events_file_name(args.format)).display()
    );
    Ok(())
}

fn print_tally_row(name: &str, tally: &LabelTally) {
    println!(
        "{name:<14} {events:>9} {da:>9} {du:>9} {ta:>9} {tu:>9} {c1:>8} {c2:>8} {c3:>8} {c4:>8} {un:>8}",
        events = tally.events,
        da = tally.dist_ame,
        du = tally.dist_uae,
        ta = tally.time_ame,
        tu = tally.time_uae,
        c1 = tally.classes[0],
        c2 = tally.classes[1],
        c3 = tally.classes[2],
        c4 = tally.classes[3],
        un = tally.unfused,
    );
}

fn print_summary_header() {
    println!(
        "{:<14} {:>9} {:>9} {:>9} {:>9} {:>9} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "device", "events", "dist_ame", "dist_uae", "time_ame", "time_uae",
        "class1", "class2", "class3", "class4", "unfused"
    );
}

pub fn classify(args: &ClassifyArgs) -> CliResult<()> {
    let params = args.params.to_params()?;
    let (log, _) = ingest_file(&args.input, args.format, args.strict)?;
    ensure_out_dir(&args.out)?;

    let ndjson = args.out_format == InputFormat::Ndjson;
    let (dist_name, time_name, fused_name) = if ndjson {
        ("dist_labels.ndjson", "time_labels.ndjson", "fused.ndjson")
    } else {
        ("dist_labels.csv", "time_labels.csv", "fused.csv")
    };
    let mut dist_out = create(&args.out, dist_name)?;
    let mut time_out = create(&args.out, time_name)?;
    let mut fused_out = create(&args.out, fused_name)?;
    if !ndjson {
        writeln!(dist_out, "{}", hio::DIST_LABELS_HEADER).map_err(data)?;
        writeln!(time_out, "{}", hio::TIME_LABELS_HEADER).map_err(data)?;
        writeln!(fused_out, "{}", hio::FUSED_LABELS_HEADER).map_err(data)?;
    }

    print_summary_header();
    let mut total = LabelTally::default();
    for stream in log.streams() {
        let cls = classify_stream(stream, &params);
        if ndjson {
            hio::append_dist_labels_ndjson(&mut dist_out, stream, &cls).map_err(data)?;
            hio::append_time_labels_ndjson(&mut time_out, stream, &cls).map_err(data)?;
            hio::append_fused_labels_ndjson(&mut fused_out, stream, &cls).map_err(data)?;
        } else {
            hio::append_dist_labels_csv(&mut dist_out, stream, &cls).map_err(data)?;
            hio::append_time_labels_csv(&mut time_out, stream, &cls).map_err(data)?;
            hio::append_fused_labels_csv(&mut fused_out, stream, &cls).map_err(data)?;
        }

        let mut tally = LabelTally::default();
        for ((&d, &t), &f) in cls.dist_labels.iter().zip(&cls.time_labels).zip(&cls.fused) {
            tally.add(d, t, f);
        }
        print_tally_row(stream.device_id(), &tally);
        total.merge(&tally);
    }
    print_tally_row("total", &total);

    for out in [&mut dist_out, &mut time_out, &mut fused_out] {
        out.flush().map_err(data)?;
    }
    Ok(())
}

fn grid_spec_for(
    opts: &GridOpts,
    fitted: impl FnOnce() -> Option<(f64, f64)>,
) -> CliResult<GridSpec> {
    let spec = match opts.origin {
        Some(origin) => GridSpec::new(origin, opts.cell_size, opts.min_events),
        None => match fitted() {
            Some(bbox_min) => GridSpec::fitted(bbox_min, opts.cell_size, opts.min_events),
            None => GridSpec::new((0.0, 0.0), opts.cell_size, opts.min_events),
        },
    };
    spec.map_err(usage)
}

fn write_grid_outputs(map: &GridMap, out: &Path) -> CliResult<(PathBuf, PathBuf)> {
    let mut grid_out = create(out, "grid.csv")?;
    hio::write_grid_csv(map, &mut grid_out).map_err(data)?;
    grid_out.flush().map_err(data)?;
    let mut svg_out = create(out, "map.svg")?;
    svg_out
        .write_all(render::render_map(map).as_bytes())
        .map_err(data)?;
    svg_out.flush().map_err(data)?;
    Ok((out.join("grid.csv"), out.join("map.svg")))
}

pub fn grid(args: &GridArgs) -> CliResult<()> {
    let map = if args.from_labels {
        let events = hio::read_fused_events(open_input(&args.input)?, args.format).map_err(data)?;
        let spec = grid_spec_for(&args.grid, || {
            events
                .iter()
                .map(|(p, _)| (p.x, p.y))
                .reduce(|acc, p| (acc.0.min(p.0), acc.1.min(p.1)))
        })?;
        build_grid(events, spec)
    } else {
        let params = args.params.to_params()?;
        let (log, _) = ingest_file(&args.input, args.format, args.strict)?;
        let spec = grid_spec_for(&args.grid, || log.bounds().map(|(lo, _)| (lo.x, lo.y)))?;
        let analysis = pipeline::analyze(&log, &params, Some(spec), args.threads);
        analysis.grid.expect("grid spec was supplied")
    };

    ensure_out_dir(&args.out)?;
    let (grid_path, svg_path) = write_grid_outputs(&map, &args.out)?;
    let assigned = map
        .cells()
        .filter(|(_, c)| c.dominant(map.spec().min_events).is_some())
        .count();
    println!(
        "grid: {} cells ({} assigned) -> {}, {}",
        map.cell_count(),
        assigned,
        grid_path.display(),
        svg_path.display()
    );
    Ok(())
}

pub fn tune(args: &TuneArgs) -> CliResult<()> {
    let params = args.params.to_params()?;
    let (log, _) = ingest_file(&args.input, args.format, args.strict)?;
    let stream = log
        .get(&args.device)
        .ok_or_else(|| usage(anyhow!("unknown device {:?}", args.device)))?;

    let mscw_series = tuning::mscw_series(stream, params.distance.k);
    let diff_series = tuning::timediff_series(stream, params.time.k);
    if mscw_series.values.is_empty() {
        eprintln!(
            "warning: device {:?} has {} events, not more than the window ({}); series are empty",
            args.device,
            stream.len(),
            params.distance.k
        );
    }

    ensure_out_dir(&args.out)?;
    let mut series_out = create(&args.out, "series.csv")?;
    hio::write_series_csv(
        std::slice::from_ref(&mscw_series),
        &mut series_out,
    )
    .map_err(data)?;
    // append the second series without repeating the header
    {
        let mut body = Vec::new();
        hio::write_series_csv(std::slice::from_ref(&diff_series), &mut body).map_err(data)?;
        let body_str = String::from_utf8(body).expect("csv output is utf-8");
        let without_header = body_str.splitn(2, '\n').nth(1).unwrap_or("");
        series_out.write_all(without_header.as_bytes()).map_err(data)?;
    }
    series_out.flush().map_err(data)?;

    let mut mscw_svg = create(&args.out, "mscw.svg")?;
    mscw_svg
        .write_all(render::render_bars(&mscw_series, Some(params.distance.r)).as_bytes())
        .map_err(data)?;
    mscw_svg.flush().map_err(data)?;
    let mut diff_svg = create(&args.out, "timediff.svg")?;
    diff_svg
        .write_all(render::render_bars(&diff_series, Some(params.time.b)).as_bytes())
        .map_err(data)?;
    diff_svg.flush().map_err(data)?;

    println!(
        "tuning series for device {:?}: {} window values -> {}",
        args.device,
        mscw_series.values.len(),
        args.out.join("series.csv").display()
    );
    Ok(())
}

pub fn render_cmd(args: &RenderArgs) -> CliResult<()> {
    let spec = GridSpec::new(
        args.grid.origin.unwrap_or((0.0, 0.0)),
        args.grid.cell_size,
        args.grid.min_events,
    )
    .map_err(usage)?;
    let map = hio::read_grid_csv(open_input(&args.input)?, spec).map_err(data)?;
    ensure_out_dir(&args.out)?;
    let mut svg_out = create(&args.out, "map.svg")?;
    svg_out
        .write_all(render::render_map(&map).as_bytes())
        .map_err(data)?;
    svg_out.flush().map_err(data)?;
    println!("rendered {} cells -> {}", map.cell_count(), args.out.join("map.svg").display());
    Ok(())
}
