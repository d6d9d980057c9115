//! SVG rendering of grid maps and diagnostic bar charts.
//!
//! Output is plain SVG 1.1 built by string assembly; for a given input the
//! bytes are identical on every run, which the golden tests rely on.

use std::fmt::Write;

use crate::fusion::FusedClass;
use crate::grid::GridMap;
use crate::tuning::{DiagnosticSeries, SeriesKind};

/// Cell fill per dominant class.
pub fn class_color(class: FusedClass) -> &'static str {
    match class {
        FusedClass::Class1 => "#1a7a1a", // green: movement by both criteria
        FusedClass::Class2 => "#ff8c00", // orange: distance AME, time UAE
        FusedClass::Class3 => "#ffd700", // yellow: distance UAE, time AME
        FusedClass::Class4 => "#8b0000", // red: no movement by either
        FusedClass::Unfused => GREY,
    }
}

/// Fill of cells below the assignment threshold.
pub const GREY: &str = "#c0c0c0";

const FONT: &str = "font-family=\"monospace\" font-size=\"12\"";

fn svg_open(out: &mut String, width: i64, height: i64) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n<rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n"
    );
}

/// Tick step that yields a readable number of labels for `extent` cells.
fn tick_step(extent: i64) -> i64 {
    const STEPS: [i64; 10] = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000];
    let target = (extent / 8).max(1);
    for step in STEPS {
        if step >= target {
            return step;
        }
    }
    *STEPS.last().unwrap()
}

/// Renders the hall map: one filled square per cell that saw events, colored
/// by the cell's dominant class, grey when below the assignment threshold.
/// Axes are annotated in meters.
///
/// An empty map yields a minimal valid document carrying a notice.
pub fn render_map(map: &GridMap) -> String {
    let mut out = String::new();
    let Some((min_ix, min_iy, max_ix, max_iy)) = map.index_bounds() else {
        svg_open(&mut out, 360, 60);
        let _ = write!(
            out,
            "<text x=\"12\" y=\"34\" {FONT} fill=\"#333333\">no cells: empty grid</text>\n</svg>\n"
        );
        return out;
    };

    let cells_x = max_ix - min_ix + 1;
    let cells_y = max_iy - min_iy + 1;
    let px = (900 / cells_x.max(cells_y).max(1)).clamp(4, 24);
    let (left, top, bottom, right) = (56i64, 34i64, 40i64, 16i64);
    let plot_w = cells_x * px;
    let plot_h = cells_y * px;
    let width = left + plot_w + right;
    let height = top + plot_h + bottom;
    svg_open(&mut out, width, height);

    let spec = map.spec();
    let _ = write!(
        out,
        "<text x=\"{left}\" y=\"20\" {FONT} fill=\"#333333\">dominant class per {s} m cell \
         (green=1 orange=2 yellow=3 red=4 grey=&lt;{m} fused events)</text>\n",
        s = spec.cell_size,
        m = spec.min_events,
    );

    out.push_str("<g shape-rendering=\"crispEdges\">\n");
    for (&(ix, iy), counts) in map.cells() {
        let color = match counts.dominant(spec.min_events) {
            Some((class, _)) => class_color(class),
            None => GREY,
        };
        let x = left + (ix - min_ix) * px;
        let y = top + (max_iy - iy) * px;
        let _ = write!(
            out,
            "<rect x=\"{x}\" y=\"{y}\" width=\"{px}\" height=\"{px}\" fill=\"{color}\"/>\n"
        );
    }
    out.push_str("</g>\n");

    // frame and axes, labeled in world meters
    let _ = write!(
        out,
        "<rect x=\"{left}\" y=\"{top}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#888888\"/>\n"
    );
    let step = tick_step(cells_x.max(cells_y));
    let mut ix = min_ix - min_ix.rem_euclid(step);
    while ix <= max_ix + 1 {
        if ix >= min_ix {
            let x = left + (ix - min_ix) * px;
            let meters = spec.origin.0 + ix as f64 * spec.cell_size;
            let _ = write!(
                out,
                "<line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" stroke=\"#888888\"/>\n\
                 <text x=\"{x}\" y=\"{ty}\" {FONT} fill=\"#333333\" text-anchor=\"middle\">{meters}</text>\n",
                y0 = top + plot_h,
                y1 = top + plot_h + 5,
                ty = top + plot_h + 20,
            );
        }
        ix += step;
    }
    let mut iy = min_iy - min_iy.rem_euclid(step);
    while iy <= max_iy + 1 {
        if iy >= min_iy {
            let y = top + (max_iy - iy + 1) * px;
            let meters = spec.origin.1 + iy as f64 * spec.cell_size;
            let _ = write!(
                out,
                "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{left}\" y2=\"{y}\" stroke=\"#888888\"/>\n\
                 <text x=\"{tx}\" y=\"{ty}\" {FONT} fill=\"#333333\" text-anchor=\"end\">{meters}</text>\n",
                x0 = left - 5,
                tx = left - 8,
                ty = y + 4,
            );
        }
        iy += step;
    }
    let _ = write!(
        out,
        "<text x=\"{x}\" y=\"{y}\" {FONT} fill=\"#333333\" text-anchor=\"middle\">x / m</text>\n",
        x = left + plot_w / 2,
        y = height - 6,
    );
    out.push_str("</svg>\n");
    out
}

/// Renders a diagnostic series as a bar chart ordered by event seq, with an
/// optional horizontal threshold line. Used to pick the radius `r` (on mscw
/// series) or the time bound `b` (on elapsed-time series).
pub fn render_bars(series: &DiagnosticSeries, threshold: Option<f64>) -> String {
    let (width, height) = (960i64, 320i64);
    let (left, top, bottom, right) = (64i64, 30i64, 42i64, 16i64);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let mut out = String::new();
    svg_open(&mut out, width, height);

    let unit = match series.kind {
        SeriesKind::Mscw => "m",
        SeriesKind::TimeDiff => "s",
    };
    let _ = write!(
        out,
        "<text x=\"{left}\" y=\"20\" {FONT} fill=\"#333333\">{kind} per event, device {dev}, window {k}</text>\n",
        kind = series.kind.as_str(),
        dev = series.device_id,
        k = series.k,
    );

    if series.values.is_empty() {
        let _ = write!(
            out,
            "<text x=\"{left}\" y=\"{y}\" {FONT} fill=\"#333333\">no values: stream not longer than the window</text>\n",
            y = top + plot_h / 2,
        );
        out.push_str("</svg>\n");
        return out;
    }

    let data_max = series.values.iter().map(|&(_, v)| v).fold(0.0f64, f64::max);
    let y_max = match threshold {
        Some(t) => data_max.max(t).max(1e-12),
        None => data_max.max(1e-12),
    } * 1.05;

    let n = series.values.len() as i64;
    let scale_y = |v: f64| top as f64 + plot_h as f64 * (1.0 - v / y_max);

    out.push_str("<g fill=\"#4878a8\" shape-rendering=\"crispEdges\">\n");
    let bar_w = plot_w as f64 / n as f64;
    for (i, &(_, value)) in series.values.iter().enumerate() {
        if value <= 0.0 {
            continue;
        }
        let x = left as f64 + i as f64 * bar_w;
        let y = scale_y(value);
        let h = (top + plot_h) as f64 - y;
        let w = (bar_w * 0.9).max(0.5);
        let _ = write!(
            out,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\"/>\n"
        );
    }
    out.push_str("</g>\n");

    // y axis with three reference lines
    for frac in [0.0, 0.5, 1.0] {
        let v = y_max * frac;
        let y = scale_y(v);
        let _ = write!(
            out,
            "<line x1=\"{left}\" y1=\"{y:.2}\" x2=\"{x1}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>\n\
             <text x=\"{tx}\" y=\"{ty:.2}\" {FONT} fill=\"#333333\" text-anchor=\"end\">{label:.2}</text>\n",
            x1 = left + plot_w,
            tx = left - 8,
            ty = y + 4.0,
            label = v,
        );
    }

    if let Some(t) = threshold {
        let y = scale_y(t);
        let _ = write!(
            out,
            "<line x1=\"{left}\" y1=\"{y:.2}\" x2=\"{x1}\" y2=\"{y:.2}\" stroke=\"#cc2222\" stroke-dasharray=\"6 3\"/>\n\
             <text x=\"{x1}\" y=\"{ty:.2}\" {FONT} fill=\"#cc2222\" text-anchor=\"end\">threshold {t} {unit}</text>\n",
            x1 = left + plot_w,
            ty = y - 5.0,
        );
    }

    // x axis: seq of first and last bar
    let first_seq = series.values[0].0;
    let last_seq = series.values[series.values.len() - 1].0;
    let _ = write!(
        out,
        "<line x1=\"{left}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#888888\"/>\n\
         <text x=\"{left}\" y=\"{ty}\" {FONT} fill=\"#333333\">seq {first_seq}</text>\n\
         <text x=\"{x1}\" y=\"{ty}\" {FONT} fill=\"#333333\" text-anchor=\"end\">seq {last_seq}</text>\n\
         <text x=\"{mx}\" y=\"{ty}\" {FONT} fill=\"#333333\" text-anchor=\"middle\">event order / value in {unit}</text>\n",
        y = top + plot_h,
        x1 = left + plot_w,
        ty = height - 10,
        mx = left + plot_w / 2,
    );
    out.push_str("</svg>\n");
    out
}
