//! Hand-written SVG for embedding scatter plots and per-k curves.

use std::fmt::Write as _;

use suproj::Matrix;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Maps a data rectangle onto the plot area.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Round tick positions covering `[lo, hi]`, about five of them.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| raw <= *s).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.0e}")
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, xticks: &[(f64, String)], yticks: &[(f64, String)], xlabel: &str, ylabel: &str) {
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r##"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        x1 - x0,
        y0 - y1
    );
    for (v, text) in xticks {
        let x = frame.px(*v);
        let _ = writeln!(out, r##"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="#444"/>"##, y0 + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, y0 + 18.0, escape(text));
    }
    for (v, text) in yticks {
        let y = frame.py(*v);
        let _ = writeln!(out, r##"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="#444"/>"##, x0 - 5.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, y + 4.0, escape(text));
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
}

fn legend_entry(out: &mut String, row: usize, swatch: &str, text: &str) {
    let y = TOP + 10.0 + 20.0 * row as f64;
    let x = WIDTH - RIGHT + 15.0;
    let _ = writeln!(out, "{}", swatch.replace("{X}", &format!("{x:.2}")).replace("{Y}", &format!("{y:.2}")));
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 14.0, y + 4.0, escape(text));
}

/// One group of points sharing a marker style.
pub struct PointSet<'a> {
    /// `2 × m`
    pub points: &'a Matrix,
    pub labels: &'a [usize],
    pub filled: bool,
    pub name: &'a str,
}

/// 2-D scatter plot colored by class.
pub fn scatter(title: &str, class_names: &[String], sets: &[PointSet<'_>]) -> String {
    let xs = bounds(sets.iter().flat_map(|s| (0..s.points.cols()).map(|j| s.points.get(0, j))));
    let ys = bounds(sets.iter().flat_map(|s| (0..s.points.cols()).map(|j| s.points.get(1, j))));
    let frame = Frame {
        x: padded(xs.0, xs.1),
        y: padded(ys.0, ys.1),
    };
    let ticks = |(lo, hi): (f64, f64)| -> Vec<(f64, String)> { nice_ticks(lo, hi).into_iter().map(|v| (v, label(v))).collect() };

    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, &ticks(frame.x), &ticks(frame.y), "z₁", "z₂");
    for set in sets {
        for j in 0..set.points.cols() {
            let (x, y) = (set.points.get(0, j), set.points.get(1, j));
            if !(x.is_finite() && y.is_finite()) {
                continue;
            }
            let c = color(set.labels[j]);
            let fill = if set.filled { c } else { "none" };
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{fill}" stroke="{c}" stroke-width="1.2" fill-opacity="0.8"/>"#,
                frame.px(x),
                frame.py(y)
            );
        }
    }
    for (i, name) in class_names.iter().enumerate() {
        let c = color(i);
        legend_entry(&mut out, i, &format!(r#"<circle cx="{{X}}" cy="{{Y}}" r="4" fill="{c}"/>"#), name);
    }
    let base = class_names.len() + 1;
    for (i, set) in sets.iter().enumerate() {
        let fill = if set.filled { "#444" } else { "none" };
        legend_entry(
            &mut out,
            base + i,
            &format!(r##"<circle cx="{{X}}" cy="{{Y}}" r="4" fill="{fill}" stroke="#444"/>"##),
            set.name,
        );
    }
    out.push_str("</svg>\n");
    out
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Line plot of one or more series over shared x values. With `log_y` the
/// vertical axis is logarithmic and non-positive values are dropped.
pub fn curves(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log_y: bool) -> String {
    let ty = |y: f64| if log_y { y.log10() } else { y };
    let keep = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (!log_y || y > 0.0);
    let xs = bounds(series.iter().flat_map(|s| s.points.iter().filter(|p| keep(p)).map(|p| p.0)));
    let ys = bounds(series.iter().flat_map(|s| s.points.iter().filter(|p| keep(p)).map(|p| ty(p.1))));
    let frame = Frame {
        x: padded(xs.0, xs.1),
        y: if !ys.0.is_finite() {
            (0.0, 1.0)
        } else if log_y {
            (ys.0.floor().min(ys.1 - 1.0), ys.1.ceil().max(ys.0 + 1.0))
        } else {
            padded(ys.0.min(0.0), ys.1.max(1.0))
        },
    };

    let mut xvals: Vec<f64> = series.iter().flat_map(|s| s.points.iter().filter(|p| keep(p)).map(|p| p.0)).collect();
    xvals.sort_by(f64::total_cmp);
    xvals.dedup();
    let xticks: Vec<(f64, String)> = xvals.into_iter().map(|v| (v, label(v))).collect();
    let yticks: Vec<(f64, String)> = if log_y {
        let (lo, hi) = (frame.y.0 as i32, frame.y.1 as i32);
        (lo..=hi).map(|e| (f64::from(e), label(10f64.powi(e)))).collect()
    } else {
        nice_ticks(frame.y.0, frame.y.1).into_iter().map(|v| (v, label(v))).collect()
    };

    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, &xticks, &yticks, xlabel, ylabel);
    for (i, s) in series.iter().enumerate() {
        let c = color(i);
        let pts: Vec<(f64, f64)> = s.points.iter().filter(|p| keep(p)).map(|&(x, y)| (frame.px(x), frame.py(ty(y)))).collect();
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#, path.join(" "));
        }
        for (x, y) in &pts {
            let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{c}"/>"#);
        }
        legend_entry(
            &mut out,
            i,
            &format!(r#"<line x1="{{X}}" y1="{{Y}}" x2="{{X}}" y2="{{Y}}" stroke="{c}" stroke-width="10" stroke-linecap="round"/>"#),
            &s.name,
        );
    }
    out.push_str("</svg>\n");
    out
}
