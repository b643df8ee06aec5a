//! Minimal line plots written as standalone SVG 1.1.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::PlotError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Axes {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Same data units per pixel on both axes (for paths in the plane).
    pub equal_scale: bool,
}

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
    step: f64,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn nice_range(lo: f64, hi: f64) -> Range {
    let (lo, hi) = if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
        let pad = (lo.abs() * 0.1).max(1.0);
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    };
    let step = nice_step(hi - lo);
    Range {
        lo: (lo / step).floor() * step,
        hi: (hi / step).ceil() * step,
        step,
    }
}

// Widens `r` about its centre to span `span`, re-deriving the tick step.
fn widen(r: Range, span: f64) -> Range {
    let mid = 0.5 * (r.lo + r.hi);
    let step = nice_step(span);
    Range {
        lo: mid - 0.5 * span,
        hi: mid + 0.5 * span,
        step,
    }
}

fn ticks(r: &Range) -> Vec<f64> {
    let first = (r.lo / r.step - 1e-9).ceil() as i64;
    let last = (r.hi / r.step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * r.step).collect()
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    // avoid "-0" and "-0.00"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the series into an SVG document.
pub fn render_svg(series: &[Series], axes: &Axes) -> Result<String, PlotError> {
    if series.is_empty() {
        return Err(PlotError::Empty);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        if s.points.len() < 2 {
            return Err(PlotError::TooFewPoints(s.label.clone()));
        }
        for &(x, y) in &s.points {
            if !(x.is_finite() && y.is_finite()) {
                return Err(PlotError::NonFinite(s.label.clone()));
            }
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let mut xr = nice_range(x0, x1);
    let mut yr = nice_range(y0, y1);
    if axes.equal_scale {
        let per_px = ((xr.hi - xr.lo) / pw).max((yr.hi - yr.lo) / ph);
        xr = widen(xr, per_px * pw);
        yr = widen(yr, per_px * ph);
    }
    let px = |x: f64| LEFT + (x - xr.lo) / (xr.hi - xr.lo) * pw;
    let py = |y: f64| TOP + (yr.hi - y) / (yr.hi - yr.lo) * ph;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&axes.title)
    );

    let _ = writeln!(out, r##"<g stroke="#dddddd" stroke-width="1">"##);
    for v in ticks(&xr) {
        let _ = writeln!(out, r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}"/>"#, px(v), TOP, TOP + ph);
    }
    for v in ticks(&yr) {
        let _ = writeln!(out, r#"<line x1="{1:.2}" y1="{0:.2}" x2="{2:.2}" y2="{0:.2}"/>"#, py(v), LEFT, LEFT + pw);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    let _ = writeln!(out, r#"<g text-anchor="middle">"#);
    for v in ticks(&xr) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            px(v),
            TOP + ph + 16.0,
            tick_label(v, xr.step)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g text-anchor="end">"#);
    for v in ticks(&yr) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT - 6.0,
            py(v) + 4.0,
            tick_label(v, yr.step)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        escape(&axes.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{0:.1}" text-anchor="middle" transform="rotate(-90 18 {0:.1})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(&axes.y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let mut coords: Vec<String> = Vec::with_capacity(s.points.len());
        for &(x, y) in &s.points {
            let c = format!("{:.2},{:.2}", px(x), py(y));
            if coords.last() != Some(&c) {
                coords.push(c);
            }
        }
        // a series collapsed onto one pixel still draws as a segment
        if coords.len() == 1 {
            coords.push(coords[0].clone());
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            coords.join(" ")
        );
    }

    let _ = writeln!(out, r#"<g font-size="12">"#);
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 16.0 + 18.0 * i as f64;
        let x = LEFT + pw - 150.0;
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="2"/>"#,
            x + 24.0,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            x + 30.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}

/// Renders and writes the plot to `path`.
pub fn emit_svg(series: &[Series], path: &Path, axes: &Axes) -> Result<(), PlotError> {
    let doc = render_svg(series, axes)?;
    std::fs::write(path, doc)?;
    Ok(())
}
