//! Minimal deterministic SVG line charts.

use std::fmt::Write;
use std::fs;
use std::path::Path;

use crate::error::CliError;
use crate::output::write_atomic;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
/// Point markers are drawn only for sparse series.
const MARKER_LIMIT: usize = 200;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-3..1e5).contains(&a) {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

fn range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        let pad = if lo == 0.0 { 0.5 } else { lo.abs() * 0.05 };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

/// Line chart of `y` against `x`; empty input gives bare axes.
pub fn render(x: &[f64], y: &[f64], x_label: &str, y_label: &str) -> String {
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );
    if !x.is_empty() {
        let (x0, x1) = range(x);
        let (y0, y1) = range(y);
        let px = |v: f64| LEFT + (v - x0) / (x1 - x0) * pw;
        let py = |v: f64| TOP + ph - (v - y0) / (y1 - y0) * ph;
        for i in 0..TICKS {
            let f = i as f64 / (TICKS - 1) as f64;
            let (vx, vy) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let (gx, gy) = (px(vx), py(vy));
            let _ = writeln!(
                s,
                r#"<line x1="{gx:.2}" y1="{}" x2="{gx:.2}" y2="{}" stroke="black"/><text x="{gx:.2}" y="{}" text-anchor="middle">{}</text>"#,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 18.0,
                tick_label(vx)
            );
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{gy:.2}" x2="{LEFT}" y2="{gy:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                gy + 4.0,
                tick_label(vy)
            );
        }
        let pts: Vec<String> = x
            .iter()
            .zip(y)
            .map(|(&a, &b)| format!("{:.2},{:.2}", px(a), py(b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        if x.len() <= MARKER_LIMIT {
            for (&a, &b) in x.iter().zip(y) {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="steelblue"/>"#,
                    px(a),
                    py(b)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Renders columns `x` and `y` of a CSV document.
pub fn render_csv(csv_bytes: &[u8], x: &str, y: &str) -> Result<String, CliError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(csv_bytes);
    let header = reader
        .headers()
        .map_err(|e| CliError::Config(format!("malformed CSV header: {e}")))?
        .clone();
    if header.is_empty() {
        return Ok(render(&[], &[], x, y));
    }
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("column `{name}` not found; available: {}", header.iter().collect::<Vec<_>>().join(", "))))
    };
    let (ix, iy) = (find(x)?, find(y)?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Config(format!("malformed CSV row {}: {e}", line + 2)))?;
        let parse = |i: usize, name: &str| {
            rec.get(i)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Config(format!("row {}: column `{name}` is not a finite number", line + 2)))
        };
        xs.push(parse(ix, x)?);
        ys.push(parse(iy, y)?);
    }
    Ok(render(&xs, &ys, x, y))
}

/// `plot --csv path --x col --y col --out path.svg`.
pub fn plot_file(csv_path: &Path, x: &str, y: &str, out: &Path) -> Result<(), CliError> {
    let bytes = fs::read(csv_path).map_err(|source| CliError::Input {
        path: csv_path.to_path_buf(),
        source,
    })?;
    let svg = render_csv(&bytes, x, y)?;
    write_atomic(out, svg.as_bytes())
}
