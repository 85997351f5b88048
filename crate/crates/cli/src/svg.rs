//! Minimal static SVG line charts: axes, ticks, legend, polylines and
//! shaded polygons.

use std::fmt::Write;

use ihc_core::simlab::format_sig;

const WIDTH: f64 = 420.0;
const HEIGHT: f64 = 320.0;
const LEFT: f64 = 62.0;
const RIGHT: f64 = 18.0;
const TOP: f64 = 34.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Region {
    pub label: String,
    pub color: &'static str,
    pub polygon: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub series: Vec<Series>,
    pub regions: Vec<Region>,
}

/// `[min, max]` of the finite values, widened when degenerate.
pub fn span(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

struct Frame {
    ox: f64,
    oy: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.ox + LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        self.oy + HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    fn points(&self, pts: &[(f64, f64)]) -> String {
        pts.iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn draw_panel(out: &mut String, p: &Panel, ox: f64, oy: f64) {
    let f = Frame {
        ox,
        oy,
        x: p.x_range,
        y: p.y_range,
    };
    let (x0, x1) = (f.px(p.x_range.0), f.px(p.x_range.1));
    let (y0, y1) = (f.py(p.y_range.0), f.py(p.y_range.1));
    for r in &p.regions {
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{}" fill-opacity="0.25" stroke="none"/>"#,
            f.points(&r.polygon),
            r.color
        );
    }
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for i in 0..=TICKS {
        let t = i as f64 / TICKS as f64;
        let xv = p.x_range.0 + t * (p.x_range.1 - p.x_range.0);
        let yv = p.y_range.0 + t * (p.y_range.1 - p.y_range.0);
        let (xp, yp) = (f.px(xv), f.py(yv));
        let _ = writeln!(
            out,
            r#"<line x1="{xp:.2}" y1="{y0:.2}" x2="{xp:.2}" y2="{:.2}" stroke="black"/><text x="{xp:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            y0 + 4.0,
            y0 + 16.0,
            format_sig(xv, 3)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{yp:.2}" x2="{x0:.2}" y2="{yp:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
            x0 - 4.0,
            x0 - 6.0,
            yp + 3.0,
            format_sig(yv, 3)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        oy + 20.0,
        escape(&p.title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        y0 + 34.0,
        escape(&p.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        ox + 16.0,
        (y0 + y1) / 2.0,
        ox + 16.0,
        (y0 + y1) / 2.0,
        escape(&p.y_label)
    );
    for s in &p.series {
        let dash = if s.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.6"{dash}/>"#,
            f.points(&s.points),
            s.color
        );
    }
    let legend: Vec<(&str, &str, bool)> = p
        .series
        .iter()
        .map(|s| (s.label.as_str(), s.color, s.dashed))
        .chain(p.regions.iter().map(|r| (r.label.as_str(), r.color, false)))
        .collect();
    for (i, (label, color, dashed)) in legend.iter().enumerate() {
        let ly = y1 + 14.0 + 14.0 * i as f64;
        let lx = x1 - 120.0;
        let dash = if *dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}" font-size="10">{}</text>"#,
            lx + 22.0,
            lx + 26.0,
            ly + 3.5,
            escape(label)
        );
    }
}

/// Lays `panels` out row by row, `columns` per row.
pub fn render(panels: &[Panel], columns: usize) -> String {
    let columns = columns.clamp(1, panels.len().max(1));
    let rows = panels.len().div_ceil(columns).max(1);
    let (w, h) = (WIDTH * columns as f64, HEIGHT * rows as f64);
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#
    );
    out.push('\n');
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        let ox = WIDTH * (i % columns) as f64;
        let oy = HEIGHT * (i / columns) as f64;
        draw_panel(&mut out, p, ox, oy);
    }
    out.push_str("</svg>\n");
    out
}
