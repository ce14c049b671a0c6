//! Value and derivative curves rendered as a self-contained SVG.

use std::fmt::Write as _;

use telu_lab::activations::{self, ActivationId};

pub const WIDTH: f64 = 720.0;
pub const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_Y: f64 = 32.0;

const PALETTE: [&str; 12] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Value,
    Derivative,
}

impl CurveKind {
    fn label(self) -> &'static str {
        match self {
            CurveKind::Value => "value",
            CurveKind::Derivative => "derivative",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub id: ActivationId,
    pub kind: CurveKind,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub x_range: (f64, f64),
    pub series: Vec<Series>,
}

/// `samples` evenly spaced points on `x_range`, ends included, 64-bit.
pub fn plot_data(ids: &[ActivationId], x_range: (f64, f64), samples: usize) -> PlotData {
    assert!(samples >= 2 && x_range.1 > x_range.0);
    let xs: Vec<f64> = (0..samples)
        .map(|i| x_range.0 + (x_range.1 - x_range.0) * i as f64 / (samples - 1) as f64)
        .collect();
    let mut series = Vec::with_capacity(ids.len() * 2);
    for &id in ids {
        series.push(Series {
            id,
            kind: CurveKind::Value,
            points: xs.iter().map(|&x| (x, activations::value(id, x))).collect(),
        });
        series.push(Series {
            id,
            kind: CurveKind::Derivative,
            points: xs.iter().map(|&x| (x, activations::derivative(id, x))).collect(),
        });
    }
    PlotData { x_range, series }
}

/// Data-to-pixel mapping of the plotting area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl Frame {
    /// Fits every point and the `y = 0` line, with 5% vertical padding.
    pub fn fit(data: &PlotData) -> Frame {
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        for (_, y) in data.series.iter().flat_map(|s| &s.points) {
            if y.is_finite() {
                lo = lo.min(*y);
                hi = hi.max(*y);
            }
        }
        let pad = 0.05 * (hi - lo).max(1e-9);
        Frame {
            x_range: data.x_range,
            y_range: (lo - pad, hi + pad),
        }
    }

    pub fn px(&self, x: f64) -> f64 {
        let (a, b) = self.x_range;
        MARGIN_LEFT + (x - a) / (b - a) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    pub fn py(&self, y: f64) -> f64 {
        let (a, b) = self.y_range;
        HEIGHT - MARGIN_Y - (y - a) / (b - a) * (HEIGHT - 2.0 * MARGIN_Y)
    }
}

fn tick_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn ticks(range: (f64, f64)) -> Vec<f64> {
    let step = tick_step(range.1 - range.0);
    let first = (range.0 / step).ceil() as i64;
    let last = (range.1 / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Deterministic SVG: frame, axes through the origin, tick labels, one
/// polyline per series (derivatives dashed) and a legend. Each polyline
/// carries `data-id` and `data-kind` attributes.
pub fn render_svg(data: &PlotData) -> String {
    let f = Frame::fit(data);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1) = (f.px(f.x_range.0), f.px(f.x_range.1));
    let (y0, y1) = (f.py(f.y_range.0), f.py(f.y_range.1));
    let _ = writeln!(
        s,
        r##"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#999"/>"##,
        x1 - x0,
        y0 - y1
    );

    let _ = writeln!(s, r#"<g id="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{x0:.2}" y1="{:.2}" x2="{x1:.2}" y2="{:.2}"/>"#,
        f.py(0.0),
        f.py(0.0)
    );
    if f.x_range.0 <= 0.0 && 0.0 <= f.x_range.1 {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y1:.2}"/>"#,
            f.px(0.0),
            f.px(0.0)
        );
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"ticks\">\n");
    for t in ticks(f.x_range) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            f.px(t),
            y0 + 14.0,
            label(t)
        );
    }
    for t in ticks(f.y_range) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            f.py(t) + 4.0,
            label(t)
        );
    }
    s.push_str("</g>\n");

    let colour = |id: ActivationId| PALETTE[ActivationId::ALL.iter().position(|&a| a == id).unwrap_or(0)];
    for series in &data.series {
        let dash = match series.kind {
            CurveKind::Value => "",
            CurveKind::Derivative => r#" stroke-dasharray="5,3""#,
        };
        let _ = write!(
            s,
            r#"<polyline data-id="{}" data-kind="{}" fill="none" stroke="{}" stroke-width="1.5"{dash} points=""#,
            series.id,
            series.kind.label(),
            colour(series.id)
        );
        for (i, (x, y)) in series.points.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.2},{:.2}", f.px(*x), f.py(*y));
        }
        s.push_str("\"/>\n");
    }

    s.push_str("<g id=\"legend\">\n");
    for (i, series) in data.series.iter().enumerate() {
        let y = MARGIN_Y + 16.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let dash = match series.kind {
            CurveKind::Value => "",
            CurveKind::Derivative => r#" stroke-dasharray="5,3""#,
        };
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"{dash}/>"#,
            lx + 24.0,
            colour(series.id)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{} {}</text>"#,
            lx + 30.0,
            y + 4.0,
            series.id,
            if series.kind == CurveKind::Value { "f" } else { "f'" }
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
