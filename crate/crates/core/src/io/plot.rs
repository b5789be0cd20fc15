// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic SVG line plots from CSV payloads.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Columns `x`, `f`.
    FieldProfile,
    /// Columns `time`, `position`.
    FrontTrajectory,
    /// Columns `time`, `p_1`, `p_2`, ...; a series stops where it hits zero.
    PTrajectory,
    /// Columns `x`, `mc`, `fp`.
    HistogramVsDensity,
}

impl PlotKind {
    fn schema(self) -> (&'static str, &'static [&'static str]) {
        match self {
            PlotKind::FieldProfile => ("x", &["f"]),
            PlotKind::FrontTrajectory => ("time", &["position"]),
            PlotKind::PTrajectory => ("time", &["p_1"]),
            PlotKind::HistogramVsDensity => ("x", &["mc", "fp"]),
        }
    }

    fn title(self) -> &'static str {
        match self {
            PlotKind::FieldProfile => "field profile",
            PlotKind::FrontTrajectory => "front trajectory",
            PlotKind::PTrajectory => "channel probabilities",
            PlotKind::HistogramVsDensity => "ensemble histogram vs density",
        }
    }
}

impl FromStr for PlotKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "field-profile" => PlotKind::FieldProfile,
            "front-trajectory" => PlotKind::FrontTrajectory,
            "p-trajectory" => PlotKind::PTrajectory,
            "histogram-vs-density" => PlotKind::HistogramVsDensity,
            _ => return Err(format!("unknown plot kind `{s}`")),
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlotError {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: cannot parse `{value}` in column `{column}`")]
    BadValue {
        row: usize,
        column: String,
        value: String,
    },
    #[error("malformed csv: {0}")]
    Csv(String),
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

/// Renders `data` as an SVG document. The output depends only on the input
/// bytes.
pub fn emit_plot(data: &str, kind: PlotKind) -> Result<String, PlotError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(data.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| PlotError::Csv(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| PlotError::MissingColumn(name.to_string()))
    };
    let (x_name, required) = kind.schema();
    let x_col = column(x_name)?;
    for r in required {
        column(r)?;
    }
    let y_cols: Vec<usize> = match kind {
        PlotKind::PTrajectory => {
            let mut cols = Vec::new();
            let mut k = 1;
            while let Ok(c) = column(&format!("p_{k}")) {
                cols.push(c);
                k += 1;
            }
            cols
        }
        _ => required
            .iter()
            .map(|r| column(r))
            .collect::<Result<_, _>>()?,
    };

    let mut series: Vec<Series> = y_cols
        .iter()
        .map(|&c| Series {
            name: headers[c].clone(),
            points: Vec::new(),
        })
        .collect();
    let mut ended = vec![false; series.len()];
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| PlotError::Csv(e.to_string()))?;
        let get = |c: usize| -> Result<f64, PlotError> {
            let v = rec.get(c).unwrap_or("").trim();
            v.parse::<f64>().map_err(|_| PlotError::BadValue {
                row: i + 1,
                column: headers[c].clone(),
                value: v.to_string(),
            })
        };
        let x = get(x_col)?;
        for (s, &c) in y_cols.iter().enumerate() {
            if ended[s] {
                continue;
            }
            let y = get(c)?;
            if !(x.is_finite() && y.is_finite()) {
                continue;
            }
            series[s].points.push((x, y));
            if kind == PlotKind::PTrajectory && y == 0.0 {
                ended[s] = true;
            }
        }
    }
    Ok(render(kind, x_name, &series))
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= 0.0 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn label(v: f64) -> String {
    format!("{v:.4e}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn render(kind: PlotKind, x_name: &str, series: &[Series]) -> String {
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (mut y0, mut y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    if kind == PlotKind::PTrajectory {
        y0 = y0.min(0.0);
        y1 = y1.max(1.0);
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        num(WIDTH / 2.0),
        kind.title()
    );
    let (bx, by) = (LEFT, TOP + ph);
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        num(bx),
        num(by),
        num(bx + pw),
        num(by)
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        num(bx),
        num(by),
        num(bx),
        num(TOP)
    );
    let tick = r#"font-family="sans-serif" font-size="10""#;
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" {tick} text-anchor="start">{}</text>"#,
        num(bx),
        num(by + 14.0),
        label(x0)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" {tick} text-anchor="end">{}</text>"#,
        num(bx + pw),
        num(by + 14.0),
        label(x1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" {tick} text-anchor="end">{}</text>"#,
        num(bx - 4.0),
        num(by),
        label(y0)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" {tick} text-anchor="end">{}</text>"#,
        num(bx - 4.0),
        num(TOP + 8.0),
        label(y1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        num(LEFT + pw / 2.0),
        num(HEIGHT - 12.0),
        escape(x_name)
    );
    let y_label = series
        .iter()
        .map(|s| s.name.as_str())
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(
        out,
        r#"<text x="16" y="{y}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {y})">{}</text>"#,
        escape(&y_label),
        y = num(TOP + ph / 2.0)
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" {tick} fill="{color}">{}</text>"#,
            num(LEFT + pw - 60.0),
            num(TOP + 12.0 + 12.0 * i as f64),
            escape(&s.name)
        );
        if s.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (j, &(x, y)) in s.points.iter().enumerate() {
            let _ = write!(
                d,
                "{}{} {}",
                if j == 0 { "M" } else { " L" },
                num(sx(x)),
                num(sy(y))
            );
        }
        let _ = writeln!(
            out,
            r#"<path class="series" data-name="{}" d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}
