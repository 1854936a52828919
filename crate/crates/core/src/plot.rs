//! Self-contained SVG rendering of traces, schedules, and sweep heatmaps.
//!
//! Everything is emitted as plain text with default float formatting, so
//! identical inputs produce byte-identical files. No external assets.

use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// A parsed numeric CSV: one header line, rows of optional floats (blank
/// fields parse to `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// Read a numeric CSV with a one-line header.
pub fn read_csv_table(path: &Path) -> Result<CsvTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv_table(&text)
}

pub fn parse_csv_table(text: &str) -> Result<CsvTable> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::parse("empty CSV"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::parse(format!(
                "row {} has {} fields, header has {}",
                i + 1,
                fields.len(),
                header.len()
            )));
        }
        let mut row = Vec::with_capacity(fields.len());
        for f in fields {
            if f.is_empty() {
                row.push(None);
            } else {
                let v = f
                    .parse::<f64>()
                    .map_err(|e| Error::parse(format!("bad numeric field {f:?}: {e}")))?;
                row.push(Some(v));
            }
        }
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

struct Svg(String);

impl Svg {
    fn new() -> Self {
        let mut s = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        Svg(s)
    }

    fn push(&mut self, s: &str) {
        self.0.push_str(s);
        self.0.push('\n');
    }

    fn axes(&mut self) {
        self.push(&format!(
            "<line x1=\"{MARGIN_LEFT}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\"/>",
            HEIGHT - MARGIN_BOTTOM,
            WIDTH - MARGIN_RIGHT,
            HEIGHT - MARGIN_BOTTOM
        ));
        self.push(&format!(
            "<line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{}\" stroke=\"#333333\"/>",
            HEIGHT - MARGIN_BOTTOM
        ));
    }

    fn finish(mut self) -> String {
        self.0.push_str("</svg>\n");
        self.0
    }
}

fn plot_area() -> (f64, f64) {
    (
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
    )
}

/// Render every column after the first as a polyline against the first
/// column. Blank cells are skipped. A header-only table yields an
/// empty-axes SVG.
pub fn render_lines_svg(table: &CsvTable) -> Result<String> {
    if table.header.is_empty() {
        return Err(Error::parse("lines plot needs at least one column"));
    }
    let mut svg = Svg::new();
    svg.axes();

    let x_values: Vec<f64> = table.rows.iter().filter_map(|r| r[0]).collect();
    let mut y_values = Vec::new();
    for r in &table.rows {
        for v in r.iter().skip(1).flatten() {
            if v.is_finite() {
                y_values.push(*v);
            }
        }
    }
    if !x_values.is_empty() && !y_values.is_empty() {
        let (x_min, x_max) = min_max(&x_values);
        let (y_min, y_max) = min_max(&y_values);
        let (pw, ph) = plot_area();
        let sx = |x: f64| MARGIN_LEFT + (x - x_min) / span(x_min, x_max) * pw;
        let sy = |y: f64| HEIGHT - MARGIN_BOTTOM - (y - y_min) / span(y_min, y_max) * ph;

        for (series, name) in table.header.iter().enumerate().skip(1) {
            let color = PALETTE[(series - 1) % PALETTE.len()];
            let mut points = String::new();
            for row in &table.rows {
                if let (Some(x), Some(y)) = (row[0], row[series]) {
                    if y.is_finite() {
                        points.push_str(&format!("{},{} ", sx(x), sy(y)));
                    }
                }
            }
            svg.push(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                points.trim_end()
            ));
            svg.push(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{name}</text>",
                WIDTH - MARGIN_RIGHT - 120.0,
                MARGIN_TOP + 14.0 * series as f64
            ));
        }
        // extremal tick labels
        svg.push(&format!(
            "<text x=\"{MARGIN_LEFT}\" y=\"{}\" font-size=\"11\" fill=\"#333333\">{x_min}</text>",
            HEIGHT - MARGIN_BOTTOM + 16.0
        ));
        svg.push(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#333333\" text-anchor=\"end\">{x_max}</text>",
            WIDTH - MARGIN_RIGHT,
            HEIGHT - MARGIN_BOTTOM + 16.0
        ));
        svg.push(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#333333\" text-anchor=\"end\">{y_min}</text>",
            MARGIN_LEFT - 4.0,
            HEIGHT - MARGIN_BOTTOM
        ));
        svg.push(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#333333\" text-anchor=\"end\">{y_max}</text>",
            MARGIN_LEFT - 4.0,
            MARGIN_TOP + 10.0
        ));
    }
    Ok(svg.finish())
}

fn span(lo: f64, hi: f64) -> f64 {
    if hi > lo {
        hi - lo
    } else {
        1.0
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Render a sweep heatmap: one rect per `(lr, momentum)` cell, one axis
/// label per distinct value on each axis, linear grayscale between the min
/// and max cell values with lighter shades meaning lower (better) values.
/// Diverged cells (NaN) are drawn in red.
pub fn render_heatmap_svg(table: &CsvTable) -> Result<String> {
    let want = ["lr", "momentum", "mean_final_val"];
    if table.header.len() < 3 || table.header[..3] != want {
        return Err(Error::parse(format!(
            "heatmap needs columns starting {want:?}, got {:?}",
            table.header
        )));
    }
    let mut lr_values: Vec<f64> = Vec::new();
    let mut momentum_values: Vec<f64> = Vec::new();
    let mut cells: Vec<(f64, f64, Option<f64>)> = Vec::new();
    for row in &table.rows {
        let lr = row[0].ok_or_else(|| Error::parse("blank lr cell"))?;
        let m = row[1].ok_or_else(|| Error::parse("blank momentum cell"))?;
        let value = row[2].filter(|v| v.is_finite());
        if !lr_values.contains(&lr) {
            lr_values.push(lr);
        }
        if !momentum_values.contains(&m) {
            momentum_values.push(m);
        }
        cells.push((lr, m, value));
    }

    let mut svg = Svg::new();
    svg.axes();
    if !cells.is_empty() {
        let finite: Vec<f64> = cells.iter().filter_map(|c| c.2).collect();
        let (lo, hi) = if finite.is_empty() {
            (0.0, 1.0)
        } else {
            min_max(&finite)
        };
        let (pw, ph) = plot_area();
        let cw = pw / lr_values.len() as f64;
        let ch = ph / momentum_values.len() as f64;
        for (lr, m, value) in &cells {
            let xi = lr_values.iter().position(|v| v == lr).unwrap();
            let yi = momentum_values.iter().position(|v| v == m).unwrap();
            let x = MARGIN_LEFT + xi as f64 * cw;
            let y = MARGIN_TOP + yi as f64 * ch;
            let fill = match value {
                Some(v) => {
                    let w = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
                    let shade = 240 - (w * 200.0).round() as i64;
                    format!("rgb({shade},{shade},{shade})")
                }
                None => String::from("#b03030"),
            };
            svg.push(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cw}\" height=\"{ch}\" fill=\"{fill}\" stroke=\"#555555\" stroke-width=\"0.5\"/>"
            ));
        }
        for (xi, lr) in lr_values.iter().enumerate() {
            svg.push(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#333333\" text-anchor=\"middle\">{lr}</text>",
                MARGIN_LEFT + (xi as f64 + 0.5) * cw,
                HEIGHT - MARGIN_BOTTOM + 16.0
            ));
        }
        for (yi, m) in momentum_values.iter().enumerate() {
            svg.push(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#333333\" text-anchor=\"end\">{m}</text>",
                MARGIN_LEFT - 4.0,
                MARGIN_TOP + (yi as f64 + 0.5) * ch + 4.0
            ));
        }
    }
    Ok(svg.finish())
}
