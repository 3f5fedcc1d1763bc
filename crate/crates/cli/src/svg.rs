//! Self-contained SVG figures. Every drawn value is also written verbatim in
//! a `data-value` attribute so figures can be checked against reports.

use std::fmt::Write as _;

use fnfpad::imgcore::BlockGrid;

use crate::table::format_number;

const CELL: usize = 24;
const PLOT_W: f64 = 480.0;
const PLOT_H: f64 = 240.0;
const MARGIN: f64 = 32.0;

fn gray(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn open(out: &mut String, w: f64, h: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, "<title>{title}</title>");
}

/// Blockwise map: one square per block, gray level = value, invalid blocks
/// drawn with a red outline.
pub fn block_map(grid: &BlockGrid, title: &str) -> String {
    let l = grid.layout;
    let mut out = String::new();
    open(&mut out, (l.cols * CELL) as f64, (l.rows * CELL) as f64, title);
    for i in 0..l.len() {
        let (c, r) = (i % l.cols, i / l.cols);
        let v = grid.values[i];
        let g = gray(v);
        let stroke = if grid.valid[i] { "none" } else { "#d00000" };
        let _ = writeln!(
            out,
            r#"<rect class="cell" x="{}" y="{}" width="{CELL}" height="{CELL}" fill="rgb({g},{g},{g})" stroke="{stroke}" data-valid="{}" data-value="{}"/>"#,
            c * CELL,
            r * CELL,
            grid.valid[i],
            format_number(v)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// 3x3 channel matrix. Cell colour runs from white (0) to dark blue (|v| = 1);
/// diagonal cells carry a heavier outline. Undefined entries are hatched gray.
pub fn heatmap(matrix: &[[Option<f64>; 3]; 3], title: &str) -> String {
    let labels = ["R", "G", "B"];
    let size = CELL * 2;
    let mut out = String::new();
    let side = (size * 4) as f64;
    open(&mut out, side, side, title);
    for (i, l) in labels.iter().enumerate() {
        let pos = size * (i + 1) + size / 2;
        let _ = writeln!(
            out,
            r#"<text x="{pos}" y="{}" text-anchor="middle">{l}</text>"#,
            size / 2
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{pos}" text-anchor="middle">{l}</text>"#,
            size / 2
        );
    }
    for (i, row) in matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let (x, y) = (size * (j + 1), size * (i + 1));
            let stroke_w = if i == j { 3 } else { 1 };
            let (fill, value) = match v {
                Some(v) => {
                    let t = v.abs().min(1.0);
                    let r = (255.0 * (1.0 - t)).round() as u8;
                    let b = (255.0 - 100.0 * t).round() as u8;
                    (format!("rgb({r},{r},{b})"), format_number(*v))
                }
                None => ("#bbbbbb".to_string(), "undefined".to_string()),
            };
            let _ = writeln!(
                out,
                r#"<rect class="cell" x="{x}" y="{y}" width="{size}" height="{size}" fill="{fill}" stroke="black" stroke-width="{stroke_w}" data-row="{i}" data-col="{j}" data-value="{value}"/>"#
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Line plot of a profile. A constant profile is drawn as a flat baseline.
pub fn profile(values: &[f64], title: &str, x_label: &str) -> String {
    let mut out = String::new();
    let (w, h) = (PLOT_W + 2.0 * MARGIN, PLOT_H + 2.0 * MARGIN);
    open(&mut out, w, h, title);
    let baseline = MARGIN + PLOT_H;
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{MARGIN}" y1="{baseline}" x2="{}" y2="{baseline}" stroke="black"/>"#,
        MARGIN + PLOT_W
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        MARGIN + PLOT_W / 2.0,
        h - 8.0
    );
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let n = values.len();
    let points: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let x = if n > 1 {
                MARGIN + PLOT_W * i as f64 / (n - 1) as f64
            } else {
                MARGIN
            };
            let y = if span > 0.0 {
                baseline - PLOT_H * (v - lo) / span
            } else {
                baseline
            };
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let data: Vec<String> = values.iter().map(|&v| format_number(v)).collect();
    let _ = writeln!(
        out,
        r#"<polyline class="profile" fill="none" stroke="steelblue" stroke-width="2" points="{}" data-values="{}"/>"#,
        points.join(" "),
        data.join(" ")
    );
    out.push_str("</svg>\n");
    out
}
