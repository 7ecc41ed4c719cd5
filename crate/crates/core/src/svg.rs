//! Minimal static SVG plots: line charts and heatmaps.

use std::fmt::Write;

const PALETTE: [&str; 6] = ["#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93", "#444444"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// White to dark blue.
fn shade(v: f64) -> String {
    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    let lerp = |a: f64, b: f64| (a + (b - a) * v).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0))
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h, left, right, top, bottom) = (640.0, 400.0, 60.0, 150.0, 40.0, 50.0);
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<path d="M{left},{top} V{} H{}" fill="none" stroke="black"/>"#,
        h - bottom,
        w - right
    );
    for (v, anchor_x) in [(x0, px(x0)), (x1, px(x1))] {
        let _ = writeln!(out, r#"<text x="{anchor_x}" y="{}" text-anchor="middle">{v:.3}</text>"#, h - bottom + 16.0);
    }
    for v in [y0, y1] {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{v:.3}</text>"#, left - 4.0, py(v) + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (left + w - right) / 2.0, h - 12.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text transform="translate(16,{}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (top + h - bottom) / 2.0,
        escape(y_label)
    );
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" "));
        let ly = top + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            w - right + 10.0,
            w - right + 30.0,
            w - right + 35.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Matrix heatmap with values in `[0, 1]`; `side` adds a labelled column
/// of dots (e.g. validities) to the right of each row.
pub fn matrix_heatmap(
    title: &str,
    row_labels: &[String],
    col_labels: &[String],
    values: &[Vec<f64>],
    side: Option<(&str, &[f64])>,
) -> String {
    let cell = 36.0;
    let (left, top) = (120.0, 60.0);
    let w = left + cell * col_labels.len() as f64 + 120.0;
    let h = top + cell * row_labels.len() as f64 + 20.0;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    for (c, label) in col_labels.iter().enumerate() {
        let x = left + cell * (c as f64 + 0.5);
        let _ = writeln!(out, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, top - 6.0, escape(label));
    }
    for (r, label) in row_labels.iter().enumerate() {
        let y = top + cell * r as f64;
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 6.0, y + cell / 2.0 + 4.0, escape(label));
        for (c, v) in values[r].iter().enumerate() {
            let _ = writeln!(
                out,
                r##"<rect x="{}" y="{y}" width="{cell}" height="{cell}" fill="{}" stroke="#ccc"><title>{v:.4}</title></rect>"##,
                left + cell * c as f64,
                shade(*v)
            );
        }
    }
    if let Some((name, col)) = side {
        let x = left + cell * col_labels.len() as f64 + 50.0;
        let _ = writeln!(out, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, top - 6.0, escape(name));
        for (r, v) in col.iter().enumerate() {
            let y = top + cell * (r as f64 + 0.5);
            let _ = writeln!(out, r##"<circle cx="{x}" cy="{y}" r="4" fill="#d1495b"/><text x="{}" y="{}">{v:.3}</text>"##, x + 8.0, y + 4.0);
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Density over a rectangular grid, `values[j][i]` at `(xs[i], ys[j])`,
/// with an optional cross at `marker`.
pub fn density_heatmap(
    title: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[Vec<f64>],
    marker: Option<(f64, f64)>,
) -> String {
    let size = 360.0;
    let (left, top) = (50.0, 40.0);
    let (w, h) = (left + size + 20.0, top + size + 40.0);
    let max = values.iter().flatten().copied().fold(0.0, f64::max);
    let cw = size / xs.len() as f64;
    let ch = size / ys.len() as f64;
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let (y0, y1) = (ys[0], ys[ys.len() - 1]);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    for (j, row) in values.iter().enumerate() {
        // y grows upwards
        let y = top + size - ch * (j as f64 + 1.0);
        for (i, v) in row.iter().enumerate() {
            let norm = if max > 0.0 { v / max } else { 0.0 };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                left + cw * i as f64,
                cw + 0.05,
                ch + 0.05,
                shade(norm)
            );
        }
    }
    if let Some((mx, my)) = marker {
        let px = left + (mx - x0) / (x1 - x0) * (size - cw) + cw / 2.0;
        let py = top + size - ((my - y0) / (y1 - y0) * (size - ch) + ch / 2.0);
        let _ = writeln!(
            out,
            r##"<path d="M{} {py} H{} M{px} {} V{}" stroke="#d1495b" stroke-width="2"/>"##,
            px - 6.0,
            px + 6.0,
            py - 6.0,
            py + 6.0
        );
    }
    let _ = writeln!(out, r#"<rect x="{left}" y="{top}" width="{size}" height="{size}" fill="none" stroke="black"/>"#);
    let _ = writeln!(out, r#"<text x="{left}" y="{}" text-anchor="middle">{x0}</text>"#, top + size + 16.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{x1}</text>"#, left + size, top + size + 16.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{y0}</text>"#, left - 4.0, top + size);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{y1}</text>"#, left - 4.0, top + 10.0);
    out.push_str("</svg>\n");
    out
}
