//! Minimal SVG line charts.

use std::fmt::Write;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

pub struct Panel<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub series: Vec<Series<'a>>,
}

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 50.0;

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{:.3}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn range(vals: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return None;
    }
    if hi - lo < 1e-12 * hi.abs().max(1.0) {
        let pad = 0.05 * hi.abs().max(1.0);
        return Some((lo - pad, hi + pad));
    }
    let pad = 0.05 * (hi - lo);
    Some((lo - pad, hi + pad))
}

fn panel(svg: &mut String, p: &Panel, x0: f64) {
    let all = || p.series.iter().flat_map(|s| s.points.iter().copied());
    let _ = write!(svg, r#"<g transform="translate({x0},0)">"#);
    let _ = write!(svg, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, p.title);
    let (Some((xa, xb)), Some((ya, yb))) = (range(all().map(|q| q.0)), range(all().map(|q| q.1))) else {
        let _ = write!(svg, r#"<text x="{}" y="{}" text-anchor="middle">no data</text></g>"#, W / 2.0, H / 2.0);
        return;
    };
    let sx = |x: f64| PAD + (x - xa) / (xb - xa) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - ya) / (yb - ya) * (H - 2.0 * PAD);
    let _ = write!(
        svg,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (xa + f * (xb - xa), ya + f * (yb - ya));
        let _ = write!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">{}</text>"#,
            sx(xv),
            H - PAD + 14.0,
            fmt_tick(xv)
        );
        let _ = write!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10">{}</text>"#,
            PAD - 4.0,
            sy(yv) + 3.0,
            fmt_tick(yv)
        );
    }
    let _ = write!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, W / 2.0, H - 10.0, p.x_label);
    for (i, s) in p.series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|q| q.0.is_finite() && q.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash = if s.dashed { r#" stroke-dasharray="5,4""# } else { "" };
        let _ = write!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"{dash}/>"#,
            pts.join(" "),
            s.color
        );
        let ly = PAD + 14.0 + 14.0 * i as f64;
        let _ = write!(
            svg,
            r#"<text x="{:.1}" y="{ly:.1}" font-size="11" fill="{}">{}</text>"#,
            PAD + 6.0,
            s.color,
            s.label
        );
    }
    svg.push_str("</g>");
}

/// Panels side by side.
pub fn render(panels: &[Panel]) -> String {
    let width = W * panels.len() as f64;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{H}" viewBox="0 0 {width} {H}" font-family="sans-serif">"#
    );
    for (i, p) in panels.iter().enumerate() {
        panel(&mut svg, p, W * i as f64);
    }
    svg.push_str("</svg>\n");
    svg
}
