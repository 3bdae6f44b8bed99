//! Minimal standalone SVG charts: a line chart for convergence and a bar
//! chart for metrics. No scripts, no external references.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn header(title: &str, comment: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    // "--" is not allowed inside XML comments
    let _ = writeln!(s, "<!-- {} -->", escape(comment).replace("--", "- -"));
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, y_min: f64, y_max: f64, y_label: &str, x_label: &str) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let v = y_min + (y_max - y_min) * i as f64 / 4.0;
        let y = y0 - (y0 - y1) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#dddddd"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            x0,
            x0 - 6.0,
            y + 4.0,
            format_tick(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn format_tick(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn y_range(values: &[f64], floor_zero: bool) -> (f64, f64) {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let mut lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if finite.is_empty() {
        return (0.0, 1.0);
    }
    if floor_zero {
        lo = lo.min(0.0);
    }
    if hi - lo < 1e-9 {
        hi = lo + 1.0;
    }
    (lo, hi)
}

/// Polyline of `(x, y)` points with markers.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(f64, f64)],
    comment: &str,
) -> String {
    let mut s = header(title, comment);
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (y_min, y_max) = y_range(&ys, false);
    let pad = (y_max - y_min) * 0.05;
    let (y_min, y_max) = (y_min - pad, y_max + pad);
    axes(&mut s, y_min, y_max, y_label, x_label);
    let x_lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let px = |x: f64| LEFT + (WIDTH - LEFT - RIGHT) * (x - x_lo) / x_span;
    let py = |y: f64| HEIGHT - BOTTOM - (HEIGHT - BOTTOM - TOP) * (y - y_min) / (y_max - y_min);
    if !points.is_empty() {
        let path: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
            path.join(" ")
        );
        for &(x, y) in points {
            let _ = writeln!(
                s,
                r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f77b4"><title>{} : {}</title></circle>"##,
                px(x),
                py(y),
                x,
                y
            );
        }
        for x in [x_lo, x_hi] {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
                px(x),
                HEIGHT - BOTTOM + 16.0,
                x
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Vertical bars, one per `(label, value)`, each annotated with its value.
pub fn bar_chart(title: &str, y_label: &str, bars: &[(String, f64)], comment: &str) -> String {
    let mut s = header(title, comment);
    let values: Vec<f64> = bars.iter().map(|b| b.1).collect();
    let (y_min, mut y_max) = y_range(&values, true);
    if y_max <= 1.0 && y_min >= 0.0 {
        y_max = 1.0;
    }
    axes(&mut s, y_min, y_max, y_label, "");
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - BOTTOM - TOP;
    let slot = plot_w / bars.len().max(1) as f64;
    let py = |y: f64| HEIGHT - BOTTOM - plot_h * (y - y_min) / (y_max - y_min);
    for (i, (label, v)) in bars.iter().enumerate() {
        let x = LEFT + slot * i as f64 + slot * 0.15;
        let w = slot * 0.7;
        let v = if v.is_finite() { *v } else { 0.0 };
        let (top, bottom) = (py(v.max(0.0)), py(v.min(0.0)));
        let _ = writeln!(
            s,
            r##"<rect x="{x:.2}" y="{top:.2}" width="{w:.2}" height="{:.2}" fill="#4c72b0"><title>{}: {v}</title></rect>"##,
            (bottom - top).max(0.0),
            escape(label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v:.4}</text>"#,
            x + w / 2.0,
            top - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x + w / 2.0,
            HEIGHT - BOTTOM + 16.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn charts_are_well_formed() {
        let line = line_chart(
            "best <fitness>",
            "iteration",
            "fitness",
            &[(1.0, 2.1), (2.0, 2.5), (3.0, 2.5)],
            "x -- y",
        );
        let doc = roxmltree::Document::parse(&line).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        assert_eq!(
            doc.descendants()
                .filter(|n| n.has_tag_name("circle"))
                .count(),
            3
        );

        let bars = bar_chart(
            "accuracy",
            "rate",
            &[
                ("DoS".into(), 0.9),
                ("U2R & R2L".into(), 0.0),
                ("x".into(), f64::NAN),
            ],
            "meta",
        );
        let doc = roxmltree::Document::parse(&bars).unwrap();
        assert_eq!(
            doc.descendants().filter(|n| n.has_tag_name("rect")).count(),
            4
        );
        assert!(!bars.contains("href"));
    }

    #[test]
    fn empty_and_flat_inputs_still_render() {
        roxmltree::Document::parse(&line_chart("t", "x", "y", &[], "")).unwrap();
        roxmltree::Document::parse(&line_chart("t", "x", "y", &[(1.0, 3.0)], "")).unwrap();
        roxmltree::Document::parse(&bar_chart("t", "y", &[], "")).unwrap();
    }
}
