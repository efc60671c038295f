//! Minimal deterministic SVG output: a histogram drawn as a step polyline
//! with axis ticks and optional vertical markers (barrier positions).

use std::fmt::Write;

use crate::histogram::Histogram;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let r = raw / magnitude;
    let nice = if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * magnitude
}

fn label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// Renders `hist` as a count plot. `markers` are drawn as dashed vertical
/// lines when they fall inside the plotted range.
pub fn density_svg(hist: &Histogram, title: &str, markers: &[f64]) -> String {
    let lo = hist.edges[0];
    let hi = *hist.edges.last().expect("at least two edges");
    let peak = hist.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - lo) / (hi - lo) * plot_w;
    let sy = |c: f64| HEIGHT - MARGIN - c / peak * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let mut points = format!("{:.2},{:.2}", sx(lo), sy(0.0));
    for (w, c) in hist.edges.windows(2).zip(&hist.counts) {
        let y = sy(*c as f64);
        let _ = write!(points, " {:.2},{:.2} {:.2},{:.2}", sx(w[0]), y, sx(w[1]), y);
    }
    let _ = write!(points, " {:.2},{:.2}", sx(hi), sy(0.0));
    let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{points}"/>"#);

    for m in markers.iter().filter(|m| **m >= lo && **m <= hi) {
        let x = sx(*m);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="firebrick" stroke-dasharray="4 3"/>"#,
            MARGIN,
            HEIGHT - MARGIN
        );
    }

    let base = HEIGHT - MARGIN;
    let _ = writeln!(
        s,
        r#"<path d="M{MARGIN:.2},{MARGIN:.2} V{base:.2} H{:.2}" fill="none" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    let step = tick_step(hi - lo);
    let mut t = (lo / step).ceil() * step;
    while t <= hi + 1e-9 * step {
        let x = sx(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{base:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, base + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            base + 18.0,
            label(t)
        );
        t += step;
    }
    let cstep = tick_step(peak).max(1.0);
    let mut c = 0.0;
    while c <= peak {
        let y = sy(c);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN:.2}" y2="{y:.2}" stroke="black"/>"#, MARGIN - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            MARGIN - 8.0,
            y + 4.0,
            label(c)
        );
        c += cstep;
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::uniform_edges;

    #[test]
    fn renders_a_closed_document() {
        let h = Histogram::from_values(&[0.1, 0.2, 0.9, -0.5], uniform_edges(-1.0, 1.0, 10).unwrap()).unwrap();
        let svg = density_svg(&h, "a < b", &[0.5, 3.0]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert_eq!(svg, density_svg(&h, "a < b", &[0.5, 3.0]));
    }

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(tick_step(20.0), 5.0);
        assert_eq!(tick_step(1.0), 0.2);
        assert_eq!(tick_step(1000.0), 200.0);
    }
}
