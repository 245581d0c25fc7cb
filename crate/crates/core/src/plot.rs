//! Minimal SVG line charts and gnuplot data files for risk curves.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

/// Renders `(x, y)` points as a single polyline with labelled axes.
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let (x_min, x_max) = bounds(points.iter().map(|p| p.0), 0.0, 1.0);
    let (y_lo, y_hi) = bounds(points.iter().map(|p| p.1), 0.0, 1.0);
    // probability axes snap to tenths and never exceed [0, 1]
    let y_min = ((y_lo * 10.0).floor() / 10.0).max(0.0);
    let y_max = ((y_hi * 10.0).ceil() / 10.0).min(1.0).max(y_min + 0.1);
    let x_min = x_min.min(0.0);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min).max(f64::MIN_POSITIVE) * plot_w;
    let sy = |y: f64| TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // grid and ticks
    for t in ticks(x_min, x_max) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            HEIGHT - BOTTOM
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
            HEIGHT - BOTTOM + 16.0,
            tick_label(t)
        );
    }
    for t in ticks(y_min, y_max) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
            WIDTH - RIGHT
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            tick_label(t)
        );
    }

    // axes
    let _ = writeln!(
        s,
        r#"<polyline points="{LEFT},{TOP} {LEFT},{b} {r},{b}" fill="none" stroke="black"/>"#,
        b = HEIGHT - BOTTOM,
        r = WIDTH - RIGHT
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18,{:.1}) rotate(-90)" text-anchor="middle" font-size="12">{}</text>"#,
        TOP + plot_h / 2.0,
        escape(y_label)
    );

    if !points.is_empty() {
        s.push_str(r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="1.5" points=""##);
        for (i, &(x, y)) in points.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.2},{:.2}", sx(x), sy(y.clamp(y_min, y_max)));
        }
        s.push_str("\"/>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// Two-column whitespace-separated data with a comment header.
pub fn gnuplot_dat(header: &str, points: &[(u64, String)]) -> String {
    let mut s = String::new();
    for line in header.lines() {
        let _ = writeln!(s, "# {line}");
    }
    for (n, v) in points {
        let _ = writeln!(s, "{n} {v}");
    }
    s
}

fn bounds(values: impl Iterator<Item = f64>, lo: f64, hi: f64) -> (f64, f64) {
    let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        a = a.min(v);
        b = b.max(v);
    }
    if a > b {
        (lo, hi)
    } else {
        (a, b)
    }
}

/// Round tick positions (steps of 1, 2 or 5 times a power of ten).
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![lo];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(t: f64) -> String {
    if t.fract().abs() < 1e-9 {
        format!("{}", t.round() as i64)
    } else {
        let s = format!("{t:.3}");
        s.trim_end_matches('0').to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps() {
        assert_eq!(ticks(0.0, 200.0), vec![0.0, 50.0, 100.0, 150.0, 200.0]);
        assert_eq!(ticks(0.0, 3000.0), vec![0.0, 1000.0, 2000.0, 3000.0]);
        let y = ticks(0.5, 1.0);
        assert_eq!(y.len(), 6);
        assert_eq!(tick_label(y[1]), "0.6");
    }

    #[test]
    fn chart_is_deterministic_and_well_formed() {
        let pts: Vec<(f64, f64)> = (1..=50).map(|n| (n as f64, 1.0 - 0.5 / n as f64)).collect();
        let a = line_chart_svg("G <2> & co", "n", "P", &pts);
        assert_eq!(a, line_chart_svg("G <2> & co", "n", "P", &pts));
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert!(a.contains("G &lt;2&gt; &amp; co"));
        assert_eq!(a.matches("<polyline").count(), 2);
    }

    #[test]
    fn empty_chart() {
        let s = line_chart_svg("empty", "n", "P", &[]);
        assert_eq!(s.matches("<polyline").count(), 1);
    }

    #[test]
    fn dat_format() {
        let d = gnuplot_dat("n probability", &[(1, "0.5".into()), (2, "0.75".into())]);
        assert_eq!(d, "# n probability\n1 0.5\n2 0.75\n");
    }
}
