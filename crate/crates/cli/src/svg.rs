//! Minimal SVG line and point plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 70.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;

pub struct Series<'a> {
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    pub color: &'a str,
    /// Points instead of a polyline.
    pub points: bool,
    /// Plot against the right-hand axis.
    pub right_axis: bool,
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub y2_label: Option<&'a str>,
    pub series: Vec<Series<'a>>,
    /// Vertical marker lines with labels.
    pub markers: Vec<(f64, String)>,
}

#[derive(Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of<'a>(values: impl Iterator<Item = &'a f64>) -> Self {
        let (lo, hi) = values
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        if !lo.is_finite() {
            return Self { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-300 {
            return Self { lo: lo - 0.5, hi: hi + 0.5 };
        }
        Self { lo, hi }
    }

    fn include_zero(self) -> Self {
        Self { lo: self.lo.min(0.0), hi: self.hi }
    }

    fn map(&self, v: f64, a: f64, b: f64) -> f64 {
        a + (v - self.lo) / (self.hi - self.lo) * (b - a)
    }
}

impl Plot<'_> {
    pub fn render(&self) -> String {
        let xr = Range::of(self.series.iter().flat_map(|s| s.xs.iter()).chain(self.markers.iter().map(|(x, _)| x)));
        let yr = Range::of(self.series.iter().filter(|s| !s.right_axis).flat_map(|s| s.ys.iter())).include_zero();
        let y2r = Range::of(self.series.iter().filter(|s| s.right_axis).flat_map(|s| s.ys.iter())).include_zero();
        let (x0, x1, y0, y1) = (LEFT, W - RIGHT, H - BOTTOM, TOP);
        let px = |x: f64| xr.map(x, x0, x1);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, esc(self.title));
        let _ = writeln!(
            s,
            r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}{}" fill="none" stroke="black"/>"#,
            if self.y2_label.is_some() { format!(" L{x1},{y1}") } else { String::new() }
        );
        for i in 0..=5 {
            let t = i as f64 / 5.0;
            let xv = xr.lo + t * (xr.hi - xr.lo);
            let yv = yr.lo + t * (yr.hi - yr.lo);
            let (xp, yp) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
            let _ = writeln!(s, r#"<text x="{xp:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, y0 + 16.0, tick(xv));
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, x0 - 6.0, yp + 4.0, tick(yv));
            if self.y2_label.is_some() {
                let v2 = y2r.lo + t * (y2r.hi - y2r.lo);
                let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, x1 + 6.0, yp + 4.0, tick(v2));
            }
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, H - 12.0, esc(self.x_label));
        let _ = writeln!(
            s,
            r#"<text transform="translate(16,{}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (y0 + y1) / 2.0,
            esc(self.y_label)
        );
        if let Some(l) = self.y2_label {
            let _ = writeln!(
                s,
                r#"<text transform="translate({},{}) rotate(90)" text-anchor="middle">{}</text>"#,
                W - 14.0,
                (y0 + y1) / 2.0,
                esc(l)
            );
        }

        for series in &self.series {
            let r = if series.right_axis { y2r } else { yr };
            let pts: Vec<(f64, f64)> = series
                .xs
                .iter()
                .zip(series.ys)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(&x, &y)| (px(x), r.map(y, y0, y1)))
                .collect();
            if series.points {
                for (x, y) in pts {
                    let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{}"/>"#, series.color);
                }
            } else if !pts.is_empty() {
                let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                    d.join(" "),
                    series.color
                );
            }
        }
        for (x, label) in &self.markers {
            let xp = px(*x);
            let _ = writeln!(s, r##"<line x1="{xp:.2}" y1="{y0}" x2="{xp:.2}" y2="{y1}" stroke="#888" stroke-dasharray="4 3"/>"##);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{}">{}</text>"#, xp + 4.0, y1 + 14.0, esc(label));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
