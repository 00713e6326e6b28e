//! Minimal hand-written SVG plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 50.0;

/// A single panel with linear axes.
pub struct Plot {
    x: (f64, f64),
    y: (f64, f64),
    body: String,
    legend: Vec<(String, String)>,
    title: String,
    x_label: String,
    y_label: String,
}

impl Plot {
    pub fn new(title: &str, x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        Self {
            x: pad(x),
            y: pad(y),
            body: String::new(),
            legend: Vec::new(),
            title: escape(title),
            x_label: String::new(),
            y_label: String::new(),
        }
    }

    pub fn labels(mut self, x: &str, y: &str) -> Self {
        self.x_label = escape(x);
        self.y_label = escape(y);
        self
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    /// Non-finite points split the line.
    pub fn line(&mut self, points: &[(f64, f64)], color: &str, label: Option<&str>) {
        let mut path = String::new();
        let mut pen_up = true;
        for &(x, y) in points {
            if !(x.is_finite() && y.is_finite()) {
                pen_up = true;
                continue;
            }
            let _ = write!(path, "{}{:.2},{:.2} ", if pen_up { "M" } else { "L" }, self.px(x), self.py(y));
            pen_up = false;
        }
        let _ = writeln!(self.body, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.trim_end());
        if let Some(l) = label {
            self.legend.push((escape(l), color.to_string()));
        }
    }

    pub fn dots(&mut self, points: &[(f64, f64)], color: &str, radius: f64, label: Option<&str>) {
        for &(x, y) in points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            let _ = writeln!(self.body, r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{color}"/>"#, self.px(x), self.py(y));
        }
        if let Some(l) = label {
            self.legend.push((escape(l), color.to_string()));
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, self.title);
        let (x0, x1, y0, y1) = (self.px(self.x.0), self.px(self.x.1), self.py(self.y.0), self.py(self.y.1));
        let _ = writeln!(s, r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
        for t in ticks(self.x.0, self.x.1) {
            let x = self.px(t);
            let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
            let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 18.0, tick_label(t));
        }
        for t in ticks(self.y.0, self.y.1) {
            let y = self.py(t);
            let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, y + 4.0, tick_label(t));
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0, self.x_label);
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            self.y_label
        );
        let _ = writeln!(
            s,
            r#"<clipPath id="panel"><rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
            x1 - x0,
            y0 - y1
        );
        s.push_str("<g clip-path=\"url(#panel)\">\n");
        s.push_str(&self.body);
        s.push_str("</g>\n");
        for (i, (label, color)) in self.legend.iter().enumerate() {
            let y = y1 + 16.0 + 16.0 * i as f64;
            let _ = writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="12" height="4" fill="{color}"/>"#, x1 - 170.0, y - 6.0);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{y:.2}">{label}</text>"#, x1 - 152.0);
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Round steps of 1, 2 or 5 times a power of ten, about five per axis.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(t: f64) -> String {
    let s = format!("{:.4}", t);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Bounds of the finite values, widened by five percent.
pub fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = 0.05 * (hi - lo).max(1e-12);
    (lo - pad, hi + pad)
}
