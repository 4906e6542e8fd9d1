//! Complex-plane scatter plots with rays, written as plain SVG.

use std::fmt::Write as _;

use cornerscale_core::scaling::RaySet;
use cornerscale_core::Complex64;

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 48.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<Complex64>,
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub series: Vec<Series>,
    pub rays: Vec<(Complex64, Complex64)>,
}

impl Plot {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn points(mut self, label: &str, color: &'static str, points: Vec<Complex64>) -> Self {
        self.series.push(Series {
            label: label.into(),
            color,
            points,
        });
        self
    }

    pub fn rays(mut self, rays: &RaySet) -> Self {
        self.rays
            .extend(rays.rays.iter().map(|r| (r.origin, r.direction)));
        self
    }

    /// Data window: every point and ray origin, padded, with room below the
    /// axis for the rays.
    fn window(&self) -> (f64, f64, f64, f64) {
        let all: Vec<Complex64> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .chain(self.rays.iter().map(|r| r.0))
            .filter(|z| z.re.is_finite() && z.im.is_finite())
            .collect();
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 1.0f64, -0.5f64, 0.1f64);
        for z in &all {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        let dx = 0.05 * (x1 - x0);
        let dy = 0.05 * (y1 - y0);
        (x0 - dx, x1 + dx, y0 - dy, y1 + dy)
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.window();
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<clipPath id="frame"><rect x="{PAD}" y="{PAD}" width="{}" height="{}"/></clipPath>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(
            s,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(
            s,
            r#"<text x="{PAD}" y="{}">{}</text>"#,
            PAD - 12.0,
            escape(&self.title)
        );
        if y0 < 0.0 && y1 > 0.0 {
            let _ = writeln!(
                s,
                r##"<line x1="{PAD}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
                W - PAD,
                y = sy(0.0)
            );
        }
        // Tick labels at the corners of the window.
        let _ = writeln!(
            s,
            r#"<text x="{PAD}" y="{}">{}</text>"#,
            H - PAD + 16.0,
            tick(x0)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            W - PAD,
            H - PAD + 16.0,
            tick(x1)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            PAD - 4.0,
            H - PAD,
            tick(y0)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            PAD - 4.0,
            PAD + 8.0,
            tick(y1)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">Re</text>"#,
            W / 2.0,
            H - 12.0
        );
        let _ = writeln!(s, r#"<g clip-path="url(#frame)">"#);
        let reach = 2.0 * ((x1 - x0).hypot(y1 - y0));
        for &(o, d) in &self.rays {
            let e = o + d * (reach / d.norm().max(f64::MIN_POSITIVE));
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#4a7" stroke-width="1"/>"##,
                sx(o.re),
                sy(o.im),
                sx(e.re),
                sy(e.im)
            );
        }
        for series in &self.series {
            for z in series
                .points
                .iter()
                .filter(|z| z.re.is_finite() && z.im.is_finite())
            {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
                    sx(z.re),
                    sy(z.im),
                    series.color
                );
            }
        }
        let _ = writeln!(s, "</g>");
        for (k, series) in self.series.iter().enumerate() {
            let y = PAD + 14.0 + 14.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="3" fill="{}"/><text x="{}" y="{}">{}</text>"#,
                W - PAD - 120.0,
                y - 4.0,
                series.color,
                W - PAD - 112.0,
                y,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(x: f64) -> String {
    format!("{x:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_points_inside_the_frame() {
        let p = Plot::new("a < b").points(
            "z",
            "red",
            vec![Complex64::new(1.0, -0.2), Complex64::new(2.0, 0.0)],
        );
        let s = p.render();
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<circle").count(), 3);
        assert!(s.contains("a &lt; b"));
    }
}
