//! A minimal static SVG plot emitter.

use std::fmt::Write;

/// A plot area mapping data coordinates to an SVG canvas.
pub struct Figure {
    width: f64,
    height: f64,
    margin: f64,
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

impl Figure {
    pub fn new(x: (f64, f64), y: (f64, f64), width: f64, height: f64) -> Self {
        Figure { width, height, margin: 48.0, x, y, body: String::new() }
    }

    /// Square canvas for a region of the complex plane.
    pub fn plane(re: (f64, f64), im: (f64, f64), size: f64) -> Self {
        let aspect = (im.1 - im.0) / (re.1 - re.0);
        Figure::new(re, im, size, size * aspect)
    }

    fn map(&self, (px, py): (f64, f64)) -> (f64, f64) {
        let w = self.width - 2.0 * self.margin;
        let h = self.height - 2.0 * self.margin;
        let sx = self.margin + (px - self.x.0) / (self.x.1 - self.x.0) * w;
        let sy = self.margin + (self.y.1 - py) / (self.y.1 - self.y.0) * h;
        (sx, sy)
    }

    pub fn title(&mut self, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text class="title" x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
            self.width / 2.0,
            self.margin / 2.0,
            escape(text)
        );
    }

    /// Frame, ticks and axis labels.
    pub fn axes(&mut self, xlabel: &str, ylabel: &str) {
        let (x0, y0) = self.map((self.x.0, self.y.0));
        let (x1, y1) = self.map((self.x.1, self.y.1));
        let _ = writeln!(
            self.body,
            r#"<rect class="frame" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            x0,
            y1,
            x1 - x0,
            y0 - y1
        );
        for t in ticks(self.x.0, self.x.1) {
            let (sx, _) = self.map((t, self.y.0));
            let _ = writeln!(
                self.body,
                r#"<line class="tick" x1="{sx:.2}" y1="{y0:.2}" x2="{sx:.2}" y2="{:.2}" stroke="black"/><text x="{sx:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"#,
                y0 + 4.0,
                y0 + 16.0,
                label(t)
            );
        }
        for t in ticks(self.y.0, self.y.1) {
            let (_, sy) = self.map((self.x.0, t));
            let _ = writeln!(
                self.body,
                r#"<line class="tick" x1="{:.2}" y1="{sy:.2}" x2="{x0:.2}" y2="{sy:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"#,
                x0 - 4.0,
                x0 - 6.0,
                sy + 3.0,
                label(t)
            );
        }
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
            (x0 + x1) / 2.0,
            self.height - 8.0,
            escape(xlabel)
        );
        let _ = writeln!(
            self.body,
            r#"<text x="12" y="{:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 12 {:.2})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(ylabel)
        );
    }

    pub fn path(&mut self, pts: &[(f64, f64)], class: &str, stroke: &str) {
        let mut d = String::new();
        for (i, &p) in pts.iter().enumerate() {
            let (sx, sy) = self.map(p);
            let _ = write!(d, "{}{sx:.2},{sy:.2}", if i == 0 { "M" } else { " L" });
        }
        let _ = writeln!(self.body, r#"<path class="{class}" d="{d}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#);
    }

    pub fn circle(&mut self, radius: f64, class: &str, dashed: bool) {
        let (cx, cy) = self.map((0.0, 0.0));
        let (ex, _) = self.map((radius, 0.0));
        let dash = if dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<circle class="{class}" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="gray"{dash}/>"#,
            ex - cx
        );
    }

    pub fn markers(&mut self, pts: &[(f64, f64)], class: &str, fill: &str, radius: f64) {
        let _ = writeln!(self.body, r#"<g class="{class}" fill="{fill}">"#);
        for &p in pts {
            let (sx, sy) = self.map(p);
            let _ = writeln!(self.body, r#"<circle cx="{sx:.2}" cy="{sy:.2}" r="{radius}"/>"#);
        }
        self.body.push_str("</g>\n");
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return Vec::new();
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(t: f64) -> String {
    let s = format!("{t:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round_and_inside() {
        let t = ticks(-1.05, 1.05);
        assert_eq!(t, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(ticks(1.0, 1.0).is_empty());
    }

    #[test]
    fn labels_drop_trailing_zeros() {
        assert_eq!(label(0.5), "0.5");
        assert_eq!(label(-0.0), "0");
        assert_eq!(label(200.0), "200");
    }

    #[test]
    fn figure_is_well_formed() {
        let mut f = Figure::plane((-1.1, 1.1), (-1.1, 1.1), 400.0);
        f.axes("Re", "Im");
        f.circle(1.0, "unit-circle", false);
        f.path(&[(0.0, 0.0), (0.5, 0.5)], "curve", "red");
        let s = f.finish();
        assert!(s.starts_with("<svg"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<path").count(), 1);
        assert!(s.contains("M200.00,200.00 L"));
    }
}
