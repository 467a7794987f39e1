//! Minimal SVG writer for the report plots.
//!
//! Hand-rolled so output bytes are fully deterministic: fixed two-decimal
//! coordinates, no timestamps, attribute order hard-coded.

use std::fmt::Write;

pub(crate) const PALETTE: [&str; 10] = [
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c",
    "#ccb974", "#64b5cd",
];

pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

pub(crate) struct SvgDoc {
    width: f64,
    height: f64,
    body: String,
}

impl SvgDoc {
    pub fn new(width: f64, height: f64) -> SvgDoc {
        SvgDoc {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        writeln!(
            self.body,
            r#"  <line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width:.2}"/>"#
        )
        .unwrap();
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: &str) {
        writeln!(
            self.body,
            r#"  <rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}" stroke="{stroke}"/>"#
        )
        .unwrap();
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str, opacity: f64) {
        writeln!(
            self.body,
            r#"  <circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{fill}" fill-opacity="{opacity:.2}"/>"#
        )
        .unwrap();
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64) {
        let mut coords = String::new();
        for (i, (x, y)) in points.iter().enumerate() {
            if i > 0 {
                coords.push(' ');
            }
            write!(coords, "{x:.2},{y:.2}").unwrap();
        }
        writeln!(
            self.body,
            r#"  <polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width:.2}"/>"#
        )
        .unwrap();
    }

    /// `anchor` is an SVG text-anchor value: start, middle, or end.
    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        writeln!(
            self.body,
            r#"  <text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="{size:.2}" text-anchor="{anchor}">{}</text>"#,
            escape(content)
        )
        .unwrap();
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

/// Maps a data interval onto a pixel interval; `flip` for y axes where
/// larger data values sit higher on screen (smaller pixel y).
pub(crate) struct LinearScale {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
    flip: bool,
}

impl LinearScale {
    pub fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64, flip: bool) -> LinearScale {
        let (lo, hi) = if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
        LinearScale {
            lo,
            hi,
            px_lo,
            px_hi,
            flip,
        }
    }

    pub fn map(&self, v: f64) -> f64 {
        let t = (v - self.lo) / (self.hi - self.lo);
        let t = if self.flip { 1.0 - t } else { t };
        self.px_lo + t * (self.px_hi - self.px_lo)
    }

    /// `n` evenly spaced tick values across the data interval, endpoints
    /// included.
    pub fn ticks(&self, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / n as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup_characters() {
        assert_eq!(escape("a<b>&\"c\""), "a&lt;b&gt;&amp;&quot;c&quot;");
    }

    #[test]
    fn documents_are_deterministic() {
        let build = || {
            let mut doc = SvgDoc::new(100.0, 50.0);
            doc.line(0.0, 0.0, 10.0, 10.0, "#000", 1.0);
            doc.text(5.0, 5.0, 10.0, "middle", "hi & bye");
            doc.finish()
        };
        assert_eq!(build(), build());
        assert!(build().starts_with("<svg "));
        assert!(build().ends_with("</svg>\n"));
    }

    #[test]
    fn scale_maps_endpoints_and_flips() {
        let s = LinearScale::new(0.0, 10.0, 100.0, 200.0, false);
        assert_eq!(s.map(0.0), 100.0);
        assert_eq!(s.map(10.0), 200.0);
        let f = LinearScale::new(0.0, 10.0, 100.0, 200.0, true);
        assert_eq!(f.map(0.0), 200.0);
        assert_eq!(f.map(10.0), 100.0);
    }

    #[test]
    fn degenerate_interval_is_widened() {
        let s = LinearScale::new(3.0, 3.0, 0.0, 100.0, false);
        assert_eq!(s.map(3.0), 50.0);
    }
}
