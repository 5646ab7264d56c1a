//! Static SVG plots: the variance curve, the image of the eliminated
//! eigenvector map, and the clustered point cloud.
//!
//! Output is plain SVG text with fixed numeric formatting so identical input
//! gives identical bytes.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// Red, green and blue first, then further distinct hues.
const PALETTE: [&str; 10] = [
    "#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Fill color for 0-based class `label`.
pub fn class_color(label: usize) -> String {
    match PALETTE.get(label) {
        Some(c) => (*c).to_string(),
        None => {
            // golden-angle hues beyond the fixed palette
            let hue = (label as f64 * 137.507_764) % 360.0;
            format!("hsl({hue:.1},65%,45%)")
        }
    }
}

/// Orthographic view direction in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct View {
    pub azimuth: f64,
    pub elevation: f64,
}

impl Default for View {
    fn default() -> Self {
        Self {
            azimuth: 30.0,
            elevation: 25.0,
        }
    }
}

impl View {
    /// Projects up to three coordinates onto the screen plane. One- and
    /// two-dimensional points are drawn as they are.
    pub fn project(&self, p: &[f64]) -> (f64, f64) {
        match p.len() {
            0 => (0.0, 0.0),
            1 => (p[0], 0.0),
            2 => (p[0], p[1]),
            _ => {
                let (a, e) = (self.azimuth.to_radians(), self.elevation.to_radians());
                let (x, y, z) = (p[0], p[1], p[2]);
                let u = -a.sin() * x + a.cos() * y;
                let v = -e.sin() * a.cos() * x - e.sin() * a.sin() * y + e.cos() * z;
                (u, v)
            }
        }
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for (x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| {
            let span = hi - lo;
            if span > 0.0 {
                (lo - 0.05 * span, hi + 0.05 * span)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="28" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (left, right) = (MARGIN, WIDTH - MARGIN);
    let (top, bottom) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    let ticks = [
        (left, bottom + 16.0, "middle", frame.x0),
        (right, bottom + 16.0, "middle", frame.x1),
        (left - 6.0, bottom, "end", frame.y0),
        (left - 6.0, top + 4.0, "end", frame.y1),
    ];
    for (x, y, anchor, value) in ticks {
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{value:.3}</text>"#
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Variance curve as a polyline with one vertex per grid point, plus a marker
/// at the selected radius when given.
pub fn curve_svg(radii: &[f64], values: &[f64], r_hat: Option<f64>) -> String {
    let frame = Frame::fit(radii.iter().copied().zip(values.iter().copied()));
    let mut out = String::new();
    header(&mut out, "Cross-validated variance estimate");
    axes(&mut out, &frame, "bandwidth r", "V̂(r)");
    let vertices: Vec<String> = radii
        .iter()
        .zip(values)
        .map(|(&r, &v)| format!("{:.2},{:.2}", frame.sx(r), frame.sy(v)))
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline class="curve" fill="none" stroke="#1f77b4" stroke-width="2" points="{}"/>"##,
        vertices.join(" ")
    );
    if let Some(r) = r_hat {
        // marker sits on the curve when r_hat is a grid point, else on the axis
        let v = radii
            .iter()
            .position(|&x| x == r)
            .map_or(frame.y0, |i| values[i]);
        let (x, y) = (frame.sx(r), frame.sy(v));
        let _ = writeln!(
            out,
            r##"<line class="r-hat-line" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#d62728" stroke-dasharray="4 3"/>"##,
            MARGIN,
            HEIGHT - MARGIN
        );
        let _ = writeln!(
            out,
            r##"<circle class="r-hat" cx="{x:.2}" cy="{y:.2}" r="5" fill="#d62728"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">r̂ = {r}</text>"#,
            x + 8.0,
            y - 8.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Scatter plot of `points` (each 1 to 3 coordinates used) colored by label.
pub fn scatter_svg(title: &str, points: &[Vec<f64>], labels: &[usize], view: View) -> String {
    let projected: Vec<(f64, f64)> = points
        .iter()
        .map(|p| view.project(&p[..p.len().min(3)]))
        .collect();
    let frame = Frame::fit(projected.iter().copied());
    let mut out = String::new();
    header(&mut out, title);
    let (xl, yl) = match points.first().map_or(0, Vec::len) {
        0 | 1 => ("x", ""),
        2 => ("x", "y"),
        _ => ("projected u", "projected v"),
    };
    axes(&mut out, &frame, xl, yl);
    for (&(x, y), &label) in projected.iter().zip(labels) {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
            frame.sx(x),
            frame.sy(y),
            class_color(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn polyline_vertices(svg: &str) -> usize {
        let start = svg.find("points=\"").unwrap() + 8;
        let end = start + svg[start..].find('"').unwrap();
        svg[start..end].split_whitespace().count()
    }

    fn fills(svg: &str) -> BTreeSet<String> {
        svg.lines()
            .filter(|l| l.starts_with("<circle cx"))
            .map(|l| {
                let s = l.find("fill=\"").unwrap() + 6;
                l[s..s + l[s..].find('"').unwrap()].to_string()
            })
            .collect()
    }

    #[test]
    fn curve_has_one_vertex_per_row_and_a_marker() {
        let radii: Vec<f64> = (1..=30).map(|k| k as f64 * 0.1).collect();
        let values: Vec<f64> = radii.iter().map(|r| 1.0 / r).collect();
        let svg = curve_svg(&radii, &values, Some(radii[4]));
        assert_eq!(polyline_vertices(&svg), 30);
        assert_eq!(svg.matches("class=\"r-hat\"").count(), 1);
        assert!(!curve_svg(&radii, &values, None).contains("r-hat"));
    }

    #[test]
    fn three_classes_three_colors() {
        let points: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![i as f64, (i * i) as f64, 0.5])
            .collect();
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let svg = scatter_svg("Clusters", &points, &labels, View::default());
        assert_eq!(fills(&svg).len(), 3);
        assert_eq!(svg.matches("<circle cx").count(), 30);
    }

    #[test]
    fn colors_are_distinct_beyond_palette() {
        let colors: BTreeSet<String> = (0..40).map(class_color).collect();
        assert_eq!(colors.len(), 40);
    }

    #[test]
    fn projection_of_axes() {
        let top = View {
            azimuth: 0.0,
            elevation: 90.0,
        };
        let (u, v) = top.project(&[0.0, 1.0, 0.0]);
        assert!((u - 1.0).abs() < 1e-12 && v.abs() < 1e-12);
        let side = View {
            azimuth: 0.0,
            elevation: 0.0,
        };
        let (u, v) = side.project(&[0.0, 0.0, 2.0]);
        assert!(u.abs() < 1e-12 && (v - 2.0).abs() < 1e-12);
        assert_eq!(side.project(&[3.0, 4.0]), (3.0, 4.0));
    }

    #[test]
    fn output_is_deterministic() {
        let points = vec![vec![0.1, 0.2], vec![0.3, 0.9]];
        let a = scatter_svg("t", &points, &[0, 1], View::default());
        let b = scatter_svg("t", &points, &[0, 1], View::default());
        assert_eq!(a, b);
    }
}
