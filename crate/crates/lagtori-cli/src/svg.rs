//! Minimal standalone SVG emission for polytope diagnostics: outlines,
//! axes, labeled marks, probe segments, and classification arrows.

use lagtori::polytope::{rat_to_float, RationalPolytope};

const VIEW: f64 = 640.0;
const MARGIN: f64 = 0.18;

pub type Segment = ((f64, f64), (f64, f64), &'static str);

#[derive(Debug, Default)]
pub struct Plot {
    pub outline: Vec<(f64, f64)>,
    pub overlay: Vec<(f64, f64)>,
    pub marks: Vec<(f64, f64, String)>,
    pub segments: Vec<Segment>,
    pub arrows: Vec<((f64, f64), (f64, f64))>,
    pub title: String,
}

pub fn polytope_outline(poly: &RationalPolytope) -> Vec<(f64, f64)> {
    poly.vertices()
        .iter()
        .map(|v| (rat_to_float::<f64>(v[0]), rat_to_float::<f64>(v[1])))
        .collect()
}

struct Frame {
    min_x: f64,
    min_y: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for (x, y) in points {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        if !min_x.is_finite() {
            (min_x, max_x, min_y, max_y) = (-1.0, 1.0, -1.0, 1.0);
        }
        let span = (max_x - min_x).max(max_y - min_y).max(1e-6);
        let pad = span * MARGIN;
        Frame {
            min_x: min_x - pad,
            min_y: min_y - pad,
            scale: VIEW / (span + 2.0 * pad),
        }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        // Flip y so the math orientation points up.
        (
            (x - self.min_x) * self.scale,
            VIEW - (y - self.min_y) * self.scale,
        )
    }
}

fn path_of(frame: &Frame, pts: &[(f64, f64)], close: bool) -> String {
    let mut d = String::new();
    for (i, &pt) in pts.iter().enumerate() {
        let (x, y) = frame.map(pt);
        d.push_str(&format!("{}{x:.2} {y:.2} ", if i == 0 { "M" } else { "L" }));
    }
    if close {
        d.push('Z');
    }
    d
}

pub fn render(plot: &Plot) -> String {
    let all_points = plot
        .outline
        .iter()
        .chain(&plot.overlay)
        .copied()
        .chain(plot.marks.iter().map(|m| (m.0, m.1)))
        .chain(plot.segments.iter().flat_map(|s| [s.0, s.1]))
        .chain(plot.arrows.iter().flat_map(|a| [a.0, a.1]));
    let frame = Frame::fit(all_points);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{VIEW}\" height=\"{VIEW}\" viewBox=\"0 0 {VIEW} {VIEW}\">\n"
    ));
    svg.push_str(
        "<defs><marker id=\"tip\" markerWidth=\"10\" markerHeight=\"10\" refX=\"8\" refY=\"3\" \
         orient=\"auto\"><path d=\"M0 0 L8 3 L0 6 Z\" fill=\"#c0392b\"/></marker></defs>\n",
    );
    svg.push_str(&format!(
        "<rect width=\"{VIEW}\" height=\"{VIEW}\" fill=\"#fcfcfc\"/>\n"
    ));

    // Axes through the origin.
    let (x0, y0) = frame.map((0.0, 0.0));
    svg.push_str(&format!(
        "<line x1=\"0\" y1=\"{y0:.2}\" x2=\"{VIEW}\" y2=\"{y0:.2}\" stroke=\"#d0d0d0\" stroke-width=\"1\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0:.2}\" y1=\"0\" x2=\"{x0:.2}\" y2=\"{VIEW}\" stroke=\"#d0d0d0\" stroke-width=\"1\"/>\n"
    ));

    if !plot.overlay.is_empty() {
        svg.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"#7f8c8d\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n",
            path_of(&frame, &plot.overlay, true)
        ));
    }
    if !plot.outline.is_empty() {
        svg.push_str(&format!(
            "<path d=\"{}\" fill=\"#eaf2fb\" fill-opacity=\"0.6\" stroke=\"#2c3e50\" stroke-width=\"2\"/>\n",
            path_of(&frame, &plot.outline, true)
        ));
    }
    for (from, to, color) in &plot.segments {
        let (x1, y1) = frame.map(*from);
        let (x2, y2) = frame.map(*to);
        svg.push_str(&format!(
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{color}\" stroke-width=\"2.5\"/>\n"
        ));
    }
    for (from, to) in &plot.arrows {
        let (x1, y1) = frame.map(*from);
        let (x2, y2) = frame.map(*to);
        svg.push_str(&format!(
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"#c0392b\" \
             stroke-width=\"2\" marker-end=\"url(#tip)\"/>\n"
        ));
    }
    for (x, y, label) in &plot.marks {
        let (cx, cy) = frame.map((*x, *y));
        svg.push_str(&format!(
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"4\" fill=\"#2980b9\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"13\" fill=\"#2c3e50\">{label}</text>\n",
            cx + 7.0,
            cy - 7.0
        ));
    }
    if !plot.title.is_empty() {
        svg.push_str(&format!(
            "<text x=\"12\" y=\"22\" font-family=\"monospace\" font-size=\"16\" fill=\"#2c3e50\">{}</text>\n",
            plot.title
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
