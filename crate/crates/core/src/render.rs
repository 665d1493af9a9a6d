//! SVG figures: polygons with gradient-colored vertices, optional visible
//! edge overlay, and black/white adjacency matrices.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Polygon};
use crate::visibility::VisGraph;

const FIRST: [u8; 3] = [0x44, 0x01, 0x54];
const LAST: [u8; 3] = [0xfd, 0xe7, 0x25];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    /// Draw visible non-boundary edges in green.
    pub visible_edges: bool,
    /// Append the adjacency matrix to the right of the polygon.
    pub matrix: bool,
    pub vertex_radius: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            width: 400,
            height: 400,
            visible_edges: true,
            matrix: false,
            vertex_radius: 4.0,
        }
    }
}

/// Color of vertex `i` of `n`: deep purple first, yellow last.
pub fn vertex_color(i: usize, n: usize) -> String {
    let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
    let c: Vec<u8> = (0..3)
        .map(|k| (FIRST[k] as f64 + (LAST[k] as f64 - FIRST[k] as f64) * t).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn polygon_body(poly: &Polygon, graph: Option<&VisGraph>, spec: &RenderSpec, out: &mut String) {
    let (lo, hi) = poly.bounding_box();
    let pad = 2.0 * spec.vertex_radius + 4.0;
    let (w, h) = (spec.width as f64 - 2.0 * pad, spec.height as f64 - 2.0 * pad);
    let s = (w / (hi.x - lo.x).max(1e-12)).min(h / (hi.y - lo.y).max(1e-12));
    let ox = pad + 0.5 * (w - s * (hi.x - lo.x));
    let oy = pad + 0.5 * (h - s * (hi.y - lo.y));
    let map = |p: Point| (ox + s * (p.x - lo.x), spec.height as f64 - (oy + s * (p.y - lo.y)));

    let pts: Vec<String> = poly
        .vertices()
        .iter()
        .map(|&p| {
            let (x, y) = map(p);
            format!("{},{}", fmt(x), fmt(y))
        })
        .collect();
    let _ = writeln!(
        out,
        r##"<polygon points="{}" fill="#f2f2f2" stroke="#000000" stroke-width="1.5"/>"##,
        pts.join(" ")
    );
    if let (Some(g), true) = (graph, spec.visible_edges) {
        for (i, j) in g.edges() {
            if poly.are_adjacent(i, j) {
                continue;
            }
            let ((x1, y1), (x2, y2)) = (map(poly.vertex(i)), map(poly.vertex(j)));
            let _ = writeln!(
                out,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#2ca02c" stroke-width="0.8"/>"##,
                fmt(x1),
                fmt(y1),
                fmt(x2),
                fmt(y2)
            );
        }
    }
    for (i, &p) in poly.vertices().iter().enumerate() {
        let (x, y) = map(p);
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{}"/>"#,
            fmt(x),
            fmt(y),
            fmt(spec.vertex_radius),
            vertex_color(i, poly.len())
        );
    }
}

fn matrix_body(g: &VisGraph, x0: f64, size: f64, out: &mut String) {
    let n = g.n().max(1);
    let cell = size / n as f64;
    let _ = writeln!(
        out,
        r##"<rect x="{}" y="0" width="{}" height="{}" fill="#000000"/>"##,
        fmt(x0),
        fmt(size),
        fmt(size)
    );
    for i in 0..g.n() {
        for j in 0..g.n() {
            if g.has_edge(i, j) {
                let _ = writeln!(
                    out,
                    r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#ffffff"/>"##,
                    fmt(x0 + j as f64 * cell),
                    fmt(i as f64 * cell),
                    fmt(cell),
                    fmt(cell)
                );
            }
        }
    }
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n{body}</svg>\n",
        w = fmt(width),
        h = fmt(height)
    )
}

/// Polygon figure, with the graph overlay and matrix when requested.
pub fn render_svg(poly: &Polygon, graph: Option<&VisGraph>, spec: &RenderSpec) -> String {
    let mut body = String::new();
    polygon_body(poly, graph, spec, &mut body);
    let mut width = spec.width as f64;
    if let (Some(g), true) = (graph, spec.matrix) {
        matrix_body(g, width, spec.height as f64, &mut body);
        width += spec.height as f64;
    }
    document(width, spec.height as f64, &body)
}

/// Adjacency matrix alone: white = edge, black = no edge, row i at top.
pub fn render_matrix_svg(g: &VisGraph, size: u32) -> String {
    let mut body = String::new();
    matrix_body(g, 0.0, size as f64, &mut body);
    document(size as f64, size as f64, &body)
}
