//! Vertex visibility graphs, including the polygon-with-hole variant used to
//! produce graphs that no simple polygon realizes.

use std::collections::VecDeque;
use std::fmt;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom::{
    ensure_ccw, is_simple, point_in_polygon, segment_enters_interior, segment_visible,
    segments_intersect, signed_area, Polygon, PointLocation,
};

/// Symmetric adjacency matrix over `n` vertices, packed row-major into a
/// bitset. The diagonal is always clear.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VisGraph {
    n: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for VisGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VisGraph")
            .field("n", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl VisGraph {
    pub fn empty(n: usize) -> Self {
        VisGraph {
            n,
            bits: vec![0; (n * n).div_ceil(64)],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = VisGraph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.set(i, j, true);
            }
        }
        g
    }

    /// Only the boundary edges `(i, i+1 mod n)`.
    pub fn cycle(n: usize) -> Self {
        let mut g = VisGraph::empty(n);
        for i in 0..n {
            g.set(i, (i + 1) % n, true);
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = VisGraph::empty(n);
        for (i, j) in edges {
            g.set(i, j, true);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn bit(&self, i: usize, j: usize) -> (usize, u64) {
        let k = i * self.n + j;
        (k / 64, 1u64 << (k % 64))
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (w, m) = self.bit(i, j);
        self.bits[w] & m != 0
    }

    /// Sets both `(i, j)` and `(j, i)`; self-loops are ignored.
    pub fn set(&mut self, i: usize, j: usize, on: bool) {
        assert!(i < self.n && j < self.n, "vertex index out of range");
        if i == j {
            return;
        }
        for (a, b) in [(i, j), (j, i)] {
            let (w, m) = self.bit(a, b);
            if on {
                self.bits[w] |= m;
            } else {
                self.bits[w] &= !m;
            }
        }
    }

    pub fn edge_count(&self) -> usize {
        let ones: u32 = self.bits.iter().map(|w| w.count_ones()).sum();
        ones as usize / 2
    }

    /// Unordered edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).filter_map(move |j| self.has_edge(i, j).then_some((i, j))))
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).count()
    }

    pub fn has_boundary_cycle(&self) -> bool {
        self.n >= 3 && (0..self.n).all(|i| self.has_edge(i, (i + 1) % self.n))
    }

    /// Every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &VisGraph) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Lower-triangular part, row-major: `(1,0), (2,0), (2,1), (3,0), ...`.
    pub fn lower_triangular_bits(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.n * (self.n.saturating_sub(1)) / 2);
        for i in 1..self.n {
            for j in 0..i {
                out.push(self.has_edge(i, j));
            }
        }
        out
    }

    pub fn from_lower_triangular_bits(n: usize, bits: &[bool]) -> Result<Self> {
        let want = n * n.saturating_sub(1) / 2;
        if bits.len() != want {
            return Err(Error::Format(format!(
                "expected {want} lower-triangular bits for n = {n}, got {}",
                bits.len()
            )));
        }
        let mut g = VisGraph::empty(n);
        let mut k = 0;
        for i in 1..n {
            for j in 0..i {
                if bits[k] {
                    g.set(i, j, true);
                }
                k += 1;
            }
        }
        Ok(g)
    }

    /// Lower-triangular bits packed MSB-first into bytes, base64 (standard
    /// alphabet, padded).
    pub fn to_base64(&self) -> String {
        let bits = self.lower_triangular_bits();
        let mut bytes = vec![0u8; bits.len().div_ceil(8)];
        for (k, &b) in bits.iter().enumerate() {
            if b {
                bytes[k / 8] |= 0x80 >> (k % 8);
            }
        }
        BASE64.encode(bytes)
    }

    pub fn from_base64(n: usize, s: &str) -> Result<Self> {
        let bytes = BASE64
            .decode(s)
            .map_err(|e| Error::Format(format!("bad base64 adjacency: {e}")))?;
        let want = n * n.saturating_sub(1) / 2;
        if bytes.len() != want.div_ceil(8) {
            return Err(Error::Format(format!(
                "adjacency for n = {n} needs {} bytes, got {}",
                want.div_ceil(8),
                bytes.len()
            )));
        }
        let bits: Vec<bool> = (0..want)
            .map(|k| bytes[k / 8] & (0x80 >> (k % 8)) != 0)
            .collect();
        VisGraph::from_lower_triangular_bits(n, &bits)
    }

    pub fn to_encoded(&self) -> EncodedGraph {
        EncodedGraph {
            n: self.n,
            lower_tri: self.to_base64(),
        }
    }

    /// Rows of `0`/`1` characters, for debugging and the CLI.
    pub fn to_matrix_string(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.n + 1));
        for i in 0..self.n {
            for j in 0..self.n {
                s.push(if self.has_edge(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }
}

/// On-disk form of a [`VisGraph`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedGraph {
    pub n: usize,
    pub lower_tri: String,
}

impl TryFrom<EncodedGraph> for VisGraph {
    type Error = Error;
    fn try_from(e: EncodedGraph) -> Result<Self> {
        VisGraph::from_base64(e.n, &e.lower_tri)
    }
}

impl Serialize for VisGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_encoded().serialize(s)
    }
}

impl<'de> Deserialize<'de> for VisGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let e = EncodedGraph::deserialize(d)?;
        VisGraph::try_from(e).map_err(serde::de::Error::custom)
    }
}

pub fn visibility_graph(poly: &Polygon) -> Result<VisGraph> {
    if !is_simple(poly) {
        return Err(Error::NonSimpleInput);
    }
    let n = poly.len();
    let mut g = VisGraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if segment_visible(i, j, poly) {
                g.set(i, j, true);
            }
        }
    }
    Ok(g)
}

/// Simple outer ring with one simple hole strictly inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolePolygon {
    outer: Polygon,
    hole: Polygon,
}

impl HolePolygon {
    /// Normalizes the outer ring to CCW and the hole to CW.
    pub fn new(outer: Polygon, hole: Polygon) -> Result<Self> {
        if !is_simple(&outer) || !is_simple(&hole) {
            return Err(Error::NonSimpleInput);
        }
        let outer = ensure_ccw(&outer);
        let mut hole = ensure_ccw(&hole);
        if hole
            .vertices()
            .iter()
            .any(|&p| point_in_polygon(p, &outer) != PointLocation::Inside)
        {
            return Err(Error::HoleNotInside);
        }
        for (a, b) in outer.edges() {
            for (c, d) in hole.edges() {
                if segments_intersect(a, b, c, d) {
                    return Err(Error::HoleNotInside);
                }
            }
        }
        if outer
            .vertices()
            .iter()
            .any(|&p| point_in_polygon(p, &hole) != PointLocation::Outside)
        {
            return Err(Error::HoleNotInside);
        }
        hole = reverse_keep_first(&hole);
        debug_assert!(signed_area(&hole) < 0.0);
        Ok(HolePolygon { outer, hole })
    }

    pub fn outer(&self) -> &Polygon {
        &self.outer
    }

    /// Clockwise.
    pub fn hole(&self) -> &Polygon {
        &self.hole
    }
}

fn reverse_keep_first(p: &Polygon) -> Polygon {
    let v = p.vertices();
    let mut out = vec![v[0]];
    out.extend(v[1..].iter().rev().copied());
    Polygon::new(out).expect("reordering keeps vertices valid")
}

/// Visibility among outer vertices where the hole counts as exterior.
/// Sightlines that only graze the hole boundary stay visible.
pub fn visibility_graph_with_hole(hp: &HolePolygon) -> Result<VisGraph> {
    let outer = hp.outer();
    let mut g = visibility_graph(outer)?;
    for (i, j) in g.edges().collect::<Vec<_>>() {
        if segment_enters_interior(outer.vertex(i), outer.vertex(j), hp.hole()) {
            g.set(i, j, false);
        }
    }
    Ok(g)
}

/// Fraction of vertex pairs joined by an edge.
pub fn graph_density(g: &VisGraph) -> f64 {
    let pairs = g.n() * g.n().saturating_sub(1) / 2;
    if pairs == 0 {
        return 0.0;
    }
    g.edge_count() as f64 / pairs as f64
}

fn bfs_eccentricity(g: &VisGraph, src: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[src] = 0;
    let mut q = VecDeque::from([src]);
    let mut far = 0;
    let mut seen = 1;
    while let Some(u) = q.pop_front() {
        for v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                far = far.max(dist[v]);
                seen += 1;
                q.push_back(v);
            }
        }
    }
    (seen == g.n()).then_some(far)
}

/// Longest shortest path in edges; `None` when the graph is disconnected.
pub fn link_diameter(g: &VisGraph) -> Option<usize> {
    (0..g.n()).try_fold(0, |acc, s| bfs_eccentricity(g, s).map(|e| acc.max(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn regular(n: usize, r: f64) -> Polygon {
        Polygon::new(
            (0..n)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / n as f64;
                    Point::new(r * t.cos(), r * t.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    fn square(h: f64) -> Polygon {
        Polygon::from_coords(&[(-h, -h), (h, -h), (h, h), (-h, h)]).unwrap()
    }

    #[test]
    fn convex_is_complete() {
        let g = visibility_graph(&regular(25, 1.0)).unwrap();
        assert_eq!(g.edge_count(), 300);
        assert_eq!(g, VisGraph::complete(25));
        let t = visibility_graph(&regular(3, 1.0)).unwrap();
        assert_eq!(t, VisGraph::complete(3));
    }

    #[test]
    fn dart_has_five_edges() {
        let d = Polygon::from_coords(&[(0.0, 0.0), (4.0, 0.0), (1.0, 1.0), (0.0, 4.0)]).unwrap();
        let g = visibility_graph(&d).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert!(!g.has_edge(1, 3));
        assert!(g.has_edge(0, 2));
    }

    #[test]
    fn non_simple_rejected() {
        let bowtie =
            Polygon::from_coords(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]).unwrap();
        assert_eq!(visibility_graph(&bowtie), Err(Error::NonSimpleInput));
    }

    #[test]
    fn density_and_diameter() {
        let k = VisGraph::complete(25);
        assert_eq!(graph_density(&k), 1.0);
        assert_eq!(link_diameter(&k), Some(1));
        let c = VisGraph::cycle(25);
        assert!((graph_density(&c) - 25.0 / 300.0).abs() < 1e-15);
        assert_eq!(link_diameter(&c), Some(12));
        assert_eq!(link_diameter(&VisGraph::empty(3)), None);
    }

    #[test]
    fn base64_roundtrip_and_layout() {
        let mut g = VisGraph::cycle(5);
        g.set(0, 2, true);
        let back = VisGraph::from_base64(5, &g.to_base64()).unwrap();
        assert_eq!(back, g);
        // (1,0) is the first lower-triangular bit -> MSB of the first byte
        let one = VisGraph::from_edges(3, [(0, 1)]);
        assert_eq!(one.to_base64(), BASE64.encode([0x80u8]));
        assert!(VisGraph::from_base64(7, &g.to_base64()).is_err());
    }

    #[test]
    fn hole_far_from_diagonal_keeps_it() {
        let hole = Polygon::from_coords(&[(0.5, -0.1), (0.6, -0.1), (0.55, 0.0)]).unwrap();
        let hp = HolePolygon::new(square(1.0), hole).unwrap();
        let g = visibility_graph_with_hole(&hp).unwrap();
        assert!(g.has_edge(1, 3));
        assert!(g.has_edge(0, 2));
    }

    #[test]
    fn centered_hole_blocks_diagonals() {
        let hp = HolePolygon::new(square(1.0), square(0.2)).unwrap();
        assert!(signed_area(hp.hole()) < 0.0);
        let g = visibility_graph_with_hole(&hp).unwrap();
        assert!(!g.has_edge(0, 2));
        assert!(!g.has_edge(1, 3));
        assert!(g.has_boundary_cycle());
    }

    #[test]
    fn hole_must_be_inside() {
        let outside = Polygon::from_coords(&[(2.0, 2.0), (3.0, 2.0), (2.0, 3.0)]).unwrap();
        assert_eq!(HolePolygon::new(square(1.0), outside), Err(Error::HoleNotInside));
        let crossing = Polygon::from_coords(&[(0.5, 0.5), (1.5, 0.5), (0.5, 0.7)]).unwrap();
        assert_eq!(HolePolygon::new(square(1.0), crossing), Err(Error::HoleNotInside));
    }

    #[test]
    fn grazing_hole_vertex_does_not_block() {
        // hole vertex sits exactly on the diagonal 0-2, hole lies to one side
        let hole = Polygon::from_coords(&[(0.0, 0.0), (0.3, -0.1), (0.3, 0.1)]).unwrap();
        let hp = HolePolygon::new(square(1.0), hole).unwrap();
        let g = visibility_graph_with_hole(&hp).unwrap();
        assert!(g.has_edge(0, 2));
        assert!(g.has_edge(1, 3));
    }
}
