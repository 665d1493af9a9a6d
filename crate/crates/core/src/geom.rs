//! Planar predicates and the `Polygon` type.
//!
//! Coordinates are expected to be unit scale (the generation canvas is
//! `[-1, 1]^2`), so the predicates use fixed absolute tolerances rather than
//! adaptive arithmetic.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold on the raw cross product below which three points are collinear.
pub const EPS_ORIENT: f64 = 1e-12;
/// Euclidean distance at which a point counts as lying on the boundary.
pub const EPS_BOUNDARY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn midpoint(self, o: Point) -> Point {
        self.lerp(o, 0.5)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::CounterClockwise => 1,
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
        }
    }
}

/// Side of `r` relative to the directed line `p -> q`.
pub fn orient(p: Point, q: Point, r: Point) -> Orientation {
    let c = (q - p).cross(r - p);
    if c > EPS_ORIENT {
        Orientation::CounterClockwise
    } else if c < -EPS_ORIENT {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// `p` is collinear with `[a, b]` and strictly between its endpoints.
fn strictly_between(p: Point, a: Point, b: Point) -> bool {
    if orient(a, b, p) != Orientation::Collinear {
        return false;
    }
    let ab = b - a;
    let t = (p - a).dot(ab);
    t > 0.0 && t < ab.dot(ab)
}

/// `p` collinear with `[a, b]` and within its closed extent.
fn on_closed_segment(p: Point, a: Point, b: Point) -> bool {
    orient(a, b, p) == Orientation::Collinear
        && p.x >= a.x.min(b.x) - EPS_BOUNDARY
        && p.x <= a.x.max(b.x) + EPS_BOUNDARY
        && p.y >= a.y.min(b.y) - EPS_BOUNDARY
        && p.y <= a.y.max(b.y) + EPS_BOUNDARY
}

/// Interiors cross at a single point; touching and collinear overlap excluded.
pub fn segments_properly_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c).sign();
    let o2 = orient(a, b, d).sign();
    let o3 = orient(c, d, a).sign();
    let o4 = orient(c, d, b).sign();
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Closed segments share at least one point.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    if segments_properly_cross(a, b, c, d) {
        return true;
    }
    on_closed_segment(c, a, b)
        || on_closed_segment(d, a, b)
        || on_closed_segment(a, c, d)
        || on_closed_segment(b, c, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointLocation {
    Inside,
    Boundary,
    Outside,
}

/// Ordered vertex ring. Construction rejects fewer than three vertices,
/// non-finite coordinates and coincident vertices; simplicity and
/// orientation are checked separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl TryFrom<Vec<Point>> for Polygon {
    type Error = Error;
    fn try_from(v: Vec<Point>) -> Result<Self> {
        Polygon::new(v)
    }
}

impl From<Polygon> for Vec<Point> {
    fn from(p: Polygon) -> Self {
        p.vertices
    }
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i] == vertices[j] {
                    return Err(Error::RepeatedVertex(i, j));
                }
            }
        }
        Ok(Polygon { vertices })
    }

    /// Caller guarantees the vertices are valid (e.g. a similarity image of
    /// an already validated polygon).
    pub(crate) fn from_vertices_unchecked(vertices: Vec<Point>) -> Self {
        debug_assert!(vertices.len() >= 3);
        Polygon { vertices }
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self> {
        Polygon::new(coords.iter().map(|&c| Point::from(c)).collect())
    }

    /// Applies `f` to every vertex, revalidating the result.
    pub fn map(&self, f: impl Fn(Point) -> Point) -> Result<Self> {
        Polygon::new(self.vertices.iter().map(|&p| f(p)).collect())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i]
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1 (mod n)`.
    pub fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.len()).map(move |i| self.edge(i))
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        i != j && (self.next(i) == j || self.next(j) == i)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    pub fn centroid(&self) -> Point {
        let s = self
            .vertices
            .iter()
            .fold(Point::default(), |acc, &p| acc + p);
        s * (1.0 / self.len() as f64)
    }

    /// Interior angle at vertex `i` exceeds pi (assumes CCW orientation).
    pub fn is_reflex(&self, i: usize) -> bool {
        let (a, b, c) = (
            self.vertices[self.prev(i)],
            self.vertices[i],
            self.vertices[self.next(i)],
        );
        orient(a, b, c) == Orientation::Clockwise
    }

    /// Distance from `p` to the polygon boundary.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Shoelace signed area; positive for counterclockwise rings.
pub fn signed_area(poly: &Polygon) -> f64 {
    0.5 * poly.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
}

/// Reverses the ring iff it is clockwise, keeping vertex 0 first.
pub fn ensure_ccw(poly: &Polygon) -> Polygon {
    if signed_area(poly) >= 0.0 {
        return poly.clone();
    }
    let v = poly.vertices();
    let mut out = Vec::with_capacity(v.len());
    out.push(v[0]);
    out.extend(v[1..].iter().rev().copied());
    Polygon { vertices: out }
}

pub fn is_simple(poly: &Polygon) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = poly.edge(i);
        for j in i + 1..n {
            let (c, d) = poly.edge(j);
            if j == i + 1 {
                // shared vertex b == c: the far endpoints must not fold back
                if on_closed_segment(d, a, b) || on_closed_segment(a, c, d) {
                    return false;
                }
            } else if i == 0 && j == n - 1 {
                // shared vertex a == d
                if on_closed_segment(c, a, b) || on_closed_segment(b, c, d) {
                    return false;
                }
            } else if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

pub fn point_in_polygon(pt: Point, poly: &Polygon) -> PointLocation {
    if poly.boundary_distance(pt) <= EPS_BOUNDARY {
        return PointLocation::Boundary;
    }
    let mut inside = false;
    for (a, b) in poly.edges() {
        if (a.y > pt.y) != (b.y > pt.y) {
            let x = a.x + (pt.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if x > pt.x {
                inside = !inside;
            }
        }
    }
    if inside {
        PointLocation::Inside
    } else {
        PointLocation::Outside
    }
}

/// Parameters in `(0, 1)` along `[a, b]` at which vertices of `ring` lie on
/// the segment, paired with a flag telling whether the segment interior
/// properly crosses any edge of `ring`.
fn boundary_hits(a: Point, b: Point, ring: &Polygon) -> (Vec<f64>, bool) {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let mut hits = Vec::new();
    for (c, d) in ring.edges() {
        if segments_properly_cross(a, b, c, d) {
            return (hits, true);
        }
    }
    for &v in ring.vertices() {
        if strictly_between(v, a, b) {
            hits.push((v - a).dot(ab) / len2);
        }
    }
    hits.sort_by(f64::total_cmp);
    (hits, false)
}

/// Midpoints of the pieces of `[a, b]` between consecutive boundary hits.
fn piece_midpoints(a: Point, b: Point, hits: &[f64]) -> Vec<Point> {
    let mut knots = Vec::with_capacity(hits.len() + 2);
    knots.push(0.0);
    knots.extend_from_slice(hits);
    knots.push(1.0);
    knots
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| a.lerp(b, 0.5 * (w[0] + w[1])))
        .collect()
}

/// Whether the closed segment `[a, b]` lies inside the closed polygon.
/// Endpoints may be arbitrary points, not only vertices.
pub fn segment_in_polygon(a: Point, b: Point, poly: &Polygon) -> bool {
    if point_in_polygon(a, poly) == PointLocation::Outside
        || point_in_polygon(b, poly) == PointLocation::Outside
    {
        return false;
    }
    let (hits, crossed) = boundary_hits(a, b, poly);
    if crossed {
        return false;
    }
    piece_midpoints(a, b, &hits).into_iter().all(|m| point_in_polygon(m, poly) != PointLocation::Outside)
}

/// Open segment `(a, b)` passes through the interior of `ring`.
pub(crate) fn segment_enters_interior(a: Point, b: Point, ring: &Polygon) -> bool {
    let (hits, crossed) = boundary_hits(a, b, ring);
    crossed || piece_midpoints(a, b, &hits).into_iter().any(|m| point_in_polygon(m, ring) == PointLocation::Inside)
}

/// Vertex `i` sees vertex `j` within the closed polygon.
pub fn segment_visible(i: usize, j: usize, poly: &Polygon) -> bool {
    if i == j || poly.are_adjacent(i, j) {
        return true;
    }
    segment_in_polygon(poly.vertex(i), poly.vertex(j), poly)
}
