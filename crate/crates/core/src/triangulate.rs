//! Constrained Delaunay triangulation of simple polygons, triangulation
//! graphs, and flip paths between triangulations of the abstract convex
//! n-gon.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{is_simple, orient, segment_visible, segments_properly_cross, signed_area, Orientation, Point, Polygon};
use crate::visibility::VisGraph;

/// Determinant tolerance for the incircle predicate.
pub const EPS_INCIRCLE: f64 = 1e-12;

fn key(i: usize, j: usize) -> (usize, usize) {
    if i < j { (i, j) } else { (j, i) }
}

/// Diagonal set of a triangulated n-gon. Vertex labels follow the polygon
/// boundary order; boundary edges are implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTriangulation", into = "RawTriangulation")]
pub struct Triangulation {
    n: usize,
    diagonals: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawTriangulation {
    n: usize,
    diagonals: Vec<[usize; 2]>,
}

impl TryFrom<RawTriangulation> for Triangulation {
    type Error = Error;
    fn try_from(r: RawTriangulation) -> Result<Self> {
        Triangulation::new(r.n, r.diagonals.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<Triangulation> for RawTriangulation {
    fn from(t: Triangulation) -> Self {
        RawTriangulation {
            n: t.n,
            diagonals: t.diagonals.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl Triangulation {
    /// Builds and validates combinatorially.
    pub fn new(n: usize, diagonals: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let t = Triangulation {
            n,
            diagonals: diagonals.into_iter().map(|(a, b)| key(a, b)).collect(),
        };
        t.validate()?;
        Ok(t)
    }

    /// All diagonals from vertex 0.
    pub fn fan(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        Ok(Triangulation {
            n,
            diagonals: (2..n - 1).map(|j| (0, j)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted, each as `(i, j)` with `i < j`.
    pub fn diagonals(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.diagonals.iter().copied()
    }

    pub fn diagonal_count(&self) -> usize {
        self.diagonals.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.diagonals.contains(&key(i, j))
    }

    fn is_boundary(&self, i: usize, j: usize) -> bool {
        let (a, b) = key(i, j);
        b == a + 1 || (a == 0 && b == self.n - 1)
    }

    /// Boundary edge or diagonal.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && (self.is_boundary(i, j) || self.contains(i, j))
    }

    /// Triangles as ascending index triples, sorted.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let g = triangulation_graph(self);
        let mut out = Vec::with_capacity(self.n.saturating_sub(2));
        for (i, j) in g.edges() {
            for k in j + 1..self.n {
                if g.has_edge(i, k) && g.has_edge(j, k) {
                    out.push([i, j, k]);
                }
            }
        }
        out
    }

    /// Combinatorial checks on the abstract convex n-gon: n-3 distinct
    /// non-boundary chords, pairwise non-crossing, n-2 triangles.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        if self.diagonals.len() != n - 3 {
            return Err(Error::InvalidTriangulation(format!(
                "{} diagonals, expected {}",
                self.diagonals.len(),
                n - 3
            )));
        }
        for &(a, b) in &self.diagonals {
            if b >= n || a == b || self.is_boundary(a, b) {
                return Err(Error::InvalidTriangulation(format!("({a}, {b}) is not a chord")));
            }
        }
        let d: Vec<_> = self.diagonals.iter().copied().collect();
        for (x, &(a, b)) in d.iter().enumerate() {
            for &(c, e) in &d[x + 1..] {
                if chords_cross((a, b), (c, e)) {
                    return Err(Error::InvalidTriangulation(format!(
                        "({a}, {b}) crosses ({c}, {e})"
                    )));
                }
            }
        }
        let t = self.triangles().len();
        if t != n - 2 {
            return Err(Error::InvalidTriangulation(format!("{t} triangles, expected {}", n - 2)));
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus: every diagonal is an interior
    /// sightline of `poly` and no triangle is degenerate.
    pub fn validate_in(&self, poly: &Polygon) -> Result<()> {
        if poly.len() != self.n {
            return Err(Error::SizeMismatch(poly.len(), self.n));
        }
        self.validate()?;
        for &(a, b) in &self.diagonals {
            if !segment_visible(a, b, poly) {
                return Err(Error::InvalidTriangulation(format!("({a}, {b}) leaves the polygon")));
            }
        }
        for [a, b, c] in self.triangles() {
            if orient(poly.vertex(a), poly.vertex(b), poly.vertex(c)) == Orientation::Collinear {
                return Err(Error::InvalidTriangulation(format!("triangle ({a}, {b}, {c}) is flat")));
            }
        }
        Ok(())
    }

    /// The two apexes of the triangles on diagonal `(a, b)`, `a < b`: one
    /// strictly between them in label order, one outside.
    fn apexes(&self, a: usize, b: usize) -> (usize, usize) {
        let inner = (a + 1..b)
            .find(|&c| self.has_edge(a, c) && self.has_edge(c, b))
            .expect("valid triangulation has an inner apex");
        let outer = (b + 1..self.n)
            .chain(0..a)
            .find(|&c| self.has_edge(a, c) && self.has_edge(c, b))
            .expect("valid triangulation has an outer apex");
        (inner, outer)
    }

    fn replace(&self, old: (usize, usize), new: (usize, usize)) -> Triangulation {
        let mut t = self.clone();
        t.diagonals.remove(&old);
        t.diagonals.insert(key(new.0, new.1));
        t
    }
}

fn chords_cross((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Boundary cycle plus diagonals.
pub fn triangulation_graph(t: &Triangulation) -> VisGraph {
    let mut g = VisGraph::cycle(t.n);
    for (a, b) in t.diagonals() {
        g.set(a, b, true);
    }
    g
}

/// Combinatorial flip on the abstract convex n-gon. Returns the new
/// triangulation and the diagonal that replaced `d`.
pub fn flip(t: &Triangulation, d: (usize, usize)) -> Result<(Triangulation, (usize, usize))> {
    let (a, b) = key(d.0, d.1);
    if !t.contains(a, b) {
        return Err(Error::UnknownDiagonal(a, b));
    }
    let (c, e) = t.apexes(a, b);
    let new = key(c, e);
    Ok((t.replace((a, b), new), new))
}

/// Geometric flip: only allowed when the two triangles on `d` form a
/// strictly convex quadrilateral in `poly`.
pub fn flip_in(t: &Triangulation, d: (usize, usize), poly: &Polygon) -> Result<(Triangulation, (usize, usize))> {
    if poly.len() != t.n {
        return Err(Error::SizeMismatch(poly.len(), t.n));
    }
    let (a, b) = key(d.0, d.1);
    if !t.contains(a, b) {
        return Err(Error::UnknownDiagonal(a, b));
    }
    let (c, e) = t.apexes(a, b);
    let v = |i| poly.vertex(i);
    if !segments_properly_cross(v(a), v(b), v(c), v(e)) {
        return Err(Error::NotFlippable(a, b));
    }
    let new = key(c, e);
    Ok((t.replace((a, b), new), new))
}

/// Positive when `d` is strictly inside the circle through the CCW triangle
/// `(a, b, c)`.
pub fn incircle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let (ax, ay) = (a.x - d.x, a.y - d.y);
    let (bx, by) = (b.x - d.x, b.y - d.y);
    let (cx, cy) = (c.x - d.x, c.y - d.y);
    (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay)
}

/// Ear clipping (strict ears, lowest label first) followed by Lawson flips
/// to the constrained Delaunay triangulation. Co-circular quadrilaterals
/// keep the lexicographically smaller diagonal.
pub fn cdt(poly: &Polygon) -> Result<Triangulation> {
    if !is_simple(poly) {
        return Err(Error::NonSimpleInput);
    }
    let t = ear_clip(poly)?;
    lawson(poly, t)
}

fn ear_clip(poly: &Polygon) -> Result<Triangulation> {
    let n = poly.len();
    let s = if signed_area(poly) > 0.0 { 1 } else { -1 };
    let v = |i: usize| poly.vertex(i);
    let mut ring: Vec<usize> = (0..n).collect();
    let mut diagonals = BTreeSet::new();

    let is_ear = |ring: &[usize], k: usize, strict: bool| -> bool {
        let m = ring.len();
        let (p, i, q) = (ring[(k + m - 1) % m], ring[k], ring[(k + 1) % m]);
        if orient(v(p), v(i), v(q)).sign() != s {
            return false;
        }
        ring.iter().filter(|&&r| r != p && r != i && r != q).all(|&r| {
            let x = v(r);
            let o = [orient(v(p), v(i), x), orient(v(i), v(q), x), orient(v(q), v(p), x)];
            let inside_closed = o.iter().all(|o| o.sign() != -s);
            let inside_open = o.iter().all(|o| o.sign() == s);
            if strict { !inside_closed } else { !inside_open }
        })
    };

    while ring.len() > 3 {
        let k = (0..ring.len())
            .find(|&k| is_ear(&ring, k, true))
            .or_else(|| (0..ring.len()).find(|&k| is_ear(&ring, k, false)))
            .ok_or_else(|| Error::InvalidTriangulation("no ear found".into()))?;
        let m = ring.len();
        diagonals.insert(key(ring[(k + m - 1) % m], ring[(k + 1) % m]));
        ring.remove(k);
    }
    Ok(Triangulation { n, diagonals })
}

fn lawson(poly: &Polygon, mut t: Triangulation) -> Result<Triangulation> {
    let v = |i: usize| poly.vertex(i);
    let limit = 8 * poly.len() * poly.len() + 64;
    for _ in 0..limit {
        let mut changed = false;
        let current: Vec<_> = t.diagonals().collect();
        for (a, b) in current {
            if !t.contains(a, b) {
                continue;
            }
            let (c, d) = t.apexes(a, b);
            if !segments_properly_cross(v(a), v(b), v(c), v(d)) {
                continue;
            }
            let (p, q, r) = if orient(v(a), v(b), v(c)) == Orientation::CounterClockwise {
                (a, b, c)
            } else {
                (b, a, c)
            };
            let det = incircle(v(p), v(q), v(r), v(d));
            let other = key(c, d);
            let flip_it = if det.abs() <= EPS_INCIRCLE { other < (a, b) } else { det > 0.0 };
            if flip_it {
                t = t.replace((a, b), other);
                changed = true;
            }
        }
        if !changed {
            return Ok(t);
        }
    }
    Err(Error::IterationLimit(limit))
}

/// Sequence of triangulations, consecutive entries one flip apart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FlipPath(pub Vec<Triangulation>);

impl FlipPath {
    /// Number of flips.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn steps(&self) -> &[Triangulation] {
        &self.0
    }
}

/// Flips toward the fan at vertex 0, one new fan diagonal per step.
fn to_fan(t: &Triangulation) -> Vec<Triangulation> {
    let mut out = vec![t.clone()];
    let mut cur = t.clone();
    loop {
        // a triangle (0, i, j) whose far side is a diagonal
        let target = (1..cur.n)
            .filter(|&j| cur.has_edge(0, j))
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| (w[0], w[1]))
            .find(|&(i, j)| cur.contains(i, j));
        let Some(d) = target else { break };
        let (next, _) = flip(&cur, d).expect("diagonal present");
        out.push(next.clone());
        cur = next;
    }
    out
}

/// Route `a` to the fan at vertex 0, then fan to `b`. At most `2(n-3)`
/// flips.
pub fn flip_path(a: &Triangulation, b: &Triangulation) -> Result<FlipPath> {
    if a.n != b.n {
        return Err(Error::SizeMismatch(a.n, b.n));
    }
    if a == b {
        return Ok(FlipPath(vec![a.clone()]));
    }
    let mut path = to_fan(a);
    let mut back = to_fan(b);
    back.pop();
    back.reverse();
    path.extend(back);
    Ok(FlipPath(path))
}

fn align(p: &Polygon) -> Vec<Point> {
    let o = p.vertex(0);
    let e = p.vertex(1) - o;
    let (c, s) = (e.x / e.norm(), e.y / e.norm());
    p.vertices()
        .iter()
        .map(|&q| {
            let d = q - o;
            Point::new(c * d.x + s * d.y, -s * d.x + c * d.y)
        })
        .collect()
}

/// Mean vertex distance after moving `v0` to the origin and rotating edge
/// `(v0, v1)` onto the +x axis in both polygons.
pub fn aligned_euclidean_distance(p: &Polygon, q: &Polygon) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch(p.len(), q.len()));
    }
    let (a, b) = (align(p), align(q));
    Ok(a.iter().zip(&b).map(|(x, y)| x.dist(*y)).sum::<f64>() / p.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygen::{random_simple_polygon_with, rng_from_seed, rotate_augment};
    use crate::visibility::visibility_graph;
    use rand::Rng;

    fn quad(c: &[(f64, f64)]) -> Polygon {
        Polygon::from_coords(c).unwrap()
    }

    #[test]
    fn convex_quad_picks_delaunay_diagonal() {
        // wide rhombus: short diagonal (1,3) is Delaunay
        let p = quad(&[(-2.0, 0.0), (0.0, -1.0), (2.0, 0.0), (0.0, 1.0)]);
        let t = cdt(&p).unwrap();
        assert_eq!(t.diagonals().collect::<Vec<_>>(), vec![(1, 3)]);
        assert_eq!(t.triangles().len(), 2);
        let p = quad(&[(0.0, -2.0), (1.0, 0.0), (0.0, 2.0), (-1.0, 0.0)]);
        assert_eq!(cdt(&p).unwrap().diagonals().collect::<Vec<_>>(), vec![(1, 3)]);
        let p = quad(&[(-1.0, 0.0), (0.0, -2.0), (1.0, 0.0), (0.0, 2.0)]);
        assert_eq!(cdt(&p).unwrap().diagonals().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn cocircular_square_takes_smallest_diagonal() {
        let sq = quad(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(cdt(&sq).unwrap().diagonals().collect::<Vec<_>>(), vec![(0, 2)]);
        let sq = quad(&[(1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]);
        assert_eq!(cdt(&sq).unwrap().diagonals().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn cdt_rejects_bowtie() {
        let bow = quad(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(cdt(&bow).unwrap_err(), Error::NonSimpleInput);
    }

    #[test]
    fn random_polygons_triangulate_inside() {
        let mut rng = rng_from_seed(3);
        for _ in 0..30 {
            let p = random_simple_polygon_with(25, 10_000, &mut rng).unwrap();
            let t = cdt(&p).unwrap();
            assert_eq!(t.diagonal_count(), 22);
            assert_eq!(t.triangles().len(), 23);
            t.validate_in(&p).unwrap();
            let g = triangulation_graph(&t);
            assert_eq!(g.edge_count(), 47);
            assert!(g.is_subgraph_of(&visibility_graph(&p).unwrap()));
            assert_eq!(cdt(&p).unwrap(), t);
        }
    }

    #[test]
    fn cdt_is_empty_circle() {
        let mut rng = rng_from_seed(4);
        let p = random_simple_polygon_with(25, 10_000, &mut rng).unwrap();
        let t = cdt(&p).unwrap();
        for (a, b) in t.diagonals() {
            let (c, d) = t.apexes(a, b);
            let (x, y) = if orient(p.vertex(a), p.vertex(b), p.vertex(c)) == Orientation::CounterClockwise {
                (a, b)
            } else {
                (b, a)
            };
            assert!(incircle(p.vertex(x), p.vertex(y), p.vertex(c), p.vertex(d)) <= EPS_INCIRCLE);
        }
    }

    #[test]
    fn cdt_survives_rotation() {
        let mut rng = rng_from_seed(5);
        for _ in 0..10 {
            let p = random_simple_polygon_with(25, 10_000, &mut rng).unwrap();
            let q = rotate_augment(&p, rng.random_range(0.0..std::f64::consts::TAU));
            assert_eq!(cdt(&p).unwrap(), cdt(&q).unwrap());
        }
    }

    #[test]
    fn fan_graph_degrees() {
        let t = Triangulation::fan(9).unwrap();
        let g = triangulation_graph(&t);
        assert_eq!(g.degree(0), 8);
        assert_eq!(g.edge_count(), 2 * 9 - 3);
    }

    #[test]
    fn flip_in_fan_of_pentagon() {
        let t = Triangulation::fan(5).unwrap();
        let (u, new) = flip(&t, (0, 2)).unwrap();
        assert_eq!(new, (1, 3));
        assert_eq!(u.diagonals().collect::<Vec<_>>(), vec![(0, 3), (1, 3)]);
        let (back, _) = flip(&u, new).unwrap();
        assert_eq!(back, t);
        assert_eq!(flip(&t, (1, 3)).unwrap_err(), Error::UnknownDiagonal(1, 3));
    }

    #[test]
    fn geometric_flip_requires_convex_quad() {
        let sq = quad(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let t = cdt(&sq).unwrap();
        let (u, new) = flip_in(&t, (0, 2), &sq).unwrap();
        assert_eq!(new, (1, 3));
        u.validate_in(&sq).unwrap();
        // dart: quad 0-1-2-3 is reflex at 2
        let dart = quad(&[(0.0, 0.0), (4.0, 0.0), (1.0, 1.0), (0.0, 4.0)]);
        let t = cdt(&dart).unwrap();
        assert_eq!(t.diagonals().collect::<Vec<_>>(), vec![(0, 2)]);
        assert_eq!(flip_in(&t, (0, 2), &dart).unwrap_err(), Error::NotFlippable(0, 2));
    }

    #[test]
    fn validate_catches_bad_sets() {
        assert!(Triangulation::new(5, [(0, 2), (1, 3)]).is_err());
        assert!(Triangulation::new(5, [(0, 2)]).is_err());
        assert!(Triangulation::new(5, [(0, 1), (0, 2)]).is_err());
        assert!(Triangulation::new(5, [(0, 2), (0, 3)]).is_ok());
    }

    #[test]
    fn flip_paths() {
        let fan = Triangulation::fan(8).unwrap();
        assert!(flip_path(&fan, &fan).unwrap().is_empty());
        let b = Triangulation::new(8, [(1, 3), (3, 5), (5, 7), (1, 5), (1, 7)]).unwrap();
        let p = flip_path(&fan, &b).unwrap();
        let extra = b.diagonals().filter(|&(i, j)| !fan.contains(i, j)).count();
        assert_eq!(p.len(), extra);
        assert_eq!(p.steps().first(), Some(&fan));
        assert_eq!(p.steps().last(), Some(&b));
        assert!(flip_path(&fan, &Triangulation::fan(7).unwrap()).is_err());
    }

    #[test]
    fn aligned_distance_cancels_similarity() {
        let mut rng = rng_from_seed(6);
        let p = random_simple_polygon_with(12, 10_000, &mut rng).unwrap();
        assert_eq!(aligned_euclidean_distance(&p, &p).unwrap(), 0.0);
        let (s, c) = 1.1f64.sin_cos();
        let q = p
            .map(|v| {
                let v = v + Point::new(0.1, 0.0);
                Point::new(c * v.x - s * v.y, s * v.x + c * v.y)
            })
            .unwrap();
        assert!(aligned_euclidean_distance(&p, &q).unwrap() < 1e-12);
        let r = Polygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]).unwrap();
        assert!(aligned_euclidean_distance(&p, &r).is_err());
    }
}
