//! Signed distance rasterization and the geometric inverse: marching
//! squares on the zero level set followed by Visvalingam simplification.
//!
//! Grid frame: the polygon is fit into `[m, 1 - m]^2`. Sample `(row, col)`
//! sits at `(col / res, row / res)`, row 0 at the bottom, so the lattice
//! includes the frame center `(0.5, 0.5)` for even `res`. Values are
//! negative inside.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    ensure_ccw, is_simple, point_in_polygon, point_segment_distance, segments_intersect,
    Point, PointLocation, Polygon,
};

pub const DEFAULT_RES: usize = 40;
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Similarity mapping original coordinates into the grid frame:
/// `grid = scale * p + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub scale: f64,
    pub offset: Point,
}

impl Frame {
    pub const IDENTITY: Frame = Frame {
        scale: 1.0,
        offset: Point::new(0.0, 0.0),
    };

    pub fn apply(&self, p: Point) -> Point {
        p * self.scale + self.offset
    }

    pub fn invert(&self, p: Point) -> Point {
        (p - self.offset) * (1.0 / self.scale)
    }
}

/// Uniform scale and translation of the bounding box into `[m, 1 - m]^2`,
/// centered along the shorter side.
pub fn normalize_unit(poly: &Polygon, margin: f64) -> Result<(Polygon, Frame)> {
    if !(0.0..0.5).contains(&margin) {
        return Err(Error::InvalidConfig(format!("margin {margin} outside [0, 0.5)")));
    }
    let (lo, hi) = poly.bounding_box();
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    if w <= 0.0 || h <= 0.0 {
        return Err(Error::DegenerateExtent);
    }
    let scale = (1.0 - 2.0 * margin) / w.max(h);
    let center = lo.midpoint(hi);
    let frame = Frame {
        scale,
        offset: Point::new(0.5, 0.5) - center * scale,
    };
    Ok((poly.map(|p| frame.apply(p))?, frame))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdfGrid {
    res: usize,
    values: Vec<f64>,
    frame: Frame,
}

impl SdfGrid {
    pub fn new(res: usize, values: Vec<f64>, frame: Frame) -> Result<Self> {
        if res < 2 || values.len() != res * res {
            return Err(Error::Format(format!(
                "grid of resolution {res} needs {} values, got {}",
                res * res,
                values.len()
            )));
        }
        Ok(SdfGrid { res, values, frame })
    }

    pub fn res(&self) -> usize {
        self.res
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// Row-major, row 0 at the bottom.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.res + col]
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / self.res as f64
    }

    pub fn sample_point(&self, row: usize, col: usize) -> Point {
        sample_point(self.res, row, col)
    }
}

fn sample_point(res: usize, row: usize, col: usize) -> Point {
    Point::new(col as f64 / res as f64, row as f64 / res as f64)
}

/// Signed distance from `p` to the boundary: negative inside, zero on it.
pub fn signed_distance(p: Point, poly: &Polygon) -> f64 {
    match point_in_polygon(p, poly) {
        PointLocation::Boundary => 0.0,
        PointLocation::Inside => -poly.boundary_distance(p),
        PointLocation::Outside => poly.boundary_distance(p),
    }
}

/// Samples the signed distance of a polygon that is already in grid frame.
pub fn rasterize_sdf(poly: &Polygon, res: usize) -> Result<SdfGrid> {
    rasterize_with_frame(poly, res, Frame::IDENTITY)
}

fn rasterize_with_frame(poly: &Polygon, res: usize, frame: Frame) -> Result<SdfGrid> {
    if res < 2 {
        return Err(Error::InvalidConfig(format!("resolution {res} < 2")));
    }
    let values = (0..res)
        .flat_map(|r| (0..res).map(move |c| (r, c)))
        .map(|(r, c)| signed_distance(sample_point(res, r, c), poly))
        .collect();
    SdfGrid::new(res, values, frame)
}

/// Normalizes with `margin` and rasterizes, recording the frame.
pub fn polygon_sdf(poly: &Polygon, res: usize, margin: f64) -> Result<SdfGrid> {
    let (norm, frame) = normalize_unit(poly, margin)?;
    rasterize_with_frame(&norm, res, frame)
}

/// Closed ring of points; the closing edge is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Point>,
}

impl Polyline {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        ring_area(&self.points)
    }
}

fn ring_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>()
}

/// Crossing location on a lattice edge: horizontal edges join `(r, c)` and
/// `(r, c + 1)`, vertical edges `(r, c)` and `(r + 1, c)`, in padded indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum EdgeId {
    H(usize, usize),
    V(usize, usize),
}

/// Zero level set via marching squares. Samples with `v <= 0` count as
/// inside, so samples lying exactly on the boundary are traced through.
/// The grid is padded with a ring of positive samples so every component
/// closes. Saddles are resolved by the sign of the mean of the four
/// corners. Returns the component with the largest enclosed area,
/// counterclockwise.
pub fn extract_contour(grid: &SdfGrid) -> Result<Polyline> {
    let res = grid.res();
    let pad = grid.values().iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
    let w = res + 2;
    let val = |r: usize, c: usize| -> f64 {
        if r == 0 || c == 0 || r == w - 1 || c == w - 1 {
            pad
        } else {
            grid.value(r - 1, c - 1)
        }
    };
    let pos = |r: usize, c: usize| -> Point {
        Point::new((c as f64 - 1.0) / res as f64, (r as f64 - 1.0) / res as f64)
    };
    let inside = |v: f64| v <= 0.0;
    if !grid.values().iter().any(|&v| inside(v)) {
        return Err(Error::NoZeroCrossing);
    }

    let crossing = |e: EdgeId| -> Point {
        let ((r0, c0), (r1, c1)) = match e {
            EdgeId::H(r, c) => ((r, c), (r, c + 1)),
            EdgeId::V(r, c) => ((r, c), (r + 1, c)),
        };
        let (a, b) = (val(r0, c0), val(r1, c1));
        let t = if a == b { 0.5 } else { a / (a - b) };
        pos(r0, c0).lerp(pos(r1, c1), t.clamp(0.0, 1.0))
    };

    let mut links: HashMap<EdgeId, Vec<EdgeId>> = HashMap::new();
    let mut link = |a: EdgeId, b: EdgeId| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };
    for r in 0..w - 1 {
        for c in 0..w - 1 {
            let (bl, br, tr, tl) = (val(r, c), val(r, c + 1), val(r + 1, c + 1), val(r + 1, c));
            let mask = (inside(bl) as u8)
                | (inside(br) as u8) << 1
                | (inside(tr) as u8) << 2
                | (inside(tl) as u8) << 3;
            let bottom = EdgeId::H(r, c);
            let right = EdgeId::V(r, c + 1);
            let top = EdgeId::H(r + 1, c);
            let left = EdgeId::V(r, c);
            let center_inside = inside(0.25 * (bl + br + tr + tl));
            match mask {
                0 | 15 => {}
                1 | 14 => link(left, bottom),
                2 | 13 => link(bottom, right),
                3 | 12 => link(left, right),
                4 | 11 => link(right, top),
                6 | 9 => link(bottom, top),
                7 | 8 => link(left, top),
                5 => {
                    if center_inside {
                        link(bottom, right);
                        link(top, left);
                    } else {
                        link(left, bottom);
                        link(right, top);
                    }
                }
                10 => {
                    if center_inside {
                        link(left, bottom);
                        link(right, top);
                    } else {
                        link(bottom, right);
                        link(top, left);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    let mut starts: Vec<EdgeId> = links.keys().copied().collect();
    starts.sort();
    let mut visited: BTreeSet<EdgeId> = BTreeSet::new();
    let mut best: Option<(f64, Vec<Point>)> = None;
    for s in starts {
        if visited.contains(&s) {
            continue;
        }
        let mut ring = Vec::new();
        let mut prev = s;
        let mut cur = s;
        loop {
            visited.insert(cur);
            ring.push(crossing(cur));
            let nb = &links[&cur];
            let next = if nb[0] != prev || nb.len() == 1 { nb[0] } else { nb[1] };
            let next = if next == prev && cur != s { nb[1] } else { next };
            prev = cur;
            cur = next;
            if cur == s || visited.contains(&cur) {
                break;
            }
        }
        let ring = dedupe_ring(ring);
        if ring.len() < 3 {
            continue;
        }
        let area = ring_area(&ring).abs();
        if best.as_ref().is_none_or(|(a, _)| area > *a) {
            best = Some((area, ring));
        }
    }
    let (_, mut ring) = best.ok_or(Error::NoZeroCrossing)?;
    if ring_area(&ring) < 0.0 {
        ring[1..].reverse();
    }
    Ok(Polyline { points: ring })
}

fn dedupe_ring(pts: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last().is_none_or(|q| q.dist(p) > 1e-12) {
            out.push(p);
        }
    }
    while out.len() > 1 && out[0].dist(*out.last().unwrap()) <= 1e-12 {
        out.pop();
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct AreaKey(f64, usize);

impl PartialEq for AreaKey {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for AreaKey {}
impl PartialOrd for AreaKey {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for AreaKey {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0).then(self.1.cmp(&o.1))
    }
}

fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * (b - a).cross(c - a).abs()
}

/// Visvalingam-Whyatt on a closed ring down to exactly `k` vertices.
/// Vertices are removed in order of the area of the triangle they form with
/// their current neighbors, lowest original index first among ties. A
/// removal whose shortcut edge would touch a non-adjacent edge is deferred
/// to keep the ring simple.
pub fn visvalingam_simplify(line: &Polyline, k: usize) -> Result<Polygon> {
    let pts = &line.points;
    let m = pts.len();
    if k < 3 || m < k {
        return Err(Error::TooFewPoints { got: m, need: k.max(3) });
    }
    let mut prev: Vec<usize> = (0..m).map(|i| (i + m - 1) % m).collect();
    let mut next: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
    let mut alive = vec![true; m];
    let area_of = |i: usize, prev: &[usize], next: &[usize]| triangle_area(pts[prev[i]], pts[i], pts[next[i]]);
    let mut area: Vec<f64> = (0..m).map(|i| area_of(i, &prev, &next)).collect();
    let mut queue: BTreeSet<AreaKey> = (0..m).map(|i| AreaKey(area[i], i)).collect();
    let mut remaining = m;

    let shortcut_is_clear = |v: usize, prev: &[usize], next: &[usize], alive: &[bool]| -> bool {
        let (a, b) = (prev[v], next[v]);
        let (pa, pb) = (pts[a], pts[b]);
        let mut e = next[b];
        while e != a {
            let f = next[e];
            if f != a && alive[e] && segments_intersect(pa, pb, pts[e], pts[f]) {
                return false;
            }
            e = f;
        }
        true
    };

    while remaining > k {
        let victim = pick_victim(&queue, |v| shortcut_is_clear(v, &prev, &next, &alive));
        let v = victim.1;
        queue.remove(&victim);
        alive[v] = false;
        let (a, b) = (prev[v], next[v]);
        next[a] = b;
        prev[b] = a;
        remaining -= 1;
        for u in [a, b] {
            queue.remove(&AreaKey(area[u], u));
            area[u] = area_of(u, &prev, &next);
            queue.insert(AreaKey(area[u], u));
        }
    }

    let kept: Vec<Point> = (0..m).filter(|&i| alive[i]).map(|i| pts[i]).collect();
    Polygon::new(kept)
}

/// Smallest-area vertex, lowest index among areas equal up to rounding,
/// skipping vertices whose removal fails `ok`. Falls back to the plain
/// minimum if every candidate fails.
fn pick_victim(queue: &BTreeSet<AreaKey>, ok: impl Fn(usize) -> bool) -> AreaKey {
    let mut iter = queue.iter().peekable();
    let first = **iter.peek().expect("queue holds every live vertex");
    while let Some(&head) = iter.peek() {
        let level = head.0;
        let tol = 1e-9 * level.abs() + 1e-18;
        let mut tied: Vec<AreaKey> = Vec::new();
        while let Some(&&k) = iter.peek() {
            if k.0 > level + tol {
                break;
            }
            tied.push(k);
            iter.next();
        }
        tied.sort_by_key(|k| k.1);
        if let Some(k) = tied.into_iter().find(|k| ok(k.1)) {
            return k;
        }
    }
    first
}

/// Everything produced by [`sdf_round_trip_detailed`].
#[derive(Debug, Clone)]
pub struct RoundTrip {
    /// Recovered polygon in the caller's coordinates.
    pub polygon: Polygon,
    /// Recovered polygon in grid frame.
    pub normalized: Polygon,
    pub grid: SdfGrid,
    pub contour: Polyline,
}

/// normalize -> rasterize -> contour -> simplify to `k` vertices, mapped
/// back to the input frame. When `k` equals the input size the cyclic
/// labelling is chosen to best match the input vertices.
pub fn sdf_round_trip(poly: &Polygon, res: usize, k: usize) -> Result<Polygon> {
    sdf_round_trip_detailed(poly, res, k, DEFAULT_MARGIN).map(|r| r.polygon)
}

pub fn sdf_round_trip_detailed(poly: &Polygon, res: usize, k: usize, margin: f64) -> Result<RoundTrip> {
    let grid = polygon_sdf(poly, res, margin)?;
    let contour = extract_contour(&grid)?;
    let mut normalized = ensure_ccw(&visvalingam_simplify(&contour, k)?);
    if !is_simple(&normalized) {
        return Err(Error::NonSimpleInput);
    }
    let frame = grid.frame();
    if k == poly.len() {
        let reference: Vec<Point> = poly.vertices().iter().map(|&p| frame.apply(p)).collect();
        normalized = align_cyclic(&normalized, &reference);
    }
    let polygon = normalized.map(|p| frame.invert(p))?;
    Ok(RoundTrip {
        polygon,
        normalized,
        grid,
        contour,
    })
}

/// Cyclic relabelling of `poly` minimizing the summed squared distance to
/// `reference` vertex-by-vertex.
pub fn align_cyclic(poly: &Polygon, reference: &[Point]) -> Polygon {
    let n = poly.len();
    if reference.len() != n {
        return poly.clone();
    }
    let v = poly.vertices();
    let cost = |s: usize| -> f64 { (0..n).map(|i| v[(i + s) % n].dist(reference[i]).powi(2)).sum() };
    let best = (0..n)
        .min_by(|&a, &b| cost(a).total_cmp(&cost(b)))
        .unwrap_or(0);
    let rotated: Vec<Point> = (0..n).map(|i| v[(i + best) % n]).collect();
    Polygon::new(rotated).expect("rotation of a valid ring")
}

fn ring_distance(p: Point, ring: &[Point]) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| point_segment_distance(p, ring[i], ring[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two closed boundaries, measured
/// from `samples_per_edge` evenly spaced points on every edge of each.
pub fn boundary_hausdorff(a: &[Point], b: &[Point], samples_per_edge: usize) -> f64 {
    let one_way = |from: &[Point], to: &[Point]| -> f64 {
        let n = from.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            let (p, q) = (from[i], from[(i + 1) % n]);
            for s in 0..samples_per_edge.max(1) {
                let t = s as f64 / samples_per_edge.max(1) as f64;
                worst = worst.max(ring_distance(p.lerp(q, t), to));
            }
        }
        worst
    };
    one_way(a, b).max(one_way(b, a))
}

// Binary layout: 16-byte header then res*res f32 little-endian values.
pub const SDF_MAGIC: [u8; 4] = *b"VSDF";
const SDF_VERSION: u16 = 1;
const FLAG_NEGATIVE_INSIDE: u16 = 1;

/// Header: magic, version (u16), flags (u16; bit 0 = negative inside),
/// res (u32), reserved (u32).
pub fn write_sdf<W: Write>(grid: &SdfGrid, mut w: W) -> Result<()> {
    let mut head = [0u8; 16];
    head[0..4].copy_from_slice(&SDF_MAGIC);
    head[4..6].copy_from_slice(&SDF_VERSION.to_le_bytes());
    head[6..8].copy_from_slice(&FLAG_NEGATIVE_INSIDE.to_le_bytes());
    head[8..12].copy_from_slice(&(grid.res() as u32).to_le_bytes());
    w.write_all(&head)?;
    let mut body = Vec::with_capacity(grid.values().len() * 4);
    for &v in grid.values() {
        body.extend_from_slice(&(v as f32).to_le_bytes());
    }
    w.write_all(&body)?;
    Ok(())
}

/// Reads a grid written by [`write_sdf`] (or any producer honoring the
/// sign flag), returning values with the negative-inside convention.
pub fn read_sdf<R: Read>(mut r: R, frame: Frame) -> Result<SdfGrid> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)?;
    if head[0..4] != SDF_MAGIC {
        return Err(Error::Format("not an SDF grid (bad magic)".into()));
    }
    let version = u16::from_le_bytes([head[4], head[5]]);
    if version != SDF_VERSION {
        return Err(Error::Format(format!("unsupported SDF version {version}")));
    }
    let flags = u16::from_le_bytes([head[6], head[7]]);
    let res = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != res * res * 4 {
        return Err(Error::Format(format!(
            "SDF body holds {} bytes, expected {}",
            body.len(),
            res * res * 4
        )));
    }
    let flip = if flags & FLAG_NEGATIVE_INSIDE != 0 { 1.0 } else { -1.0 };
    let values = body
        .chunks_exact(4)
        .map(|b| flip * f32::from_le_bytes(b.try_into().unwrap()) as f64)
        .collect();
    SdfGrid::new(res, values, frame)
}

/// JSON sidecar stored next to a binary grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdfSidecar {
    pub res: usize,
    pub margin: f64,
    pub frame: Frame,
    pub negative_inside: bool,
    /// Sample placement: `"corner"` means `(col/res, row/res)`.
    pub lattice: String,
}

impl SdfSidecar {
    pub fn for_grid(grid: &SdfGrid, margin: f64) -> Self {
        SdfSidecar {
            res: grid.res(),
            margin,
            frame: grid.frame(),
            negative_inside: true,
            lattice: "corner".into(),
        }
    }
}

/// Binary greyscale PGM, top image row = highest grid row. Mid-grey is the
/// zero level, darker is inside.
pub fn write_pgm<W: Write>(grid: &SdfGrid, mut w: W) -> Result<()> {
    let res = grid.res();
    let max = grid.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    write!(w, "P5\n{res} {res}\n255\n")?;
    let mut px = Vec::with_capacity(res * res);
    for r in (0..res).rev() {
        for c in 0..res {
            let g = 127.5 + 127.5 * grid.value(r, c) / max;
            px.push(g.round().clamp(0.0, 255.0) as u8);
        }
    }
    w.write_all(&px)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polygon {
        Polygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    fn circle(n: usize, r: f64) -> Vec<Point> {
        (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                Point::new(0.5 + r * t.cos(), 0.5 + r * t.sin())
            })
            .collect()
    }

    #[test]
    fn normalize_square_with_margin() {
        let (p, f) = normalize_unit(&unit_square(), 0.05).unwrap();
        let (lo, hi) = p.bounding_box();
        assert!((lo.x - 0.05).abs() < 1e-15 && (lo.y - 0.05).abs() < 1e-15);
        assert!((hi.x - 0.95).abs() < 1e-15 && (hi.y - 0.95).abs() < 1e-15);
        let back = f.invert(p.vertex(2));
        assert!(back.dist(Point::new(1.0, 1.0)) < 1e-15);
    }

    #[test]
    fn normalize_tall_polygon_is_centered() {
        let tall = Polygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.0, 4.0), (0.0, 4.0)]).unwrap();
        let (p, _) = normalize_unit(&tall, 0.05).unwrap();
        let (lo, hi) = p.bounding_box();
        assert!((lo.y - 0.05).abs() < 1e-12 && (hi.y - 0.95).abs() < 1e-12);
        assert!((0.5 * (lo.x + hi.x) - 0.5).abs() < 1e-12);
        assert!(((hi.x - lo.x) - 0.225).abs() < 1e-12);
    }

    #[test]
    fn normalize_rejects_flat_extent() {
        let flat = Polygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap();
        assert_eq!(normalize_unit(&flat, 0.05).unwrap_err(), Error::DegenerateExtent);
    }

    #[test]
    fn square_center_and_boundary_values() {
        let g = polygon_sdf(&unit_square(), 40, 0.05).unwrap();
        assert!((g.value(20, 20) + 0.45).abs() < 1e-9);
        // (2/40, y) lies on the left side
        assert!(g.value(20, 2).abs() < 1e-9);
        assert!(g.value(0, 0) > 0.0);
        let corner = Point::new(0.05, 0.05);
        assert!((g.value(0, 0) - corner.norm()).abs() < 1e-12);
    }

    #[test]
    fn uniform_grid_has_no_contour() {
        let g = SdfGrid::new(4, vec![1.0; 16], Frame::IDENTITY).unwrap();
        assert_eq!(extract_contour(&g).unwrap_err(), Error::NoZeroCrossing);
    }

    #[test]
    fn square_contour_is_ccw_and_close() {
        let g = polygon_sdf(&unit_square(), 40, 0.05).unwrap();
        let c = extract_contour(&g).unwrap();
        assert!(c.signed_area() > 0.0);
        let (sq, _) = normalize_unit(&unit_square(), 0.05).unwrap();
        let h = boundary_hausdorff(&c.points, sq.vertices(), 20);
        assert!(h <= 0.5 * g.cell_width(), "hausdorff {h}");
    }

    #[test]
    fn visvalingam_identity_and_errors() {
        let line = Polyline { points: circle(10, 0.3) };
        let p = visvalingam_simplify(&line, 10).unwrap();
        assert_eq!(p.vertices(), &line.points[..]);
        assert!(matches!(
            visvalingam_simplify(&line, 11),
            Err(Error::TooFewPoints { got: 10, need: 11 })
        ));
    }

    #[test]
    fn visvalingam_drops_collinear_points_first() {
        let mut pts = Vec::new();
        let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        for s in 0..4 {
            let a = Point::from(corners[s]);
            let b = Point::from(corners[(s + 1) % 4]);
            for k in 0..25 {
                pts.push(a.lerp(b, k as f64 / 25.0));
            }
        }
        let p = visvalingam_simplify(&Polyline { points: pts }, 4).unwrap();
        let want: Vec<Point> = corners.iter().map(|&c| Point::from(c)).collect();
        assert_eq!(p.vertices(), &want[..]);
    }

    #[test]
    fn visvalingam_circle_spacing() {
        let p = visvalingam_simplify(&Polyline { points: circle(100, 0.4) }, 25).unwrap();
        assert_eq!(p.len(), 25);
        let gaps: Vec<f64> = p.edges().map(|(a, b)| a.dist(b)).collect();
        let max = gaps.iter().cloned().fold(0.0, f64::max);
        let min = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 2.0, "spacing ratio {}", max / min);
    }

    #[test]
    fn visvalingam_is_deterministic() {
        let line = Polyline { points: circle(64, 0.3) };
        assert_eq!(visvalingam_simplify(&line, 12).unwrap(), visvalingam_simplify(&line, 12).unwrap());
    }

    #[test]
    fn square_round_trip() {
        let r = sdf_round_trip_detailed(&unit_square(), 40, 25, 0.05).unwrap();
        assert_eq!(r.polygon.len(), 25);
        assert!(is_simple(&r.polygon));
        let (sq, _) = normalize_unit(&unit_square(), 0.05).unwrap();
        let h = boundary_hausdorff(r.normalized.vertices(), sq.vertices(), 20);
        assert!(h <= 2.0 * r.grid.cell_width());
    }

    #[test]
    fn binary_format_round_trip() {
        let g = polygon_sdf(&unit_square(), 8, 0.05).unwrap();
        let mut buf = Vec::new();
        write_sdf(&g, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 64 * 4);
        assert_eq!(&buf[0..4], b"VSDF");
        let back = read_sdf(&buf[..], g.frame()).unwrap();
        for (a, b) in back.values().iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-6);
        }
        // a positive-inside producer is flipped on load
        buf[6] = 0;
        let flipped = read_sdf(&buf[..], g.frame()).unwrap();
        assert!((flipped.value(4, 4) + g.value(4, 4)).abs() < 1e-6);
        assert!(read_sdf(&b"nope"[..], Frame::IDENTITY).is_err());
    }

    #[test]
    fn pgm_header() {
        let g = polygon_sdf(&unit_square(), 8, 0.05).unwrap();
        let mut buf = Vec::new();
        write_pgm(&g, &mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n8 8\n255\n"));
        assert_eq!(buf.len(), 11 + 64);
    }
}
