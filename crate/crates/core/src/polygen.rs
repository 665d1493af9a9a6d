//! Random simple polygon generation.
//!
//! * [`random_simple_polygon`]: uniform points in `[-1, 1]^2` untangled by
//!   2-opt moves.
//! * Typed families ([`gen_star`], [`gen_terrain`], [`gen_convex_fan`],
//!   [`gen_anchor`], [`gen_spiral`]), each with a certificate checker that
//!   proves class membership of the emitted instance.
//! * [`augment`]: shear plus vertex jitter, rejection-sampled so the
//!   visibility graph is bit-identical to the source.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    ensure_ccw, is_simple, orient, segment_in_polygon, segment_visible, segments_intersect,
    signed_area, Orientation, Point, Polygon,
};
use crate::visibility::{link_diameter, visibility_graph, VisGraph};

/// Seeded generator used everywhere a reproducible stream is needed.
pub type GenRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// How many fresh point sets `random_simple_polygon` draws before giving up.
const MAX_POINT_DRAWS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub n: usize,
    pub seed: u64,
    pub max_2opt_iters: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n: 25,
            seed: 0,
            max_2opt_iters: 10_000,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidConfig(format!("n = {} < 3", self.n)));
        }
        if self.max_2opt_iters < self.n * self.n {
            return Err(Error::InvalidConfig(format!(
                "max_2opt_iters = {} < n^2 = {}",
                self.max_2opt_iters,
                self.n * self.n
            )));
        }
        Ok(())
    }
}

/// Uniformly scales and translates so the bounding box is centered at the
/// origin and its longer side spans `[-1, 1]`.
pub fn fit_to_canvas(poly: &Polygon) -> Polygon {
    let (lo, hi) = poly.bounding_box();
    let c = lo.midpoint(hi);
    let ext = (hi.x - lo.x).max(hi.y - lo.y);
    let s = if ext > 0.0 { 2.0 / ext } else { 1.0 };
    Polygon::from_vertices_unchecked(poly.vertices().iter().map(|&p| (p - c) * s).collect())
}

fn crossing_pairs(pts: &[Point]) -> Vec<(usize, usize)> {
    let n = pts.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(pts[i], pts[i + 1], pts[j], pts[(j + 1) % n]) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Reorders `pts` into a simple ring by repeated 2-opt moves: pick a
/// crossing pair of edges `(i, i+1)`, `(j, j+1)` and reverse the chain
/// `i+1 ..= j`. Each move strictly shortens the tour, so it terminates.
pub fn two_opt_untangle<R: Rng + ?Sized>(
    mut pts: Vec<Point>,
    max_moves: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    for _ in 0..=max_moves {
        let crossings = crossing_pairs(&pts);
        let Some(&(i, j)) = crossings.choose(rng) else {
            return Ok(pts);
        };
        pts[i + 1..=j].reverse();
    }
    Err(Error::IterationLimit(max_moves))
}

/// 2-opt polygon on `n` uniform points, CCW and fit to the canvas.
pub fn random_simple_polygon_with<R: Rng + ?Sized>(
    n: usize,
    max_moves: usize,
    rng: &mut R,
) -> Result<Polygon> {
    let mut last = Error::IterationLimit(max_moves);
    for _ in 0..MAX_POINT_DRAWS {
        let mut pts: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        pts.shuffle(rng);
        let ring = match two_opt_untangle(pts, max_moves, rng) {
            Ok(r) => r,
            Err(e) => {
                last = e;
                continue;
            }
        };
        let Ok(poly) = Polygon::new(ring) else {
            continue;
        };
        if is_simple(&poly) {
            return Ok(fit_to_canvas(&ensure_ccw(&poly)));
        }
    }
    Err(last)
}

pub fn random_simple_polygon(cfg: &GenConfig) -> Result<Polygon> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    random_simple_polygon_with(cfg.n, cfg.max_2opt_iters, &mut rng)
}

/// Polygon families used for the out-of-distribution test sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Random,
    Star,
    Terrain,
    Fan,
    Anchor,
    Spiral,
    HoleInvalid,
}

impl Family {
    pub const TYPED: [Family; 5] = [
        Family::Star,
        Family::Terrain,
        Family::Fan,
        Family::Anchor,
        Family::Spiral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::Star => "star",
            Family::Terrain => "terrain",
            Family::Fan => "fan",
            Family::Anchor => "anchor",
            Family::Spiral => "spiral",
            Family::HoleInvalid => "hole_invalid",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random" => Family::Random,
            "star" => Family::Star,
            "terrain" => Family::Terrain,
            "fan" | "convex_fan" | "convex-fan" => Family::Fan,
            "anchor" => Family::Anchor,
            "spiral" => Family::Spiral,
            "hole_invalid" | "hole" => Family::HoleInvalid,
            other => return Err(Error::InvalidConfig(format!("unknown family {other:?}"))),
        })
    }
}

/// Knobs shared by the typed generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyConfig {
    /// Attempts before `ClassConstructionFailed`.
    pub max_retries: usize,
    /// Minimum link diameter a spiral must reach.
    pub spiral_min_diameter: usize,
    pub fan_chain: FanChain,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            max_retries: 200,
            spiral_min_diameter: 6,
            fan_chain: FanChain::Reflex,
        }
    }
}

/// Shape of the chain opposite the apex of a fan polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FanChain {
    /// Every chain vertex except the two next to the apex is reflex.
    Reflex,
    /// Convex polygon; the apex is vertex 0.
    Convex,
}

fn retry<R: Rng + ?Sized>(
    class: &'static str,
    tries: usize,
    rng: &mut R,
    mut build: impl FnMut(&mut R) -> Option<Polygon>,
    certify: impl Fn(&Polygon) -> bool,
) -> Result<Polygon> {
    for _ in 0..tries.max(1) {
        if let Some(p) = build(rng) {
            let p = fit_to_canvas(&p);
            if is_simple(&p) && signed_area(&p) > 0.0 && certify(&p) {
                return Ok(p);
            }
        }
    }
    Err(Error::ClassConstructionFailed(class, tries.max(1)))
}

fn check_family_n(n: usize) -> Result<()> {
    if n < 5 {
        return Err(Error::InvalidConfig(format!("typed generators need n >= 5, got {n}")));
    }
    Ok(())
}

/// Sorted angles in `[0, TAU)` with every cyclic gap in `[min_gap, max_gap]`.
fn sorted_angles<R: Rng + ?Sized>(n: usize, min_gap: f64, max_gap: f64, rng: &mut R) -> Option<Vec<f64>> {
    let mut a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
    a.sort_by(f64::total_cmp);
    let ok = (0..n).all(|i| {
        let g = if i + 1 < n { a[i + 1] - a[i] } else { a[0] + TAU - a[i] };
        g >= min_gap && g <= max_gap
    });
    ok.then_some(a)
}

pub fn gen_star<R: Rng + ?Sized>(n: usize, cfg: &FamilyConfig, rng: &mut R) -> Result<Polygon> {
    check_family_n(n)?;
    retry(
        "star",
        cfg.max_retries,
        rng,
        |rng| {
            let angles = sorted_angles(n, 0.02, 0.9 * PI, rng)?;
            let pts = angles
                .iter()
                .map(|&t| {
                    let r = rng.random_range(0.15..1.0);
                    Point::new(r * t.cos(), r * t.sin())
                })
                .collect();
            Polygon::new(pts).ok()
        },
        |p| star_kernel_point(p).is_some(),
    )
}

/// Clips `poly` by the closed half-plane left of `a -> b`.
fn clip_left(poly: &[Point], a: Point, b: Point) -> Vec<Point> {
    let side = |p: Point| (b - a).cross(p - a);
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        let (sp, sq) = (side(p), side(q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            out.push(p.lerp(q, sp / (sp - sq)));
        }
    }
    out
}

/// Kernel of a CCW polygon as a convex ring (possibly empty), computed by
/// half-plane clipping of a bounding square.
pub fn kernel(poly: &Polygon) -> Vec<Point> {
    let (lo, hi) = poly.bounding_box();
    let mut k = vec![lo, Point::new(hi.x, lo.y), hi, Point::new(lo.x, hi.y)];
    for (a, b) in poly.edges() {
        k = clip_left(&k, a, b);
        if k.is_empty() {
            break;
        }
    }
    k
}

/// A point that sees every vertex, verified by segment containment.
pub fn star_kernel_point(poly: &Polygon) -> Option<Point> {
    let k = kernel(poly);
    if k.len() < 3 {
        return None;
    }
    let area: f64 = 0.5
        * (0..k.len())
            .map(|i| k[i].cross(k[(i + 1) % k.len()]))
            .sum::<f64>();
    if area <= 1e-9 {
        return None;
    }
    let c = k.iter().fold(Point::default(), |s, &p| s + p) * (1.0 / k.len() as f64);
    poly.vertices()
        .iter()
        .all(|&v| segment_in_polygon(c, v, poly))
        .then_some(c)
}

/// x-monotone chain closed by a horizontal baseline.
pub fn gen_terrain<R: Rng + ?Sized>(n: usize, cfg: &FamilyConfig, rng: &mut R) -> Result<Polygon> {
    check_family_n(n)?;
    retry(
        "terrain",
        cfg.max_retries,
        rng,
        |rng| {
            let m = n - 2;
            let mut xs: Vec<f64> = (0..m).map(|_| rng.random_range(-0.98..0.98)).collect();
            xs.sort_by(f64::total_cmp);
            if xs.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                return None;
            }
            let mut pts = vec![Point::new(-1.0, -1.0), Point::new(1.0, -1.0)];
            pts.extend(
                xs.iter()
                    .rev()
                    .map(|&x| Point::new(x, rng.random_range(-0.8..1.0))),
            );
            Polygon::new(pts).ok()
        },
        is_x_monotone,
    )
}

/// The boundary splits at its leftmost and rightmost vertices into two
/// chains that are monotone in x.
pub fn is_x_monotone(poly: &Polygon) -> bool {
    let v = poly.vertices();
    let n = v.len();
    let lmost = (0..n).min_by(|&a, &b| v[a].x.total_cmp(&v[b].x)).unwrap();
    let rmost = (0..n).max_by(|&a, &b| v[a].x.total_cmp(&v[b].x)).unwrap();
    let mut i = lmost;
    while i != rmost {
        let j = (i + 1) % n;
        if v[j].x < v[i].x {
            return false;
        }
        i = j;
    }
    while i != lmost {
        let j = (i + 1) % n;
        if v[j].x > v[i].x {
            return false;
        }
        i = j;
    }
    true
}

/// Vertex 0 is the apex; it sees every other vertex.
pub fn gen_convex_fan<R: Rng + ?Sized>(n: usize, cfg: &FamilyConfig, rng: &mut R) -> Result<Polygon> {
    check_family_n(n)?;
    let chain = cfg.fan_chain;
    retry(
        "fan",
        cfg.max_retries,
        rng,
        |rng| match chain {
            FanChain::Convex => {
                let angles = sorted_angles(n, 0.01, PI, rng)?;
                let pts = angles.iter().map(|&t| Point::new(t.cos(), t.sin())).collect();
                Polygon::new(pts).ok()
            }
            FanChain::Reflex => {
                // chain on the near arc of a circle above the apex, so it
                // bulges toward the apex
                let gap = rng.random_range(0.25..0.8);
                let center = Point::new(0.0, 1.0 + gap);
                let visible = (1.0 / (1.0 + gap)).acos();
                let half = 0.85 * visible;
                let mut ts: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-half..half)).collect();
                ts.sort_by(|a, b| b.total_cmp(a));
                if ts.windows(2).any(|w| w[0] - w[1] < 1e-3) {
                    return None;
                }
                let mut pts = vec![Point::new(0.0, 0.0)];
                pts.extend(ts.iter().map(|&t| {
                    let a = t - FRAC_PI_2;
                    center + Point::new(a.cos(), a.sin())
                }));
                Polygon::new(pts).ok()
            }
        },
        |p| fan_apex(p) == Some(0),
    )
}

/// Lowest-index vertex that sees all others.
pub fn fan_apex(poly: &Polygon) -> Option<usize> {
    let g = visibility_graph(poly).ok()?;
    (0..poly.len()).find(|&i| g.degree(i) == poly.len() - 1)
}

/// Corridor winding inward around the origin: the outer wall is a convex
/// chain, the inner wall a reflex chain.
pub fn gen_spiral<R: Rng + ?Sized>(n: usize, cfg: &FamilyConfig, rng: &mut R) -> Result<Polygon> {
    check_family_n(n)?;
    let floor = cfg.spiral_min_diameter;
    retry(
        "spiral",
        cfg.max_retries,
        rng,
        |rng| {
            let turns = rng.random_range(1.4..1.9);
            let span = turns * TAU;
            let r_end = rng.random_range(0.2..0.3);
            let width = rng.random_range(0.08..0.12);
            let outer_n = n.div_ceil(2);
            let inner_n = n - outer_n;
            let radius = |t: f64| 1.0 - (1.0 - r_end) * t / span;
            let arm = |m: usize, offset: f64, rng: &mut R| -> Vec<Point> {
                let step = span / (m - 1) as f64;
                (0..m)
                    .map(|k| {
                        let jitter = if k == 0 || k == m - 1 {
                            0.0
                        } else {
                            rng.random_range(-0.2..0.2) * step
                        };
                        let t = k as f64 * step + jitter;
                        let r = radius(t) - offset;
                        Point::new(r * t.cos(), r * t.sin())
                    })
                    .collect()
            };
            let mut pts = arm(outer_n, 0.0, rng);
            let mut inner = arm(inner_n, width, rng);
            inner.reverse();
            pts.extend(inner);
            Polygon::new(pts).ok()
        },
        |p| link_diameter_of(p).is_some_and(|d| d >= floor),
    )
}

fn link_diameter_of(p: &Polygon) -> Option<usize> {
    visibility_graph(p).ok().and_then(|g| link_diameter(&g))
}

/// Maximal cyclic runs of consecutive reflex vertices.
pub fn reflex_chains(poly: &Polygon) -> usize {
    let n = poly.len();
    let reflex: Vec<bool> = (0..n).map(|i| poly.is_reflex(i)).collect();
    if reflex.iter().all(|&r| r) {
        return 1;
    }
    (0..n).filter(|&i| reflex[i] && !reflex[(i + n - 1) % n]).count()
}

/// S-shaped corridor: two arcs bending in opposite directions, giving two
/// reflex chains joined through convex walls.
pub fn gen_anchor<R: Rng + ?Sized>(n: usize, cfg: &FamilyConfig, rng: &mut R) -> Result<Polygon> {
    check_family_n(n)?;
    retry(
        "anchor",
        cfg.max_retries,
        rng,
        |rng| {
            let radius = 1.0;
            let width = rng.random_range(0.3..0.6);
            let sweep = rng.random_range(0.75..1.0) * PI;
            // centerline: arc about (0, R) turning left, then arc about
            // (0, 3R)-ish turning right
            let c1 = Point::new(0.0, radius);
            let join = c1 + Point::new(sweep.sin(), -sweep.cos()) * radius;
            let c2 = c1 + (join - c1) * 2.0;
            let center = |s: f64| -> (Point, Point) {
                // s in [0, 2]; returns (point, left normal)
                if s <= 1.0 {
                    let a = -FRAC_PI_2 + s * sweep;
                    let dir = Point::new(a.cos(), a.sin());
                    (c1 + dir * radius, dir * -1.0)
                } else {
                    let a0 = (join - c2).y.atan2((join - c2).x);
                    let a = a0 - (s - 1.0) * sweep;
                    let dir = Point::new(a.cos(), a.sin());
                    (c2 + dir * radius, dir)
                }
            };
            let right_n = n.div_ceil(2);
            let left_n = n - right_n;
            let side = |m: usize, sign: f64, rng: &mut R| -> Vec<Point> {
                (0..m)
                    .map(|k| {
                        let base = 2.0 * k as f64 / (m - 1) as f64;
                        let s = if k == 0 || k == m - 1 {
                            base
                        } else {
                            (base + rng.random_range(-0.15..0.15) / (m - 1) as f64).clamp(0.0, 2.0)
                        };
                        let (p, nl) = center(s);
                        p + nl * (sign * 0.5 * width)
                    })
                    .collect()
            };
            let mut pts = side(right_n, -1.0, rng);
            let mut left = side(left_n, 1.0, rng);
            left.reverse();
            pts.extend(left);
            Polygon::new(pts).ok()
        },
        |p| reflex_chains(p) == 2,
    )
}

/// Dispatches to the generator for `family`. `Random` uses 2-opt with
/// `10 n^2` moves.
pub fn generate_family<R: Rng + ?Sized>(
    family: Family,
    n: usize,
    cfg: &FamilyConfig,
    rng: &mut R,
) -> Result<Polygon> {
    match family {
        Family::Random => random_simple_polygon_with(n, 10 * n * n, rng),
        Family::Star => gen_star(n, cfg, rng),
        Family::Terrain => gen_terrain(n, cfg, rng),
        Family::Fan => gen_convex_fan(n, cfg, rng),
        Family::Anchor => gen_anchor(n, cfg, rng),
        Family::Spiral => gen_spiral(n, cfg, rng),
        Family::HoleInvalid => Err(Error::InvalidConfig(
            "hole polygons come from dataset::hole_polygon".into(),
        )),
    }
}

/// Class certificate for a typed instance.
pub fn certify_family(family: Family, poly: &Polygon, cfg: &FamilyConfig) -> bool {
    match family {
        Family::Random => is_simple(poly),
        Family::Star => star_kernel_point(poly).is_some(),
        Family::Terrain => is_x_monotone(poly),
        Family::Fan => fan_apex(poly).is_some(),
        Family::Anchor => reflex_chains(poly) == 2,
        Family::Spiral => link_diameter_of(poly).is_some_and(|d| d >= cfg.spiral_min_diameter),
        Family::HoleInvalid => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentConfig {
    /// Shear factor `s` in `x' = x + s y` is drawn uniformly from this range.
    pub shear_range: (f64, f64),
    /// Per-coordinate Gaussian jitter, canvas units.
    pub perturb_sigma: f64,
    pub max_attempts: usize,
    pub copies: usize,
    /// Halve the jitter after this many consecutive rejections of one copy;
    /// 0 keeps it fixed.
    pub backoff_every: usize,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            shear_range: (-0.5, 0.5),
            perturb_sigma: 0.01,
            max_attempts: 200,
            copies: 20,
            backoff_every: 20,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.shear_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidConfig(format!("bad shear range [{lo}, {hi}]")));
        }
        if !(self.perturb_sigma >= 0.0 && self.perturb_sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("bad perturb_sigma {}", self.perturb_sigma)));
        }
        if self.max_attempts == 0 || self.copies == 0 {
            return Err(Error::InvalidConfig("max_attempts and copies must be >= 1".into()));
        }
        Ok(())
    }
}

/// `copies` polygons sharing the exact visibility graph of `poly`.
pub fn augment<R: Rng + ?Sized>(poly: &Polygon, cfg: &AugmentConfig, rng: &mut R) -> Result<Vec<Polygon>> {
    cfg.validate()?;
    let target = visibility_graph(poly)?;
    let (lo, hi) = cfg.shear_range;
    let mut out = Vec::with_capacity(cfg.copies);
    for copy in 0..cfg.copies {
        let mut accepted = None;
        for attempt in 0..cfg.max_attempts {
            let halvings = attempt.checked_div(cfg.backoff_every).unwrap_or(0);
            let sigma = cfg.perturb_sigma * 0.5f64.powi(halvings.min(1000) as i32);
            let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            let s = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            let mut moved = Vec::with_capacity(poly.len());
            for &p in poly.vertices() {
                let mut q = Point::new(p.x + s * p.y, p.y);
                if sigma > 0.0 {
                    q.x += noise.sample(rng);
                    q.y += noise.sample(rng);
                }
                moved.push(q);
            }
            let Ok(cand) = Polygon::new(moved) else {
                continue;
            };
            let cand = fit_to_canvas(&cand);
            if signed_area(&cand) <= 0.0 || !is_simple(&cand) {
                continue;
            }
            if has_visibility_graph(&cand, &target) {
                accepted = Some(cand);
                break;
            }
        }
        match accepted {
            Some(c) => out.push(c),
            None => {
                return Err(Error::AugmentExhausted {
                    copy,
                    attempts: cfg.max_attempts,
                })
            }
        }
    }
    Ok(out)
}

/// Pairwise comparison against `target` that stops at the first mismatch.
/// `poly` must already be simple.
fn has_visibility_graph(poly: &Polygon, target: &VisGraph) -> bool {
    let n = poly.len();
    if target.n() != n {
        return false;
    }
    (0..n).all(|i| (i + 1..n).all(|j| segment_visible(i, j, poly) == target.has_edge(i, j)))
}

/// Rigid rotation about the vertex centroid, refit to the canvas.
pub fn rotate_augment(poly: &Polygon, angle: f64) -> Polygon {
    let c = poly.centroid();
    let (sin, cos) = angle.sin_cos();
    let rotated: Vec<Point> = poly
        .vertices()
        .iter()
        .map(|&p| {
            let d = p - c;
            Point::new(d.x * cos - d.y * sin, d.x * sin + d.y * cos)
        })
        .collect();
    fit_to_canvas(&Polygon::from_vertices_unchecked(rotated))
}

/// True when every vertex of `p` is a convex turn (CCW input).
pub fn is_convex(p: &Polygon) -> bool {
    (0..p.len()).all(|i| orient(p.vertex(p.prev(i)), p.vertex(i), p.vertex(p.next(i))) != Orientation::Clockwise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{point_in_polygon, PointLocation};
    use crate::visibility::graph_density;

    fn brute_force_simple(p: &Polygon) -> bool {
        let n = p.len();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a, b) = p.edge(i);
                let (c, d) = p.edge(j);
                if adjacent {
                    continue;
                }
                // parametric intersection
                let r = b - a;
                let s = d - c;
                let den = r.cross(s);
                if den.abs() < 1e-15 {
                    continue;
                }
                let t = (c - a).cross(s) / den;
                let u = (c - a).cross(r) / den;
                if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn two_opt_seeded() {
        let cfg = GenConfig { n: 25, seed: 1, ..Default::default() };
        let p = random_simple_polygon(&cfg).unwrap();
        assert_eq!(p.len(), 25);
        assert!(is_simple(&p));
        assert!(signed_area(&p) > 0.0);
        assert_eq!(p, random_simple_polygon(&cfg).unwrap());
        let q = random_simple_polygon(&GenConfig { n: 4, seed: 9, ..Default::default() }).unwrap();
        assert!(is_simple(&q));
    }

    #[test]
    fn two_opt_preserves_point_set() {
        let mut rng = rng_from_seed(5);
        for _ in 0..200 {
            let pts: Vec<Point> = (0..25)
                .map(|_| Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let ring = two_opt_untangle(pts.clone(), 10_000, &mut rng).unwrap();
            let key = |v: &[Point]| {
                let mut k: Vec<(u64, u64)> = v.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
                k.sort();
                k
            };
            assert_eq!(key(&pts), key(&ring));
            let poly = Polygon::new(ring).unwrap();
            assert!(is_simple(&poly));
            assert!(brute_force_simple(&poly));
        }
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig { n: 2, ..Default::default() }.validate().is_err());
        assert!(GenConfig { n: 25, max_2opt_iters: 100, ..Default::default() }
            .validate()
            .is_err());
    }

    #[test]
    fn star_certificate_holds() {
        let mut rng = rng_from_seed(11);
        let cfg = FamilyConfig::default();
        for _ in 0..20 {
            let p = gen_star(25, &cfg, &mut rng).unwrap();
            let k = star_kernel_point(&p).unwrap();
            assert_eq!(point_in_polygon(k, &p), PointLocation::Inside);
            for &v in p.vertices() {
                assert!(segment_in_polygon(k, v, &p));
            }
        }
    }

    #[test]
    fn terrain_vertical_lines_cross_twice_at_most() {
        let mut rng = rng_from_seed(12);
        let cfg = FamilyConfig::default();
        for _ in 0..20 {
            let p = gen_terrain(25, &cfg, &mut rng).unwrap();
            assert!(is_x_monotone(&p));
            for k in 1..400 {
                let x = -1.0 + 2.0 * k as f64 / 400.0 + 1e-7;
                let crossings = p
                    .edges()
                    .filter(|(a, b)| (a.x < x) != (b.x < x))
                    .count();
                assert!(crossings <= 2, "{crossings} crossings at x = {x}");
            }
        }
    }

    #[test]
    fn fan_apex_sees_everything() {
        let mut rng = rng_from_seed(13);
        for chain in [FanChain::Reflex, FanChain::Convex] {
            let cfg = FamilyConfig { fan_chain: chain, ..Default::default() };
            for _ in 0..10 {
                let p = gen_convex_fan(25, &cfg, &mut rng).unwrap();
                let g = visibility_graph(&p).unwrap();
                assert_eq!(g.degree(0), 24);
                if chain == FanChain::Convex {
                    assert!(is_convex(&p));
                    assert_eq!(g, VisGraph::complete(25));
                } else {
                    assert!((2..24).all(|i| p.is_reflex(i)));
                }
            }
        }
    }

    #[test]
    fn spiral_has_long_diameter() {
        let mut rng = rng_from_seed(14);
        let cfg = FamilyConfig::default();
        for _ in 0..10 {
            let p = gen_spiral(25, &cfg, &mut rng).unwrap();
            let g = visibility_graph(&p).unwrap();
            assert!(link_diameter(&g).unwrap() >= 6);
        }
    }

    #[test]
    fn anchor_has_two_reflex_chains() {
        let mut rng = rng_from_seed(15);
        let cfg = FamilyConfig::default();
        for _ in 0..10 {
            let p = gen_anchor(25, &cfg, &mut rng).unwrap();
            assert_eq!(reflex_chains(&p), 2);
            assert!(is_simple(&p));
        }
    }

    #[test]
    fn star_denser_than_cycle() {
        let mut rng = rng_from_seed(16);
        let p = gen_star(25, &FamilyConfig::default(), &mut rng).unwrap();
        let g = visibility_graph(&p).unwrap();
        assert!(graph_density(&g) > 2.0 * graph_density(&VisGraph::cycle(25)));
    }

    #[test]
    fn typed_generators_need_five_vertices() {
        let mut rng = rng_from_seed(0);
        assert!(gen_star(4, &FamilyConfig::default(), &mut rng).is_err());
    }

    #[test]
    fn identity_augment_is_refit_only() {
        let mut rng = rng_from_seed(3);
        let p = random_simple_polygon_with(25, 10_000, &mut rng).unwrap();
        let cfg = AugmentConfig {
            shear_range: (0.0, 0.0),
            perturb_sigma: 0.0,
            copies: 1,
            ..Default::default()
        };
        let out = augment(&p, &cfg, &mut rng).unwrap();
        let refit = fit_to_canvas(&p);
        for (a, b) in out[0].vertices().iter().zip(refit.vertices()) {
            assert!(a.dist(*b) < 1e-15);
        }
    }

    #[test]
    fn shear_keeps_convex_complete() {
        let mut rng = rng_from_seed(4);
        let p = gen_convex_fan(25, &FamilyConfig { fan_chain: FanChain::Convex, ..Default::default() }, &mut rng)
            .unwrap();
        let cfg = AugmentConfig {
            shear_range: (0.3, 0.3),
            perturb_sigma: 0.0,
            copies: 3,
            ..Default::default()
        };
        for a in augment(&p, &cfg, &mut rng).unwrap() {
            assert_eq!(visibility_graph(&a).unwrap(), VisGraph::complete(25));
        }
    }

    #[test]
    fn augment_preserves_graph() {
        let mut rng = rng_from_seed(21);
        let cfg = AugmentConfig { copies: 5, ..Default::default() };
        for _ in 0..5 {
            let p = random_simple_polygon_with(25, 10_000, &mut rng).unwrap();
            let g = visibility_graph(&p).unwrap();
            for a in augment(&p, &cfg, &mut rng).unwrap() {
                assert_eq!(visibility_graph(&a).unwrap(), g);
                let (lo, hi) = a.bounding_box();
                assert!(lo.x >= -1.0 - 1e-12 && hi.x <= 1.0 + 1e-12);
                assert!(lo.y >= -1.0 - 1e-12 && hi.y <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn rotation_identity_and_half_turn() {
        let sq = Polygon::from_coords(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let same = rotate_augment(&sq, 0.0);
        assert_eq!(same, sq);
        let half = rotate_augment(&sq, PI);
        for (a, b) in half.vertices().iter().zip(sq.vertices()) {
            assert!(a.dist(Point::new(-b.x, -b.y)) < 1e-12);
        }
    }
}
