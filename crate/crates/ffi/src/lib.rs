//! C ABI over `polyvis`. Objects are opaque heap handles created by
//! `pv_*_new`-style constructors and released with the matching `pv_*_free`.
//! Fallible calls return a [`PvStatus`]; the message of the last failure on
//! the calling thread is available from [`pv_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polyvis::metrics::edge_confusion;
use polyvis::polygen::{rng_from_seed, random_simple_polygon_with};
use polyvis::sdf::{polygon_sdf, sdf_round_trip_detailed};
use polyvis::triangulate::{cdt, flip_path, triangulation_graph};
use polyvis::visibility::{graph_density, link_diameter, visibility_graph};
use polyvis::{geom, Error, Point, Polygon, SdfGrid, Triangulation, VisGraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonSimple = 3,
    SizeMismatch = 4,
    BufferTooSmall = 5,
    NoZeroCrossing = 6,
    GenerationFailed = 7,
    Disconnected = 8,
    Panic = 9,
    Other = 10,
}

fn status_of(e: &Error) -> PvStatus {
    match e {
        Error::TooFewVertices(_)
        | Error::NonFinite(_)
        | Error::RepeatedVertex(..)
        | Error::InvalidConfig(_)
        | Error::InvalidThreshold(_)
        | Error::DegenerateExtent
        | Error::TooFewPoints { .. }
        | Error::EmptyInput => PvStatus::InvalidArgument,
        Error::NonSimpleInput | Error::HoleNotInside => PvStatus::NonSimple,
        Error::SizeMismatch(..) => PvStatus::SizeMismatch,
        Error::NoZeroCrossing => PvStatus::NoZeroCrossing,
        Error::IterationLimit(_) | Error::ClassConstructionFailed(..) | Error::AugmentExhausted { .. } => {
            PvStatus::GenerationFailed
        }
        _ => PvStatus::Other,
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (PvStatus, String)>) -> PvStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PvStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside polyvis");
            PvStatus::Panic
        }
    }
}

fn lib<T>(r: polyvis::Result<T>) -> Result<T, (PvStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (PvStatus, String) {
    (PvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (PvStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (PvStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Opaque polygon.
pub struct PvPolygon(Polygon);
/// Opaque symmetric graph over polygon vertices.
pub struct PvVisGraph(VisGraph);
/// Opaque polygon triangulation.
pub struct PvTriangulation(Triangulation);
/// Opaque signed distance grid.
pub struct PvSdfGrid(SdfGrid);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PvConfusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Polygon from `n` interleaved `x, y` pairs.
///
/// # Safety
/// `xy` must point to `2 * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_polygon_new(xy: *const f64, n: usize, out: *mut *mut PvPolygon) -> PvStatus {
    guard(|| {
        if xy.is_null() {
            return Err(null("xy"));
        }
        let c = std::slice::from_raw_parts(xy, 2 * n);
        let pts = c.chunks_exact(2).map(|p| Point::new(p[0], p[1])).collect();
        put(out, PvPolygon(lib(Polygon::new(pts))?))
    })
}

/// Random simple CCW polygon with `n` vertices.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_polygon_random(n: usize, seed: u64, out: *mut *mut PvPolygon) -> PvStatus {
    guard(|| {
        let mut rng = rng_from_seed(seed);
        let p = lib(random_simple_polygon_with(n, 10 * n * n.max(3), &mut rng))?;
        put(out, PvPolygon(p))
    })
}

/// # Safety
/// `p` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pv_polygon_free(p: *mut PvPolygon) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Vertex count; 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pv_polygon_len(p: *const PvPolygon) -> usize {
    p.as_ref().map_or(0, |p| p.0.len())
}

/// Copies interleaved coordinates into `out` (capacity `cap` doubles).
///
/// # Safety
/// `p` must be live; `out` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn pv_polygon_coords(p: *const PvPolygon, out: *mut f64, cap: usize) -> PvStatus {
    guard(|| {
        let p = deref(p, "polygon")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let need = 2 * p.0.len();
        if cap < need {
            return Err((PvStatus::BufferTooSmall, format!("need {need} doubles, got {cap}")));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (k, v) in p.0.vertices().iter().enumerate() {
            dst[2 * k] = v.x;
            dst[2 * k + 1] = v.y;
        }
        Ok(())
    })
}

/// 1 if simple, 0 if not or null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pv_polygon_is_simple(p: *const PvPolygon) -> i32 {
    p.as_ref().is_some_and(|p| geom::is_simple(&p.0)) as i32
}

/// # Safety
/// `p` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_visibility_graph(p: *const PvPolygon, out: *mut *mut PvVisGraph) -> PvStatus {
    guard(|| {
        let p = deref(p, "polygon")?;
        put(out, PvVisGraph(lib(visibility_graph(&p.0))?))
    })
}

/// # Safety
/// `g` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pv_graph_free(g: *mut PvVisGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn pv_graph_n(g: *const PvVisGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// 1 when `i` and `j` are adjacent; 0 otherwise, including out of range.
///
/// # Safety
/// `g` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn pv_graph_has_edge(g: *const PvVisGraph, i: usize, j: usize) -> i32 {
    g.as_ref().is_some_and(|g| i < g.0.n() && j < g.0.n() && g.0.has_edge(i, j)) as i32
}

/// # Safety
/// `g` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn pv_graph_edge_count(g: *const PvVisGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// # Safety
/// `g` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn pv_graph_density(g: *const PvVisGraph) -> f64 {
    g.as_ref().map_or(0.0, |g| graph_density(&g.0))
}

/// Link diameter; `Disconnected` when some pair is unreachable.
///
/// # Safety
/// `g` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_graph_link_diameter(g: *const PvVisGraph, out: *mut usize) -> PvStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        if out.is_null() {
            return Err(null("out"));
        }
        match link_diameter(&g.0) {
            Some(d) => {
                *out = d;
                Ok(())
            }
            None => Err((PvStatus::Disconnected, "graph is disconnected".into())),
        }
    })
}

/// Lower-triangular base64 encoding; release with [`pv_string_free`].
/// Null on a null handle.
///
/// # Safety
/// `g` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn pv_graph_to_base64(g: *const PvVisGraph) -> *mut c_char {
    g.as_ref()
        .and_then(|g| CString::new(g.0.to_base64()).ok())
        .map_or(ptr::null_mut(), CString::into_raw)
}

/// Graph from its lower-triangular base64 encoding.
///
/// # Safety
/// `s` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_graph_from_base64(n: usize, s: *const c_char, out: *mut *mut PvVisGraph) -> PvStatus {
    guard(|| {
        if s.is_null() {
            return Err(null("s"));
        }
        let text = std::ffi::CStr::from_ptr(s)
            .to_str()
            .map_err(|e| (PvStatus::InvalidArgument, e.to_string()))?;
        put(out, PvVisGraph(lib(VisGraph::from_base64(n, text))?))
    })
}

/// Edge classification counts and scores of `pred` against `truth`.
///
/// # Safety
/// Both handles live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_edge_confusion(
    pred: *const PvVisGraph,
    truth: *const PvVisGraph,
    out: *mut PvConfusion,
) -> PvStatus {
    guard(|| {
        let (p, t) = (deref(pred, "pred")?, deref(truth, "truth")?);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let c = lib(edge_confusion(&p.0, &t.0))?;
        *out = PvConfusion {
            tp: c.tp,
            fp: c.fp,
            tn: c.tn,
            fn_: c.fn_,
            accuracy: c.accuracy(),
            precision: c.precision(),
            recall: c.recall(),
            f1: c.f1(),
        };
        Ok(())
    })
}

/// Constrained Delaunay triangulation.
///
/// # Safety
/// `p` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_cdt(p: *const PvPolygon, out: *mut *mut PvTriangulation) -> PvStatus {
    guard(|| {
        let p = deref(p, "polygon")?;
        put(out, PvTriangulation(lib(cdt(&p.0))?))
    })
}

/// # Safety
/// `t` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pv_triangulation_free(t: *mut PvTriangulation) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn pv_triangulation_diagonal_count(t: *const PvTriangulation) -> usize {
    t.as_ref().map_or(0, |t| t.0.diagonal_count())
}

/// Copies sorted diagonals as interleaved `i, j` pairs (capacity `cap`).
///
/// # Safety
/// `t` live; `out` holds `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn pv_triangulation_diagonals(t: *const PvTriangulation, out: *mut usize, cap: usize) -> PvStatus {
    guard(|| {
        let t = deref(t, "triangulation")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let need = 2 * t.0.diagonal_count();
        if cap < need {
            return Err((PvStatus::BufferTooSmall, format!("need {need} entries, got {cap}")));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (k, (i, j)) in t.0.diagonals().enumerate() {
            dst[2 * k] = i;
            dst[2 * k + 1] = j;
        }
        Ok(())
    })
}

/// Boundary cycle plus diagonals.
///
/// # Safety
/// `t` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_triangulation_graph(t: *const PvTriangulation, out: *mut *mut PvVisGraph) -> PvStatus {
    guard(|| {
        let t = deref(t, "triangulation")?;
        put(out, PvVisGraph(triangulation_graph(&t.0)))
    })
}

/// Number of flips on the route from `a` through the vertex-0 fan to `b`.
///
/// # Safety
/// Both handles live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_flip_path_length(
    a: *const PvTriangulation,
    b: *const PvTriangulation,
    out: *mut usize,
) -> PvStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lib(flip_path(&a.0, &b.0))?.len();
        Ok(())
    })
}

/// Signed distance grid, negative inside.
///
/// # Safety
/// `p` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_sdf(p: *const PvPolygon, res: usize, margin: f64, out: *mut *mut PvSdfGrid) -> PvStatus {
    guard(|| {
        let p = deref(p, "polygon")?;
        put(out, PvSdfGrid(lib(polygon_sdf(&p.0, res, margin))?))
    })
}

/// # Safety
/// `g` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pv_sdf_free(g: *mut PvSdfGrid) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn pv_sdf_res(g: *const PvSdfGrid) -> usize {
    g.as_ref().map_or(0, |g| g.0.res())
}

/// Copies `res * res` row-major values, row 0 at the bottom.
///
/// # Safety
/// `g` live; `out` holds `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn pv_sdf_values(g: *const PvSdfGrid, out: *mut f64, cap: usize) -> PvStatus {
    guard(|| {
        let g = deref(g, "grid")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = g.0.values();
        if cap < v.len() {
            return Err((PvStatus::BufferTooSmall, format!("need {} doubles, got {cap}", v.len())));
        }
        std::slice::from_raw_parts_mut(out, v.len()).copy_from_slice(v);
        Ok(())
    })
}

/// Rasterize at `res`, contour, simplify to `k` vertices, map back.
///
/// # Safety
/// `p` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_sdf_round_trip(
    p: *const PvPolygon,
    res: usize,
    k: usize,
    out: *mut *mut PvPolygon,
) -> PvStatus {
    guard(|| {
        let p = deref(p, "polygon")?;
        let r = lib(sdf_round_trip_detailed(&p.0, res, k, polyvis::sdf::DEFAULT_MARGIN))?;
        put(out, PvPolygon(r.polygon))
    })
}
