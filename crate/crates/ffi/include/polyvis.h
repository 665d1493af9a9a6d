#ifndef POLYVIS_H
#define POLYVIS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PvStatus {
  PV_STATUS_OK = 0,
  PV_STATUS_NULL_POINTER = 1,
  PV_STATUS_INVALID_ARGUMENT = 2,
  PV_STATUS_NON_SIMPLE = 3,
  PV_STATUS_SIZE_MISMATCH = 4,
  PV_STATUS_BUFFER_TOO_SMALL = 5,
  PV_STATUS_NO_ZERO_CROSSING = 6,
  PV_STATUS_GENERATION_FAILED = 7,
  PV_STATUS_DISCONNECTED = 8,
  PV_STATUS_PANIC = 9,
  PV_STATUS_OTHER = 10,
} PvStatus;

/**
 * Opaque polygon.
 */
typedef struct PvPolygon PvPolygon;

/**
 * Opaque signed distance grid.
 */
typedef struct PvSdfGrid PvSdfGrid;

/**
 * Opaque polygon triangulation.
 */
typedef struct PvTriangulation PvTriangulation;

/**
 * Opaque symmetric graph over polygon vertices.
 */
typedef struct PvVisGraph PvVisGraph;

typedef struct PvConfusion {
  size_t tp;
  size_t fp;
  size_t tn;
  size_t fn_;
  double accuracy;
  double precision;
  double recall;
  double f1;
} PvConfusion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *pv_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void pv_string_free(char *s);

/**
 * Polygon from `n` interleaved `x, y` pairs.
 *
 * # Safety
 * `xy` must point to `2 * n` doubles; `out` must be writable.
 */
enum PvStatus pv_polygon_new(const double *xy, size_t n, struct PvPolygon **out);

/**
 * Random simple CCW polygon with `n` vertices.
 *
 * # Safety
 * `out` must be writable.
 */
enum PvStatus pv_polygon_random(size_t n, uint64_t seed, struct PvPolygon **out);

/**
 * # Safety
 * `p` must come from this library and not be freed twice.
 */
void pv_polygon_free(struct PvPolygon *p);

/**
 * Vertex count; 0 for null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t pv_polygon_len(const struct PvPolygon *p);

/**
 * Copies interleaved coordinates into `out` (capacity `cap` doubles).
 *
 * # Safety
 * `p` must be live; `out` must hold `cap` doubles.
 */
enum PvStatus pv_polygon_coords(const struct PvPolygon *p, double *out, size_t cap);

/**
 * 1 if simple, 0 if not or null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
int32_t pv_polygon_is_simple(const struct PvPolygon *p);

/**
 * # Safety
 * `p` must be live; `out` writable.
 */
enum PvStatus pv_visibility_graph(const struct PvPolygon *p, struct PvVisGraph **out);

/**
 * # Safety
 * `g` must come from this library and not be freed twice.
 */
void pv_graph_free(struct PvVisGraph *g);

/**
 * # Safety
 * `g` must be null or live.
 */
size_t pv_graph_n(const struct PvVisGraph *g);

/**
 * 1 when `i` and `j` are adjacent; 0 otherwise, including out of range.
 *
 * # Safety
 * `g` must be null or live.
 */
int32_t pv_graph_has_edge(const struct PvVisGraph *g, size_t i, size_t j);

/**
 * # Safety
 * `g` must be null or live.
 */
size_t pv_graph_edge_count(const struct PvVisGraph *g);

/**
 * # Safety
 * `g` must be null or live.
 */
double pv_graph_density(const struct PvVisGraph *g);

/**
 * Link diameter; `Disconnected` when some pair is unreachable.
 *
 * # Safety
 * `g` must be live; `out` writable.
 */
enum PvStatus pv_graph_link_diameter(const struct PvVisGraph *g, size_t *out);

/**
 * Lower-triangular base64 encoding; release with [`pv_string_free`].
 * Null on a null handle.
 *
 * # Safety
 * `g` must be null or live.
 */
char *pv_graph_to_base64(const struct PvVisGraph *g);

/**
 * Graph from its lower-triangular base64 encoding.
 *
 * # Safety
 * `s` must be a NUL-terminated string; `out` writable.
 */
enum PvStatus pv_graph_from_base64(size_t n, const char *s, struct PvVisGraph **out);

/**
 * Edge classification counts and scores of `pred` against `truth`.
 *
 * # Safety
 * Both handles live; `out` writable.
 */
enum PvStatus pv_edge_confusion(const struct PvVisGraph *pred,
                                const struct PvVisGraph *truth,
                                struct PvConfusion *out);

/**
 * Constrained Delaunay triangulation.
 *
 * # Safety
 * `p` live; `out` writable.
 */
enum PvStatus pv_cdt(const struct PvPolygon *p, struct PvTriangulation **out);

/**
 * # Safety
 * `t` must come from this library and not be freed twice.
 */
void pv_triangulation_free(struct PvTriangulation *t);

/**
 * # Safety
 * `t` must be null or live.
 */
size_t pv_triangulation_diagonal_count(const struct PvTriangulation *t);

/**
 * Copies sorted diagonals as interleaved `i, j` pairs (capacity `cap`).
 *
 * # Safety
 * `t` live; `out` holds `cap` entries.
 */
enum PvStatus pv_triangulation_diagonals(const struct PvTriangulation *t, size_t *out, size_t cap);

/**
 * Boundary cycle plus diagonals.
 *
 * # Safety
 * `t` live; `out` writable.
 */
enum PvStatus pv_triangulation_graph(const struct PvTriangulation *t, struct PvVisGraph **out);

/**
 * Number of flips on the route from `a` through the vertex-0 fan to `b`.
 *
 * # Safety
 * Both handles live; `out` writable.
 */
enum PvStatus pv_flip_path_length(const struct PvTriangulation *a,
                                  const struct PvTriangulation *b,
                                  size_t *out);

/**
 * Signed distance grid, negative inside.
 *
 * # Safety
 * `p` live; `out` writable.
 */
enum PvStatus pv_sdf(const struct PvPolygon *p, size_t res, double margin, struct PvSdfGrid **out);

/**
 * # Safety
 * `g` must come from this library and not be freed twice.
 */
void pv_sdf_free(struct PvSdfGrid *g);

/**
 * # Safety
 * `g` must be null or live.
 */
size_t pv_sdf_res(const struct PvSdfGrid *g);

/**
 * Copies `res * res` row-major values, row 0 at the bottom.
 *
 * # Safety
 * `g` live; `out` holds `cap` doubles.
 */
enum PvStatus pv_sdf_values(const struct PvSdfGrid *g, double *out, size_t cap);

/**
 * Rasterize at `res`, contour, simplify to `k` vertices, map back.
 *
 * # Safety
 * `p` live; `out` writable.
 */
enum PvStatus pv_sdf_round_trip(const struct PvPolygon *p,
                                size_t res,
                                size_t k,
                                struct PvPolygon **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYVIS_H */
