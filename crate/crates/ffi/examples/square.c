/* cc -Icrates/ffi/include crates/ffi/examples/square.c target/release/libpolyvis_ffi.a -lm -lpthread -ldl */
#include <stdio.h>
#include "polyvis.h"

int main(void) {
    const double xy[] = {0, 0, 4, 0, 1, 1, 0, 4};
    PvPolygon *p = NULL;
    PvVisGraph *g = NULL;
    if (pv_polygon_new(xy, 4, &p) != PV_STATUS_OK || pv_visibility_graph(p, &g) != PV_STATUS_OK) {
        fprintf(stderr, "error: %s\n", pv_last_error());
        return 1;
    }
    char *enc = pv_graph_to_base64(g);
    printf("edges %zu density %.4f lower_tri %s\n", pv_graph_edge_count(g), pv_graph_density(g), enc);
    pv_string_free(enc);

    PvPolygon *bad = NULL;
    PvStatus s = pv_polygon_new(NULL, 4, &bad);
    printf("null input -> %d (%s)\n", (int)s, pv_last_error());

    pv_graph_free(g);
    pv_polygon_free(p);
    return 0;
}
