/* C interface for the hvncolor library. */

#ifndef HVNCOLOR_H
#define HVNCOLOR_H

/* Generated with cbindgen:0.26.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every FFI call.
 */
typedef enum HvnStatus {
  HVN_STATUS_OK = 0,
  HVN_STATUS_NULL_ARGUMENT = 1,
  HVN_STATUS_INVALID_UTF8 = 2,
  HVN_STATUS_PARSE_ERROR = 3,
  HVN_STATUS_INVALID_ARGUMENT = 4,
  HVN_STATUS_NOT_CLASS_MEMBER = 5,
  HVN_STATUS_BUDGET_EXCEEDED = 6,
  HVN_STATUS_ASSERTION_FAILURE = 7,
  HVN_STATUS_BUFFER_TOO_SMALL = 8,
} HvnStatus;

/**
 * Opaque graph handle.
 */
typedef struct HvnGraph HvnGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses one graph6 line into a new graph handle.
 *
 * # Safety
 * `line` must be a valid NUL-terminated C string and `out` a valid pointer.
 * The returned handle must be released with [`hvn_graph_free`].
 */
enum HvnStatus hvn_graph_from_graph6(const char *line, struct HvnGraph **out);

/**
 * Encodes a graph as a newly allocated graph6 C string.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer. Release the string
 * with [`hvn_string_free`].
 */
enum HvnStatus hvn_graph_to_graph6(const struct HvnGraph *g, char **out);

/**
 * Releases a string allocated by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void hvn_string_free(char *s);

/**
 * Releases a graph handle.
 *
 * # Safety
 * `g` must come from this library and not be freed twice.
 */
void hvn_graph_free(struct HvnGraph *g);

/**
 * Number of vertices.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum HvnStatus hvn_graph_order(const struct HvnGraph *g, uint32_t *out);

/**
 * Adjacency test.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum HvnStatus hvn_graph_has_edge(const struct HvnGraph *g, uint32_t u, uint32_t v, bool *out);

/**
 * Builds the tight 2ω²-vertex construction (needs omega >= 4).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HvnStatus hvn_extremal(uint32_t omega, struct HvnGraph **out);

/**
 * Builds the 11-vertex triangle-free graph with chromatic number 4.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HvnStatus hvn_grotzsch(struct HvnGraph **out);

/**
 * Mycielskian of a graph.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum HvnStatus hvn_mycielski(const struct HvnGraph *g, struct HvnGraph **out);

/**
 * Seeded random class member (repaired G(n, density)).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HvnStatus hvn_sample_class_member(uint32_t n,
                                       double density,
                                       uint64_t seed,
                                       struct HvnGraph **out);

/**
 * Class membership. On a violation, up to `witness_cap` witness vertices
 * are written to `witness` and `witness_len` receives the count (pass 6 to
 * always fit; a too-small buffer reports BUFFER_TOO_SMALL). For members,
 * `witness_len` is set to 0.
 *
 * # Safety
 * `g`, `member` and `witness_len` must be valid; `witness` must point to at
 * least `witness_cap` writable u32 slots (or be NULL with cap 0).
 */
enum HvnStatus hvn_is_class_member(const struct HvnGraph *g,
                                   bool *member,
                                   uint32_t *witness,
                                   uintptr_t witness_cap,
                                   uintptr_t *witness_len);

/**
 * Exact clique number.
 *
 * # Safety
 * `g` must be a live handle and `omega` a valid pointer.
 */
enum HvnStatus hvn_clique_number(const struct HvnGraph *g, uint32_t *omega);

/**
 * Exact chromatic number within a node budget (0 = unlimited).
 *
 * # Safety
 * `g` must be a live handle and `chi` a valid pointer.
 */
enum HvnStatus hvn_chromatic_number(const struct HvnGraph *g, uint64_t node_budget, uint32_t *chi);

/**
 * Permitted palette size for a clique number.
 *
 * # Safety
 * `budget` must be a valid pointer.
 */
enum HvnStatus hvn_color_budget(uint32_t omega, uint32_t *budget);

/**
 * Colors a class member within the budget. `colors` receives one 1-based
 * color per vertex; `colors_cap` must be at least the graph order.
 * `colors_used` receives the number of distinct colors.
 *
 * # Safety
 * `g` and `colors_used` must be valid; `colors` must point to at least
 * `colors_cap` writable u32 slots.
 */
enum HvnStatus hvn_color_class_member(const struct HvnGraph *g,
                                      uint64_t node_budget,
                                      uint32_t *colors,
                                      uintptr_t colors_cap,
                                      uint32_t *colors_used);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HVNCOLOR_H */
