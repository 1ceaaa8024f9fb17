/* Licensed under the Apache License, Version 2.0. Generated by cbindgen; do not edit. */

#ifndef SPANNING_EMBED_H
#define SPANNING_EMBED_H



#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; `SE_OK` is zero.
 */
typedef enum SeStatus {
  SE_OK = 0,
  SE_NULL_POINTER = 1,
  SE_INVALID_ARGUMENT = 2,
  SE_PARSE = 3,
  /**
   * The pipeline ran but found no embedding.
   */
  SE_EMBED_FAILED = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  SE_PANIC = 5,
} SeStatus;

typedef enum SeMode {
  SE_DEGENERATE = 0,
  SE_BOUNDED = 1,
  SE_DIRECT = 2,
} SeMode;

/**
 * Opaque total embedding `target vertex -> host vertex`.
 */
typedef struct SeEmbedding SeEmbedding;

/**
 * Opaque graph.
 */
typedef struct SeGraph SeGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *se_last_error(void);

/**
 * Builds a graph on `n` vertices from `m` pairs stored flat in `edges`.
 *
 * # Safety
 * `edges` must point to `2 * m` readable values (or be null when `m = 0`);
 * `out` must be writable.
 */
enum SeStatus se_graph_new(uintptr_t n, const uintptr_t *edges, uintptr_t m, struct SeGraph **out);

/**
 * Parses the `n m` / `u v` edge-list text format.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum SeStatus se_graph_parse(const char *text, struct SeGraph **out);

/**
 * Samples `G(n, p)` from `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SeStatus se_sample_gnp(uintptr_t n, double p, uint64_t seed, struct SeGraph **out);

/**
 * # Safety
 * `g` must come from this library and not be freed twice.
 */
void se_graph_free(struct SeGraph *g);

/**
 * Vertex count, or 0 for null.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
uintptr_t se_graph_vertex_count(const struct SeGraph *g);

/**
 * Edge count, or 0 for null.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
uintptr_t se_graph_edge_count(const struct SeGraph *g);

/**
 * Exact `m_1(g)` as the reduced fraction `num / den`.
 *
 * # Safety
 * `g` must be a live handle; `num` and `den` must be writable.
 */
enum SeStatus se_m1_density(const struct SeGraph *g, uint64_t *num, uint64_t *den);

/**
 * Embeds `target` into `host`, treating `host` as a `G(n, p)` sample split
 * into the exposures the mode needs. `d` is read only in degenerate mode.
 *
 * # Safety
 * `host` and `target` must be live handles; `out` must be writable.
 */
enum SeStatus se_embed(const struct SeGraph *host,
                       const struct SeGraph *target,
                       enum SeMode mode,
                       uintptr_t d,
                       uintptr_t delta,
                       double p,
                       uint64_t seed,
                       struct SeEmbedding **out);

/**
 * Number of target vertices, or 0 for null.
 *
 * # Safety
 * `e` must be null or a live handle.
 */
uintptr_t se_embedding_len(const struct SeEmbedding *e);

/**
 * Pipeline attempts used, or 0 for null.
 *
 * # Safety
 * `e` must be null or a live handle.
 */
uintptr_t se_embedding_attempts(const struct SeEmbedding *e);

/**
 * Copies the image of every target vertex into `buf` (`len` slots).
 *
 * # Safety
 * `e` must be a live handle and `buf` writable for `len` values.
 */
enum SeStatus se_embedding_copy(const struct SeEmbedding *e, uintptr_t *buf, uintptr_t len);

/**
 * # Safety
 * `e` must come from this library and not be freed twice.
 */
void se_embedding_free(struct SeEmbedding *e);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPANNING_EMBED_H */
