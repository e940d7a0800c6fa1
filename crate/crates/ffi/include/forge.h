#ifndef FORGE_H
#define FORGE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ForgeStatus {
  FORGE_STATUS_OK = 0,
  FORGE_STATUS_NULL_ARGUMENT = 1,
  FORGE_STATUS_INVALID_ARGUMENT = 2,
  FORGE_STATUS_IO = 3,
  /**
   * The policy made an illegal move or raised.
   */
  FORGE_STATUS_SIMULATION = 4,
  FORGE_STATUS_NUMERIC = 5,
  FORGE_STATUS_PANIC = 6,
} ForgeStatus;

typedef enum ForgeItemDistribution {
  /**
   * `a` is the shape, `b` the scale in absolute units.
   */
  FORGE_ITEM_DISTRIBUTION_WEIBULL = 0,
  /**
   * `a` is the mean, `b` the standard deviation, as capacity fractions.
   */
  FORGE_ITEM_DISTRIBUTION_GAUSSIAN = 1,
} ForgeItemDistribution;

/**
 * A bin packing item sequence.
 */
typedef struct ForgeBinTrace ForgeBinTrace;

/**
 * A cache request trace.
 */
typedef struct ForgeCacheTrace ForgeCacheTrace;

/**
 * A fitted Gaussian process regressor.
 */
typedef struct ForgeGpr ForgeGpr;

typedef struct ForgeCacheMetrics {
  uint64_t hits;
  uint64_t misses;
  uint64_t accesses;
} ForgeCacheMetrics;

typedef struct ForgePackMetrics {
  uint64_t bins_used;
  uint64_t lower_bound;
} ForgePackMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a
 * success. Valid until the next call into this library on the same thread.
 */
const char *forge_last_error(void);

/**
 * Zipf(`skew`) requests over `objects` unit-size keys.
 *
 * # Safety
 * `out_trace` must be a valid pointer.
 */
enum ForgeStatus forge_cache_trace_zipf(size_t objects,
                                        size_t requests,
                                        double skew,
                                        uint64_t seed,
                                        struct ForgeCacheTrace **out_trace);

/**
 * Reads a `key,size` CSV trace.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out_trace` a valid pointer.
 */
enum ForgeStatus forge_cache_trace_read(const char *path, struct ForgeCacheTrace **out_trace);

/**
 * # Safety
 * `trace` must come from this library and `path` be NUL-terminated.
 */
enum ForgeStatus forge_cache_trace_write(const struct ForgeCacheTrace *trace, const char *path);

/**
 * Number of requests; 0 for NULL.
 *
 * # Safety
 * `trace` must be NULL or come from this library.
 */
size_t forge_cache_trace_len(const struct ForgeCacheTrace *trace);

/**
 * # Safety
 * `trace` must be NULL or an unfreed handle from this library.
 */
void forge_cache_trace_free(struct ForgeCacheTrace *trace);

/**
 * Cache size in bytes: `fraction` of the trace's footprint, at least 1.
 *
 * # Safety
 * `trace` must come from this library and `out_capacity` be valid.
 */
enum ForgeStatus forge_cache_capacity(const struct ForgeCacheTrace *trace,
                                      double fraction,
                                      uint64_t *out_capacity);

/**
 * Replays `trace` through a named baseline (`"lru"`, `"s3fifo"`, ...).
 * `params` may be NULL or hold `name=value` pairs.
 *
 * # Safety
 * `trace` must come from this library; strings must be NUL-terminated.
 */
enum ForgeStatus forge_cache_simulate(const struct ForgeCacheTrace *trace,
                                      const char *policy,
                                      const char *params_text,
                                      uint64_t capacity,
                                      struct ForgeCacheMetrics *out_metrics);

/**
 * `count` items from the given distribution for bins of `capacity`.
 *
 * # Safety
 * `out_trace` must be a valid pointer.
 */
enum ForgeStatus forge_bin_trace_generate(size_t count,
                                          enum ForgeItemDistribution dist,
                                          double a,
                                          double b,
                                          uint64_t capacity,
                                          uint64_t seed,
                                          struct ForgeBinTrace **out_trace);

/**
 * # Safety
 * `items` must point to `len` values; `out_trace` must be valid.
 */
enum ForgeStatus forge_bin_trace_from_items(const uint64_t *items,
                                            size_t len,
                                            uint64_t capacity,
                                            struct ForgeBinTrace **out_trace);

/**
 * Reads a bin trace file.
 *
 * # Safety
 * `path` must be NUL-terminated and `out_trace` valid.
 */
enum ForgeStatus forge_bin_trace_read(const char *path, struct ForgeBinTrace **out_trace);

/**
 * Number of items; 0 for NULL.
 *
 * # Safety
 * `trace` must be NULL or come from this library.
 */
size_t forge_bin_trace_len(const struct ForgeBinTrace *trace);

/**
 * # Safety
 * `trace` must be NULL or an unfreed handle from this library.
 */
void forge_bin_trace_free(struct ForgeBinTrace *trace);

/**
 * Packs `trace` online with a named heuristic (`"first_fit"`, ...).
 *
 * # Safety
 * `trace` must come from this library; strings must be NUL-terminated.
 */
enum ForgeStatus forge_bin_pack(const struct ForgeBinTrace *trace,
                                const char *heuristic,
                                const char *params_text,
                                struct ForgePackMetrics *out_metrics);

/**
 * Fits on `m` features of dimension `d` (row-major) against `m` targets
 * of dimension `n` (row-major).
 *
 * # Safety
 * `features` must hold `m * d` values, `targets` `m * n`; `out_model` valid.
 */
enum ForgeStatus forge_gpr_fit(const double *features,
                               size_t m,
                               size_t d,
                               const double *targets,
                               size_t n,
                               double sigma0,
                               double noise,
                               struct ForgeGpr **out_model);

/**
 * Posterior mean at `x` (length `d`), clipped to [0, 1], written to
 * `out_mean` (length `n`).
 *
 * # Safety
 * `model` must come from this library; buffers must have the stated lengths.
 */
enum ForgeStatus forge_gpr_predict(const struct ForgeGpr *model,
                                   const double *x,
                                   size_t d,
                                   double *out_mean,
                                   size_t n);

/**
 * # Safety
 * `model` must be NULL or an unfreed handle from this library.
 */
void forge_gpr_free(struct ForgeGpr *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORGE_H */
