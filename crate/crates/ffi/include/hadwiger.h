#ifndef HADWIGER_H
#define HADWIGER_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum HwStatus {
  HW_STATUS_OK = 0,
  HW_STATUS_NULL_ARGUMENT = 1,
  HW_STATUS_INVALID_UTF8 = 2,
  HW_STATUS_PARSE = 3,
  HW_STATUS_VALIDATION = 4,
  HW_STATUS_NUMERICAL = 5,
  HW_STATUS_PANIC = 6,
} HwStatus;

typedef enum HwSkeleton {
  HW_SKELETON_MAX = 0,
  HW_SKELETON_MIN = 1,
} HwSkeleton;

typedef enum HwBound {
  HW_BOUND_LOWER = 0,
  HW_BOUND_UPPER = 1,
} HwBound;

/**
 * Opaque handle: a grid (constructible) or piecewise-linear function.
 */
typedef struct HwFunction HwFunction;

/**
 * An integral value. `std_error` is 0 and `samples` is 1 on exact paths.
 */
typedef struct HwIntegral {
  double value;
  double std_error;
  size_t samples;
  uint64_t seed;
} HwIntegral;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty after a
 * successful call. Valid until the next call on the same thread.
 */
const char *hw_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hw_version(void);

/**
 * Parses a JSON document (grid-function, grid-region, simplicial-set or
 * simplicial-function). Regions and sets become their indicator functions.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum HwStatus hw_function_from_json(const char *json, struct HwFunction **out);

/**
 * Like `hw_function_from_json`, reading the document from a file.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum HwStatus hw_function_from_file(const char *path, struct HwFunction **out);

/**
 * Reads a PGM image as a grid function on unit pixels.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum HwStatus hw_function_from_pgm(const char *path,
                                   enum HwSkeleton skeleton,
                                   struct HwFunction **out);

/**
 * Builds a grid function of dimension `dim`. Axis `a` has `counts[a]`
 * breakpoints, stored consecutively in `breakpoints`. `values` holds one
 * value per open cell, `value_count` in total, in linear cell order (axis 0
 * fastest, parity index: even = breakpoint, odd = open interval).
 *
 * # Safety
 * `counts` must hold `dim` entries, `breakpoints` their sum, and `values`
 * `value_count` entries; `out` must be writable.
 */
enum HwStatus hw_grid_function_new(size_t dim,
                                   const size_t *counts,
                                   const double *breakpoints,
                                   const double *values,
                                   size_t value_count,
                                   struct HwFunction **out);

/**
 * Frees a handle. Null is ignored.
 *
 * # Safety
 * `h` must come from this library and not be used afterwards.
 */
void hw_function_free(struct HwFunction *h);

/**
 * Ambient dimension, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t hw_function_dim(const struct HwFunction *h);

/**
 * True when the handle holds a piecewise-linear function.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
bool hw_function_is_pl(const struct HwFunction *h);

/**
 * Replaces the process-wide Crofton constants with a calibration table in
 * the CLI's JSON format. Constants missing from the table are calibrated on
 * first use.
 *
 * # Safety
 * `json` must be NUL-terminated.
 */
enum HwStatus hw_load_calibration(const char *json);

/**
 * Lower or upper Hadwiger integral ∫h dμ_k. Grid functions and the k = 0
 * and k = n terms of PL functions are exact; other PL terms are sliced
 * Monte Carlo with `samples` flats drawn from `seed`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum HwStatus hw_hadwiger_integral(const struct HwFunction *h,
                                   size_t k,
                                   enum HwBound b,
                                   size_t samples,
                                   uint64_t seed,
                                   struct HwIntegral *out);

/**
 * Step approximant (1/m)∫⌊mh⌋dμ_k (lower) or (1/m)∫⌈mh⌉dμ_k (upper).
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum HwStatus hw_step_integral(const struct HwFunction *h,
                               size_t m,
                               size_t k,
                               enum HwBound b,
                               size_t samples,
                               uint64_t seed,
                               struct HwIntegral *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HADWIGER_H */
