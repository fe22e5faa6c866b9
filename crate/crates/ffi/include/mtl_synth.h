#ifndef MTL_SYNTH_H
#define MTL_SYNTH_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum MtlStatus {
  MTL_STATUS_OK = 0,
  MTL_STATUS_NULL_POINTER = 1,
  MTL_STATUS_INVALID_UTF8 = 2,
  MTL_STATUS_INVALID_SAMPLE = 3,
  MTL_STATUS_INVALID_FORMULA = 4,
  MTL_STATUS_INVALID_ARGUMENT = 5,
  /**
   * The sample admits no formula within the lookahead bound.
   */
  MTL_STATUS_NO_SOLUTION = 6,
  /**
   * The size cap was reached or the solver gave up.
   */
  MTL_STATUS_ABORTED = 7,
  MTL_STATUS_SOLVER_ERROR = 8,
  /**
   * A Rust panic was caught at the boundary.
   */
  MTL_STATUS_INTERNAL = 9,
} MtlStatus;

/**
 * Formula in negation normal form.
 */
typedef struct MtlFormula MtlFormula;

/**
 * Parsed, validated sample.
 */
typedef struct MtlSample MtlSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *mtl_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void mtl_string_free(char *s);

/**
 * Parses a sample from its JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MtlStatus mtl_sample_from_json(const char *json, struct MtlSample **out);

/**
 * # Safety
 * `sample` must be null or a handle from `mtl_sample_from_json`, not yet freed.
 */
void mtl_sample_free(struct MtlSample *sample);

/**
 * Number of prefixes, positives first.
 *
 * # Safety
 * `sample` must be a live handle; `out` must be writable.
 */
enum MtlStatus mtl_sample_len(const struct MtlSample *sample, size_t *out);

/**
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum MtlStatus mtl_formula_parse(const char *text, struct MtlFormula **out);

/**
 * # Safety
 * `formula` must be null or a handle from this library, not yet freed.
 */
void mtl_formula_free(struct MtlFormula *formula);

/**
 * Canonical text of the formula; free with `mtl_string_free`.
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum MtlStatus mtl_formula_to_string(const struct MtlFormula *formula, char **out);

/**
 * Number of distinct subformulas.
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum MtlStatus mtl_formula_size(const struct MtlFormula *formula, size_t *out);

/**
 * Future reach as an exact rational string such as `5/2`; free with
 * `mtl_string_free`.
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum MtlStatus mtl_formula_future_reach(const struct MtlFormula *formula, char **out);

/**
 * Whether the formula holds everywhere on every positive prefix and fails
 * somewhere on every negative one.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum MtlStatus mtl_check(const struct MtlSample *sample,
                         const struct MtlFormula *formula,
                         bool *out);

/**
 * Satisfaction intervals of the formula on one prefix (positives first),
 * as text like `{[0,4),[5,6)}`; free with `mtl_string_free`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum MtlStatus mtl_monitor(const struct MtlSample *sample,
                           const struct MtlFormula *formula,
                           size_t prefix_index,
                           char **out);

/**
 * Whether some formula with future reach at most `fr_bound` (a rational
 * string) separates the sample.
 *
 * # Safety
 * `sample` must be live, `fr_bound` NUL-terminated, `out` writable.
 */
enum MtlStatus mtl_is_separable(const struct MtlSample *sample, const char *fr_bound, bool *out);

/**
 * Finds a smallest separating formula with future reach at most
 * `fr_bound`. `solver` may be null to use the default solver;
 * `timeout_secs <= 0` disables the per-query timeout. On `MTL_STATUS_OK`,
 * `*out` receives a formula handle.
 *
 * # Safety
 * `sample` must be live, strings NUL-terminated (or `solver` null), `out`
 * writable.
 */
enum MtlStatus mtl_synthesize(const struct MtlSample *sample,
                              const char *fr_bound,
                              size_t max_size,
                              double timeout_secs,
                              const char *solver,
                              struct MtlFormula **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MTL_SYNTH_H */
