#ifndef DIOPHANT_H
#define DIOPHANT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call.
 */
typedef enum DiophantStatus {
  DIOPHANT_STATUS_OK = 0,
  DIOPHANT_STATUS_INVALID_PARAMETERS = 1,
  DIOPHANT_STATUS_PRECISION_EXHAUSTED = 2,
  DIOPHANT_STATUS_NOT_APPLICABLE = 3,
  DIOPHANT_STATUS_VERIFICATION = 4,
  DIOPHANT_STATUS_PARSE = 5,
  DIOPHANT_STATUS_IO = 6,
  DIOPHANT_STATUS_NULL_POINTER = 7,
  DIOPHANT_STATUS_INVALID_UTF8 = 8,
  DIOPHANT_STATUS_INDEX_OUT_OF_RANGE = 9,
  /**
   * Any other library error; see the message.
   */
  DIOPHANT_STATUS_FAILED = 10,
  DIOPHANT_STATUS_PANIC = 11,
} DiophantStatus;

/**
 * Opaque continued fraction expansion.
 */
typedef struct DiophantContinuedFraction DiophantContinuedFraction;

/**
 * Opaque JSON report of a bound, solver run or verification.
 */
typedef struct DiophantReport DiophantReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library; valid until the next call on the same thread.
 */
const char *diophant_last_error(void);

/**
 * Library version as a static string.
 */
const char *diophant_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void diophant_string_free(char *s);

/**
 * Expands a real expression such as `"355/113"` or `"sqrt(2)"` into at most
 * `count` partial quotients (rationals are expanded completely).
 * `ceiling_bits = 0` selects the default precision ceiling.
 *
 * # Safety
 * `expr` must be a valid C string and `out` a valid pointer.
 */
enum DiophantStatus diophant_cf_expand(const char *expr,
                                       uintptr_t count,
                                       uint32_t ceiling_bits,
                                       struct DiophantContinuedFraction **out);

/**
 * Number of partial quotients, 0 for null.
 *
 * # Safety
 * `cf` must be null or a live handle.
 */
uintptr_t diophant_cf_len(const struct DiophantContinuedFraction *cf);

/**
 * Partial quotient `index` as a decimal string in `*out`.
 *
 * # Safety
 * `cf` must be a live handle and `out` a valid pointer.
 */
enum DiophantStatus diophant_cf_quotient(const struct DiophantContinuedFraction *cf,
                                         uintptr_t index,
                                         char **out);

/**
 * `{"quotients":[...],"convergents":[[p,q],...]}` with decimal strings, or null.
 *
 * # Safety
 * `cf` must be null or a live handle.
 */
char *diophant_cf_to_json(const struct DiophantContinuedFraction *cf);

/**
 * # Safety
 * `cf` must be null or a handle not yet freed.
 */
void diophant_cf_free(struct DiophantContinuedFraction *cf);

/**
 * Fundamental solution of `x^2 - d y^2 = 1` for decimal `d`.
 *
 * # Safety
 * `d` must be a valid C string and `out` a valid pointer.
 */
enum DiophantStatus diophant_pell(const char *d, struct DiophantReport **out);

/**
 * Bound on `H` for `0 < |b1 log a1 + ... + bn log an| < exp(-delta H)` with
 * algebraic numbers of degree at most `d` and heights at most `height`.
 * `delta` is a rational string such as `"1/2"`, `height` a real expression.
 *
 * # Safety
 * String arguments must be valid C strings and `out` a valid pointer.
 */
enum DiophantStatus diophant_bound_lf4(uint32_t n,
                                       uint32_t d,
                                       const char *delta,
                                       const char *height,
                                       struct DiophantReport **out);

/**
 * Bound for integral points on `y^2 = x^3 + k`.
 *
 * # Safety
 * `k` must be a valid C string and `out` a valid pointer.
 */
enum DiophantStatus diophant_bound_mordell(const char *k, struct DiophantReport **out);

/**
 * Bound for solutions of `x^3 - 2 y^3 = m`.
 *
 * # Safety
 * `m` must be a valid C string and `out` a valid pointer.
 */
enum DiophantStatus diophant_bound_thue_cubic(const char *m, struct DiophantReport **out);

/**
 * All `r, s >= 0` with `a^r - b^s = m`.
 *
 * # Safety
 * String arguments must be valid C strings and `out` a valid pointer.
 */
enum DiophantStatus diophant_solve_exponential_gap(const char *a,
                                                   const char *b,
                                                   const char *m,
                                                   struct DiophantReport **out);

/**
 * The full run for `N` with `N+1`, `3N+1`, `8N+1` all square.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DiophantStatus diophant_solve_quadruple(struct DiophantReport **out);

/**
 * Class number of `Q(sqrt(-d))` for squarefree `d >= 1`.
 *
 * # Safety
 * `h` must be a valid pointer.
 */
enum DiophantStatus diophant_class_number(uint64_t d, uint64_t *h);

/**
 * Replays a certificate file written by the command-line tool.
 * `ceiling_bits = 0` selects the default precision ceiling.
 *
 * # Safety
 * `path` must be a valid C string; `out` may be null if the report is not wanted.
 */
enum DiophantStatus diophant_verify_certificate(const char *path,
                                                uint32_t ceiling_bits,
                                                struct DiophantReport **out);

/**
 * Report as compact JSON, or null.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
char *diophant_report_json(const struct DiophantReport *report);

/**
 * Top-level string or number field `key` of a report as a string, or null.
 *
 * # Safety
 * `report` must be null or a live handle; `key` a valid C string.
 */
char *diophant_report_field(const struct DiophantReport *report, const char *key);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void diophant_report_free(struct DiophantReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIOPHANT_H */
