#ifndef QEULER_H
#define QEULER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QeMeasure {
  QE_MEASURE_BOSONIC = 0,
  QE_MEASURE_FERMIONIC = 1,
} QeMeasure;

typedef enum QeStatus {
  QE_STATUS_OK = 0,
  QE_STATUS_NULL_POINTER = 1,
  QE_STATUS_INVALID_ARGUMENT = 2,
  QE_STATUS_DIVISION_BY_ZERO = 3,
  QE_STATUS_DOMAIN = 4,
  QE_STATUS_PRECISION_EXHAUSTED = 5,
  QE_STATUS_NOT_CONVERGED = 6,
  QE_STATUS_INTERNAL = 7,
  QE_STATUS_PANIC = 8,
} QeStatus;

typedef enum QeVerdict {
  QE_VERDICT_HOLDS = 0,
  QE_VERDICT_FAILS = 1,
  QE_VERDICT_HOLDS_TO_PRECISION = 2,
} QeVerdict;

/**
 * Shared computation state: the Euler table, the q-Bernoulli store and the p-adic setting.
 */
typedef struct QeContext QeContext;

/**
 * A finished grid run.
 */
typedef struct QeReport QeReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failed call on this thread, or NULL. Free with `qe_string_free`.
 */
char *qe_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void qe_string_free(char *s);

/**
 * Creates a context for prime `p`, `q` (`"1+p"`, an integer or `"a/b"`; NULL means `1+p`)
 * and `precision` requested p-adic digits.
 *
 * # Safety
 * `q` must be NULL or a valid C string; `out` must be writable.
 */
enum QeStatus qe_context_new(uint64_t p, const char *q, int64_t precision, struct QeContext **out);

/**
 * # Safety
 * `ctx` must be NULL or a pointer from `qe_context_new` that is not used afterwards.
 */
void qe_context_free(struct QeContext *ctx);

/**
 * Writes the q-Euler number `n` as a rational function in `q`, e.g. `"(-q)/(1 + q)"`.
 *
 * # Safety
 * `ctx` must be a live context and `out` writable.
 */
enum QeStatus qe_euler_number(const struct QeContext *ctx, uint32_t n, char **out);

/**
 * Writes the q-Euler number `n` evaluated at the rational `q0` (e.g. `"1"` or `"2/3"`).
 *
 * # Safety
 * `ctx` must be a live context, `q0` a valid C string and `out` writable.
 */
enum QeStatus qe_euler_number_at(const struct QeContext *ctx,
                                 uint32_t n,
                                 const char *q0,
                                 char **out);

/**
 * Verifies identity `id` (e.g. `"THM1"`) at one point. For `(k, m)` identities `a = k`,
 * `b = m`; otherwise `a` is the single parameter and `b` is ignored. `out_oracles_pass`
 * may be NULL.
 *
 * # Safety
 * `ctx` must be a live context, `id` a valid C string and `out_verdict` writable.
 */
enum QeStatus qe_verify(const struct QeContext *ctx,
                        const char *id,
                        int64_t a,
                        int64_t b,
                        enum QeVerdict *out_verdict,
                        bool *out_oracles_pass);

/**
 * Verifies `id` over the inclusive box `a_lo..=a_hi` (times `b_lo..=b_hi` for `(k, m)`
 * identities) and returns the report handle.
 *
 * # Safety
 * `ctx` must be a live context, `id` a valid C string and `out` writable.
 */
enum QeStatus qe_verify_grid(const struct QeContext *ctx,
                             const char *id,
                             int64_t a_lo,
                             int64_t a_hi,
                             int64_t b_lo,
                             int64_t b_hi,
                             struct QeReport **out);

/**
 * Writes the report as JSON.
 *
 * # Safety
 * `report` must be a live report handle and `out` writable.
 */
enum QeStatus qe_report_json(const struct QeReport *report, char **out);

/**
 * Number of failed or errored cells outside the printed variants; -1 for a NULL handle.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
int64_t qe_report_blocking_failures(const struct QeReport *report);

/**
 * # Safety
 * `report` must be NULL or a handle from `qe_verify_grid` that is not used afterwards.
 */
void qe_report_free(struct QeReport *report);

/**
 * Adaptive integral of `(x0 + y)^n` against the chosen measure. Writes the value's
 * canonical rational representative and the digits actually vouched for; a run that
 * stops short of the requested precision returns `NotConverged` but still fills both.
 *
 * # Safety
 * `ctx` must be a live context, `x0` NULL (meaning 0) or a valid C string, and both
 * outputs writable.
 */
enum QeStatus qe_integrate(const struct QeContext *ctx,
                           enum QeMeasure measure,
                           uint32_t n,
                           const char *x0,
                           char **out_value,
                           int64_t *out_achieved);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QEULER_H */
