#ifndef CAIALG_H
#define CAIALG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum CaialgStatus {
  CAIALG_STATUS_OK = 0,
  CAIALG_STATUS_NULL_POINTER = 1,
  CAIALG_STATUS_INVALID_ARGUMENT = 2,
  CAIALG_STATUS_CONFIG = 3,
  CAIALG_STATUS_NUMERICAL = 4,
  CAIALG_STATUS_RANGE = 5,
  CAIALG_STATUS_OUT_OF_BOUNDS = 6,
  CAIALG_STATUS_PANIC = 7,
} CaialgStatus;

/**
 * Validated algebra parameters (weight rule and truncation).
 */
typedef struct CaialgParams CaialgParams;

/**
 * Reports produced by a suite run, with its exit code.
 */
typedef struct CaialgReportSet CaialgReportSet;

/**
 * Plain-data view of one report; strings are fetched separately.
 */
typedef struct CaialgReportView {
  double measured;
  double bound;
  double margin;
  bool pass;
  /**
   * 0 pass, 1 fail, 2 inconclusive.
   */
  int32_t status;
} CaialgReportView;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *caialg_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *caialg_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void caialg_string_free(char *s);

/**
 * Parameters with the linear rule `c_n = n + offset`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum CaialgStatus caialg_params_new_linear(double offset, size_t n_max, struct CaialgParams **out);

/**
 * Parameters from an explicit table `c_1..c_len`.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum CaialgStatus caialg_params_new_table(const double *values,
                                          size_t len,
                                          size_t n_max,
                                          struct CaialgParams **out);

/**
 * Weight `c_n` of level `n`.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum CaialgStatus caialg_params_c(const struct CaialgParams *params, size_t n, double *out);

/**
 * # Safety
 * `params` must come from a constructor in this library, or be null.
 */
void caialg_params_free(struct CaialgParams *params);

/**
 * Operator 2-norm of an `n x n` row-major matrix; `im` may be null.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to `n*n` readable doubles.
 */
enum CaialgStatus caialg_op_norm(const double *re, const double *im, size_t n, double *out);

/**
 * Spectral radius of an `n x n` row-major matrix; `im` may be null.
 *
 * # Safety
 * As for [`caialg_op_norm`].
 */
enum CaialgStatus caialg_spectral_radius(const double *re, const double *im, size_t n, double *out);

/**
 * Writes the real `n x n` block `u_{n,k}` row-major into `out` and the
 * number of averaged exponents into `mu`.
 *
 * # Safety
 * `out` must have room for `out_len >= n*n` doubles; `mu` may be null.
 */
enum CaialgStatus caialg_cai_block(size_t n, size_t k, double *out, size_t out_len, size_t *mu);

/**
 * Truncated `sup_{lo<=n<=hi} p_n(a_n)` for an element given as JSON.
 *
 * # Safety
 * `params` must be live, `element_json` a nul-terminated string, `out` writable.
 */
enum CaialgStatus caialg_p_norm(const struct CaialgParams *params,
                                const char *element_json,
                                size_t lo,
                                size_t hi,
                                double *out);

/**
 * Runs the suites described by a JSON run configuration (`"{}"` for the
 * defaults). Verification failures are not errors: inspect the exit code
 * and the reports.
 *
 * # Safety
 * `config_json` must be nul-terminated; `out` writable.
 */
enum CaialgStatus caialg_run_suite(const char *config_json, struct CaialgReportSet **out);

/**
 * # Safety
 * `set` must be live; `out` writable.
 */
enum CaialgStatus caialg_report_set_len(const struct CaialgReportSet *set, size_t *out);

/**
 * 0 if every report passed, 1 otherwise.
 *
 * # Safety
 * `set` must be live; `out` writable.
 */
enum CaialgStatus caialg_report_set_exit_code(const struct CaialgReportSet *set, int32_t *out);

/**
 * # Safety
 * `set` must be live; `out` writable.
 */
enum CaialgStatus caialg_report_get(const struct CaialgReportSet *set,
                                    size_t index,
                                    struct CaialgReportView *out);

/**
 * Identifier of report `index`; free with [`caialg_string_free`].
 *
 * # Safety
 * `set` must be live; `out` writable.
 */
enum CaialgStatus caialg_report_lemma_id(const struct CaialgReportSet *set,
                                         size_t index,
                                         char **out);

/**
 * Serializes the set; `format` is 0 for JSON and 1 for CSV. Free the
 * result with [`caialg_string_free`].
 *
 * # Safety
 * `set` must be live; `out` writable.
 */
enum CaialgStatus caialg_report_set_render(const struct CaialgReportSet *set,
                                           int32_t format,
                                           char **out);

/**
 * # Safety
 * `set` must come from [`caialg_run_suite`], or be null.
 */
void caialg_report_set_free(struct CaialgReportSet *set);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAIALG_H */
