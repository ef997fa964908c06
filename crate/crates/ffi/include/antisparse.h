#ifndef ANTISPARSE_H
#define ANTISPARSE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AntisparseStatus {
  ANTISPARSE_STATUS_OK = 0,
  ANTISPARSE_STATUS_NULL_POINTER = 1,
  ANTISPARSE_STATUS_INVALID_ARGUMENT = 2,
  ANTISPARSE_STATUS_DIMENSION_MISMATCH = 3,
  ANTISPARSE_STATUS_ZERO_COLUMN = 4,
  ANTISPARSE_STATUS_INFEASIBLE = 5,
  ANTISPARSE_STATUS_CONTRADICTORY_FLAGS = 6,
  ANTISPARSE_STATUS_PARSE = 7,
  ANTISPARSE_STATUS_IO = 8,
  ANTISPARSE_STATUS_BUFFER_TOO_SMALL = 9,
  ANTISPARSE_STATUS_PANIC = 10,
} AntisparseStatus;

typedef enum AntisparseDictionary {
  ANTISPARSE_DICTIONARY_GAUSSIAN = 0,
  ANTISPARSE_DICTIONARY_UNIFORM = 1,
  ANTISPARSE_DICTIONARY_DCT = 2,
  ANTISPARSE_DICTIONARY_TOEPLITZ = 3,
} AntisparseDictionary;

typedef enum AntisparseSolver {
  /**
   * Accelerated proximal gradient on the full problem.
   */
  ANTISPARSE_SOLVER_FITRA = 0,
  /**
   * Frank-Wolfe without squeezing.
   */
  ANTISPARSE_SOLVER_FW = 1,
  /**
   * Projected gradient with dynamic squeezing.
   */
  ANTISPARSE_SOLVER_PGS = 2,
  /**
   * Frank-Wolfe with dynamic squeezing.
   */
  ANTISPARSE_SOLVER_FWS = 3,
} AntisparseSolver;

/**
 * Opaque problem instance.
 */
typedef struct AntisparseProblem AntisparseProblem;

/**
 * Opaque solve report.
 */
typedef struct AntisparseReport AntisparseReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread, NUL-terminated, into `buf`.
 *
 * Returns the message length without the terminator (0 when there is no
 * error). The message is truncated when `cap` is too small.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t antisparse_last_error_message(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *antisparse_version(void);

/**
 * Builds a problem from a row-major `m × n` dictionary, an observation of
 * length `m` and a penalty `lambda > 0`. Columns are normalized to unit norm.
 *
 * # Safety
 * `a` must point to `m·n` doubles, `y` to `m` doubles, `out` to a writable handle slot.
 */
enum AntisparseStatus antisparse_problem_new(const double *a,
                                             size_t m,
                                             size_t n,
                                             const double *y,
                                             double lambda,
                                             struct AntisparseProblem **out);

/**
 * Generates a reproducible instance with `lambda = lambda_ratio · lambda_max`.
 *
 * `dict` is an [`AntisparseDictionary`] value.
 *
 * # Safety
 * `out` must point to a writable handle slot.
 */
enum AntisparseStatus antisparse_problem_generate(uint32_t dict,
                                                  size_t m,
                                                  size_t n,
                                                  uint64_t seed,
                                                  double lambda_ratio,
                                                  struct AntisparseProblem **out);

/**
 * Releases a problem; null is ignored.
 *
 * # Safety
 * `p` must be null or a handle returned by this library and not yet freed.
 */
void antisparse_problem_free(struct AntisparseProblem *p);

/**
 * Writes the dictionary dimensions.
 *
 * # Safety
 * `p` must be a live handle; `m` and `n` writable.
 */
enum AntisparseStatus antisparse_problem_dims(const struct AntisparseProblem *p,
                                              size_t *m,
                                              size_t *n);

/**
 * Writes `lambda` and `lambda_max = ‖Aᵀy‖₁`.
 *
 * # Safety
 * `p` must be a live handle; outputs writable.
 */
enum AntisparseStatus antisparse_problem_lambda(const struct AntisparseProblem *p,
                                                double *lambda,
                                                double *lambda_max);

/**
 * Solves `p` until the dual gap is at most `gap_tol` or `budget`
 * multiplications are spent (`budget = 0` means unlimited). `kind` is an
 * [`AntisparseSolver`] value.
 *
 * # Safety
 * `p` must be a live handle; `out` a writable handle slot.
 */
enum AntisparseStatus antisparse_solve(const struct AntisparseProblem *p,
                                       uint32_t kind,
                                       double gap_tol,
                                       uint64_t budget,
                                       struct AntisparseReport **out);

/**
 * Releases a report; null is ignored.
 *
 * # Safety
 * `r` must be null or a handle returned by this library and not yet freed.
 */
void antisparse_report_free(struct AntisparseReport *r);

/**
 * Scalar summary of a report. Any output pointer may be null.
 *
 * # Safety
 * `r` must be a live handle; non-null outputs writable.
 */
enum AntisparseStatus antisparse_report_summary(const struct AntisparseReport *r,
                                                double *gap,
                                                bool *converged,
                                                size_t *iterations,
                                                uint64_t *mults);

/**
 * Copies the solution (length `n`) into `buf`; `len` receives `n`.
 *
 * Pass `buf = NULL, cap = 0` to query the length only.
 *
 * # Safety
 * `r` must be a live handle; `buf` null or `cap` writable doubles.
 */
enum AntisparseStatus antisparse_report_x(const struct AntisparseReport *r,
                                          double *buf,
                                          size_t cap,
                                          size_t *len);

/**
 * Copies the dual point (length `m`) into `buf`; `len` receives `m`.
 *
 * # Safety
 * `r` must be a live handle; `buf` null or `cap` writable doubles.
 */
enum AntisparseStatus antisparse_report_u(const struct AntisparseReport *r,
                                          double *buf,
                                          size_t cap,
                                          size_t *len);

/**
 * Copies the positively (`negative = false`) or negatively saturated
 * indices detected by squeezing; `len` receives their count.
 *
 * # Safety
 * `r` must be a live handle; `buf` null or `cap` writable entries.
 */
enum AntisparseStatus antisparse_report_saturated(const struct AntisparseReport *r,
                                                  bool negative,
                                                  size_t *buf,
                                                  size_t cap,
                                                  size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANTISPARSE_H */
