#ifndef COVMAP_H
#define COVMAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define COVMAP_SELF_ADJOINT 1

#define COVMAP_POSITIVE (1 << 1)

#define COVMAP_COMPLETELY_POSITIVE (1 << 2)

#define COVMAP_BROADCASTING (1 << 3)

#define COVMAP_PERMUTATION_INVARIANT (1 << 4)

#define COVMAP_CLASSICALLY_CONSISTENT (1 << 5)

#define COVMAP_VIRTUAL_BROADCASTER (1 << 6)

/**
 * Set when the CP verdict came from a numerical Choi check rather than the closed form.
 */
#define COVMAP_CP_NUMERICAL (1 << 7)

typedef enum CovmapStatus {
  COVMAP_STATUS_OK = 0,
  COVMAP_STATUS_NULL_POINTER = 1,
  COVMAP_STATUS_INVALID_ARGUMENT = 2,
  COVMAP_STATUS_DIMENSION = 3,
  COVMAP_STATUS_TRACE_TERMS = 4,
  COVMAP_STATUS_UNIQUENESS = 5,
  COVMAP_STATUS_NUMERICAL = 6,
  COVMAP_STATUS_PANIC = 7,
} CovmapStatus;

typedef enum CovmapCbKind {
  COVMAP_CB_KIND_EXACT = 0,
  COVMAP_CB_KIND_UPPER_BOUND = 1,
  COVMAP_CB_KIND_LOWER_BOUND = 2,
  COVMAP_CB_KIND_BRACKET = 3,
} CovmapCbKind;

typedef enum CovmapCbMethod {
  COVMAP_CB_METHOD_PERMUTATION_INVARIANT = 0,
  COVMAP_CB_METHOD_CORNER_BOUND = 1,
  COVMAP_CB_METHOD_MONTE_CARLO = 2,
} CovmapCbMethod;

/**
 * Two-copy covariant coefficient handle.
 */
typedef struct CovmapCoefficients CovmapCoefficients;

/**
 * Dense complex matrix handle.
 */
typedef struct CovmapMatrix CovmapMatrix;

/**
 * cb-norm result. `lower`/`upper` are NaN when that side is unknown.
 */
typedef struct CovmapCbNorm {
  enum CovmapCbKind kind;
  enum CovmapCbMethod method;
  double lower;
  double upper;
} CovmapCbNorm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *covmap_last_error(void);

/**
 * Creates a `rows × cols` matrix from `2·rows·cols` interleaved doubles.
 *
 * # Safety
 * `data` must point to `2·rows·cols` readable doubles; `out` must be writable.
 */
enum CovmapStatus covmap_matrix_new(size_t rows,
                                    size_t cols,
                                    const double *data,
                                    struct CovmapMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from this library that has not been freed.
 */
void covmap_matrix_free(struct CovmapMatrix *m);

/**
 * # Safety
 * `m` must be a live handle; `rows` and `cols` must be writable.
 */
enum CovmapStatus covmap_matrix_shape(const struct CovmapMatrix *m, size_t *rows, size_t *cols);

/**
 * Copies the entries as interleaved doubles into `out`, which holds `len` doubles.
 *
 * # Safety
 * `m` must be a live handle and `out` must point to `len` writable doubles.
 */
enum CovmapStatus covmap_matrix_data(const struct CovmapMatrix *m, double *out, size_t len);

/**
 * Creates coefficients `(l1, …, l6)` from 12 interleaved doubles.
 *
 * # Safety
 * `coeffs` must point to 12 readable doubles; `out` must be writable.
 */
enum CovmapStatus covmap_coefficients_new(size_t d,
                                          const double *coeffs,
                                          struct CovmapCoefficients **out);

/**
 * # Safety
 * `c` must be null or a live handle from this library.
 */
void covmap_coefficients_free(struct CovmapCoefficients *c);

/**
 * Writes `d` and the 12 interleaved coefficient doubles.
 *
 * # Safety
 * `c` must be a live handle; `d` must be writable and `coeffs` must point to 12 writable doubles.
 */
enum CovmapStatus covmap_coefficients_get(const struct CovmapCoefficients *c,
                                          size_t *d,
                                          double *coeffs);

/**
 * `Φ(X)` as a new `d² × d²` matrix.
 *
 * # Safety
 * `c` and `x` must be live handles; `out` must be writable.
 */
enum CovmapStatus covmap_apply(const struct CovmapCoefficients *c,
                               const struct CovmapMatrix *x,
                               struct CovmapMatrix **out);

/**
 * The `d⁴ × d²` superoperator matrix of the map.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum CovmapStatus covmap_realize(const struct CovmapCoefficients *c, struct CovmapMatrix **out);

/**
 * Coefficients of a superoperator: exact extraction for `d ≥ 3`, the
 * gauge-reduced least-squares fit at `d = 2`. `residual` may be null.
 *
 * # Safety
 * `superop` must be a live handle; `out` must be writable; `residual` null or writable.
 */
enum CovmapStatus covmap_extract(const struct CovmapMatrix *superop,
                                 struct CovmapCoefficients **out,
                                 double *residual);

/**
 * Classification verdicts as a bit set of `COVMAP_*` flags.
 *
 * # Safety
 * `c` must be a live handle; `flags` must be writable.
 */
enum CovmapStatus covmap_classify(const struct CovmapCoefficients *c,
                                  double tol_abs,
                                  double tol_rel,
                                  uint32_t *flags);

/**
 * cb-norm of a trace-free map; `TraceTerms` otherwise.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum CovmapStatus covmap_cb_norm(const struct CovmapCoefficients *c,
                                 size_t samples,
                                 uint64_t seed,
                                 double tol_abs,
                                 double tol_rel,
                                 struct CovmapCbNorm *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COVMAP_H */
