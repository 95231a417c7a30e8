#ifndef PAIROPT_H
#define PAIROPT_H

/* Generated by cbindgen from pairopt-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every entry point.
 */
typedef enum po_status {
  PO_STATUS_OK = 0,
  PO_STATUS_NULL_ARGUMENT = 1,
  PO_STATUS_INVALID_ARGUMENT = 2,
  PO_STATUS_ODD_ELEMENT_COUNT = 3,
  PO_STATUS_TOO_SMALL = 4,
  PO_STATUS_TOO_LARGE = 5,
  PO_STATUS_NOT_SYMMETRIC = 6,
  PO_STATUS_NON_ZERO_DIAGONAL = 7,
  PO_STATUS_NON_FINITE = 8,
  PO_STATUS_DIMENSION_MISMATCH = 9,
  PO_STATUS_INDEX_OUT_OF_RANGE = 10,
  PO_STATUS_INVALID_PAIRING = 11,
  PO_STATUS_PARSE_ERROR = 12,
  PO_STATUS_IO_ERROR = 13,
  PO_STATUS_UTF8_ERROR = 14,
} po_status;

/**
 * Opaque handle to a compatibility matrix.
 */
typedef struct po_matrix po_matrix;

/**
 * Opaque handle to a pairing (perfect matching).
 */
typedef struct po_pairing po_pairing;

/**
 * Matrix statistics, mirrored as a plain C struct.
 */
typedef struct po_stats {
  double mu_element;
  double mu_sum;
  double sigma2_element;
  double sigma2_sum;
} po_stats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never null.
 */
const char *po_status_message(enum po_status status);

/**
 * Generates a seeded random matrix. `dist` is one of "uniform01",
 * "poisson1", "gaussian", "binary", "constant".
 *
 * # Safety
 * `dist` must be a valid NUL-terminated string; `out` must be valid for
 * writes.
 */
enum po_status po_matrix_generate(size_t n,
                                  const char *dist,
                                  uint64_t seed,
                                  struct po_matrix **out);

/**
 * Builds a matrix from a dense row-major `n x n` array, validating
 * symmetry and a zero diagonal.
 *
 * # Safety
 * `values` must point to `n * n` readable doubles.
 */
enum po_status po_matrix_from_dense(size_t n, const double *values, struct po_matrix **out);

/**
 * Reads a matrix file in the text format.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string.
 */
enum po_status po_matrix_read(const char *path, struct po_matrix **out);

/**
 * Writes a matrix file in the text format.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string.
 */
enum po_status po_matrix_write(const struct po_matrix *matrix, const char *path);

/**
 * Releases a matrix handle. Null is a no-op.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
void po_matrix_free(struct po_matrix *matrix);

/**
 * Element count, or 0 for null.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
size_t po_matrix_n(const struct po_matrix *matrix);

/**
 * Entry at 1-based `(i, j)`.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_matrix_get(const struct po_matrix *matrix, size_t i, size_t j, double *out);

/**
 * Row sum for 1-based element `i`.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_matrix_adjacent_sum(const struct po_matrix *matrix, size_t i, double *out);

/**
 * All four matrix statistics.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_matrix_stats(const struct po_matrix *matrix, struct po_stats *out);

/**
 * The zero-first-row observation representative of the matrix's class.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_observe_transform(const struct po_matrix *matrix, struct po_matrix **out);

/**
 * The minimum-element-variance member of the matrix's class.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_variance_optimize(const struct po_matrix *matrix, struct po_matrix **out);

/**
 * Whether two matrices yield identical totals for every pairing, decided
 * by the conserved class invariant. Writes 1 for equivalent, 0 otherwise.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_equivalent(const struct po_matrix *a,
                             const struct po_matrix *b,
                             double tol,
                             int32_t *out);

/**
 * Minimum number of total-compatibility observations identifying a class:
 * `(n-1)(n-2)/2`.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_min_observations(size_t n, uint64_t *out);

/**
 * Number of distinct pairings of `n` elements: `(n-1)!!`.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_pairing_count(size_t n, uint64_t *out);

/**
 * Runs the PNN+P2-opt combining pipeline.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_combine(const struct po_matrix *matrix,
                          size_t exchange_limit,
                          uint64_t seed,
                          int32_t maximize,
                          struct po_pairing **out);

/**
 * Exact optimum by exhaustion (n <= 14). Writes the optimal pairing and
 * its total.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_brute_force_optimum(const struct po_matrix *matrix,
                                      struct po_pairing **out_pairing,
                                      double *out_total);

/**
 * Releases a pairing handle. Null is a no-op.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
void po_pairing_free(struct po_pairing *pairing);

/**
 * Element count of a pairing, or 0 for null.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
size_t po_pairing_n(const struct po_pairing *pairing);

/**
 * Partner of 1-based element `i`.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_pairing_partner(const struct po_pairing *pairing, size_t i, size_t *out);

/**
 * Total compatibility of a pairing under a matrix.
 *
 * # Safety
 * Handle arguments must be live handles from this API (or null); out
 * pointers must be valid for writes.
 */
enum po_status po_pairing_total(const struct po_pairing *pairing,
                                const struct po_matrix *matrix,
                                double *out);

/**
 * Writes a pairing as one `i-j` line per pair.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string.
 */
enum po_status po_pairing_write(const struct po_pairing *pairing, const char *path);

/**
 * Reads a pairing from the `i-j` line format.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string.
 */
enum po_status po_pairing_read(const char *path, struct po_pairing **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PAIROPT_H */
