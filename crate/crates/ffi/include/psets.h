#ifndef PSETS_H
#define PSETS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsetsStatus {
  PSETS_STATUS_OK = 0,
  PSETS_STATUS_NULL_POINTER = 1,
  PSETS_STATUS_INVALID_ARGUMENT = 2,
  PSETS_STATUS_NOT_PRIME = 3,
  PSETS_STATUS_OUT_OF_RANGE = 4,
  PSETS_STATUS_DIMENSION_MISMATCH = 5,
  PSETS_STATUS_NOT_CERTIFIED = 6,
  PSETS_STATUS_BUDGET_EXCEEDED = 7,
  PSETS_STATUS_MALFORMED = 8,
  PSETS_STATUS_NUMERICAL_FAILURE = 9,
  PSETS_STATUS_PANIC = 10,
} PsetsStatus;

typedef enum PsetsFamily {
  PSETS_FAMILY_PSET = 0,
  PSETS_FAMILY_PARAM_PSET = 1,
  PSETS_FAMILY_PQ = 2,
  PSETS_FAMILY_QSQUARE = 3,
  PSETS_FAMILY_RSQUARE = 4,
} PsetsFamily;

/**
 * Opaque point set handle.
 */
typedef struct PsetsPointSet PsetsPointSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next failure.
 */
const char *psets_last_error(void);

bool psets_is_prime(uint64_t n);

/**
 * Smallest prime `≥ n`, or 0 when it would not fit in 63 bits.
 */
uint64_t psets_next_prime(uint64_t n);

/**
 * Builds a set of any family. `a` and `b` hold `d` entries, `eps` and `eps_b`
 * hold `d − 1`; any of them may be NULL to take the defaults (`a = 1`, `ε = 0`).
 * `q` is ignored unless `family` is `Pq`.
 *
 * # Safety
 * Non-null arrays must be readable for the stated lengths; `out` must be writable.
 */
enum PsetsStatus psets_pointset_new(enum PsetsFamily family,
                                    size_t d,
                                    uint64_t p,
                                    uint64_t q,
                                    const uint64_t *a,
                                    const uint8_t *eps,
                                    const uint64_t *b,
                                    const uint8_t *eps_b,
                                    struct PsetsPointSet **out);

/**
 * Reads a set from the JSON document produced by `psets_pointset_to_json`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum PsetsStatus psets_pointset_from_json(const char *json, struct PsetsPointSet **out);

/**
 * # Safety
 * `set` must come from this library and not have been freed already.
 */
void psets_pointset_free(struct PsetsPointSet *set);

/**
 * Number of points (0 for NULL).
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t psets_pointset_len(const struct PsetsPointSet *set);

/**
 * Dimension (0 for NULL).
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t psets_pointset_dim(const struct PsetsPointSet *set);

/**
 * Copies point `index` as `dim` numerators over a common denominator.
 *
 * # Safety
 * `numerators` must have room for `capacity` values; `denominator` must be writable.
 */
enum PsetsStatus psets_pointset_point(const struct PsetsPointSet *set,
                                      size_t index,
                                      uint64_t *numerators,
                                      size_t capacity,
                                      uint64_t *denominator);

/**
 * JSON document for the set; release with `psets_string_free`. NULL for a NULL handle.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
char *psets_pointset_to_json(const struct PsetsPointSet *set);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void psets_string_free(char *s);

/**
 * `S(k) = Σ_x exp(2πi k·x)` for a frequency of length `dim`.
 *
 * # Safety
 * `k` must hold `k_len` values; `re` and `im` must be writable.
 */
enum PsetsStatus psets_exp_sum(const struct PsetsPointSet *set,
                               const int64_t *k,
                               size_t k_len,
                               double *re,
                               double *im);

/**
 * Checks the set's exponential-sum bound over its full frequency box. `passed`
 * receives the verdict; if `report_json` is non-NULL it receives the report,
 * to be released with `psets_string_free`. `budget = 0` selects the default.
 *
 * # Safety
 * `set` must be a live handle; the output pointers must be writable or NULL.
 */
enum PsetsStatus psets_verify_weil(const struct PsetsPointSet *set,
                                   uint64_t budget,
                                   bool *passed,
                                   char **report_json);

/**
 * Mutual incoherence `μ` of the sampling matrix on `[−s, s]^d`. `bound`
 * receives the certified bound, or a negative value when none applies.
 *
 * # Safety
 * `set` must be a live handle; `mu` must be writable; `bound` may be NULL.
 */
enum PsetsStatus psets_coherence(const struct PsetsPointSet *set,
                                 uint64_t s,
                                 double *mu,
                                 double *bound);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSETS_H */
