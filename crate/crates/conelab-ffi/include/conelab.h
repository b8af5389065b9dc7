#ifndef CONELAB_H
#define CONELAB_H

/* Generated by cbindgen from conelab-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum {
  CONELAB_STATUS_OK = 0,
  CONELAB_STATUS_INVALID_ARGUMENT = 1,
  CONELAB_STATUS_DIMENSION_MISMATCH = 2,
  CONELAB_STATUS_NOT_INTERIOR = 3,
  CONELAB_STATUS_DEGENERATE_SPECTRUM = 4,
  CONELAB_STATUS_JSON = 5,
  CONELAB_STATUS_NULL_POINTER = 6,
  CONELAB_STATUS_INTERNAL = 7,
} conelab_status;

/**
 * Cone membership verdict.
 */
typedef enum {
  CONELAB_POSITIVITY_INTERIOR = 0,
  CONELAB_POSITIVITY_BOUNDARY = 1,
  CONELAB_POSITIVITY_OUTSIDE = 2,
} conelab_positivity;

/**
 * Orientation search verdict.
 */
typedef enum {
  CONELAB_ORIENTATION_VERDICT_FOUND = 0,
  CONELAB_ORIENTATION_VERDICT_NOT_FOUND = 1,
  CONELAB_ORIENTATION_VERDICT_INCONCLUSIVE = 2,
} conelab_orientation_verdict;

/**
 * Opaque algebra handle.
 */
typedef struct conelab_algebra conelab_algebra;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *conelab_last_error_message(void);

/**
 * Builds a catalog algebra: `sym_real`, `herm_complex`, `herm_quat`,
 * `spin_factor` (alias `spin`) or `abelian`, with the given size parameter.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
conelab_status conelab_algebra_catalog(const char *name, size_t param, conelab_algebra **out);

/**
 * Parses an algebra from its JSON description (same schema as the CLI
 * `--file` input).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
conelab_status conelab_algebra_from_json(const char *json, conelab_algebra **out);

/**
 * Releases an algebra handle. Passing NULL is a no-op.
 *
 * # Safety
 * `alg` must come from a conelab constructor and not be used afterwards.
 */
void conelab_algebra_free(conelab_algebra *alg);

/**
 * Dimension of the algebra, or 0 for NULL.
 *
 * # Safety
 * `alg` must be a live handle or NULL.
 */
size_t conelab_algebra_dim(const conelab_algebra *alg);

/**
 * Writes the identity element's coordinates into `out` (length = dim).
 *
 * # Safety
 * `alg` must be a live handle; `out` must hold `dim` doubles.
 */
conelab_status conelab_identity(const conelab_algebra *alg, double *out);

/**
 * Jordan product `x ∘ y` into `out` (all arrays of length dim).
 *
 * # Safety
 * All pointers must reference `dim` doubles.
 */
conelab_status conelab_product(const conelab_algebra *alg,
                               const double *x,
                               const double *y,
                               double *out);

/**
 * Spectral values of `x`, ascending. `out_values` must hold `dim` doubles;
 * the number actually written lands in `out_count`.
 *
 * # Safety
 * Pointer contracts as in `conelab_product`.
 */
conelab_status conelab_spectral_values(const conelab_algebra *alg,
                                       const double *x,
                                       double *out_values,
                                       size_t *out_count);

/**
 * Order-unit norm `max |λ_i(x)|` at the identity base point.
 *
 * # Safety
 * Pointer contracts as in `conelab_product`.
 */
conelab_status conelab_order_unit_norm(const conelab_algebra *alg, const double *x, double *out);

/**
 * Cone membership verdict for `x`.
 *
 * # Safety
 * Pointer contracts as in `conelab_product`.
 */
conelab_status conelab_cone_member(const conelab_algebra *alg,
                                   const double *x,
                                   conelab_positivity *out);

/**
 * Point symmetry `s_p(x)` of the cone (p must be interior, x invertible).
 *
 * # Safety
 * Pointer contracts as in `conelab_product`.
 */
conelab_status conelab_cone_symmetry(const conelab_algebra *alg,
                                     const double *p,
                                     const double *x,
                                     double *out);

/**
 * Exponential chart `exp(L_v)(e)`; the result is always interior.
 *
 * # Safety
 * Pointer contracts as in `conelab_product`.
 */
conelab_status conelab_cone_exp(const conelab_algebra *alg, const double *v, double *out);

/**
 * Verifies the JB axioms on seeded samples; writes the max residual and the
 * overall verdict.
 *
 * # Safety
 * `alg`, `out_max_residual` and `out_pass` must be valid.
 */
conelab_status conelab_verify_jb(const conelab_algebra *alg,
                                 size_t samples,
                                 uint64_t seed,
                                 double *out_max_residual,
                                 bool *out_pass);

/**
 * Runs the orientation search and reports the verdict with the residual
 * (Found residual on success, best floor otherwise).
 *
 * # Safety
 * `alg`, `out_verdict` and `out_residual` must be valid.
 */
conelab_status conelab_solve_orientation(const conelab_algebra *alg,
                                         uint64_t seed,
                                         size_t restarts,
                                         double tol_success,
                                         double tol_fail,
                                         conelab_orientation_verdict *out_verdict,
                                         double *out_residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONELAB_H */
