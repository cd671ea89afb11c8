#ifndef FBREGION_H
#define FBREGION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum FbrStatus {
  FBR_STATUS_OK = 0,
  FBR_STATUS_NULL_POINTER = 1,
  FBR_STATUS_INVALID_ARGUMENT = 2,
  FBR_STATUS_INVALID_DISTRIBUTION = 3,
  FBR_STATUS_DIMENSION_MISMATCH = 4,
  FBR_STATUS_NOT_PSD = 5,
  FBR_STATUS_INFEASIBLE = 6,
  FBR_STATUS_NOT_DEGRADED = 7,
  FBR_STATUS_GRID_TOO_LARGE = 8,
  FBR_STATUS_NUMERIC_FAILURE = 9,
  /**
   * The verification suite ran and at least one check failed.
   */
  FBR_STATUS_VERIFICATION_FAILED = 10,
  FBR_STATUS_PANIC = 11,
} FbrStatus;

/**
 * Rate unit selector.
 */
typedef enum FbrUnit {
  FBR_UNIT_NATS = 0,
  FBR_UNIT_BITS = 1,
} FbrUnit;

/**
 * Physically degraded DM broadcast channel.
 */
typedef struct FbrDegradedBc FbrDegradedBc;

/**
 * Gaussian vector broadcast model.
 */
typedef struct FbrGaussianModel FbrGaussianModel;

/**
 * List of rate points. Gaussian rates are in nats, DM rates in bits.
 */
typedef struct FbrRegion FbrRegion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fbr_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length, or 0 when there
 * is none.
 *
 * # Safety
 * `buf` must be writable for `len` bytes when `len > 0`.
 */
size_t fbr_last_error(char *buf, size_t len);

/**
 * Builds a Gaussian model from row-major `dim x dim` matrices. `g` may be
 * null for the identity channel.
 *
 * # Safety
 * Non-null matrix pointers must reference `dim * dim` doubles; `out` must
 * be writable.
 */
enum FbrStatus fbr_gaussian_model_new(size_t dim,
                                      const double *g,
                                      const double *k,
                                      const double *k_tilde,
                                      const double *k_prime,
                                      struct FbrGaussianModel **out);

/**
 * Parses a Gaussian model from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FbrStatus fbr_gaussian_model_from_json(const char *json, struct FbrGaussianModel **out);

/**
 * # Safety
 * `model` must come from a constructor of this library or be null.
 */
void fbr_gaussian_model_free(struct FbrGaussianModel *model);

/**
 * Rates `(R1, R2)` in nats of layer covariances `b1`, `b2` (row-major).
 *
 * # Safety
 * `b1`, `b2` must reference `dim * dim` doubles; outputs must be writable.
 */
enum FbrStatus fbr_gvbc_region_point(const struct FbrGaussianModel *model,
                                     const double *b1,
                                     const double *b2,
                                     double *r1,
                                     double *r2);

/**
 * Boundary points (nats) for the given slopes. `converged` (nullable)
 * receives 1 when every slope converged.
 *
 * # Safety
 * `lambdas` must reference `n` doubles; `out` must be writable.
 */
enum FbrStatus fbr_gvbc_boundary_sweep(const struct FbrGaussianModel *model,
                                       const double *lambdas,
                                       size_t n,
                                       uint64_t seed,
                                       int32_t *converged,
                                       struct FbrRegion **out);

/**
 * Cascade `p1(y|x) p2(z|y)` from row-major stochastic matrices.
 *
 * # Safety
 * `stage1` must reference `nx * ny` doubles and `stage2` `ny * nz`; `out`
 * must be writable.
 */
enum FbrStatus fbr_degraded_bc_new(size_t nx,
                                   size_t ny,
                                   size_t nz,
                                   const double *stage1,
                                   const double *stage2,
                                   struct FbrDegradedBc **out);

/**
 * Factorizes a joint channel `q(y,z|x)` (row-major `nx x (ny * nz)`,
 * column `y * nz + z`). Returns `NotDegraded` and writes the residual to
 * `violation` (nullable) when no factorization exists.
 *
 * # Safety
 * `q` must reference `nx * ny * nz` doubles; `out` must be writable.
 */
enum FbrStatus fbr_degraded_bc_from_joint(size_t nx,
                                          size_t ny,
                                          size_t nz,
                                          const double *q,
                                          double *violation,
                                          struct FbrDegradedBc **out);

/**
 * # Safety
 * `bc` must come from a constructor of this library or be null.
 */
void fbr_degraded_bc_free(struct FbrDegradedBc *bc);

/**
 * `I(X;Y) − λ I(X;Z)` at input law `px`.
 *
 * # Safety
 * `px` must reference `n` doubles; `value` must be writable.
 */
enum FbrStatus fbr_s_lambda(const struct FbrDegradedBc *bc,
                            const double *px,
                            size_t n,
                            double lambda,
                            enum FbrUnit unit,
                            double *value);

/**
 * Upper concave envelope at `px` on a resolution-`resolution` grid,
 * together with the grid's certified gap. Both values in nats.
 *
 * # Safety
 * `px` must reference `n` doubles; outputs must be writable.
 */
enum FbrStatus fbr_envelope(const struct FbrDegradedBc *bc,
                            double lambda,
                            const double *px,
                            size_t n,
                            size_t resolution,
                            double *value,
                            double *certified_gap);

/**
 * Superposition boundary point (bits) of the BSC cascade at `alpha`.
 *
 * # Safety
 * Outputs must be writable.
 */
enum FbrStatus fbr_bsc_closed_form(double p1, double p_end, double alpha, double *r1, double *r2);

/**
 * Superposition frontier (bits) on a resolution-`resolution` grid.
 *
 * # Safety
 * `out` must be writable.
 */
enum FbrStatus fbr_superposition_region(const struct FbrDegradedBc *bc,
                                        size_t resolution,
                                        struct FbrRegion **out);

/**
 * Pareto set of `(R0, R1, R2)` (bits) for the product of `first`
 * (`X1 → Y1 → Z1`) and `second` (`X2 → Z2 → Y2`, stage 1 ending at `Z2`).
 *
 * # Safety
 * `out` must be writable.
 */
enum FbrStatus fbr_rpdbc_region(const struct FbrDegradedBc *first,
                                const struct FbrDegradedBc *second,
                                size_t resolution,
                                struct FbrRegion **out);

/**
 * Number of points in `region` (0 for null).
 *
 * # Safety
 * `region` must come from this library or be null.
 */
size_t fbr_region_len(const struct FbrRegion *region);

/**
 * Point `index` of `region`; `r0` is 0 for two-user regions.
 *
 * # Safety
 * Outputs must be writable.
 */
enum FbrStatus fbr_region_point(const struct FbrRegion *region,
                                size_t index,
                                double *r0,
                                double *r1,
                                double *r2);

/**
 * # Safety
 * `region` must come from this library or be null.
 */
void fbr_region_free(struct FbrRegion *region);

/**
 * Runs a verification suite by name. `samples = 0` selects the suite
 * default. `report_json` (nullable) receives the JSON report, released
 * with [`fbr_string_free`]. Returns `VerificationFailed` when any
 * non-diagnostic check fails.
 *
 * # Safety
 * `suite` must be a NUL-terminated string.
 */
enum FbrStatus fbr_verify(const char *suite, uint64_t seed, size_t samples, char **report_json);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void fbr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FBREGION_H */
