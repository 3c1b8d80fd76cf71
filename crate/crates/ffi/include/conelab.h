#ifndef CONELAB_H
#define CONELAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// How two one-sided interval distances combine.
typedef enum ConelabMode {
  // Larger of the two one-sided distances.
  CONELAB_MODE_MAX = 0,
  // Smaller of the two.
  CONELAB_MODE_MIN = 1,
} ConelabMode;

typedef enum ConelabNorm {
  CONELAB_NORM_L1 = 0,
  CONELAB_NORM_L2 = 1,
  CONELAB_NORM_LINF = 2,
} ConelabNorm;

// Status codes. Values 1 to 18 match the `error_code` column of conelab reports.
typedef enum ConelabStatus {
  CONELAB_STATUS_OK = 0,
  CONELAB_STATUS_DIMENSION_MISMATCH = 1,
  CONELAB_STATUS_NON_FINITE = 2,
  CONELAB_STATUS_INFEASIBLE = 3,
  CONELAB_STATUS_UNBOUNDED = 4,
  CONELAB_STATUS_UNSUPPORTED = 5,
  CONELAB_STATUS_INCONSISTENT = 6,
  CONELAB_STATUS_CONVERGENCE = 7,
  CONELAB_STATUS_NOT_INTERIOR = 8,
  CONELAB_STATUS_NOT_IN_CONE = 9,
  CONELAB_STATUS_NOT_IN_BODY = 10,
  CONELAB_STATUS_NOT_EXTREME = 11,
  CONELAB_STATUS_NOT_ON_SPHERE = 12,
  CONELAB_STATUS_INVALID_PARAMETER = 13,
  CONELAB_STATUS_INVALID_RECIPE = 14,
  CONELAB_STATUS_NEEDS_SAMPLING_BUDGET = 15,
  CONELAB_STATUS_DEGENERATE_REGION = 16,
  CONELAB_STATUS_CONFIG = 17,
  CONELAB_STATUS_IO = 18,
  CONELAB_STATUS_NULL_POINTER = 100,
  CONELAB_STATUS_INVALID_UTF8 = 101,
  CONELAB_STATUS_BUFFER_TOO_SMALL = 102,
  CONELAB_STATUS_PANIC = 103,
} ConelabStatus;

// A convex base body.
typedef struct ConelabBody ConelabBody;

// The cone over a base body with a chosen norm.
typedef struct ConelabCone ConelabCone;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Build a body from a TOML document: a catalog recipe with `kind`, or bare
// `hrep` rows or `vrep` points.
//
// # Safety
// `recipe` must be a valid NUL-terminated string; `out_body` must be writable.
enum ConelabStatus conelab_body_from_recipe(const char *recipe, struct ConelabBody **out_body);

// Build the polytope `{x : a·x ≤ b}` from `rows` rows of `dim + 1` doubles
// laid out as `a₁ … a_dim b`, row-major.
//
// # Safety
// `rows` must point at `n_rows * (dim + 1)` doubles; `out_body` must be writable.
enum ConelabStatus conelab_body_from_hrep(const double *rows,
                                          size_t n_rows,
                                          size_t dim,
                                          struct ConelabBody **out_body);

// Dimension of the space the body lives in, or 0 for a null handle.
//
// # Safety
// `body` must be null or a live handle.
size_t conelab_body_dim(const struct ConelabBody *body);

// # Safety
// `body` must be null or a handle not yet freed.
void conelab_body_free(struct ConelabBody *body);

// The cone over a copy of `body`, measured with `norm` on the base space.
//
// # Safety
// `body` must be a live handle; `out_cone` must be writable.
enum ConelabStatus conelab_cone_new(const struct ConelabBody *body,
                                    enum ConelabNorm norm,
                                    struct ConelabCone **out_cone);

// # Safety
// `cone` must be null or a handle not yet freed.
void conelab_cone_free(struct ConelabCone *cone);

// Vertices of the order interval between 0 and `z = (t, x₁, …, x_dim)`.
//
// Writes up to `capacity` vertices of `dim + 1` doubles each into `out_vertices` and
// their count into `n_vertices`. When `capacity` is too small the count is
// still reported and the status is `BufferTooSmall`; pass `capacity = 0` to
// query the size. Curved bases give `Unsupported`.
//
// # Safety
// `z` must point at `z_len` doubles; `out_vertices` at `capacity * z_len` doubles.
enum ConelabStatus conelab_interval_vertices(const struct ConelabCone *cone,
                                             const double *z,
                                             size_t z_len,
                                             double *out_vertices,
                                             size_t capacity,
                                             size_t *n_vertices);

// Thickness of the interval between 0 and `(1, x)`.
//
// Exact over polytopes. Over curved bases, `budget > 0` allows a sampled
// lower bound with the given seed, flagged by `*exact = 0`; with
// `budget = 0` the call fails with `NeedsSamplingBudget`.
//
// # Safety
// `x` must point at `dim` doubles; `value` and `exact` must be writable.
enum ConelabStatus conelab_thickness(const struct ConelabCone *cone,
                                     const double *x,
                                     size_t dim,
                                     uint64_t budget,
                                     uint64_t seed,
                                     double *value,
                                     int32_t *exact);

// Distance between the intervals under `(1, x)` and `(1, y)`. The budget and
// seed act as in [`conelab_thickness`].
//
// # Safety
// `x` and `y` must point at `dim` doubles; `value` and `exact` must be writable.
enum ConelabStatus conelab_rho(const struct ConelabCone *cone,
                               const double *x,
                               const double *y,
                               size_t dim,
                               enum ConelabMode mode,
                               uint64_t budget,
                               uint64_t seed,
                               double *value,
                               int32_t *exact);

// Length of the longest chord of the body whose midpoint is `x`.
//
// # Safety
// `x` must point at `dim` doubles; `value` must be writable.
enum ConelabStatus conelab_max_chord(const struct ConelabBody *body,
                                     const double *x,
                                     size_t dim,
                                     enum ConelabNorm norm,
                                     double *value);

// Rotundity modulus at the sphere point `x` for the offset `delta`.
//
// # Safety
// `x` must point at `dim` doubles; `value` must be writable.
enum ConelabStatus conelab_mlur_modulus(const struct ConelabBody *body,
                                        const double *x,
                                        size_t dim,
                                        double delta,
                                        enum ConelabNorm norm,
                                        double *value);

// Static description of a status code.
const char *conelab_status_string(enum ConelabStatus status);

// Message of the last failure on this thread, or null if none. The pointer
// stays valid until the next failing call on the same thread.
const char *conelab_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONELAB_H */
