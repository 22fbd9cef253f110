#ifndef NONLOCAL_DECAY_H
#define NONLOCAL_DECAY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NldStatus {
  NLD_STATUS_OK = 0,
  NLD_STATUS_NULL_POINTER = 1,
  NLD_STATUS_DOMAIN = 2,
  NLD_STATUS_NUMERICAL = 3,
  NLD_STATUS_USAGE = 4,
  NLD_STATUS_INVALID_INPUT = 5,
  NLD_STATUS_BUFFER_TOO_SMALL = 6,
  NLD_STATUS_PANIC = 7,
} NldStatus;

/**
 * Relaxation curve on a grid.
 */
typedef struct NldCurve NldCurve;

/**
 * Time grid 0 = t_0 < ... < t_N.
 */
typedef struct NldGrid NldGrid;

/**
 * Kernel pair (k, l).
 */
typedef struct NldKernel NldKernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *nld_version(void);

/**
 * Message of the last failed call on this thread; valid until the next failing call.
 */
const char *nld_last_error(void);

/**
 * Fractional pair with order alpha in (0, 1).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum NldStatus nld_kernel_fractional(double alpha, struct NldKernel **out);

/**
 * Pair from a JSON family description such as `{"family":"fractional_exp","alpha":0.5,"gamma":1}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum NldStatus nld_kernel_from_json(const char *json, struct NldKernel **out);

/**
 * # Safety
 * `kernel` must come from a kernel constructor and not be used afterwards; null is ignored.
 */
void nld_kernel_free(struct NldKernel *kernel);

/**
 * k(t) for t > 0.
 *
 * # Safety
 * `kernel` must be a live handle and `value` writable.
 */
enum NldStatus nld_kernel_eval_k(const struct NldKernel *kernel, double t, double *value);

/**
 * l(t) for t > 0, by Laplace inversion when l has no closed form.
 *
 * # Safety
 * `kernel` must be a live handle and `value` writable.
 */
enum NldStatus nld_kernel_eval_l(const struct NldKernel *kernel, double t, double *value);

/**
 * Graded grid t_i = t_end (i/n)^r.
 *
 * # Safety
 * `out` must be writable.
 */
enum NldStatus nld_grid_graded(double t_end, uintptr_t n, double r, struct NldGrid **out);

/**
 * Number of nodes, including t = 0; zero for a null handle.
 *
 * # Safety
 * `grid` must be a live handle or null.
 */
uintptr_t nld_grid_len(const struct NldGrid *grid);

/**
 * # Safety
 * `grid` must be a live handle and `buf` hold `len` values.
 */
enum NldStatus nld_grid_nodes(const struct NldGrid *grid, double *buf, uintptr_t len);

/**
 * # Safety
 * `grid` must come from a grid constructor and not be used afterwards; null is ignored.
 */
void nld_grid_free(struct NldGrid *grid);

/**
 * Relaxation function s_mu on the grid.
 *
 * # Safety
 * `kernel` and `grid` must be live handles and `out` writable.
 */
enum NldStatus nld_relaxation_solve(const struct NldKernel *kernel,
                                    double mu,
                                    const struct NldGrid *grid,
                                    struct NldCurve **out);

/**
 * # Safety
 * `curve` must be a live handle or null.
 */
uintptr_t nld_curve_len(const struct NldCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle and `buf` hold `len` values.
 */
enum NldStatus nld_curve_values(const struct NldCurve *curve, double *buf, uintptr_t len);

/**
 * Checks the two-sided envelope of the curve; `pass` receives 1 or 0.
 *
 * # Safety
 * `curve` and `kernel` must be live handles and `pass` writable.
 */
enum NldStatus nld_curve_check_bounds(const struct NldCurve *curve,
                                      const struct NldKernel *kernel,
                                      int32_t *pass);

/**
 * # Safety
 * `curve` must come from a solve and not be used afterwards; null is ignored.
 */
void nld_curve_free(struct NldCurve *curve);

/**
 * E_alpha(-x) for alpha in (0, 1] and x >= 0; `error` (may be null) receives the estimate.
 *
 * # Safety
 * `value` must be writable; `error` writable or null.
 */
enum NldStatus nld_mittag_leffler(double alpha, double x, double *value, double *error);

/**
 * Solves the scalar problem d/dt(g_{1-alpha} * [u - u0]) + nu |u|^{gamma-1} u = 0 on the grid.
 *
 * # Safety
 * `grid` must be a live handle and `buf` hold `len >= nld_grid_len(grid)` values.
 */
enum NldStatus nld_scalar_solve(double alpha,
                                double nu,
                                double gamma,
                                double u0,
                                const struct NldGrid *grid,
                                double *buf,
                                uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NONLOCAL_DECAY_H */
