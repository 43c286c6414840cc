#ifndef TORUS_SPECTRAL_H
#define TORUS_SPECTRAL_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TsStatus {
  TS_STATUS_OK = 0,
  TS_STATUS_NULL_POINTER = 1,
  TS_STATUS_INVALID_ARGUMENT = 2,
  TS_STATUS_CONFIG = 3,
  TS_STATUS_TOLERANCE = 4,
  TS_STATUS_BUDGET = 5,
  TS_STATUS_DOMAIN = 6,
  TS_STATUS_SHAPE = 7,
  TS_STATUS_RANK = 8,
  TS_STATUS_CLASSIFICATION = 9,
  TS_STATUS_PRECONDITION = 10,
  TS_STATUS_INTEGRITY = 11,
  TS_STATUS_BACKEND = 12,
  TS_STATUS_IO = 13,
  TS_STATUS_PANIC = 14,
} TsStatus;

typedef enum TsVerdict {
  TS_VERDICT_CONVERGED = 0,
  TS_VERDICT_OBSTRUCTED = 1,
  TS_VERDICT_DIVERGED = 2,
} TsVerdict;

typedef enum TsSvMethod {
  TS_SV_METHOD_AUTO = 0,
  TS_SV_METHOD_DENSE = 1,
  TS_SV_METHOD_LANCZOS = 2,
} TsSvMethod;

/**
 * Opaque band table over a Brillouin-zone grid.
 */
typedef struct TsBandTable TsBandTable;

/**
 * Opaque Hamiltonian `(D + k + A)² + V` on a truncated lattice.
 */
typedef struct TsHamiltonian TsHamiltonian;

/**
 * Opaque result of a ρ scan.
 */
typedef struct TsScan TsScan;

typedef struct TsGaugeOutcome {
  enum TsVerdict verdict;
  double obstruction_re;
  double obstruction_im;
  /**
   * NaN when obstructed.
   */
  double residual;
  /**
   * NaN when obstructed.
   */
  double margin;
} TsGaugeOutcome;

typedef struct TsScanRow {
  double rho;
  double sigma_min_h;
  double sigma_min_precond;
  /**
   * NaN when the scan ran without the parametrix.
   */
  double t_rho_norm;
  int32_t below_floor;
} TsScanRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The `band_count` lowest bands on a grid of `points_per_axis^d` real
 * quasimomenta in `[−π, π]^d`.
 */
enum TsStatus ts_bands_compute(const struct TsHamiltonian *h,
                               size_t points_per_axis,
                               size_t band_count,
                               struct TsBandTable **out);

void ts_bands_destroy(struct TsBandTable *table);

/**
 * Number of grid points and bands.
 */
enum TsStatus ts_bands_shape(const struct TsBandTable *table, size_t *points, size_t *bands);

/**
 * `λ_band` at grid point `point`; the point's `d` coordinates are written
 * to `k_out` when it is non-null.
 */
enum TsStatus ts_bands_get(const struct TsBandTable *table,
                           size_t point,
                           size_t band,
                           double *k_out,
                           double *out);

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *ts_last_error_message(void);

/**
 * Releases a string returned by this library.
 */
void ts_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ts_version(void);

/**
 * Scalar gauge `∂̄f = g f` for a scalar field literal `g` on a d = 2
 * lattice. An obstruction is a successful call with that verdict.
 */
enum TsStatus ts_gauge_scalar(const char *g_literal, double tol, struct TsGaugeOutcome *out);

/**
 * Builds a Hamiltonian on the lattice `(d, n)`. `a_literal` and
 * `v_literal` are field literals (vector and scalar) or null for zero.
 */
enum TsStatus ts_hamiltonian_new(size_t d,
                                 size_t n,
                                 const char *a_literal,
                                 const char *v_literal,
                                 struct TsHamiltonian **out);

void ts_hamiltonian_destroy(struct TsHamiltonian *h);

/**
 * Number of lattice modes, i.e. the matrix dimension.
 */
enum TsStatus ts_hamiltonian_dim(const struct TsHamiltonian *h, size_t *out);

/**
 * `σ_min` of `H(k)` (or `H(k)Λ_ρ⁻¹` when `precondition` is nonzero) at
 * `k = 2π(β + iρ)e`; `e` has `d` entries and `method` is a `TsSvMethod`.
 */
enum TsStatus ts_sigma_min(const struct TsHamiltonian *h,
                           const double *e,
                           double beta,
                           double rho,
                           int32_t precondition,
                           int32_t method,
                           double *out);

/**
 * Runs the experiment in `config_path` (TOML config or manifest.json)
 * into `out_dir`, exactly as the command-line tool does.
 */
enum TsStatus ts_run_config(const char *config_path, const char *out_dir);

/**
 * Scans `rho[0..count]` (positive, ascending). A `delta` in `(0, 1)` also
 * measures `‖T_ρ‖` with that cover exponent; pass 0 to skip it.
 */
enum TsStatus ts_thomas_scan(const struct TsHamiltonian *h,
                             const double *e,
                             double beta,
                             const double *rho,
                             size_t count,
                             double floor,
                             double delta,
                             int32_t method,
                             struct TsScan **out);

void ts_scan_destroy(struct TsScan *scan);

enum TsStatus ts_scan_len(const struct TsScan *scan, size_t *out);

enum TsStatus ts_scan_row(const struct TsScan *scan, size_t index, struct TsScanRow *out);

/**
 * Fitted growth constant `Ĉ` in `σ_min(H) ≈ Ĉρ`.
 */
enum TsStatus ts_scan_fitted_c(const struct TsScan *scan, double *out);

/**
 * The scan CSV; release with `ts_string_free`.
 */
enum TsStatus ts_scan_csv(const struct TsScan *scan, char **out);

/**
 * `‖T_ρ‖` and `‖R_ρ‖` of the glued parametrix at one `k`.
 */
enum TsStatus ts_parametrix_residual(const struct TsHamiltonian *h,
                                     const double *e,
                                     double beta,
                                     double rho,
                                     double delta,
                                     double *t_norm,
                                     double *r_norm);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORUS_SPECTRAL_H */
