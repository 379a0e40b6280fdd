#ifndef FAS_EXTREMES_H
#define FAS_EXTREMES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FasStatus {
  FAS_STATUS_OK = 0,
  FAS_STATUS_NULL_POINTER = 1,
  FAS_STATUS_DOMAIN = 2,
  FAS_STATUS_CONFIG = 3,
  FAS_STATUS_NUMERICAL = 4,
  FAS_STATUS_FACTORIZATION = 5,
  FAS_STATUS_SINGULARITY = 6,
  FAS_STATUS_PANIC = 7,
} FasStatus;

typedef enum FasModel {
  FAS_MODEL_JAKES = 0,
  FAS_MODEL_GAUSSIAN = 1,
} FasModel;

// Port correlation matrix.
typedef struct FasCorrMatrix FasCorrMatrix;

// Eigendecomposition of a correlation matrix, eigenvalues descending.
typedef struct FasSpectrum FasSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *fas_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *fas_version(void);

// Correlation matrix of `ports` uniformly spaced ports over an aperture of
// `aperture` wavelengths.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum FasStatus fas_corr_matrix_new(enum FasModel model,
                                   double aperture,
                                   size_t ports,
                                   struct FasCorrMatrix **out);

// Equi-correlated matrix with off-diagonal `rho`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum FasStatus fas_corr_matrix_equicorrelated(size_t ports, double rho, struct FasCorrMatrix **out);

// # Safety
// `matrix` must be null or a handle from `fas_corr_matrix_new*` not yet freed.
void fas_corr_matrix_free(struct FasCorrMatrix *matrix);

// Number of ports, or 0 for a null handle.
//
// # Safety
// `matrix` must be null or a live handle.
size_t fas_corr_matrix_dim(const struct FasCorrMatrix *matrix);

// # Safety
// `matrix` must be a live handle and `out` writable.
enum FasStatus fas_corr_matrix_get(const struct FasCorrMatrix *matrix,
                                   size_t row,
                                   size_t col,
                                   double *out);

// # Safety
// `matrix` must be a live handle and `out` writable.
enum FasStatus fas_spectrum_new(const struct FasCorrMatrix *matrix, struct FasSpectrum **out);

// # Safety
// `spectrum` must be null or a handle from `fas_spectrum_new` not yet freed.
void fas_spectrum_free(struct FasSpectrum *spectrum);

// # Safety
// `spectrum` must be a live handle and `out` writable.
enum FasStatus fas_spectrum_eigenvalue(const struct FasSpectrum *spectrum, size_t k, double *out);

// # Safety
// `spectrum` must be a live handle and `out` writable.
enum FasStatus fas_outage_rank1(const struct FasSpectrum *spectrum, double x, double *out);

// # Safety
// `spectrum` must be a live handle and `out` writable.
enum FasStatus fas_outage_rank2(const struct FasSpectrum *spectrum,
                                double x,
                                size_t quad_order,
                                size_t inner_grid,
                                double *out);

// # Safety
// `spectrum` must be a live handle and `out` writable.
enum FasStatus fas_outage_rank_k(const struct FasSpectrum *spectrum,
                                 size_t rank,
                                 double x,
                                 size_t quad_order,
                                 double *out);

// Rank-1 ergodic rate in bit/s/Hz; `avg_snr` is linear.
//
// # Safety
// `spectrum` must be a live handle and `out` writable.
enum FasStatus fas_ergodic_rate_rank1(const struct FasSpectrum *spectrum,
                                      double avg_snr,
                                      double *out);

// `P(max_n |g_n|^2 < x)` for `n` equi-correlated ports.
//
// # Safety
// `out` must be writable.
enum FasStatus fas_equicorr_cdf_exact(double x,
                                      double rho,
                                      size_t ports,
                                      size_t panel_order,
                                      double *out);

// # Safety
// `matrix` must be a live handle; `lower` and `upper` writable.
enum FasStatus fas_slepian_sandwich(const struct FasCorrMatrix *matrix,
                                    double x,
                                    size_t panel_order,
                                    double *lower,
                                    double *upper);

// Product of per-block equi-correlated CDFs. `valid` receives 1 when the
// largest cross-block correlation does not exceed the smallest in-block one.
//
// # Safety
// `matrix` must be a live handle; `out` and `valid` writable.
enum FasStatus fas_block_bound(const struct FasCorrMatrix *matrix,
                               double x,
                               size_t blocks,
                               size_t panel_order,
                               double *out,
                               int32_t *valid);

// # Safety
// `matrix` must be a live handle and `out` writable.
enum FasStatus fas_participation_ratio(const struct FasCorrMatrix *matrix, double *out);

// Clamped continuous-aperture outage `1 - e^{-x}(1 + pi sqrt(2) W x)`.
//
// # Safety
// `out` must be writable.
enum FasStatus fas_outage_continuous(double x, double aperture, double *out);

// Monte Carlo outage. Deterministic for fixed `seed` and `workers`.
//
// # Safety
// `matrix` must be a live handle; `p` and `std_err` writable.
enum FasStatus fas_simulate_outage(const struct FasCorrMatrix *matrix,
                                   double x,
                                   uint64_t trials,
                                   uint64_t seed,
                                   size_t workers,
                                   double *p,
                                   double *std_err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAS_EXTREMES_H */
