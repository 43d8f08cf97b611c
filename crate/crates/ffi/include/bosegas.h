#ifndef BOSEGAS_H
#define BOSEGAS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum BosegasStatus {
  BOSEGAS_STATUS_OK = 0,
  BOSEGAS_STATUS_NULL_POINTER = 1,
  BOSEGAS_STATUS_INVALID_ARGUMENT = 2,
  BOSEGAS_STATUS_INVALID_POTENTIAL = 3,
  BOSEGAS_STATUS_NON_CONVERGENT = 4,
  BOSEGAS_STATUS_REGIME_VIOLATION = 5,
  BOSEGAS_STATUS_HARD_CORE_UNSUPPORTED = 6,
  BOSEGAS_STATUS_NOT_FOUND = 7,
  BOSEGAS_STATUS_NUMERICAL = 8,
  BOSEGAS_STATUS_IO = 9,
  BOSEGAS_STATUS_PANIC = 10,
} BosegasStatus;

/**
 * Opaque radial potential.
 */
typedef struct BosegasPotential BosegasPotential;

/**
 * Opaque scattering solution.
 */
typedef struct BosegasScattering BosegasScattering;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL.
 *
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *bosegas_last_error(void);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum BosegasStatus bosegas_potential_square_well(double height,
                                                 double range,
                                                 struct BosegasPotential **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum BosegasStatus bosegas_potential_hard_core(double radius, struct BosegasPotential **out);

/**
 * Piecewise-constant potential with `n_values + 1` breakpoints.
 *
 * # Safety
 * `breakpoints` and `values` must point to arrays of the given lengths.
 */
enum BosegasStatus bosegas_potential_piecewise_constant(const double *breakpoints,
                                                        size_t n_breakpoints,
                                                        const double *values,
                                                        size_t n_values,
                                                        struct BosegasPotential **out);

/**
 * Parses a potential file (TOML source text, NUL-terminated UTF-8).
 *
 * # Safety
 * `source` must be a NUL-terminated string.
 */
enum BosegasStatus bosegas_potential_from_toml(const char *source, struct BosegasPotential **out);

/**
 * # Safety
 * `v` must be NULL or a handle from a constructor, freed at most once.
 */
void bosegas_potential_free(struct BosegasPotential *v);

/**
 * # Safety
 * `v` must be a live handle and `out` valid.
 */
enum BosegasStatus bosegas_potential_range(const struct BosegasPotential *v, double *out);

/**
 * Scattering length from the zero-energy ODE at default tolerances.
 *
 * # Safety
 * `v` must be a live handle and `out` valid.
 */
enum BosegasStatus bosegas_scattering_length(const struct BosegasPotential *v, double *out);

/**
 * Scattering length from the variational minimum on `|x| ≤ r_tilde`.
 *
 * # Safety
 * `v` must be a live handle and `out` valid.
 */
enum BosegasStatus bosegas_scattering_length_variational(const struct BosegasPotential *v,
                                                         double r_tilde,
                                                         size_t elements,
                                                         double *out);

/**
 * # Safety
 * `v` must be a live handle and `out` valid.
 */
enum BosegasStatus bosegas_scattering_solve(const struct BosegasPotential *v,
                                            struct BosegasScattering **out);

/**
 * # Safety
 * `s` must be NULL or a handle from [`bosegas_scattering_solve`], freed at most once.
 */
void bosegas_scattering_free(struct BosegasScattering *s);

/**
 * # Safety
 * `s` must be a live handle and `out` valid.
 */
enum BosegasStatus bosegas_scattering_a(const struct BosegasScattering *s, double *out);

/**
 * `ĝ(k)`.
 *
 * # Safety
 * `s` must be a live handle and `out` valid.
 */
enum BosegasStatus bosegas_scattering_g_hat(const struct BosegasScattering *s,
                                            double k,
                                            double *out);

/**
 * `ω̂(k)`.
 *
 * # Safety
 * `s` must be a live handle and `out` valid.
 */
enum BosegasStatus bosegas_scattering_omega_hat(const struct BosegasScattering *s,
                                                double k,
                                                double *out);

/**
 * `128/(15√π)` from the Bogoliubov integral.
 *
 * # Safety
 * `out` must be valid.
 */
enum BosegasStatus bosegas_lhy_coefficient(double *out);

/**
 * Two-mode Bogoliubov lower bound.
 *
 * # Safety
 * `out` must be valid.
 */
enum BosegasStatus bosegas_bog_bound(double a,
                                     double b,
                                     double kappa_re,
                                     double kappa_im,
                                     double *out);

/**
 * Ground energy of the truncated two-mode Hamiltonian.
 *
 * # Safety
 * `out` must be valid.
 */
enum BosegasStatus bosegas_fock_oracle(double a,
                                       double b,
                                       double kappa_re,
                                       double kappa_im,
                                       size_t n_max,
                                       double *out);

/**
 * Grand-canonical lower bound `4πρ̃²a(1 − C(√(ρ̃a³) + R²aρ̃))`.
 *
 * # Safety
 * `v` must be a live handle and `out` valid.
 */
enum BosegasStatus bosegas_energy_grand_canonical(const struct BosegasPotential *v,
                                                  double rho_tilde,
                                                  double c,
                                                  double *out);

/**
 * Box lower bound as a JSON document; free it with [`bosegas_string_free`].
 *
 * # Safety
 * `v` must be a live handle and `out` valid.
 */
enum BosegasStatus bosegas_energy_box_json(const struct BosegasPotential *v,
                                           double rho,
                                           double rho_mu,
                                           double c,
                                           char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed at most once.
 */
void bosegas_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOSEGAS_H */
