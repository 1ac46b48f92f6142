#ifndef NEGBUDGET_H
#define NEGBUDGET_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum NbStatus {
  NB_STATUS_OK = 0,
  NB_STATUS_NULL_POINTER = 1,
  NB_STATUS_OUT_OF_RANGE = 2,
  NB_STATUS_TRUNCATION = 3,
  NB_STATUS_DEGENERATE_STATE = 4,
  NB_STATUS_INVALID_ARGUMENT = 5,
  NB_STATUS_DIMENSION_MISMATCH = 6,
  NB_STATUS_CONTRACT_VIOLATION = 7,
  NB_STATUS_GRID_TOO_SMALL = 8,
  NB_STATUS_RESOURCE_LIMIT = 9,
  NB_STATUS_STEP_SIZE = 10,
  NB_STATUS_NO_BUDGET = 11,
  NB_STATUS_PANIC = 12,
} NbStatus;

/**
 * A density operator.
 */
typedef struct NbDensity NbDensity;

/**
 * A pure state vector.
 */
typedef struct NbState NbState;

/**
 * A sampled negativity trajectory.
 */
typedef struct NbTrajectory NbTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length plus one, or 0 if
 * there is no message.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t nb_last_error(char *buf, size_t len);

/**
 * `2e^{−1/2} − 1`, the negativity of `|1⟩`.
 */
double nb_single_photon_negativity(void);

/**
 * Negativity of `p|1⟩⟨1| + (1−p)|0⟩⟨0|` in closed form.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NbStatus nb_mixture_negativity_closed_form(double p, double *out);

/**
 * `|sin(2gt)|`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NbStatus nb_concurrence_closed_form(double g, double t, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum NbStatus nb_state_fock(size_t n, size_t dim, struct NbState **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum NbStatus nb_state_coherent(double re, double im, size_t dim, struct NbState **out);

/**
 * Odd cat state `∝ |α⟩ − |−α⟩`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NbStatus nb_state_odd_cat(double re, double im, size_t dim, struct NbState **out);

/**
 * `S(r)|n⟩`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NbStatus nb_state_squeezed_fock(double r, size_t n, size_t dim, struct NbState **out);

/**
 * Total Hilbert-space dimension, or 0 for null.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t nb_state_dim(const struct NbState *state);

/**
 * # Safety
 * `state` must be a live handle; `re` and `im` must be valid for writes.
 */
enum NbStatus nb_state_amplitude(const struct NbState *state, size_t index, double *re, double *im);

/**
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void nb_state_free(struct NbState *state);

/**
 * `|ψ⟩⟨ψ|`.
 *
 * # Safety
 * `state` must be a live handle; `out` must be valid for writes.
 */
enum NbStatus nb_state_density(const struct NbState *state, struct NbDensity **out);

/**
 * Reduced state of a multi-mode vector on the subsystems listed in `keep`.
 *
 * # Safety
 * `state` must be a live handle, `keep` valid for `n_keep` reads and `out`
 * valid for writes.
 */
enum NbStatus nb_state_reduced(const struct NbState *state,
                               const size_t *keep,
                               size_t n_keep,
                               struct NbDensity **out);

/**
 * `p|1⟩⟨1| + (1−p)|0⟩⟨0|` padded to `dim`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NbStatus nb_density_excitation_mixture(double p, size_t dim, struct NbDensity **out);

/**
 * Total dimension, or 0 for null.
 *
 * # Safety
 * `rho` must be null or a live handle.
 */
size_t nb_density_dim(const struct NbDensity *rho);

/**
 * # Safety
 * `rho` must be a live handle; `out` must be valid for writes.
 */
enum NbStatus nb_density_purity(const struct NbDensity *rho, double *out);

/**
 * Concurrence `√(2(1 − Tr ρ²))` of a qubit reduced from a pure two-qubit state.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be valid for writes.
 */
enum NbStatus nb_density_concurrence(const struct NbDensity *rho, double *out);

/**
 * Single-mode Wigner negativity on a square grid of half-width `extent`
 * with `points` nodes per axis.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be valid for writes.
 */
enum NbStatus nb_density_negativity(const struct NbDensity *rho,
                                    double extent,
                                    size_t points,
                                    double *out);

/**
 * Discrete sum negativity for a single qudit of odd prime dimension 3, 5 or 7.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be valid for writes.
 */
enum NbStatus nb_density_discrete_sum_negativity(const struct NbDensity *rho, double *out);

/**
 * # Safety
 * `rho` must be null or a handle not yet freed.
 */
void nb_density_free(struct NbDensity *rho);

/**
 * Propagates `|0⟩_A ⊗ seed_B` through the beam splitter at rate `g` for time
 * `t` and returns both reduced modes. `leakage` (may be null) receives the
 * population reaching the top Fock level.
 *
 * # Safety
 * `seed` must be a live handle; `out_a` and `out_b` valid for writes.
 */
enum NbStatus nb_evolve_seed(const struct NbState *seed,
                             double g,
                             double t,
                             struct NbDensity **out_a,
                             struct NbDensity **out_b,
                             double *leakage);

/**
 * Two-qubit exchange trajectory over one period at `n_times` samples.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NbStatus nb_two_body_trajectory(double g,
                                     double extent,
                                     size_t points,
                                     size_t n_times,
                                     struct NbTrajectory **out);

/**
 * Perfect-transfer chain trajectory over `[0, π/(2g)]` without block samples.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NbStatus nb_chain_trajectory(size_t sites,
                                  double g,
                                  double extent,
                                  size_t points,
                                  size_t n_times,
                                  struct NbTrajectory **out);

/**
 * Number of samples, or 0 for null.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t nb_trajectory_len(const struct NbTrajectory *traj);

/**
 * Number of sites, or 0 for null.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t nb_trajectory_sites(const struct NbTrajectory *traj);

/**
 * The seed budget, or NaN for null.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
double nb_trajectory_budget(const struct NbTrajectory *traj);

/**
 * Time and summed local negativity of sample `index`.
 *
 * # Safety
 * `traj` must be a live handle; `t` and `total` valid for writes.
 */
enum NbStatus nb_trajectory_sample(const struct NbTrajectory *traj,
                                   size_t index,
                                   double *t,
                                   double *total);

/**
 * Local negativity of `site` at sample `index`.
 *
 * # Safety
 * `traj` must be a live handle; `out` valid for writes.
 */
enum NbStatus nb_trajectory_site_negativity(const struct NbTrajectory *traj,
                                            size_t index,
                                            size_t site,
                                            double *out);

/**
 * # Safety
 * `traj` must be null or a handle not yet freed.
 */
void nb_trajectory_free(struct NbTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEGBUDGET_H */
