#ifndef MAZER_H
#define MAZER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Coupling profile shapes.
 */
typedef enum MazerProfile {
  MAZER_PROFILE_MEZA = 0,
  MAZER_PROFILE_SECH = 1,
  MAZER_PROFILE_GAUSSIAN = 2,
} MazerProfile;

/**
 * Result codes.
 */
typedef enum MazerStatus {
  MAZER_STATUS_OK = 0,
  MAZER_STATUS_NULL_POINTER = 1,
  MAZER_STATUS_INVALID_ARGUMENT = 2,
  MAZER_STATUS_NUMERICAL_FAILURE = 3,
  MAZER_STATUS_NOT_CONVERGED = 4,
  MAZER_STATUS_BOUNDARY_CONTAMINATION = 5,
  MAZER_STATUS_PANIC = 6,
} MazerStatus;

/**
 * Opaque propagation state.
 */
typedef struct MazerPropagator MazerPropagator;

typedef struct MazerComplex {
  double re;
  double im;
} MazerComplex;

/**
 * Dressed-channel amplitudes.
 */
typedef struct MazerDressed {
  struct MazerComplex rho_plus;
  struct MazerComplex rho_minus;
  struct MazerComplex tau_plus;
  struct MazerComplex tau_minus;
} MazerDressed;

/**
 * Bare-state reflection and transmission amplitudes.
 */
typedef struct MazerBare {
  struct MazerComplex r_e;
  struct MazerComplex r_g;
  struct MazerComplex t_e;
  struct MazerComplex t_g;
} MazerBare;

typedef struct MazerObservables {
  double inversion;
  double entropy;
  double p_excited;
  double p_ground;
  double p_right;
  double envelope;
} MazerObservables;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t mazer_last_error(char *buf, size_t len);

/**
 * Static description of a status code.
 */
const char *mazer_status_message(enum MazerStatus status);

/**
 * Dressed amplitudes of the meza (top-hat) coupling of length `length`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `MazerDressed`.
 */
enum MazerStatus mazer_meza_dressed(double k,
                                    uint32_t n,
                                    double lambda0,
                                    double length,
                                    struct MazerDressed *out);

/**
 * Dressed amplitudes of the `sech^2` coupling of waist `waist`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `MazerDressed`.
 */
enum MazerStatus mazer_sech_dressed(double k,
                                    uint32_t n,
                                    double lambda0,
                                    double waist,
                                    struct MazerDressed *out);

/**
 * Bare-state amplitudes for an atom entering in the excited state.
 *
 * # Safety
 * `dressed` and `out` must be null or valid pointers.
 */
enum MazerStatus mazer_bare_from_dressed(const struct MazerDressed *dressed, struct MazerBare *out);

/**
 * Transmission probability `|T_e|^2 + |T_g|^2` and entanglement entropy.
 *
 * # Safety
 * `bare` must be valid; `p_trans` and `entropy` may be null when unwanted.
 */
enum MazerStatus mazer_bare_observables(const struct MazerBare *bare,
                                        double *p_trans,
                                        double *entropy);

/**
 * Momentum-averaged transmission probability and entropy for the meza or
 * sech profile with Gaussian momentum spread `dk` around `k0`.
 *
 * # Safety
 * `p_trans` and `entropy` may be null when unwanted.
 */
enum MazerStatus mazer_ensemble_transmission(enum MazerProfile kind,
                                             double lambda0,
                                             double length,
                                             uint32_t n,
                                             double k0,
                                             double dk,
                                             double tol,
                                             double *p_trans,
                                             double *entropy);

/**
 * Creates a propagator for a packet of width `packet_width` launched with
 * momentum `k0` in the excited channel of manifold 0; grid, step and
 * launch point follow the automatic resolution rules.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum MazerStatus mazer_propagator_new(enum MazerProfile kind,
                                      double lambda0,
                                      double length,
                                      double k0,
                                      double packet_width,
                                      double detuning,
                                      double t_max,
                                      struct MazerPropagator **out);

/**
 * Releases a propagator. Null is ignored.
 *
 * # Safety
 * `handle` must come from `mazer_propagator_new` and not be used again.
 */
void mazer_propagator_free(struct MazerPropagator *handle);

/**
 * Advances the state by `count` time steps.
 *
 * # Safety
 * `handle` must be a live propagator.
 */
enum MazerStatus mazer_propagator_step(struct MazerPropagator *handle, uint64_t count);

/**
 * Elapsed time, time step, point count and grid limits.
 *
 * # Safety
 * `handle` must be a live propagator; out-pointers may be null.
 */
enum MazerStatus mazer_propagator_info(const struct MazerPropagator *handle,
                                       double *time,
                                       double *dt,
                                       size_t *points,
                                       double *z_min,
                                       double *z_max);

/**
 * Current internal-state and spatial observables.
 *
 * # Safety
 * `handle` and `out` must be valid.
 */
enum MazerStatus mazer_propagator_observables(const struct MazerPropagator *handle,
                                              struct MazerObservables *out);

/**
 * Copies channel densities into caller buffers of `len` entries each;
 * `len` must equal the point count.
 *
 * # Safety
 * `density_e` and `density_g` must be valid for `len` doubles.
 */
enum MazerStatus mazer_propagator_densities(const struct MazerPropagator *handle,
                                            double *density_e,
                                            double *density_g,
                                            size_t len);

/**
 * Full run from a fresh launch until the termination predicate fires;
 * writes the asymptotic transmission probability and final entropy.
 *
 * # Safety
 * `handle` must be valid; out-pointers may be null.
 */
enum MazerStatus mazer_propagator_transmission(const struct MazerPropagator *handle,
                                               double *p_trans,
                                               double *entropy);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAZER_H */
