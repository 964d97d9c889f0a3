/* C interface to the pfsim para-Fermi oscillator library. */

#pragma once

/* Generated with cbindgen:0.27.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call across the C boundary.
 */
typedef enum PfStatus {
  /**
   * The call succeeded.
   */
  PF_STATUS_OK = 0,
  /**
   * A verification suite ran and found a violated invariant.
   */
  PF_STATUS_VERIFICATION_FAILED = 1,
  /**
   * Bad argument: null pointer, unknown name, or invalid physics input.
   */
  PF_STATUS_INVALID_INPUT = 2,
  /**
   * A numerical contract was broken (conservation drift, non-Hermitian
   * operator, size limit).
   */
  PF_STATUS_NUMERICAL_CONTRACT = 3,
  /**
   * A panic was caught at the boundary; state may be inconsistent.
   */
  PF_STATUS_INTERNAL = 4,
} PfStatus;

/**
 * Opaque handle to a constructed oscillator subspace.
 */
typedef struct PfSubspace PfSubspace;

/**
 * Opaque handle to a simulated trajectory.
 */
typedef struct PfTrajectory PfTrajectory;

/**
 * Collapse and revival landmarks of one trajectory. Times and envelopes
 * of landmarks that were not found are NaN and their `has_` flag is 0.
 */
typedef struct PfRevival {
  /**
   * Envelope amplitude at the start of the run.
   */
  double r_init;
  /**
   * Averaging window used for the envelope, in time units.
   */
  double window;
  double collapse_time;
  double collapse_rms;
  double revival_time;
  double revival_rms;
  /**
   * Time and envelope of the global envelope minimum.
   */
  double min_time;
  double min_rms;
  /**
   * Strongest envelope recovery after the minimum.
   */
  double recovery_time;
  double recovery_rms;
  /**
   * Predicted revival time for equal couplings on resonance.
   */
  double predicted_homogeneous;
  /**
   * Predicted revival time for general couplings.
   */
  double predicted_general;
  uint8_t has_collapse;
  uint8_t has_revival;
  /**
   * 1 when collapse and revival were both identified cleanly.
   */
  uint8_t confident;
} PfRevival;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread. Never null.
 */
const char *pf_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *pf_version(void);

/**
 * Build the oscillator subspace of the given order with the given cavity
 * frequencies and couplings. On success writes a handle to `out`; free it
 * with `pf_subspace_free`.
 */
enum PfStatus pf_subspace_new(uint32_t lambda,
                              double omega0,
                              double omega1,
                              double omega2,
                              double g1,
                              double g2,
                              struct PfSubspace **out);

/**
 * Dimension of the subspace (2 lambda + 1).
 */
enum PfStatus pf_subspace_dim(const struct PfSubspace *handle, uintptr_t *out);

/**
 * Run the algebraic verification suite on the subspace with default
 * tolerances. Returns `Ok` when every invariant holds; on
 * `VerificationFailed` the message names the worst residual.
 */
enum PfStatus pf_subspace_verify(const struct PfSubspace *handle);

/**
 * Free a subspace handle. Null is ignored.
 */
void pf_subspace_free(struct PfSubspace *handle);

/**
 * Evolve the lowest-weight state of the given oscillator order and write a
 * trajectory handle to `out`; free it with `pf_trajectory_free`.
 * `t_end <= 0` selects the default horizon of one predicted revival
 * period; `n_points` is the number of sample times (2 to 1000000).
 */
enum PfStatus pf_simulate(uint32_t lambda,
                          double omega0,
                          double omega1,
                          double omega2,
                          double g1,
                          double g2,
                          double t_end,
                          uintptr_t n_points,
                          struct PfTrajectory **out);

/**
 * Number of sample times in the trajectory.
 */
enum PfStatus pf_trajectory_len(const struct PfTrajectory *handle, uintptr_t *out);

/**
 * Copy one observable column into a caller-provided buffer of exactly
 * `len == pf_trajectory_len` doubles. Columns: 0 time, 1 mode-1 occupation,
 * 2 mode-2 occupation, 3 weight projection, 4 inversion, 5 norm.
 */
enum PfStatus pf_trajectory_column(const struct PfTrajectory *handle,
                                   uint32_t column,
                                   double *buf,
                                   uintptr_t len);

/**
 * Free a trajectory handle. Null is ignored.
 */
void pf_trajectory_free(struct PfTrajectory *handle);

/**
 * Simulate the lowest-weight state and locate collapse and revival
 * landmarks. Same parameter conventions as `pf_simulate`.
 */
enum PfStatus pf_revival(uint32_t lambda,
                         double omega0,
                         double omega1,
                         double omega2,
                         double g1,
                         double g2,
                         double t_end,
                         uintptr_t n_points,
                         struct PfRevival *out);

/**
 * Run the verification suite and write a JSON report string to `out`.
 * `scope` is one of "algebra", "frames", "closedform", "all"; null means
 * "all". The report is written on both `Ok` and `VerificationFailed`;
 * free it with `pf_string_free`.
 */
enum PfStatus pf_verify_json(const char *scope, uint32_t lambda_max, char **out);

/**
 * Free a string returned by this library. Null is ignored.
 */
void pf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
