#ifndef QSINK_H
#define QSINK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QsinkStatus {
  QSINK_STATUS_OK = 0,
  QSINK_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The lines keep some entanglement up to the search limit.
   */
  QSINK_STATUS_NO_FINITE_LIFETIME = 2,
  QSINK_STATUS_NUMERICAL_FAILURE = 3,
  QSINK_STATUS_NULL_POINTER = 4,
  QSINK_STATUS_PANIC = 5,
} QsinkStatus;

/**
 * Opaque channel handle: the rates of one line.
 */
typedef struct QsinkChannel QsinkChannel;

/**
 * Sinkhorn normal form of one line at one time.
 */
typedef struct QsinkSinkhorn {
  double s;
  /**
   * Diagonal of `A` in the (H, V) basis.
   */
  double a_diagonal[2];
  /**
   * Diagonal of `B` in the (H, V) basis.
   */
  double b_diagonal[2];
  double lambda_x;
  double lambda_y;
  double lambda_z;
  /**
   * Row-major Pauli transfer matrix of the unital part.
   */
  double upsilon[16];
  double residual;
} QsinkSinkhorn;

typedef struct QsinkLifetime {
  /**
   * NaN when there is no finite lifetime.
   */
  double tau;
  double bracket_low;
  double bracket_high;
  double residual;
  size_t iterations;
  double lhs_at_zero;
  bool sign_reversal;
} QsinkLifetime;

typedef struct QsinkOptimalState {
  double tau;
  /**
   * Amplitudes on |HH>, |HV>, |VH>, |VV>.
   */
  double psi_re[4];
  double psi_im[4];
  /**
   * Descending.
   */
  double schmidt_coefficients[2];
} QsinkOptimalState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a channel with attenuation rates `gamma_h`, `gamma_v` and
 * depolarization rate `gamma`, all finite and non-negative.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum QsinkStatus qsink_channel_new(double gamma_h,
                                   double gamma_v,
                                   double gamma,
                                   struct QsinkChannel **out);

/**
 * Releases a handle from [`qsink_channel_new`]. Null is a no-op.
 *
 * # Safety
 * `channel` must be null or a live handle, not used afterwards.
 */
void qsink_channel_free(struct QsinkChannel *channel);

/**
 * Writes the 16 row-major entries of the Pauli transfer matrix at time `t`.
 *
 * # Safety
 * `channel` must be a live handle and `out` valid for 16 doubles.
 */
enum QsinkStatus qsink_channel_ptm(const struct QsinkChannel *channel, double t, double *out);

/**
 * Sinkhorn normal form of `channel` at time `t`.
 *
 * # Safety
 * `channel` must be a live handle and `out` valid for writing.
 */
enum QsinkStatus qsink_sinkhorn_decompose(const struct QsinkChannel *channel,
                                          double t,
                                          struct QsinkSinkhorn *out);

/**
 * Maximal entanglement lifetime of two lines. `t_max <= 0` selects the
 * default search limit. Returns [`QsinkStatus::NoFiniteLifetime`] with
 * `out->tau = NaN` when no root is found; the rest of `out` is still filled.
 *
 * # Safety
 * Both handles must be live and `out` valid for writing.
 */
enum QsinkStatus qsink_max_lifetime(const struct QsinkChannel *first,
                                    const struct QsinkChannel *second,
                                    double t_max,
                                    struct QsinkLifetime *out);

/**
 * Initial state reaching the maximal lifetime of the two lines.
 *
 * # Safety
 * Both handles must be live and `out` valid for writing.
 */
enum QsinkStatus qsink_optimal_state(const struct QsinkChannel *first,
                                     const struct QsinkChannel *second,
                                     struct QsinkOptimalState *out);

/**
 * Negativity of a two-qubit density matrix given as 16 row-major real
 * parts and 16 imaginary parts. Unnormalized input is normalized first.
 *
 * # Safety
 * `re` and `im` must be valid for 16 doubles each, `out` for one.
 */
enum QsinkStatus qsink_negativity(const double *re, const double *im, double *out);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *qsink_last_error_message(void);

/**
 * Library version, NUL-terminated, static.
 */
const char *qsink_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSINK_H */
