#ifndef SUPERCAVITY_H
#define SUPERCAVITY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScExpansion {
  SC_EXPANSION_CORRECTED = 0,
  SC_EXPANSION_PRINTED = 1,
  SC_EXPANSION_PATTERN_CONSISTENT = 2,
} ScExpansion;

typedef enum ScParity {
  SC_PARITY_ODD = 0,
  SC_PARITY_EVEN = 1,
} ScParity;

// Result code of every call.
typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_POINTER = 1,
  SC_STATUS_INVALID_PARAMETER = 2,
  SC_STATUS_OUT_OF_BAND = 3,
  SC_STATUS_WAVE_NUMBER_OUT_OF_RANGE = 4,
  SC_STATUS_SINGULAR_SYSTEM = 5,
  SC_STATUS_NO_CONVERGENCE = 6,
  SC_STATUS_MODE_INDEX_OUT_OF_RANGE = 7,
  SC_STATUS_ZERO_DETUNING = 8,
  SC_STATUS_ZERO_COUPLING = 9,
  SC_STATUS_SINGULAR_MATCHING = 10,
  SC_STATUS_WRONG_MODE = 11,
  SC_STATUS_INCONSISTENT_AMPLITUDES = 12,
  SC_STATUS_NOT_IDENTICAL = 13,
  SC_STATUS_BUFFER_TOO_SMALL = 14,
  SC_STATUS_PANIC = 15,
} ScStatus;

// Opaque waveguide plus atom pair.
typedef struct ScSystem ScSystem;

typedef struct ScComplex {
  double re;
  double im;
} ScComplex;

// Scattering amplitudes at one real wave number.
typedef struct ScScattering {
  struct ScComplex r;
  struct ScComplex a;
  struct ScComplex b;
  struct ScComplex t;
  double transmission;
  double reflection;
  // Nonzero when the point was flagged as a band edge or resonant atom.
  int32_t flagged;
} ScScattering;

// One out-of-band edge bound state.
typedef struct ScEdgeState {
  double kappa;
  int64_t n_edge;
  double energy;
  double a;
  double b;
  // Nonzero for the `kappa = 0` solution, whose field vanishes.
  int32_t degenerate;
} ScEdgeState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *sc_version(void);

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`) and returns the full message length, or 0 if none.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t sc_last_error(char *buf, size_t len);

// Creates a system handle. Free it with `sc_system_free`.
//
// # Safety
// `out` must be null or point to writable storage for one pointer.
enum ScStatus sc_system_new(double omega,
                            double xi,
                            double omega1,
                            double omega2,
                            double j1,
                            double j2,
                            size_t d,
                            struct ScSystem **out);

// Releases a handle; null is ignored.
//
// # Safety
// `sys` must be null or a handle from `sc_system_new` not yet freed.
void sc_system_free(struct ScSystem *sys);

// Scattering amplitudes at real wave number `k`.
//
// # Safety
// `sys` must be a live handle and `out` writable, or null.
enum ScStatus sc_scatter(const struct ScSystem *sys, double k, struct ScScattering *out);

// Transmission `|t|^2` at each of the `n` wave numbers in `ks`.
//
// # Safety
// `ks` must hold `n` readable values and `transmission` `n` writable ones.
enum ScStatus sc_spectrum(const struct ScSystem *sys,
                          const double *ks,
                          size_t n,
                          double *transmission);

// Complex wave number of the quasi-bound state `(n, parity)`; the
// expansion used as the Newton seed goes to `k_pert` when non-null.
//
// # Safety
// `sys` must be a live handle; `k` writable; `k_pert` writable or null.
enum ScStatus sc_resonance(const struct ScSystem *sys,
                           int64_t n,
                           enum ScParity parity,
                           enum ScExpansion expansion,
                           struct ScComplex *k,
                           struct ScComplex *k_pert);

// Edge bound states, the two `kappa = 0` solutions first. `count` receives
// the number found; if it exceeds `capacity` nothing is written to `states`
// and `SC_STATUS_BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `states` must hold `capacity` writable entries (or be null with capacity
// 0); `count` must be writable.
enum ScStatus sc_edge_states(const struct ScSystem *sys,
                             struct ScEdgeState *states,
                             size_t capacity,
                             size_t *count);

// Eigenvalues of `[[omega, J], [J, Omega]]`.
//
// # Safety
// `eps_plus` and `eps_minus` must be writable.
enum ScStatus sc_dressed_energies(double omega,
                                  double big_omega,
                                  double j,
                                  double *eps_plus,
                                  double *eps_minus);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUPERCAVITY_H */
