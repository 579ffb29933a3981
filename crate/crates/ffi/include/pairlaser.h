#ifndef PAIRLASER_H
#define PAIRLASER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PlStatus {
  PL_STATUS_OK = 0,
  PL_STATUS_NULL_POINTER = 1,
  PL_STATUS_INVALID_PARAMETER = 2,
  PL_STATUS_DIMENSION_CAP = 3,
  PL_STATUS_DEGENERATE_NULLSPACE = 4,
  PL_STATUS_NO_CONVERGENCE = 5,
  PL_STATUS_NOT_POSITIVE = 6,
  PL_STATUS_STEP_SIZE = 7,
  PL_STATUS_DRIFT = 8,
  PL_STATUS_TAIL_MASS = 9,
  PL_STATUS_COUPLING_TOO_WEAK = 10,
  PL_STATUS_BELOW_THRESHOLD = 11,
  PL_STATUS_NOT_HURWITZ = 12,
  PL_STATUS_SINGULAR = 13,
  PL_STATUS_QUADRATURE = 14,
  PL_STATUS_DIVERGENCE = 15,
  PL_STATUS_CONFIG = 16,
  PL_STATUS_IO = 17,
  PL_STATUS_PANIC = 99,
} PlStatus;

// Which cavity mode a spectrum refers to.
typedef enum PlMode {
  PL_MODE_A = 0,
  PL_MODE_B = 1,
  PL_MODE_C = 2,
} PlMode;

// Linearized fluctuations around the mean-field state.
typedef struct PlFluctuations PlFluctuations;

// Joint photon/atom number distribution P(n, m).
typedef struct PlJoint PlJoint;

// Model parameters.
typedef struct PlModel PlModel;

// Stationary observables of the truncated master equation.
typedef struct PlObservables {
  double n_a;
  double n_b;
  double n_c;
  double photon_rate;
  double atom_rate;
  double g2_a;
  double g2_b;
  double g2_c;
  double g_ab;
  double residual;
  double min_eigenvalue;
  bool truncation_flag;
} PlObservables;

typedef struct PlMoments {
  double mean_n;
  double mean_m;
  double g2_n;
  double g2_m;
  double g_nm;
  double var_diff;
} PlMoments;

// Mean-field steady state.
typedef struct PlBranch {
  double alpha0;
  double beta0;
  double gamma0;
  double mu_th;
  double epsilon;
  bool above;
} PlBranch;

typedef struct PlNumberStatistics {
  double g2_a;
  double g2_b;
  double g2_c;
  double g_ab;
  // <da+ da>, <db+ db>, <dg+ dg>.
  double correction_a;
  double correction_b;
  double correction_c;
  double linearization_ratio;
  bool linearization_ok;
} PlNumberStatistics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length in bytes, or 0 when
// the last call succeeded.
size_t pl_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *pl_version(void);

// Incoherently pumped model (source mode fed at mu_in, drained at mu_out).
enum PlStatus pl_model_new_incoherent(double eta,
                                      double kappa_a,
                                      double kappa_b,
                                      double mu_in,
                                      double mu_out,
                                      struct PlModel **out);

// Coherently pumped model with source loss kappa_c and heating kappa_bc.
enum PlStatus pl_model_new_coherent(double eta,
                                    double kappa_a,
                                    double kappa_b,
                                    double kappa_c,
                                    double kappa_bc,
                                    double mu,
                                    struct PlModel **out);

// Set the source-mode loss kappa_c and the c -> b decay kappa_cb.
enum PlStatus pl_model_set_source_rates(struct PlModel *model, double kappa_c, double kappa_cb);

void pl_model_free(struct PlModel *model);

// Steady state of the master equation truncated at (n_a, n_b, n_c).
enum PlStatus pl_master_steady_state(const struct PlModel *model,
                                     size_t n_a,
                                     size_t n_b,
                                     size_t n_c,
                                     struct PlObservables *out);

// Stationary solution of the joint rate equation on an (n_max+1) x
// (m_max+1) grid. Needs an incoherently pumped model.
enum PlStatus pl_rate_steady_state(const struct PlModel *model,
                                   size_t n_max,
                                   size_t m_max,
                                   struct PlJoint **out);

// P(n, m); out-of-range indices give 0.
enum PlStatus pl_joint_get(const struct PlJoint *joint, size_t n, size_t m, double *out);

enum PlStatus pl_joint_shape(const struct PlJoint *joint, size_t *n_max, size_t *m_max);

enum PlStatus pl_joint_moments(const struct PlJoint *joint, struct PlMoments *out);

void pl_joint_free(struct PlJoint *joint);

// Lasing threshold of the coherent pump amplitude.
enum PlStatus pl_threshold(const struct PlModel *model, double *out);

// Mean-field steady state at the model's pump amplitude.
enum PlStatus pl_steady_branch(const struct PlModel *model, struct PlBranch *out);

// Fluctuation model at the model's pump amplitude.
enum PlStatus pl_fluctuations_new(const struct PlModel *model, struct PlFluctuations **out);

void pl_fluctuations_free(struct PlFluctuations *fm);

// V_x(omega) for `n` frequencies.
enum PlStatus pl_output_spectrum(const struct PlFluctuations *fm,
                                 enum PlMode mode,
                                 const double *omega,
                                 size_t n,
                                 double *out);

// Intensity-difference spectrum divided by its shot-noise level.
enum PlStatus pl_intensity_difference(const struct PlFluctuations *fm,
                                      const double *omega,
                                      size_t n,
                                      double *out);

enum PlStatus pl_number_statistics(const struct PlFluctuations *fm, struct PlNumberStatistics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PAIRLASER_H */
