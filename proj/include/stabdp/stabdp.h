//
// Copyright 2026 The stabdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef STABDP_STABDP_H_
#define STABDP_STABDP_H_

/* C interface to the stabdp library.
 *
 * Every function returns a stabdp_status. On failure, stabdp_last_error()
 * returns a message describing the most recent failure on the calling
 * thread. Handles are opaque and owned by the caller; release them with the
 * matching *_free function. Strings returned through char** out-parameters
 * are allocated by the library and released with stabdp_string_free.
 * Matrices are row-major. */

#include <stddef.h>
#include <stdint.h>

#if defined(STABDP_BUILDING_LIBRARY)
#define STABDP_API __attribute__((visibility("default")))
#else
#define STABDP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stabdp_status {
  STABDP_OK = 0,
  STABDP_INVALID_ARGUMENT = 1,
  STABDP_NOT_FOUND = 2,
  STABDP_FAILED_PRECONDITION = 3,
  STABDP_OUT_OF_RANGE = 4,
  STABDP_DEADLINE_EXCEEDED = 5,
  STABDP_UNAVAILABLE = 6,
  STABDP_DATA_LOSS = 7,
  STABDP_INTERNAL = 8,
  STABDP_UNKNOWN = 9
} stabdp_status;

typedef enum stabdp_loss {
  STABDP_LOSS_LOGISTIC = 0,
  STABDP_LOSS_SQUARED = 1
} stabdp_loss;

typedef enum stabdp_penalty {
  STABDP_PENALTY_L2 = 0,
  STABDP_PENALTY_ELASTIC_NET = 1
} stabdp_penalty;

typedef enum stabdp_calibration {
  /* Laplace scale sqrt(d) * sensitivity / epsilon per coordinate. */
  STABDP_CALIBRATION_L1_PER_COORDINATE = 0,
  /* Laplace scale sensitivity / epsilon per coordinate. */
  STABDP_CALIBRATION_L2_DIRECT = 1
} stabdp_calibration;

typedef struct stabdp_dataset stabdp_dataset;

/* Regularized ERM objective. For the elastic net, eta < 0 selects the
 * default 1 - gamma. */
typedef struct stabdp_objective {
  stabdp_loss loss;
  stabdp_penalty penalty;
  double lambda;
  double gamma;
  double eta;
  double kappa;
} stabdp_objective;

typedef struct stabdp_stability {
  double beta;
  double lambda_sc;
} stabdp_stability;

/* Version string of the library; never NULL, never freed. */
STABDP_API const char* stabdp_version(void);

/* Message of the last failure on this thread; "" if none. Valid until the
 * next call into the library on this thread. */
STABDP_API const char* stabdp_last_error(void);

STABDP_API void stabdp_string_free(char* s);

/* ---- Datasets ---------------------------------------------------------- */

/* Copies rows x cols features (row-major) and rows labels. */
STABDP_API stabdp_status stabdp_dataset_create(const double* features,
                                               const double* labels,
                                               int64_t rows, int64_t cols,
                                               stabdp_dataset** out);

/* Loads a CSV with a header row; label_column NULL or "" picks the last. */
STABDP_API stabdp_status stabdp_dataset_load_csv(const char* path,
                                                 const char* label_column,
                                                 stabdp_dataset** out);

/* Synthetic sparse classification data with labels in {0, ..., classes-1}
 * and row norms at most 1. */
STABDP_API stabdp_status stabdp_dataset_synthetic(int64_t n, int64_t d,
                                                  int64_t classes,
                                                  int64_t sparsity,
                                                  double noise, uint64_t seed,
                                                  stabdp_dataset** out);

STABDP_API int64_t stabdp_dataset_rows(const stabdp_dataset* data);
STABDP_API int64_t stabdp_dataset_cols(const stabdp_dataset* data);

/* Copies the features (rows*cols, row-major) and labels (rows) into
 * caller buffers; either pointer may be NULL. */
STABDP_API stabdp_status stabdp_dataset_copy(const stabdp_dataset* data,
                                             double* features, double* labels);

/* Rescales rows so that every row norm is at most kappa and records the
 * bound on the dataset. */
STABDP_API stabdp_status stabdp_dataset_bound_norms(stabdp_dataset* data,
                                                    double kappa);

STABDP_API void stabdp_dataset_free(stabdp_dataset* data);

/* ---- Training and bounds ---------------------------------------------- */

/* Minimizes the objective; weights must hold cols(data) doubles. */
STABDP_API stabdp_status stabdp_solve_erm(const stabdp_objective* objective,
                                          const stabdp_dataset* data,
                                          double tolerance,
                                          int64_t max_iterations,
                                          double* weights);

/* Closed-form uniform-stability certificate of the objective on n records. */
STABDP_API stabdp_status stabdp_stability_closed_form(
    const stabdp_objective* objective, int64_t n, stabdp_stability* out);

/* 4 L kappa / (n lambda). */
STABDP_API stabdp_status stabdp_sensitivity_lipschitz(double lipschitz,
                                                      double kappa, int64_t n,
                                                      double lambda,
                                                      double* out);

/* sqrt(2 beta / lambda_sc). */
STABDP_API stabdp_status stabdp_sensitivity_stability(
    const stabdp_stability* cert, double* out);

/* (L d / epsilon) sqrt(2 beta / lambda_sc). */
STABDP_API stabdp_status stabdp_privacy_error_bound(
    double lipschitz, int64_t d, double epsilon, const stabdp_stability* cert,
    double* out);

/* ---- Private release --------------------------------------------------- */

/* Trains an elastic-net model and releases it with Laplace output
 * perturbation calibrated from its stability. objective->penalty must be
 * STABDP_PENALTY_ELASTIC_NET. weights receives cols(data) doubles;
 * noise_scale (may be NULL) receives the per-coordinate Laplace scale. */
STABDP_API stabdp_status stabdp_private_elastic_net(
    const stabdp_objective* objective, const stabdp_dataset* data,
    double epsilon, stabdp_calibration calibration, uint64_t seed,
    double* weights, double* noise_scale);

/* count i.i.d. Laplace(0, scale) draws. */
STABDP_API stabdp_status stabdp_laplace_sample(double scale, int64_t count,
                                               uint64_t seed, double* out);

/* ---- Gradient utilities ------------------------------------------------ */

/* Scales v in place to norm at most bound. */
STABDP_API stabdp_status stabdp_clip(double* v, int64_t size, double bound);

/* Zeroes coordinates of v in place until ||v|| <= rate * ||v_original||. */
STABDP_API stabdp_status stabdp_s_dropout(double* v, int64_t size, double rate,
                                          uint64_t seed);

/* ---- Feature selection ------------------------------------------------- */

/* selected[i] = 1 iff |w[i]| > threshold. */
STABDP_API stabdp_status stabdp_select_features(const double* w, int64_t size,
                                                double threshold,
                                                uint8_t* selected);

/* Closed-form flip probability of feature i under private release. */
STABDP_API stabdp_status stabdp_flip_probability(double threshold, double w_i,
                                                 double epsilon, double lambda,
                                                 double eta, int64_t n,
                                                 double lipschitz,
                                                 double kappa, double* out);

/* F1 of selection b against reference a (0/1 arrays). */
STABDP_API stabdp_status stabdp_f1(const uint8_t* a, const uint8_t* b,
                                   int64_t size, double* out);

/* ---- Experiments and verification ------------------------------------- */

/* Runs "train", "sweep", "select" or "fetch" with a JSON config and
 * returns a JSON summary naming the files written. */
STABDP_API stabdp_status stabdp_run_command(const char* command,
                                            const char* config_json,
                                            char** result_json);

/* Normalizes a JSON config: fills defaults and validates every field. */
STABDP_API stabdp_status stabdp_config_canonical(const char* config_json,
                                                 char** canonical_json);

/* Runs a verification suite ("sensitivity", "stability", "privacy_error",
 * "dp", "gradients", "flips" or "all"). passed receives 1 iff every check
 * had its expected outcome. */
STABDP_API stabdp_status stabdp_run_verify(const char* suite, uint64_t seed,
                                           char** report_json, int* passed);

/* Downloads (or finds in cache) a named dataset; returns the local path. */
STABDP_API stabdp_status stabdp_fetch_dataset(const char* name,
                                              const char* url,
                                              const char* sha256,
                                              const char* cache_dir,
                                              int offline, char** path);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* STABDP_STABDP_H_ */
