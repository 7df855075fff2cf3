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

#ifndef STABDP_VERIFY_H_
#define STABDP_VERIFY_H_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "stabdp/data_io.h"
#include "stabdp/model.h"
#include "stabdp/optimizer.h"
#include "stabdp/privacy.h"
#include "stabdp/rng.h"

namespace stabdp {

// Outcome of one brute-force check of a bound. Passing is evidence, not
// proof: neighbours and probes are sampled, never exhausted.
struct OracleReport {
  std::string name;
  double bound_value = 0.0;
  // Empirical maximum or mean, depending on the oracle.
  double empirical = 0.0;
  int64_t trials = 0;
  // bound_value - empirical.
  double margin = 0.0;
  bool passed = false;
  // Solver failures among the trials.
  int64_t failures = 0;
  // Further measured quantities, in a stable order.
  std::vector<std::pair<std::string, double>> observations;
};

// Draws one record (x, y). Records must respect the dataset's kappa.
using RecordSampler =
    std::function<std::pair<Eigen::VectorXd, double>(Rng& rng)>;

// Binary desk fixture: n synthetic rows in the unit ball (d features, label
// noise 0.3) with labels mapped to {-1, +1}; declares kappa = 1.
absl::StatusOr<Dataset> BinaryFixture(int64_t n, int64_t d, uint64_t seed);

// Uniform point in the d-dimensional ball of radius kappa with a uniform
// label in {-1, +1}.
RecordSampler UniformBallSampler(int64_t d, double kappa);

struct NeighborOracleOptions {
  int trials = 200;
  // Probe points per trial, drawn from S and, separately, from the sampler.
  int probes = 50;
  uint64_t seed = 0;
  double tolerance = 1e-9;
  int64_t max_iterations = kDefaultMaxIterations;
  // Defaults to UniformBallSampler(d, spec.kappa).
  RecordSampler sampler;
  // Replace the chosen record with itself (S' = S); a control for the
  // solver's reproducibility.
  bool replace_with_self = false;
};

struct SensitivityOracleResult {
  // Compared against the smaller of the two bounds.
  OracleReport report;
  double lipschitz_bound = 0.0;
  double stability_bound = 0.0;
  int64_t lipschitz_violations = 0;
  int64_t stability_violations = 0;
};

// Replaces a uniformly chosen record with a fresh one, solves both ERMs to
// options.tolerance and records max ||w_S - w_S'||. Even trials replace
// record i of S by the fresh record; odd trials start from the dataset that
// holds the fresh record and replace it back, so both directions of the
// neighbour relation are exercised. The bounds are 4 L kappa / (n lambda_sc)
// and sqrt(2 beta / lambda_sc) with the closed-form beta.
absl::StatusOr<SensitivityOracleResult> EmpiricalSensitivity(
    const ObjectiveSpec& spec, const Dataset& data,
    const NeighborOracleOptions& options);

struct StabilityOracleResult {
  OracleReport report;
  double max_in_sample = 0.0;
  double max_fresh = 0.0;
};

// max |loss(w_S, s) - loss(w_S', s)| over sampled neighbours and probes s,
// against the closed-form beta. Probes from S and fresh probes are reported
// separately; the check uses both.
absl::StatusOr<StabilityOracleResult> EmpiricalStability(
    const ObjectiveSpec& spec, const Dataset& data,
    const NeighborOracleOptions& options);

struct PrivacyErrorOptions {
  int64_t draws = 10000;
  uint64_t seed = 0;
  double tolerance = 1e-9;
  // The bound is stated for Laplace noise of scale sqrt(2 beta/lambda_sc)/eps
  // per coordinate, i.e. the L2-direct calibration.
  NoiseCalibration calibration = NoiseCalibration::kL2Direct;
};

// Monte-Carlo mean of |L(w + nu) - L(w)| (empirical loss, no penalty) over
// `draws` output-perturbation releases against (L d / eps) sqrt(2 beta /
// lambda_sc). Passes when mean <= bound + 3 standard errors.
absl::StatusOr<OracleReport> EmpiricalPrivacyError(
    const ObjectiveSpec& spec, const Dataset& data, double epsilon,
    const PrivacyErrorOptions& options);

struct PrivacyErrorScaling {
  std::vector<OracleReport> reports;
  // Least-squares slope of log(mean error) against log(epsilon).
  double slope = 0.0;
};

absl::StatusOr<PrivacyErrorScaling> PrivacyErrorVersusEpsilon(
    const ObjectiveSpec& spec, const Dataset& data,
    const std::vector<double>& epsilons, const PrivacyErrorOptions& options);

// Central-difference check (h = 1e-6) of the analytic smooth gradient for
// every spec on `fixtures` random (w, S) pairs. Relative error is
// ||g - g_fd|| / max(||g||, 1e-3); passes when the maximum is below 1e-5.
absl::StatusOr<OracleReport> GradientCheck(
    const std::vector<ObjectiveSpec>& specs, int fixtures, uint64_t seed);

struct FlipGridOptions {
  std::vector<double> thresholds = {0.5, 1.0, 2.0};
  std::vector<double> epsilons = {0.5, 1.0, 2.0};
  double lambda = 0.1;
  double eta = 0.15;
  int64_t n = 10000;
  double lipschitz = 1.0;
  double kappa = 1.0;
  int64_t draws = 100000;
  uint64_t seed = 0;
};

struct FlipCell {
  double threshold = 0.0;
  double epsilon = 0.0;
  double predicted = 0.0;
  double observed = 0.0;
  double standard_error = 0.0;
  bool passed = false;
};

struct FlipRateResult {
  OracleReport report;
  std::vector<FlipCell> cells;
};

// For w_i = 0, samples Laplace noise at the closed form's implied scale and
// compares the frequency of |nu| > T with the predicted flip probability,
// cell by cell, within three binomial standard errors.
absl::StatusOr<FlipRateResult> FlipRateCheck(const FlipGridOptions& options);

struct DpProbeResult {
  OracleReport report;
  DpCheckReport detail;
  // The exact output shift between the neighbouring datasets and the
  // Laplace scale the release used.
  double shift = 0.0;
  double noise_scale = 0.0;
};

// Mean of n values clipped to [0, 1] released with Laplace noise of scale
// noise_fraction * (1/n) / epsilon. The neighbour changes one value from 0
// to 1, so the sensitivity 1/n is attained exactly; noise_fraction = 1 is
// the calibrated release and 0.5 the under-noised control.
absl::StatusOr<DpProbeResult> MeanQueryDpCheck(double epsilon,
                                               double noise_fraction,
                                               int64_t n,
                                               const DpCheckOptions& options);

// Output perturbation of a strongly convex ERM, viewed through coordinate 0
// of the release. With negative_control = false the noise is calibrated
// from the stability bound; with true, the scale is half of the shift
// actually attained between the two minimizers divided by epsilon, which
// must fail. (A control at half the bound cannot fail when the bound is
// loose.)
absl::StatusOr<DpProbeResult> ErmDpCheck(const ObjectiveSpec& spec,
                                         const Dataset& data,
                                         const Dataset& neighbor,
                                         double epsilon,
                                         bool negative_control,
                                         const DpCheckOptions& options);

}  // namespace stabdp

#endif  // STABDP_VERIFY_H_
