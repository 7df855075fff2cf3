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

#ifndef STABDP_PRIVACY_H_
#define STABDP_PRIVACY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "stabdp/model.h"
#include "stabdp/optimizer.h"
#include "stabdp/rng.h"
#include "stabdp/stability.h"

namespace stabdp {

// How a sensitivity bound becomes a per-coordinate Laplace scale.
//
// kL1PerCoordinate uses the L1 bound sqrt(d) * Delta_2, which is what makes
// independent per-coordinate Laplace noise epsilon-DP for the whole vector.
// kL2Direct uses Delta_2 directly. It matches the classic per-coordinate
// recipe for the elastic-net release but under-noises when d > 1.
enum class NoiseCalibration { kL1PerCoordinate, kL2Direct };

const char* NoiseCalibrationName(NoiseCalibration calibration);

struct PrivateRelease {
  Weights noisy_weights;
  double epsilon = 0.0;
  double sensitivity_used = 0.0;
  // Always sensitivity_used / epsilon.
  double noise_scale = 0.0;
  const char* mechanism = "laplace_per_coordinate";
  NoiseCalibration calibration = NoiseCalibration::kL1PerCoordinate;
  uint64_t seed = 0;
};

// One Laplace(0, scale) draw by inverse CDF. scale must be positive.
double LaplaceDraw(double scale, Rng& rng);

// `count` independent Laplace(0, scale) draws.
absl::StatusOr<std::vector<double>> LaplaceSample(double scale, int64_t count,
                                                  Rng& rng);

// P[X <= x] for X ~ Laplace(0, scale).
double LaplaceCdf(double x, double scale);

// Closed-form stability certificate for `spec` trained on n records:
// beta = 2 L^2 kappa^2 / (n lambda_sc) for the L2 penalty and
// beta = 2 L^2 kappa / (n lambda' gamma) for the elastic net, where lambda'
// is the elastic-net lambda rescaled to the l2_factor = 1 convention.
absl::StatusOr<StabilityCert> ClosedFormCert(const ObjectiveSpec& spec,
                                             int64_t n);

// w + Laplace(sensitivity / epsilon) per coordinate, drawn from Rng(seed).
absl::StatusOr<PrivateRelease> OutputPerturb(
    const Weights& w, const SensitivityBound& sensitivity, double epsilon,
    uint64_t seed,
    NoiseCalibration calibration = NoiseCalibration::kL1PerCoordinate);

// w + Laplace(scale) per coordinate with a caller-chosen scale (fixed-scale
// baselines). scale = 0 returns w.
Weights AddLaplaceNoise(const Weights& w, double scale, Rng& rng);

struct ElasticNetParams {
  double lambda = 0.0;
  double gamma = 0.85;
  double eta = 0.15;
  double epsilon = 1.0;
  LossKind loss = LossKind::kLogistic;
  double kappa = 1.0;
  double lipschitz = 1.0;
  double tolerance = 1e-6;
  int64_t max_iterations = kDefaultMaxIterations;
  NoiseCalibration calibration = NoiseCalibration::kL1PerCoordinate;

  ObjectiveSpec Objective() const;
};

struct ElasticNetRelease {
  PrivateRelease release;
  SolveReport solve;
  StabilityCert cert;
  // sqrt(2 beta / (lambda gamma)): the elastic-net release's L2 sensitivity.
  // It differs by a factor sqrt(2) from sqrt(2 beta / lambda_sc) with
  // lambda_sc = 2 lambda gamma.
  double l2_sensitivity = 0.0;
};

// The elastic-net release's per-coordinate noise scale for given constants:
// sqrt(2 beta / (lambda gamma)) / epsilon, times sqrt(d) under
// kL1PerCoordinate, with beta = 2 L^2 kappa / (n lambda gamma).
absl::StatusOr<double> ElasticNetNoiseScale(const ElasticNetParams& params,
                                            int64_t n, int64_t d);

// Perturbs already-computed non-private elastic-net weights.
absl::StatusOr<ElasticNetRelease> PrivatizeElasticNet(
    const Weights& w, int64_t n, const ElasticNetParams& params,
    uint64_t seed);

// Solves the elastic-net objective and releases the perturbed minimizer.
// Rows must respect params.kappa.
absl::StatusOr<ElasticNetRelease> PrivateElasticNet(
    const Dataset& data, const ElasticNetParams& params, uint64_t seed);

// Randomized mechanism reduced to one real number.
using ScalarRelease = std::function<double(const Dataset&, Rng&)>;

struct DpCheckOptions {
  int bins = 20;
  int64_t samples = 1000000;
  // Histogram centre and half-width in units of `scale`. When scale is
  // unset it is estimated as the mean absolute deviation of the pooled
  // samples around their median, and the centre as the midpoint of the two
  // sample medians.
  std::optional<double> center;
  std::optional<double> scale;
  double half_width_scales = 4.0;
  // Bins where either side has fewer counts are reported inconclusive.
  int64_t min_bin_count = 10000;
  // Wilson interval width.
  double z = 3.0;
  uint64_t seed = 0;
};

struct DpBinStat {
  double lower = 0.0;
  double upper = 0.0;
  int64_t count_a = 0;
  int64_t count_b = 0;
  double ratio = 0.0;
  double slack = 0.0;
  bool adequate = false;
  bool violated = false;
};

struct DpCheckReport {
  double epsilon = 0.0;
  double max_ratio = 0.0;
  double bound = 0.0;  // e^epsilon
  double max_slack = 0.0;
  int adequate_bins = 0;
  int inconclusive_bins = 0;
  bool passed = false;
  std::vector<DpBinStat> bins;
};

// Histogram likelihood-ratio test of epsilon-DP between the output
// distributions on two neighbouring datasets. A bin violates when its
// frequency ratio (larger over smaller) exceeds e^epsilon * (1 + slack), the
// slack coming from Wilson intervals on both counts. Passing is necessary,
// not sufficient, for DP.
absl::StatusOr<DpCheckReport> DpMicroCheck(const ScalarRelease& release,
                                           const Dataset& data,
                                           const Dataset& neighbor,
                                           double epsilon,
                                           const DpCheckOptions& options);

}  // namespace stabdp

#endif  // STABDP_PRIVACY_H_
