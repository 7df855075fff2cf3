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

#ifndef STABDP_OPTIMIZER_H_
#define STABDP_OPTIMIZER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "stabdp/model.h"
#include "stabdp/rng.h"

namespace stabdp {

inline constexpr int64_t kDefaultMaxIterations = 100000;

// Payload key under which a failed SolveErm status carries the best iterate
// as comma-separated decimal text.
inline constexpr char kBestIteratePayload[] = "stabdp/best_iterate";

struct SolveReport {
  Weights weights;
  // Norm of the minimum-norm element of the subdifferential at `weights`
  // (the plain gradient norm when there is no L1 block).
  double final_gradient_norm = 0.0;
  int64_t iterations_used = 0;
  // Loss-gap estimate gamma_conv; SolveErm fills it with
  // final_gradient_norm^2 / (2 lambda_sc).
  std::optional<double> loss_gap_bound;
  // Direct weight-gap bound delta_conv, when known.
  std::optional<double> weight_gap_bound;
};

// Minimizes the objective described by `spec` over `data` until the
// optimality residual drops to `tolerance`.
//
// Accelerated proximal gradient with adaptive restart. The step size is
// found by backtracking on a local gradient-Lipschitz estimate, which stays
// reliable at residuals where objective differences are lost to rounding.
// On failure to converge within `max_iterations` returns
// DeadlineExceeded whose message names the residual and whose
// kBestIteratePayload holds the iterate with the smallest residual.
absl::StatusOr<SolveReport> SolveErm(
    const ObjectiveSpec& spec, const Dataset& data, double tolerance,
    int64_t max_iterations = kDefaultMaxIterations,
    const std::optional<Weights>& initial = std::nullopt);

// Parses the kBestIteratePayload of a SolveErm failure.
std::optional<Weights> BestIterateFromStatus(const absl::Status& status);

double OptimalityResidual(const ObjectiveSpec& spec, const Dataset& data,
                          const Weights& w);

// Soft-threshold: sign(v) * max(|v| - threshold, 0), elementwise.
Weights SoftThreshold(const Weights& v, double threshold);

// w - step * grad followed by the L1 proximal map at step * l1_weight.
Weights ProximalStep(const ObjectiveSpec& spec, const Weights& w,
                     const Eigen::VectorXd& grad, double step);

// Fixed-step full-batch proximal gradient descent. Returns the iterates
// after each step (steps entries; the start point is not included).
absl::StatusOr<std::vector<Weights>> FixedStepDescent(
    const ObjectiveSpec& spec, const Dataset& data, const Weights& start,
    double step, int64_t steps);

// g if ||g|| <= bound, else g scaled onto the bound-sphere.
Eigen::VectorXd ClipGradient(const Eigen::VectorXd& g, double bound);

// Zeroes components of v in random order until ||out|| <= rate * ||v||.
// The contraction holds on every call, not just in expectation.
Eigen::VectorXd SDropout(const Eigen::VectorXd& v, double rate, Rng& rng);

struct SgdConfig {
  int64_t steps = 0;
  // Constant step size, used when step_schedule is empty.
  double step_size = 0.1;
  // Per-step sizes alpha_1..alpha_T; length must equal steps when set.
  std::vector<double> step_schedule;
  int64_t batch_size = 1;
  std::optional<double> clip_bound;
  std::optional<double> dropout_rate;
  // Weights a_1..a_T over the iterates after each step; nonnegative, summing
  // to 1. Empty means return the last iterate.
  std::vector<double> averaging;
  uint64_t seed = 0;
  std::optional<Weights> initial;

  absl::Status Validate(int64_t rows) const;
};

// Minibatch proximal SGD. Each step: draw the next batch from a per-epoch
// permutation (without replacement), take the smooth gradient, clip, apply
// s-dropout, step, then the L1 proximal map. Batches that cover every row
// use the same full-gradient kernel as FixedStepDescent.
//
// When `trajectory` is non-null it receives the iterate after every step.
absl::StatusOr<SolveReport> SgdRun(const ObjectiveSpec& spec,
                                   const Dataset& data, const SgdConfig& cfg,
                                   std::vector<Weights>* trajectory = nullptr);

// Sensitivity of an inexact solver: base + 2 * delta_conv, where delta_conv
// is taken from the report or derived as sqrt(2 * gamma_conv / lambda_sc).
//
// The loss-gap conversion uses strong convexity:
// ||w - w*||^2 <= 2 (F(w) - F(w*)) / lambda_sc. A looser variant without the
// lambda_sc factor gives sqrt(gamma_conv); the two coincide when
// lambda_sc = 2.
absl::StatusOr<double> ConvergenceSensitivityCorrection(
    double base_sensitivity, const SolveReport& report, double lambda_sc);

}  // namespace stabdp

#endif  // STABDP_OPTIMIZER_H_
