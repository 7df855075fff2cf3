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

#ifndef STABDP_STABILITY_H_
#define STABDP_STABILITY_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace stabdp {

enum class StabilitySource { kL2Erm, kElasticNet, kUserSupplied, kKnobScaled };

const char* StabilitySourceName(StabilitySource source);

// A uniform-stability constant beta together with the strong-convexity
// constant of the objective it was derived for.
struct StabilityCert {
  double beta = 0.0;
  double lambda_sc = 0.0;
  StabilitySource provenance = StabilitySource::kUserSupplied;
  // (knob, multiplier) pairs applied by KnobScaling, in order.
  std::vector<std::pair<std::string, double>> scaling_factors;

  static absl::StatusOr<StabilityCert> UserSupplied(double beta,
                                                    double lambda_sc);
};

enum class SensitivityMethod { kLipschitz, kBetaLinear, kBetaRoot };

const char* SensitivityMethodName(SensitivityMethod method);

// L2 bound on ||w_S - w_S'|| and its L1 counterpart sqrt(d) * l2_value.
struct SensitivityBound {
  double l2_value = 0.0;
  double l1_value = 0.0;
  SensitivityMethod method = SensitivityMethod::kBetaRoot;
  int64_t d = 1;

  static SensitivityBound Make(double l2_value, SensitivityMethod method,
                               int64_t d);
};

// beta = 2 L^2 kappa^2 / (n lambda) for L2-regularized ERM with the
// (lambda/2)||w||^2 penalty; lambda_sc = lambda.
absl::StatusOr<StabilityCert> BetaL2Erm(double lipschitz, double kappa,
                                        int64_t n, double lambda);

// beta = 2 L^2 kappa / (n lambda gamma) for the elastic net with penalty
// lambda (gamma ||w||^2 + eta ||w||_1). Note kappa enters to the first power
// here. lambda_sc = 2 lambda gamma (second derivative of the L2 block).
absl::StatusOr<StabilityCert> BetaElasticNet(double lipschitz, double kappa,
                                             int64_t n, double lambda,
                                             double gamma);

// ||w_S - w_S'|| <= 4 L kappa / (n lambda) for regularized ERM.
absl::StatusOr<SensitivityBound> SensitivityLipschitz(double lipschitz,
                                                 double kappa, int64_t n,
                                                 double lambda, int64_t d = 1);

// ||w_S - w_S'|| <= 2 beta / (L kappa). beta = 0 is allowed.
absl::StatusOr<SensitivityBound> SensitivityBetaLinear(double beta,
                                                 double lipschitz,
                                                 double kappa, int64_t d = 1);

// ||w_S - w_S'|| <= sqrt(2 beta / lambda_sc) for a beta-uniformly stable
// minimizer of a lambda_sc-strongly convex objective.
absl::StatusOr<SensitivityBound> SensitivityBetaRoot(const StabilityCert& cert,
                                                 int64_t d = 1);

// If stability improves from beta1 to beta2 <= beta1 under an unchanged
// Laplace scale, the privacy level improves to sqrt(beta2 / beta1) * eps.
absl::StatusOr<double> PrivacyEnhancement(double epsilon, double beta1,
                                          double beta2);

// Laplace scale sqrt(2 beta) / (eps sqrt(lambda)) used in the enhancement
// argument.
double StabilityNoiseScale(double beta, double lambda, double epsilon);

// Excess empirical loss from output perturbation:
//   delta_priv <= (L d / eps) sqrt(2 beta / lambda_sc).
absl::StatusOr<double> PrivacyErrorBound(double lipschitz, int64_t d,
                                         double epsilon,
                                         const StabilityCert& cert);

// Expected generalization gap is bounded by beta. Reported, never checked:
// the population distribution is not available.
inline double GeneralizationErrorBound(const StabilityCert& cert) {
  return cert.beta;
}

// Knobs with a big-O stability row. Scalings are relative multipliers on an
// existing certificate; they never produce an absolute beta on their own.
enum class StabilityKnob {
  kSteps,            // O(T)
  kStepSize,         // O(alpha)
  kAveraging,        // O(sum alpha_t); values are the sums
  kBatch,            // O(1/b)
  kDropout,          // O(s)
  kClip,             // O(min(G, L))
  kNesterovSteps,    // O(T^2)
  kHeavyBall,        // O(1 / (1 - sqrt(momentum)))
  kMultiTaskCount,   // O(1/T)
  kKPartiteLambda,   // O(1/lambda)
};

const char* StabilityKnobName(StabilityKnob knob);
absl::StatusOr<StabilityKnob> ParseStabilityKnob(const std::string& name);

// Multiplier that moving `knob` from old_value to new_value applies to beta.
// `lipschitz` is used only by kClip.
absl::StatusOr<double> KnobMultiplier(StabilityKnob knob, double old_value,
                                        double new_value,
                                        double lipschitz = 0.0);

absl::StatusOr<StabilityCert> KnobScaling(const StabilityCert& base,
                                            StabilityKnob knob,
                                            double old_value,
                                            double new_value,
                                            double lipschitz = 0.0);

}  // namespace stabdp

#endif  // STABDP_STABILITY_H_
