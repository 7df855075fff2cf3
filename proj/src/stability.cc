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

#include "stabdp/stability.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace stabdp {
namespace {

absl::Status RequirePositive(double value, const char* name) {
  if (!(value > 0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be positive and finite, got ", value));
  }
  return absl::OkStatus();
}

#define STABDP_REQUIRE_POSITIVE(value)                                \
  do {                                                                \
    absl::Status _s = RequirePositive(static_cast<double>(value), #value); \
    if (!_s.ok()) return _s;                                          \
  } while (0)

constexpr StabilityKnob kAllKnobs[] = {
    StabilityKnob::kSteps,          StabilityKnob::kStepSize,
    StabilityKnob::kAveraging,      StabilityKnob::kBatch,
    StabilityKnob::kDropout,        StabilityKnob::kClip,
    StabilityKnob::kNesterovSteps,  StabilityKnob::kHeavyBall,
    StabilityKnob::kMultiTaskCount, StabilityKnob::kKPartiteLambda,
};

}  // namespace

const char* StabilitySourceName(StabilitySource source) {
  switch (source) {
    case StabilitySource::kL2Erm:
      return "l2_erm";
    case StabilitySource::kElasticNet:
      return "elastic_net";
    case StabilitySource::kUserSupplied:
      return "user_supplied";
    case StabilitySource::kKnobScaled:
      return "knob_scaled";
  }
  return "unknown";
}

const char* SensitivityMethodName(SensitivityMethod method) {
  switch (method) {
    case SensitivityMethod::kLipschitz:
      return "lipschitz";
    case SensitivityMethod::kBetaLinear:
      return "beta_linear";
    case SensitivityMethod::kBetaRoot:
      return "beta_root";
  }
  return "unknown";
}

absl::StatusOr<StabilityCert> StabilityCert::UserSupplied(double beta,
                                                          double lambda_sc) {
  if (!(beta >= 0) || !std::isfinite(beta)) {
    return absl::InvalidArgumentError("beta must be finite and >= 0");
  }
  STABDP_REQUIRE_POSITIVE(lambda_sc);
  StabilityCert cert;
  cert.beta = beta;
  cert.lambda_sc = lambda_sc;
  cert.provenance = StabilitySource::kUserSupplied;
  return cert;
}

SensitivityBound SensitivityBound::Make(double l2_value,
                                        SensitivityMethod method, int64_t d) {
  SensitivityBound bound;
  bound.l2_value = l2_value;
  bound.l1_value = std::sqrt(static_cast<double>(d)) * l2_value;
  bound.method = method;
  bound.d = d;
  return bound;
}

absl::StatusOr<StabilityCert> BetaL2Erm(double lipschitz, double kappa,
                                        int64_t n, double lambda) {
  STABDP_REQUIRE_POSITIVE(lipschitz);
  STABDP_REQUIRE_POSITIVE(kappa);
  STABDP_REQUIRE_POSITIVE(n);
  STABDP_REQUIRE_POSITIVE(lambda);
  StabilityCert cert;
  cert.beta = 2.0 * lipschitz * lipschitz * kappa * kappa /
              (static_cast<double>(n) * lambda);
  cert.lambda_sc = lambda;
  cert.provenance = StabilitySource::kL2Erm;
  return cert;
}

absl::StatusOr<StabilityCert> BetaElasticNet(double lipschitz, double kappa,
                                             int64_t n, double lambda,
                                             double gamma) {
  STABDP_REQUIRE_POSITIVE(lipschitz);
  STABDP_REQUIRE_POSITIVE(kappa);
  STABDP_REQUIRE_POSITIVE(n);
  STABDP_REQUIRE_POSITIVE(lambda);
  STABDP_REQUIRE_POSITIVE(gamma);
  if (gamma > 1) return absl::InvalidArgumentError("gamma must be <= 1");
  StabilityCert cert;
  cert.beta = 2.0 * lipschitz * lipschitz * kappa /
              (static_cast<double>(n) * lambda * gamma);
  cert.lambda_sc = 2.0 * lambda * gamma;
  cert.provenance = StabilitySource::kElasticNet;
  return cert;
}

absl::StatusOr<SensitivityBound> SensitivityLipschitz(double lipschitz,
                                                 double kappa, int64_t n,
                                                 double lambda, int64_t d) {
  STABDP_REQUIRE_POSITIVE(lipschitz);
  STABDP_REQUIRE_POSITIVE(kappa);
  STABDP_REQUIRE_POSITIVE(n);
  STABDP_REQUIRE_POSITIVE(lambda);
  STABDP_REQUIRE_POSITIVE(d);
  return SensitivityBound::Make(
      4.0 * lipschitz * kappa / (static_cast<double>(n) * lambda),
      SensitivityMethod::kLipschitz, d);
}

absl::StatusOr<SensitivityBound> SensitivityBetaLinear(double beta,
                                                 double lipschitz,
                                                 double kappa, int64_t d) {
  if (!(beta >= 0) || !std::isfinite(beta)) {
    return absl::InvalidArgumentError("beta must be finite and >= 0");
  }
  STABDP_REQUIRE_POSITIVE(lipschitz);
  STABDP_REQUIRE_POSITIVE(kappa);
  STABDP_REQUIRE_POSITIVE(d);
  return SensitivityBound::Make(2.0 * beta / (lipschitz * kappa),
                                SensitivityMethod::kBetaLinear, d);
}

absl::StatusOr<SensitivityBound> SensitivityBetaRoot(const StabilityCert& cert,
                                                 int64_t d) {
  if (!(cert.beta >= 0) || !std::isfinite(cert.beta)) {
    return absl::InvalidArgumentError("beta must be finite and >= 0");
  }
  if (!(cert.lambda_sc > 0)) {
    return absl::InvalidArgumentError("lambda_sc must be positive");
  }
  STABDP_REQUIRE_POSITIVE(d);
  return SensitivityBound::Make(std::sqrt(2.0 * cert.beta / cert.lambda_sc),
                                SensitivityMethod::kBetaRoot, d);
}

absl::StatusOr<double> PrivacyEnhancement(double epsilon, double beta1,
                                          double beta2) {
  STABDP_REQUIRE_POSITIVE(epsilon);
  STABDP_REQUIRE_POSITIVE(beta1);
  STABDP_REQUIRE_POSITIVE(beta2);
  if (beta2 > beta1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "not an improvement: beta2 = ", beta2, " exceeds beta1 = ", beta1));
  }
  return std::sqrt(beta2 / beta1) * epsilon;
}

double StabilityNoiseScale(double beta, double lambda, double epsilon) {
  return std::sqrt(2.0 * beta) / (epsilon * std::sqrt(lambda));
}

absl::StatusOr<double> PrivacyErrorBound(double lipschitz, int64_t d,
                                         double epsilon,
                                         const StabilityCert& cert) {
  STABDP_REQUIRE_POSITIVE(lipschitz);
  STABDP_REQUIRE_POSITIVE(d);
  STABDP_REQUIRE_POSITIVE(epsilon);
  if (!(cert.lambda_sc > 0) || !(cert.beta >= 0)) {
    return absl::InvalidArgumentError("invalid stability certificate");
  }
  return lipschitz * static_cast<double>(d) / epsilon *
         std::sqrt(2.0 * cert.beta / cert.lambda_sc);
}

const char* StabilityKnobName(StabilityKnob knob) {
  switch (knob) {
    case StabilityKnob::kSteps:
      return "steps";
    case StabilityKnob::kStepSize:
      return "step_size";
    case StabilityKnob::kAveraging:
      return "averaging";
    case StabilityKnob::kBatch:
      return "batch";
    case StabilityKnob::kDropout:
      return "dropout";
    case StabilityKnob::kClip:
      return "clip";
    case StabilityKnob::kNesterovSteps:
      return "nesterov_steps";
    case StabilityKnob::kHeavyBall:
      return "heavy_ball";
    case StabilityKnob::kMultiTaskCount:
      return "multi_task_count";
    case StabilityKnob::kKPartiteLambda:
      return "k_partite_lambda";
  }
  return "unknown";
}

absl::StatusOr<StabilityKnob> ParseStabilityKnob(const std::string& name) {
  std::vector<std::string> names;
  for (StabilityKnob knob : kAllKnobs) {
    if (name == StabilityKnobName(knob)) return knob;
    names.push_back(StabilityKnobName(knob));
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unsupported knob '", name,
                   "'; supported: ", absl::StrJoin(names, ", ")));
}

absl::StatusOr<double> KnobMultiplier(StabilityKnob knob, double old_value,
                                        double new_value, double lipschitz) {
  STABDP_REQUIRE_POSITIVE(old_value);
  STABDP_REQUIRE_POSITIVE(new_value);
  switch (knob) {
    case StabilityKnob::kSteps:
    case StabilityKnob::kStepSize:
    case StabilityKnob::kAveraging:
    case StabilityKnob::kDropout:
      return new_value / old_value;
    case StabilityKnob::kBatch:
    case StabilityKnob::kMultiTaskCount:
    case StabilityKnob::kKPartiteLambda:
      return old_value / new_value;
    case StabilityKnob::kClip:
      STABDP_REQUIRE_POSITIVE(lipschitz);
      return std::min(new_value, lipschitz) / std::min(old_value, lipschitz);
    case StabilityKnob::kNesterovSteps:
      return (new_value * new_value) / (old_value * old_value);
    case StabilityKnob::kHeavyBall:
      if (old_value >= 1 || new_value >= 1) {
        return absl::InvalidArgumentError("momentum must lie in (0, 1)");
      }
      return (1.0 - std::sqrt(old_value)) / (1.0 - std::sqrt(new_value));
  }
  return absl::InvalidArgumentError("unsupported knob");
}

absl::StatusOr<StabilityCert> KnobScaling(const StabilityCert& base,
                                            StabilityKnob knob,
                                            double old_value,
                                            double new_value,
                                            double lipschitz) {
  auto multiplier = KnobMultiplier(knob, old_value, new_value, lipschitz);
  if (!multiplier.ok()) return multiplier.status();
  StabilityCert out = base;
  out.beta = base.beta * *multiplier;
  out.provenance = StabilitySource::kKnobScaled;
  out.scaling_factors.emplace_back(StabilityKnobName(knob), *multiplier);
  return out;
}

}  // namespace stabdp
