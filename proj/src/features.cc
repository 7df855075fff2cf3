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

#include "stabdp/features.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "stabdp/privacy.h"

namespace stabdp {
namespace {

absl::Status RequirePositive(double value, const char* name) {
  if (!(value > 0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be positive and finite, got ", value));
  }
  return absl::OkStatus();
}

absl::Status ValidateFlipParams(const FlipParams& p) {
  for (auto [value, name] : {std::pair{p.epsilon, "epsilon"},
                             std::pair{p.lambda, "lambda"},
                             std::pair{p.eta, "eta"},
                             std::pair{static_cast<double>(p.n), "n"},
                             std::pair{p.lipschitz, "lipschitz"},
                             std::pair{p.kappa, "kappa"}}) {
    absl::Status s = RequirePositive(value, name);
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

}  // namespace

const char* FeatureSourceName(FeatureSource source) {
  switch (source) {
    case FeatureSource::kNonPrivate:
      return "non_private";
    case FeatureSource::kPrivateStaticT:
      return "private_static_T";
    case FeatureSource::kPrivateDynamicT:
      return "private_dynamic_T";
  }
  return "unknown";
}

int64_t FeatureDecision::selected() const {
  int64_t count = 0;
  for (uint8_t d : decisions) count += d;
  return count;
}

absl::StatusOr<FeatureDecision> SelectFeatures(const Weights& w,
                                               double threshold,
                                               FeatureSource source) {
  if (!(threshold >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("threshold must be >= 0, got ", threshold));
  }
  FeatureDecision out;
  out.threshold = threshold;
  out.source = source;
  out.decisions.resize(static_cast<size_t>(w.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    out.decisions[i] = std::abs(w(i)) > threshold ? 1 : 0;
  }
  return out;
}

absl::StatusOr<double> DynamicThreshold(double noise_scale,
                                        double multiplier) {
  if (!(noise_scale >= 0) || !std::isfinite(noise_scale)) {
    return absl::InvalidArgumentError("noise scale must be finite and >= 0");
  }
  if (absl::Status s = RequirePositive(multiplier, "multiplier"); !s.ok()) {
    return s;
  }
  return multiplier * std::sqrt(2.0) * noise_scale;
}

absl::StatusOr<double> FlipProbability(double threshold, double w_i,
                                       const FlipParams& params) {
  if (absl::Status s = RequirePositive(threshold, "threshold"); !s.ok()) {
    return s;
  }
  if (absl::Status s = ValidateFlipParams(params); !s.ok()) return s;
  double gap = std::abs(threshold - std::abs(w_i));
  return std::exp(-params.epsilon * gap * params.lambda * params.eta *
                  std::sqrt(static_cast<double>(params.n)) /
                  (2.0 * params.lipschitz * std::sqrt(params.kappa)));
}

absl::StatusOr<double> FlipNoiseScale(const FlipParams& params) {
  if (absl::Status s = ValidateFlipParams(params); !s.ok()) return s;
  return 2.0 * params.lipschitz * std::sqrt(params.kappa) /
         (params.epsilon * params.lambda * params.eta *
          std::sqrt(static_cast<double>(params.n)));
}

absl::StatusOr<double> ExactFlipProbability(double threshold, double w_i,
                                            double noise_scale) {
  if (!(threshold >= 0)) {
    return absl::InvalidArgumentError("threshold must be >= 0");
  }
  if (!(noise_scale >= 0) || !std::isfinite(noise_scale)) {
    return absl::InvalidArgumentError("noise scale must be finite and >= 0");
  }
  if (noise_scale == 0.0) return 0.0;
  double a = std::abs(w_i);
  // P[|a + nu| > T] written as two tail masses to stay accurate far out.
  double outside;
  if (a <= threshold) {
    outside = 0.5 * std::exp(-(threshold - a) / noise_scale) +
              0.5 * std::exp(-(threshold + a) / noise_scale);
  } else {
    outside = 1.0 - (LaplaceCdf(threshold - a, noise_scale) -
                     LaplaceCdf(-threshold - a, noise_scale));
  }
  return a > threshold ? 1.0 - outside : outside;
}

absl::StatusOr<double> F1Similarity(const FeatureDecision& a,
                                    const FeatureDecision& b) {
  if (a.decisions.size() != b.decisions.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("decision lengths differ: ", a.decisions.size(), " vs ",
                     b.decisions.size()));
  }
  int64_t tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < a.decisions.size(); ++i) {
    bool ref = a.decisions[i] != 0;
    bool got = b.decisions[i] != 0;
    if (ref && got) ++tp;
    if (!ref && got) ++fp;
    if (ref && !got) ++fn;
  }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace stabdp
