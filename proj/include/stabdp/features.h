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

#ifndef STABDP_FEATURES_H_
#define STABDP_FEATURES_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "stabdp/model.h"

namespace stabdp {

enum class FeatureSource { kNonPrivate, kPrivateStaticT, kPrivateDynamicT };

const char* FeatureSourceName(FeatureSource source);

struct FeatureDecision {
  // decisions[i] is 1 iff feature i is selected.
  std::vector<uint8_t> decisions;
  double threshold = 0.0;
  FeatureSource source = FeatureSource::kNonPrivate;

  int64_t selected() const;
};

// decisions[i] = 1 iff |w[i]| > threshold. threshold must be >= 0 (may be
// +infinity, which selects nothing).
absl::StatusOr<FeatureDecision> SelectFeatures(
    const Weights& w, double threshold,
    FeatureSource source = FeatureSource::kNonPrivate);

// k * sqrt(2) * b: k standard deviations of Laplace(b) noise.
absl::StatusOr<double> DynamicThreshold(double noise_scale, double multiplier);

// Parameters of the closed-form flip bound for one coordinate.
struct FlipParams {
  double epsilon = 1.0;
  double lambda = 0.0;
  double eta = 0.15;
  int64_t n = 0;
  double lipschitz = 1.0;
  double kappa = 1.0;
};

// exp(-epsilon |T - |w_i|| lambda eta sqrt(n) / (2 L sqrt(kappa))): the
// closed-form probability that thresholding at T gives a different decision
// for w_i than for w_i plus elastic-net release noise. Exact when w_i = 0;
// for |w_i| close to T the form ignores noise pushing past the opposite
// threshold, and ExactFlipProbability measures the difference.
absl::StatusOr<double> FlipProbability(double threshold, double w_i,
                                       const FlipParams& params);

// Laplace scale under which the closed form above is exact at w_i = 0:
// 2 L sqrt(kappa) / (epsilon lambda eta sqrt(n)). It uses eta where the
// elastic-net release scale uses gamma, so the two scales generally differ.
absl::StatusOr<double> FlipNoiseScale(const FlipParams& params);

// Exact P[(|w_i + nu| > T) != (|w_i| > T)] for nu ~ Laplace(noise_scale).
// noise_scale = 0 gives 0.
absl::StatusOr<double> ExactFlipProbability(double threshold, double w_i,
                                            double noise_scale);

// F1 score of b's selected set against reference a's selected set. Both
// empty gives 1; exactly one empty gives 0.
absl::StatusOr<double> F1Similarity(const FeatureDecision& a,
                                    const FeatureDecision& b);

}  // namespace stabdp

#endif  // STABDP_FEATURES_H_
