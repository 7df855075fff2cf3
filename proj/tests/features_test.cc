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

#include "gtest/gtest.h"
#include "stabdp/privacy.h"
#include "stabdp/rng.h"

namespace stabdp {
namespace {

FeatureDecision Decisions(std::vector<uint8_t> d) {
  FeatureDecision out;
  out.decisions = std::move(d);
  return out;
}

TEST(SelectFeaturesTest, StrictThreshold) {
  Eigen::VectorXd w(5);
  w << 0.5, -2.0, 1.0, 0.0, -1.0000001;
  auto decision = SelectFeatures(w, 1.0, FeatureSource::kPrivateStaticT);
  ASSERT_TRUE(decision.ok());
  EXPECT_EQ(decision->decisions, (std::vector<uint8_t>{0, 1, 0, 0, 1}));
  EXPECT_EQ(decision->selected(), 2);
  EXPECT_EQ(decision->source, FeatureSource::kPrivateStaticT);
  auto all = SelectFeatures(w, 0.0);
  EXPECT_EQ(all->selected(), 4);
  EXPECT_FALSE(SelectFeatures(w, -1.0).ok());
}

TEST(ThresholdTest, DynamicThresholdIsRootTwoMultiple) {
  EXPECT_NEAR(*DynamicThreshold(1.0, 1.0), 1.4142135623730950, 1e-15);
  EXPECT_NEAR(*DynamicThreshold(0.5, 2.0), 1.4142135623730950, 1e-15);
  EXPECT_EQ(*DynamicThreshold(0.0, 2.0), 0.0);
  EXPECT_FALSE(DynamicThreshold(1.0, 0.0).ok());
}

TEST(FlipProbabilityTest, FrozenValue) {
  FlipParams params;
  params.epsilon = 1.0;
  params.lambda = 0.1;
  params.eta = 0.15;
  params.n = 2500;
  auto p = FlipProbability(1.0, 0.0, params);
  ASSERT_TRUE(p.ok());
  EXPECT_NEAR(*p, 0.68728927879097219, 1e-15);
  // Far from the threshold the flip probability decays.
  EXPECT_LT(*FlipProbability(1.0, 5.0, params), *p);
  params.n = 0;
  EXPECT_FALSE(FlipProbability(1.0, 0.0, params).ok());
}

TEST(FlipProbabilityTest, ExactMatchesMonteCarlo) {
  Rng rng(31);
  const double b = 0.7;
  const int draws = 400000;
  for (double w : {0.0, 0.4, 0.9, 1.1, 2.5, -1.6}) {
    const double t = 1.0;
    int flips = 0;
    for (int i = 0; i < draws; ++i) {
      const bool before = std::abs(w) > t;
      const bool after = std::abs(w + LaplaceDraw(b, rng)) > t;
      flips += before != after;
    }
    auto exact = ExactFlipProbability(t, w, b);
    ASSERT_TRUE(exact.ok());
    const double se = std::sqrt(*exact * (1 - *exact) / draws);
    EXPECT_NEAR(static_cast<double>(flips) / draws, *exact, 5.0 * se + 1e-9)
        << "w=" << w;
  }
  EXPECT_EQ(*ExactFlipProbability(1.0, 0.5, 0.0), 0.0);
}

TEST(F1Test, HandValuesAndEdgeCases) {
  auto f1 = F1Similarity(Decisions({1, 1, 0, 0}), Decisions({1, 0, 1, 0}));
  ASSERT_TRUE(f1.ok());
  EXPECT_DOUBLE_EQ(*f1, 0.5);
  EXPECT_EQ(*F1Similarity(Decisions({0, 0}), Decisions({0, 0})), 1.0);
  EXPECT_EQ(*F1Similarity(Decisions({1, 0}), Decisions({0, 0})), 0.0);
  EXPECT_EQ(*F1Similarity(Decisions({1, 1}), Decisions({1, 1})), 1.0);
  EXPECT_FALSE(F1Similarity(Decisions({1}), Decisions({1, 0})).ok());
}

}  // namespace
}  // namespace stabdp
