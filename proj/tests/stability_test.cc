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

#include <cmath>

#include "gtest/gtest.h"
#include "oracles.h"

namespace stabdp {
namespace {

TEST(StabilityTest, L2ErmHandValue) {
  auto cert = BetaL2Erm(1.0, 1.0, 100, 0.1);
  ASSERT_TRUE(cert.ok());
  EXPECT_NEAR(cert->beta, 0.2, 1e-15);
  EXPECT_NEAR(cert->lambda_sc, 0.1, 1e-15);
  EXPECT_EQ(cert->provenance, StabilitySource::kL2Erm);
  // kappa enters squared.
  EXPECT_NEAR(BetaL2Erm(1.0, 2.0, 100, 0.1)->beta, 0.8, 1e-15);
}

TEST(StabilityTest, ElasticNetFrozenValue) {
  auto cert = BetaElasticNet(1.0, 1.0, 100, 0.1, 0.85);
  ASSERT_TRUE(cert.ok());
  EXPECT_NEAR(cert->beta, 0.23529411764705882, 1e-16);
  EXPECT_NEAR(cert->lambda_sc, 0.17, 1e-15);
  // kappa enters to the first power.
  EXPECT_NEAR(BetaElasticNet(1.0, 2.0, 100, 0.1, 0.85)->beta,
              2.0 * 0.23529411764705882, 1e-15);
}

TEST(StabilityTest, SensitivityHandValues) {
  EXPECT_NEAR(SensitivityLipschitz(1.0, 1.0, 100, 0.1)->l2_value, 0.4, 1e-15);
  EXPECT_NEAR(SensitivityBetaLinear(0.2, 1.0, 1.0)->l2_value, 0.4, 1e-15);
  auto cert = StabilityCert::UserSupplied(0.02, 1.0);
  ASSERT_TRUE(cert.ok());
  auto by_stability = SensitivityBetaRoot(*cert, 4);
  ASSERT_TRUE(by_stability.ok());
  EXPECT_NEAR(by_stability->l2_value, 0.2, 1e-15);
  EXPECT_NEAR(by_stability->l1_value, 0.4, 1e-15);
  EXPECT_EQ(by_stability->method, SensitivityMethod::kBetaRoot);
  EXPECT_NEAR(SensitivityBetaLinear(0.0, 1.0, 1.0)->l2_value, 0.0, 0.0);
}

TEST(StabilityTest, PrivacyErrorBoundHandValue) {
  auto cert = StabilityCert::UserSupplied(0.5, 1.0);
  auto bound = PrivacyErrorBound(1.0, 2, 1.0, *cert);
  ASSERT_TRUE(bound.ok());
  EXPECT_NEAR(*bound, 2.0, 1e-15);
}

TEST(StabilityTest, RejectsInvalidInputs) {
  EXPECT_FALSE(BetaL2Erm(1.0, 1.0, 0, 0.1).ok());
  EXPECT_FALSE(BetaL2Erm(1.0, 1.0, 100, 0.0).ok());
  EXPECT_FALSE(BetaElasticNet(1.0, 1.0, 100, 0.1, 0.0).ok());
  EXPECT_FALSE(BetaElasticNet(-1.0, 1.0, 100, 0.1, 0.5).ok());
  EXPECT_FALSE(StabilityCert::UserSupplied(-0.1, 1.0).ok());
  EXPECT_FALSE(StabilityCert::UserSupplied(0.1, 0.0).ok());
  EXPECT_FALSE(PrivacyEnhancement(1.0, 0.1, 0.2).ok());
}

TEST(StabilityTest, EnhancementKeepsNoiseScaleFixed) {
  oracle::Xorshift rng(17);
  for (int i = 0; i < 100; ++i) {
    const double beta1 = 0.01 + rng.Uniform();
    const double beta2 = beta1 * rng.Uniform();
    const double lambda = 0.01 + 10.0 * rng.Uniform();
    const double eps = 0.1 + 5.0 * rng.Uniform();
    auto improved = PrivacyEnhancement(eps, beta1, beta2);
    ASSERT_TRUE(improved.ok());
    EXPECT_NEAR(*improved, std::sqrt(beta2 / beta1) * eps, 1e-15 * eps);
    const double before = StabilityNoiseScale(beta1, lambda, eps);
    const double after = StabilityNoiseScale(beta2, lambda, *improved);
    EXPECT_NEAR(before, after, 1e-12 * before);
  }
}

TEST(StabilityTest, TableOneMultipliers) {
  EXPECT_NEAR(*KnobMultiplier(StabilityKnob::kSteps, 10, 20), 2.0, 1e-15);
  EXPECT_NEAR(*KnobMultiplier(StabilityKnob::kBatch, 10, 20), 0.5, 1e-15);
  EXPECT_NEAR(*KnobMultiplier(StabilityKnob::kNesterovSteps, 10, 20), 4.0,
              1e-15);
  EXPECT_NEAR(*KnobMultiplier(StabilityKnob::kClip, 0.5, 2.0, 1.0), 2.0,
              1e-15);
  EXPECT_NEAR(*KnobMultiplier(StabilityKnob::kKPartiteLambda, 0.1, 0.2), 0.5,
              1e-15);
  auto base = BetaL2Erm(1.0, 1.0, 100, 0.1);
  auto scaled = KnobScaling(*base, StabilityKnob::kDropout, 1.0, 0.5);
  ASSERT_TRUE(scaled.ok());
  EXPECT_NEAR(scaled->beta, 0.1, 1e-15);
  EXPECT_EQ(scaled->provenance, StabilitySource::kKnobScaled);
  ASSERT_EQ(scaled->scaling_factors.size(), 1u);
  EXPECT_TRUE(ParseStabilityKnob("steps").ok());
  EXPECT_FALSE(ParseStabilityKnob("bogus").ok());
}

}  // namespace
}  // namespace stabdp
