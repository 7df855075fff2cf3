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

#include "stabdp/privacy.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"

namespace stabdp {
namespace {

TEST(LaplaceTest, VarianceAndTailsMatchTheDistribution) {
  Rng rng(123);
  const double b = 1.5;
  auto sample = LaplaceSample(b, 400000, rng);
  ASSERT_TRUE(sample.ok());
  double sum = 0.0, sum_sq = 0.0;
  for (double x : *sample) {
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(sample->size());
  EXPECT_NEAR(sum / n, 0.0, 5.0 * std::sqrt(2.0 * b * b / n));
  // Var = 2 b^2; the fourth moment 24 b^4 sets the standard error.
  EXPECT_NEAR(sum_sq / n, 2.0 * b * b, 5.0 * std::sqrt(20.0 * std::pow(b, 4) / n));
  for (double t : {0.5, 1.0, 3.0}) {
    double above = 0;
    for (double x : *sample) above += std::abs(x) > t * b;
    const double p = oracle::LaplaceTail(t * b, b);
    EXPECT_NEAR(above / n, p, 5.0 * std::sqrt(p * (1 - p) / n)) << t;
  }
}

TEST(LaplaceTest, CdfIsConsistentWithTail) {
  for (double x : {-3.0, -0.2, 0.0, 0.7, 4.0}) {
    const double tail = 0.5 * oracle::LaplaceTail(std::abs(x), 2.0);
    const double expected = x < 0 ? tail : 1.0 - tail;
    EXPECT_NEAR(LaplaceCdf(x, 2.0), expected, 1e-15) << x;
  }
}

TEST(LaplaceTest, RejectsBadScale) {
  Rng rng(1);
  EXPECT_FALSE(LaplaceSample(0.0, 10, rng).ok());
  EXPECT_FALSE(LaplaceSample(std::nan(""), 10, rng).ok());
  EXPECT_FALSE(LaplaceSample(1.0, -1, rng).ok());
}

TEST(OutputPerturbTest, ScaleFollowsCalibrationAndSeedReproduces) {
  Weights w = Eigen::VectorXd::LinSpaced(4, -1.0, 1.0);
  SensitivityBound s = SensitivityBound::Make(0.5, SensitivityMethod::kBetaRoot, 4);
  EXPECT_NEAR(s.l1_value, 1.0, 1e-15);
  auto l1 = OutputPerturb(w, s, 2.0, 9);
  auto l2 = OutputPerturb(w, s, 2.0, 9, NoiseCalibration::kL2Direct);
  ASSERT_TRUE(l1.ok() && l2.ok());
  EXPECT_NEAR(l1->noise_scale, 0.5, 1e-15);
  EXPECT_NEAR(l2->noise_scale, 0.25, 1e-15);
  auto again = OutputPerturb(w, s, 2.0, 9);
  EXPECT_EQ(l1->noisy_weights, again->noisy_weights);
  auto other = OutputPerturb(w, s, 2.0, 10);
  EXPECT_NE(l1->noisy_weights, other->noisy_weights);
  EXPECT_FALSE(OutputPerturb(w, s, 0.0, 9).ok());
}

TEST(ClosedFormCertTest, MatchesClosedForms) {
  auto l2 = ClosedFormCert(ObjectiveSpec::L2(LossKind::kLogistic, 0.1), 100);
  ASSERT_TRUE(l2.ok());
  EXPECT_NEAR(l2->beta, 0.2, 1e-15);
  auto en = ClosedFormCert(
      ObjectiveSpec::ElasticNet(LossKind::kLogistic, 0.1, 0.85), 100);
  ASSERT_TRUE(en.ok());
  EXPECT_NEAR(en->beta, 0.23529411764705882, 1e-16);
}

TEST(ElasticNetTest, NoiseScaleFrozenValue) {
  ElasticNetParams params;
  params.lambda = 0.1;
  params.gamma = 0.85;
  params.epsilon = 1.0;
  params.calibration = NoiseCalibration::kL2Direct;
  auto scale = ElasticNetNoiseScale(params, 100, 1);
  ASSERT_TRUE(scale.ok());
  EXPECT_NEAR(*scale, 2.3529411764705882, 1e-15);
  params.calibration = NoiseCalibration::kL1PerCoordinate;
  EXPECT_NEAR(*ElasticNetNoiseScale(params, 100, 9), 3.0 * 2.3529411764705882,
              1e-14);
}

TEST(ElasticNetTest, PrivateReleaseIsSeeded) {
  FeatureMatrix x(40, 3);
  Eigen::VectorXd y(40);
  oracle::Xorshift gen(5);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = 0.5 * gen.Normal();
    x.row(i) /= std::max(1.0, x.row(i).norm());
    y(i) = x(i, 0) > 0 ? 1 : -1;
  }
  Dataset data = *Dataset::Create(x, y);
  ElasticNetParams params;
  params.lambda = 0.2;
  params.tolerance = 1e-10;
  auto a = PrivateElasticNet(data, params, 4);
  auto b = PrivateElasticNet(data, params, 4);
  ASSERT_TRUE(a.ok()) << a.status();
  EXPECT_EQ(a->release.noisy_weights, b->release.noisy_weights);
  EXPECT_NEAR(a->release.noise_scale, *ElasticNetNoiseScale(params, 40, 3),
              1e-15);
  EXPECT_NEAR(a->cert.beta, 2.0 / (40 * 0.2 * 0.85), 1e-15);
}

// A counting query released with Laplace noise: replacing one record moves
// the output by at most 1.
ScalarRelease CountRelease(double noise_scale) {
  return [noise_scale](const Dataset& data, Rng& rng) {
    return data.labels().sum() + LaplaceDraw(noise_scale, rng);
  };
}

TEST(DpMicroCheckTest, CalibratedReleasePassesAndUndernoisedFails) {
  FeatureMatrix x = FeatureMatrix::Zero(3, 1);
  Eigen::VectorXd y(3);
  y << 0.0, 1.0, 0.0;
  Dataset data = *Dataset::Create(x, y);
  Dataset neighbor = *data.WithRecord(0, Eigen::VectorXd::Zero(1), 1.0);
  DpCheckOptions options;
  options.samples = 300000;
  options.min_bin_count = 2000;
  options.seed = 3;
  auto good = DpMicroCheck(CountRelease(1.0), data, neighbor, 1.0, options);
  ASSERT_TRUE(good.ok()) << good.status();
  EXPECT_TRUE(good->passed);
  EXPECT_LE(good->max_ratio, std::exp(1.0) * 1.05);
  EXPECT_GT(good->adequate_bins, 5);
  auto bad = DpMicroCheck(CountRelease(0.5), data, neighbor, 1.0, options);
  ASSERT_TRUE(bad.ok());
  EXPECT_FALSE(bad->passed);
  EXPECT_GT(bad->max_ratio, std::exp(1.5));
}

TEST(DpMicroCheckTest, RejectsNonNeighbours) {
  FeatureMatrix x = FeatureMatrix::Zero(3, 1);
  Dataset data = *Dataset::Create(x, Eigen::VectorXd::Zero(3));
  Dataset far = *Dataset::Create(x, Eigen::VectorXd::Ones(3));
  EXPECT_FALSE(
      DpMicroCheck(CountRelease(1.0), data, far, 1.0, DpCheckOptions{}).ok());
}

}  // namespace
}  // namespace stabdp
