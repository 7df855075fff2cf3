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

#include "stabdp/model.h"

#include <cmath>

#include "gtest/gtest.h"
#include "oracles.h"

namespace stabdp {
namespace {

Dataset MakeData(const FeatureMatrix& x, const Eigen::VectorXd& y) {
  auto data = Dataset::Create(x, y);
  EXPECT_TRUE(data.ok()) << data.status();
  return *data;
}

Dataset RandomData(int64_t n, int64_t d, uint64_t seed, bool pm_labels) {
  oracle::Xorshift rng(seed);
  FeatureMatrix x(n, d);
  Eigen::VectorXd y(n);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < d; ++j) x(i, j) = rng.Normal();
    x.row(i) /= std::max(1.0, x.row(i).norm());
    y(i) = pm_labels ? (rng.Uniform() < 0.5 ? -1.0 : 1.0)
                     : 2.0 * rng.Uniform() - 1.0;
  }
  return MakeData(x, y);
}

TEST(DatasetTest, CreateValidates) {
  EXPECT_FALSE(Dataset::Create(FeatureMatrix(0, 2), Eigen::VectorXd(0)).ok());
  EXPECT_FALSE(
      Dataset::Create(FeatureMatrix::Zero(2, 2), Eigen::VectorXd::Zero(3))
          .ok());
  FeatureMatrix bad = FeatureMatrix::Zero(2, 2);
  bad(1, 1) = std::nan("");
  EXPECT_FALSE(Dataset::Create(bad, Eigen::VectorXd::Zero(2)).ok());
  EXPECT_FALSE(Dataset::Create(FeatureMatrix::Zero(2, 2),
                               Eigen::VectorXd::Zero(2), {"only_one"})
                   .ok());
  auto ok = Dataset::Create(FeatureMatrix::Zero(2, 3), Eigen::VectorXd::Zero(2));
  ASSERT_TRUE(ok.ok());
  EXPECT_EQ(ok->column_names()[2], "x2");
  EXPECT_FALSE(ok->kappa().has_value());
}

TEST(DatasetTest, DeclareKappaIsChecked) {
  FeatureMatrix x(2, 2);
  x << 3, 4, 0, 1;
  Dataset data = MakeData(x, Eigen::VectorXd::Ones(2));
  EXPECT_FALSE(data.DeclareKappa(4.0).ok());
  EXPECT_TRUE(data.DeclareKappa(5.0).ok());
  EXPECT_EQ(*data.kappa(), 5.0);
  // A replacement row beyond kappa drops the declaration.
  auto replaced = data.WithRecord(1, Eigen::Vector2d(10, 0), 1.0);
  ASSERT_TRUE(replaced.ok());
  EXPECT_FALSE(replaced->kappa().has_value());
  auto kept = data.WithRecord(1, Eigen::Vector2d(1, 0), 1.0);
  ASSERT_TRUE(kept.ok());
  EXPECT_EQ(*kept->kappa(), 5.0);
}

TEST(DatasetTest, BoundRowNormsRescalesOnlyLongRows) {
  FeatureMatrix x(2, 2);
  x << 3, 4, 0.3, 0.4;
  Dataset data = MakeData(x, Eigen::VectorXd::Ones(2));
  int64_t rescaled = -1;
  auto bounded = BoundRowNorms(data, 1.0, &rescaled);
  ASSERT_TRUE(bounded.ok());
  EXPECT_EQ(rescaled, 1);
  EXPECT_NEAR(bounded->features()(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(bounded->features()(0, 1), 0.8, 1e-15);
  EXPECT_EQ(bounded->features()(1, 0), 0.3);
  EXPECT_EQ(*bounded->kappa(), 1.0);
}

TEST(DatasetTest, LabelHelpers) {
  Eigen::VectorXd y(5);
  y << 2, 0, 1, 2, 0;
  EXPECT_EQ(DistinctLabels(y), (std::vector<double>{0, 1, 2}));
  Eigen::VectorXd pm = OneVsRestLabels(y, 2);
  Eigen::VectorXd expected(5);
  expected << 1, -1, -1, 1, -1;
  EXPECT_EQ(pm, expected);
}

TEST(LossTest, LogisticMatchesFrozenValueAndIsStable) {
  ObjectiveSpec spec = ObjectiveSpec::L2(LossKind::kLogistic, 0.1);
  auto loss = PerExampleLoss(spec, Eigen::VectorXd::Constant(1, 20.0),
                             Eigen::VectorXd::Constant(1, 1.0), 1.0);
  ASSERT_TRUE(loss.ok());
  // log(1 + e^-20), evaluated in extended precision.
  EXPECT_NEAR(*loss, 2.061153620314380703e-9, 1e-23);
  auto large = PerExampleLoss(spec, Eigen::VectorXd::Constant(1, 1000.0),
                              Eigen::VectorXd::Constant(1, 1.0), -1.0);
  ASSERT_TRUE(large.ok());
  EXPECT_DOUBLE_EQ(*large, 1000.0);
}

TEST(LossTest, SquaredLossIsUnhalved) {
  ObjectiveSpec spec = ObjectiveSpec::L2(LossKind::kSquared, 1.0);
  auto loss = PerExampleLoss(spec, Eigen::VectorXd::Constant(1, 0.5),
                             Eigen::VectorXd::Constant(1, 1.0), 1.0);
  ASSERT_TRUE(loss.ok());
  EXPECT_DOUBLE_EQ(*loss, 0.25);
}

TEST(LossTest, LipschitzConstantHoldsOnRandomFixtures) {
  oracle::Xorshift rng(11);
  for (LossKind kind : {LossKind::kLogistic, LossKind::kSquared}) {
    const double kappa = 1.5;
    ObjectiveSpec spec = ObjectiveSpec::L2(kind, 0.5, kappa);
    // The squared-loss constant holds on the ball holding every minimizer.
    const double radius = std::sqrt(2.0 / 0.5);
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd x(4), w(4), v(4);
      for (int j = 0; j < 4; ++j) {
        x(j) = rng.Normal();
        w(j) = rng.Normal();
        v(j) = rng.Normal();
      }
      x *= kappa * rng.Uniform() / x.norm();
      if (kind == LossKind::kSquared) {
        w *= radius * rng.Uniform() / w.norm();
        v *= radius * rng.Uniform() / v.norm();
      }
      const double y = kind == LossKind::kLogistic
                           ? (rng.Uniform() < 0.5 ? -1.0 : 1.0)
                           : 2.0 * rng.Uniform() - 1.0;
      const double a = *PerExampleLoss(spec, w, x, y);
      const double b = *PerExampleLoss(spec, v, x, y);
      ASSERT_LE(std::abs(a - b), spec.lipschitz * (w - v).norm() + 1e-12)
          << LossKindName(kind) << " trial " << trial;
    }
  }
}

TEST(ObjectiveTest, MatchesIndependentEvaluation) {
  Dataset data = RandomData(30, 4, 5, true);
  ObjectiveSpec spec =
      ObjectiveSpec::ElasticNet(LossKind::kLogistic, 0.3, 0.85);
  Eigen::VectorXd w(4);
  w << 0.5, -1.0, 2.0, 0.0;
  oracle::Problem p{data.features(), data.labels(), oracle::Loss::kLogistic,
                    spec.l2_weight(), spec.l1_weight()};
  EXPECT_NEAR(*Objective(spec, w, data), oracle::ObjectiveValue(p, w), 1e-13);
  EXPECT_NEAR(spec.l1_weight(), 0.3 * 0.15, 1e-15);
  EXPECT_NEAR(spec.l2_weight(), 0.3 * 0.85, 1e-15);
}

TEST(ObjectiveTest, GradientMatchesFiniteDifferences) {
  for (LossKind kind : {LossKind::kLogistic, LossKind::kSquared}) {
    Dataset data = RandomData(25, 5, 6, kind == LossKind::kLogistic);
    ObjectiveSpec spec = ObjectiveSpec::L2(kind, 0.2);
    Eigen::VectorXd w(5);
    w << 0.3, -0.2, 1.0, 0.0, -1.5;
    auto g = Gradient(spec, w, data);
    ASSERT_TRUE(g.ok());
    auto f = [&](const Eigen::VectorXd& v) { return *Objective(spec, v, data); };
    Eigen::VectorXd fd = oracle::NumericGradient(f, w);
    EXPECT_LT((*g - fd).norm() / g->norm(), 1e-7) << LossKindName(kind);
  }
}

TEST(ObjectiveTest, StrongConvexityConstants) {
  EXPECT_NEAR(*StrongConvexityConstant(
                  ObjectiveSpec::L2(LossKind::kLogistic, 0.1)),
              0.1, 1e-15);
  EXPECT_NEAR(*StrongConvexityConstant(
                  ObjectiveSpec::ElasticNet(LossKind::kLogistic, 0.1, 0.85)),
              0.17, 1e-15);
}

TEST(ObjectiveTest, SpecValidation) {
  EXPECT_FALSE(ObjectiveSpec::L2(LossKind::kLogistic, -1.0).Validate().ok());
  EXPECT_FALSE(
      ObjectiveSpec::ElasticNet(LossKind::kLogistic, 0.1, 1.5).Validate().ok());
  EXPECT_FALSE(ObjectiveSpec::L2(LossKind::kLogistic, 0.1, 0.0).Validate().ok());
  ObjectiveSpec en = ObjectiveSpec::ElasticNet(LossKind::kLogistic, 0.1, 0.85);
  EXPECT_NEAR(en.eta, 0.15, 1e-15);
  EXPECT_EQ(en.lipschitz, 1.0);
  ObjectiveSpec sq = ObjectiveSpec::L2(LossKind::kSquared, 0.5, 2.0);
  EXPECT_EQ(sq.lipschitz, SquaredLossLipschitz(2.0, 1.0, 0.5));
}

TEST(ObjectiveTest, DimensionMismatchIsAnError) {
  Dataset data = RandomData(5, 3, 7, true);
  ObjectiveSpec spec = ObjectiveSpec::L2(LossKind::kLogistic, 0.1);
  EXPECT_FALSE(Objective(spec, Eigen::VectorXd::Zero(2), data).ok());
  EXPECT_FALSE(Gradient(spec, Eigen::VectorXd::Zero(4), data).ok());
}

}  // namespace
}  // namespace stabdp
