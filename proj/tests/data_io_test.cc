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

#include "stabdp/data_io.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "gtest/gtest.h"
#include "oracles.h"
#include "stabdp/optimizer.h"

namespace stabdp {
namespace {

namespace fs = std::filesystem;

std::string TempPath(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() /
                 (std::string("stabdp_data_io_") + info->name());
  fs::create_directories(dir);
  return (dir / name).string();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream(path, std::ios::binary) << contents;
}

TEST(CsvTest, RoundTripIsExact) {
  oracle::Xorshift rng(2);
  FeatureMatrix x(7, 3);
  Eigen::VectorXd y(7);
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.Normal() * 1e3;
    y(i) = i % 3;
  }
  Dataset data = *Dataset::Create(x, y, {"a", "b", "c"});
  const std::string path = TempPath("round.csv");
  ASSERT_TRUE(WriteCsv(data, path).ok());
  auto loaded = LoadCsv(path);
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  EXPECT_EQ(loaded->features(), x);
  EXPECT_EQ(loaded->labels(), y);
  EXPECT_EQ(loaded->column_names(), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(CsvTest, LabelColumnByName) {
  const std::string path = TempPath("named.csv");
  WriteFile(path, "target,f1,f2\n1,2,3\n0,4,5\n");
  auto loaded = LoadCsv(path, "target");
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  EXPECT_EQ(loaded->labels()(0), 1.0);
  EXPECT_EQ(loaded->features()(1, 1), 5.0);
  EXPECT_FALSE(LoadCsv(path, "missing").ok());
}

TEST(CsvTest, ErrorsNameTheLine) {
  const std::string path = TempPath("bad.csv");
  WriteFile(path, "a,b\n1,2\n3\n");
  auto short_row = LoadCsv(path);
  ASSERT_FALSE(short_row.ok());
  EXPECT_NE(short_row.status().message().find(":3:"), std::string::npos)
      << short_row.status();
  WriteFile(path, "a,b\n1,2\n3,x\n");
  auto not_number = LoadCsv(path);
  ASSERT_FALSE(not_number.ok());
  EXPECT_NE(not_number.status().message().find("column 'b'"),
            std::string::npos);
  EXPECT_EQ(LoadCsv(TempPath("absent.csv")).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(StandardizeTest, CentersScalesAndIsIdempotent) {
  FeatureMatrix x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  Dataset data = *Dataset::Create(x, Eigen::VectorXd::Zero(4));
  auto first = Standardize(data);
  ASSERT_TRUE(first.ok());
  const auto& f = first->data.features();
  EXPECT_NEAR(f.col(0).mean(), 0.0, 1e-15);
  EXPECT_NEAR(f.col(0).squaredNorm() / 3.0, 1.0, 1e-14);
  // A constant column maps to zero.
  EXPECT_EQ(f.col(1).norm(), 0.0);
  auto second = Standardize(first->data);
  ASSERT_TRUE(second.ok());
  EXPECT_LT((second->data.features() - f).norm(), 1e-14);
  // The fitted transform is reusable on other data.
  auto applied = first->transform.Apply(data);
  EXPECT_EQ(applied->features(), f);
}

TEST(ReduceDimTest, MatchesTopSingularSubspace) {
  oracle::Xorshift rng(9);
  const int n = 200, d = 12, k = 4;
  FeatureMatrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = rng.Normal() * (j < k ? 5.0 : 0.5);
  }
  Eigen::MatrixXd rotation =
      Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::NullaryExpr(
                                                d, d, [&]() { return rng.Normal(); }))
          .householderQ();
  x = x * rotation;
  Dataset data = *Dataset::Create(x, Eigen::VectorXd::Zero(n));
  auto reduced = ReduceDim(data, k, 4, 1.0);
  ASSERT_TRUE(reduced.ok()) << reduced.status();
  const Eigen::MatrixXd& v = reduced->projection.basis;
  ASSERT_EQ(v.cols(), k);
  EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(k, k)).norm(), 1e-12);
  Eigen::MatrixXd projector = v * v.transpose();
  EXPECT_LT((projector - oracle::TopRightSingularProjector(x, k)).norm(), 1e-8);
  EXPECT_EQ(reduced->data.cols(), k);
  EXPECT_LE(reduced->data.features().rowwise().norm().maxCoeff(), 1.0 + 1e-12);
  // Deterministic for a fixed seed.
  auto again = ReduceDim(data, k, 4, 1.0);
  EXPECT_EQ(again->projection.basis, v);
  EXPECT_FALSE(ReduceDim(data, 0, 4).ok());
  EXPECT_FALSE(ReduceDim(data, d + 1, 4).ok());
}

TEST(SplitTest, PartitionsDeterministically) {
  FeatureMatrix x(50, 1);
  for (int i = 0; i < 50; ++i) x(i, 0) = i;
  Dataset data = *Dataset::Create(x, Eigen::VectorXd::Zero(50));
  SplitPlan plan;
  plan.seed = 3;
  plan.repeats = 4;
  plan.train_fraction = 0.8;
  auto splits = Split(data, plan);
  ASSERT_TRUE(splits.ok());
  ASSERT_EQ(splits->size(), 4u);
  for (const SplitPair& s : *splits) {
    EXPECT_EQ(s.train.rows(), 40);
    EXPECT_EQ(s.test.rows(), 10);
    std::set<int64_t> all(s.train_rows.begin(), s.train_rows.end());
    all.insert(s.test_rows.begin(), s.test_rows.end());
    EXPECT_EQ(all.size(), 50u);
    EXPECT_EQ(s.test.features()(0, 0), static_cast<double>(s.test_rows[0]));
  }
  EXPECT_NE((*splits)[0].test_rows, (*splits)[1].test_rows);
  auto again = Split(data, plan);
  EXPECT_EQ((*again)[2].test_rows, (*splits)[2].test_rows);
  plan.train_fraction = 1.0;
  EXPECT_FALSE(Split(data, plan).ok());
}

TEST(SyntheticTest, ShapeNormsAndLabels) {
  SynthSpec spec;
  spec.n = 500;
  spec.d = 10;
  spec.classes = 4;
  spec.sparsity = 3;
  spec.seed = 5;
  auto synth = SynthClassification(spec);
  ASSERT_TRUE(synth.ok());
  EXPECT_EQ(synth->data.rows(), 500);
  EXPECT_EQ(synth->support.size(), 3u);
  EXPECT_EQ(synth->truth.rows(), 4);
  EXPECT_LE(synth->data.features().rowwise().norm().maxCoeff(), 1.0 + 1e-12);
  EXPECT_EQ(*synth->data.kappa(), 1.0);
  EXPECT_EQ(DistinctLabels(synth->data.labels()).size(), 4u);
  for (int64_t j = 0; j < spec.d; ++j) {
    const bool in_support =
        std::find(synth->support.begin(), synth->support.end(), j) !=
        synth->support.end();
    if (!in_support) EXPECT_EQ(synth->truth.col(j).norm(), 0.0);
  }
  auto again = SynthClassification(spec);
  EXPECT_EQ(again->data.features(), synth->data.features());
  spec.sparsity = 11;
  EXPECT_FALSE(SynthClassification(spec).ok());
}

TEST(SyntheticTest, FittedWeightsRecoverTruthSigns) {
  SynthSpec spec;
  spec.n = 5000;
  spec.d = 8;
  spec.sparsity = 3;
  spec.seed = 12;
  auto synth = SynthClassification(spec);
  ASSERT_TRUE(synth.ok());
  Dataset pm = *synth->data.WithLabels(OneVsRestLabels(synth->data.labels(), 1));
  auto solved =
      SolveErm(ObjectiveSpec::L2(LossKind::kLogistic, 1e-3), pm, 1e-8);
  ASSERT_TRUE(solved.ok()) << solved.status();
  for (int64_t j : synth->support) {
    EXPECT_EQ(solved->weights(j) > 0, synth->truth(0, j) > 0) << j;
  }
}

}  // namespace
}  // namespace stabdp
