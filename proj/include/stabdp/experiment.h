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

#ifndef STABDP_EXPERIMENT_H_
#define STABDP_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "stabdp/data_io.h"
#include "stabdp/model.h"
#include "stabdp/privacy.h"

namespace stabdp {

inline constexpr int kResultSchemaVersion = 1;

enum class NoiseMode { kStabilityOptimal, kFixedScale, kNone };
enum class ThresholdMode { kDynamic, kStatic };

const char* NoiseModeName(NoiseMode mode);

struct DatasetConfig {
  // "synthetic", "csv", or "adult" (fetched through the fetch section).
  std::string source = "synthetic";
  std::string path;
  // Empty selects the last column.
  std::string label_column;
  SynthSpec synthetic;
  // Target dimension of the truncated SVD; 0 or >= d disables it.
  int64_t reduce_dim = 32;
  bool standardize = true;
  double kappa = 1.0;
  // Seed of the randomized SVD.
  uint64_t seed = 0;
};

struct ModelConfig {
  LossKind loss = LossKind::kLogistic;
  PenaltyKind penalty = PenaltyKind::kElasticNet;
  double gamma = 0.85;
  double eta = 0.15;
  // Used by `train`; `sweep` and `select` use the grids.
  double lambda = 0.01;
  double epsilon = 1.0;
  double tolerance = 1e-6;
  int64_t max_iterations = 20000;
};

struct NoiseConfig {
  NoiseMode mode = NoiseMode::kStabilityOptimal;
  double fixed_scale = 0.1;
  NoiseCalibration calibration = NoiseCalibration::kL1PerCoordinate;
};

struct SelectConfig {
  ThresholdMode threshold = ThresholdMode::kDynamic;
  // k in T = k sqrt(2) b.
  double multiplier = 1.0;
  double static_threshold = 0.01;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string output_dir = ".";
  DatasetConfig dataset;
  SplitPlan split;
  ModelConfig model;
  std::vector<double> lambda_grid = {0.001, 0.01, 0.1, 1.0};
  std::vector<double> epsilon_grid = {1.0};
  NoiseConfig noise;
  SelectConfig select;
  FetchOptions fetch;
  uint64_t seed = 0;
  int threads = 1;

  absl::Status Validate() const;
};

// Parses a JSON config. Absent fields keep their defaults; unknown fields
// and type errors are rejected with the offending path (e.g.
// "model.gamma: expected a number").
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    const std::string& json_text);

// Canonical JSON of every field, as recorded in result metadata.
std::string ExperimentConfigJson(const ExperimentConfig& config);

// Runs `train`, `sweep`, `select` or `fetch` and returns a JSON summary
// naming the files written. Result files depend only on the config.
absl::StatusOr<std::string> RunExperimentCommand(
    const std::string& command, const ExperimentConfig& config);

struct VerifyOutcome {
  bool passed = false;
  // Machine-readable report: one entry per check with bound, measured
  // value, expected and observed outcome.
  std::string json;
};

// Suites: sensitivity, stability, privacy_error, dp, gradients, flips, all.
absl::StatusOr<VerifyOutcome> RunVerifySuite(const std::string& suite,
                                             uint64_t seed);

std::vector<std::string> VerifySuiteNames();

}  // namespace stabdp

#endif  // STABDP_EXPERIMENT_H_
