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

#ifndef STABDP_DATA_IO_H_
#define STABDP_DATA_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stabdp/model.h"

namespace stabdp {

// Reads a canonical CSV: header row, comma separated, '.' decimals. The label
// is the named column, or the last column when label_column is empty.
// Errors name the offending line (1-based, header = line 1).
absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const std::string& label_column = "");

// Writes features then the label as the last column, every value with 17
// significant digits so that LoadCsv reproduces the dataset exactly.
absl::Status WriteCsv(const Dataset& data, const std::string& path);

// Per-column affine map x -> (x - mean) / scale. A zero scale marks a
// constant column, which maps to 0.
struct StandardizeTransform {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  absl::StatusOr<Dataset> Apply(const Dataset& data) const;
};

struct Standardized {
  Dataset data;
  StandardizeTransform transform;
};

// Column-wise zero mean and unit sample variance (n - 1 denominator).
// Requires n >= 2.
absl::StatusOr<Standardized> Standardize(const Dataset& data);

// Linear map onto the top-k right singular subspace.
struct Projection {
  // d x k with orthonormal columns.
  Eigen::MatrixXd basis;

  absl::StatusOr<Dataset> Apply(const Dataset& data) const;
};

struct Reduced {
  Dataset data;
  Projection projection;
  // Rows rescaled onto the kappa sphere (0 when no kappa was requested).
  int64_t rescaled_rows = 0;
};

// Rank-k projection X V_k via randomized subspace iteration (k + 8
// oversampling capped at d, two power iterations, re-orthonormalized each
// pass), finished with an exact SVD of the small projected matrix.
// Deterministic given seed. When kappa is set, rows are afterwards rescaled
// so that every norm is at most kappa. Requires 1 <= k <= min(n, d).
absl::StatusOr<Reduced> ReduceDim(const Dataset& data, int64_t k,
                                  uint64_t seed,
                                  std::optional<double> kappa = std::nullopt);

struct SplitPlan {
  uint64_t seed = 0;
  double train_fraction = 0.8;
  int repeats = 10;

  absl::Status Validate() const;
};

struct SplitPair {
  Dataset train;
  Dataset test;
  // Row indices into the source dataset, ascending.
  std::vector<int64_t> train_rows;
  std::vector<int64_t> test_rows;
};

// One fresh seeded permutation per repeat; the first floor(f n) permuted
// rows go to train.
absl::StatusOr<std::vector<SplitPair>> Split(const Dataset& data,
                                             const SplitPlan& plan);

struct SynthSpec {
  int64_t n = 1000;
  int64_t d = 32;
  int classes = 2;
  // Nonzero coordinates of the ground-truth weights (shared by all classes).
  int64_t sparsity = 8;
  // Standard deviation of Gaussian noise added to the class scores, in
  // units of the noiseless score's standard deviation.
  double noise = 0.0;
  // Standard deviation of the support features relative to the others.
  // Values above 1 concentrate the feature energy on the informative
  // coordinates, as in data whose leading principal directions carry the
  // label.
  double signal_scale = 1.0;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

struct SynthData {
  // Labels are class indices 0 .. classes-1. Every row has norm <= 1 and
  // the dataset declares kappa = 1.
  Dataset data;
  // classes x d ground truth; a single row when classes == 2 (class 1 iff
  // the score is positive). Rows have unit norm.
  Eigen::MatrixXd truth;
  std::vector<int64_t> support;
};

absl::StatusOr<SynthData> SynthClassification(const SynthSpec& spec);

// Dataset download with checksum verification and conversion to canonical
// CSV. Environment variables STABDP_CACHE_DIR, STABDP_FETCH_URL and
// STABDP_FETCH_SHA256 override the corresponding fields.
struct FetchOptions {
  // "adult" selects the census income converter; any other name stores the
  // (already canonical) CSV as downloaded.
  std::string name = "adult";
  std::string url;
  // Lowercase hex SHA-256 of the downloaded bytes. Required.
  std::string sha256;
  std::string cache_dir = "data";
  // Only use the cache; fail instead of downloading.
  bool offline = false;
  long timeout_seconds = 120;
};

// Applies the environment overrides to `options`.
FetchOptions FetchOptionsFromEnvironment(FetchOptions options);

// Returns the path of <cache_dir>/<name>.csv, downloading and converting it
// first unless it already exists. On any error nothing is left at that path.
absl::StatusOr<std::string> FetchDataset(const FetchOptions& options);

// Lowercase hex SHA-256 of `bytes`.
std::string Sha256Hex(const std::string& bytes);

// Converts raw census-income rows (15 comma-separated fields, no header) to
// canonical CSV: numeric columns kept, categorical columns one-hot encoded
// with sorted category names, rows containing "?" dropped, and the income
// column mapped to 0 (low, "<=50K") or 1 (high, ">50K"). `dropped` receives
// the number of rows removed.
absl::StatusOr<std::string> ConvertAdult(const std::string& raw,
                                         int64_t* dropped = nullptr);

}  // namespace stabdp

#endif  // STABDP_DATA_IO_H_
