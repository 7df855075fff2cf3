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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "stabdp/rng.h"
#include "stabdp/status_macros.h"
#include "stabdp/text.h"

namespace stabdp {
namespace {

std::vector<std::string> SplitCsvLine(absl::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields = absl::StrSplit(line, ',');
  for (std::string& f : fields) {
    f = std::string(absl::StripAsciiWhitespace(f));
  }
  return fields;
}

// Orthonormal basis of the column space of `m` (thin Q of a QR).
Eigen::MatrixXd Orthonormalize(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::Index cols = std::min(m.rows(), m.cols());
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), cols);
}

}  // namespace

absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const std::string& label_column) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": no rows"));
  }
  std::vector<std::string> header = SplitCsvLine(line);
  if (header.size() < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ":1: need at least one feature column and a label column"));
  }
  size_t label_index = header.size() - 1;
  if (!label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), label_column);
    if (it == header.end()) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ": label column '", label_column, "' not in header"));
    }
    label_index = static_cast<size_t>(it - header.begin());
  }
  std::vector<std::string> names;
  for (size_t j = 0; j < header.size(); ++j) {
    if (j != label_index) names.push_back(header[j]);
  }

  std::vector<double> values;
  std::vector<double> labels;
  int64_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    std::vector<std::string> fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_number, ": expected ", header.size(),
                       " fields, found ", fields.size()));
    }
    for (size_t j = 0; j < fields.size(); ++j) {
      double v;
      if (!absl::SimpleAtod(fields[j], &v) || !std::isfinite(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ":", line_number, ": column '", header[j],
                         "' is not a finite number: '", fields[j], "'"));
      }
      if (j == label_index) {
        labels.push_back(v);
      } else {
        values.push_back(v);
      }
    }
  }
  if (labels.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": no rows"));
  }
  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto d = static_cast<Eigen::Index>(names.size());
  FeatureMatrix x = Eigen::Map<FeatureMatrix>(values.data(), n, d);
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(labels.data(), n);
  STABDP_ASSIGN_OR_RETURN(Dataset data,
                          Dataset::Create(std::move(x), std::move(y),
                                          std::move(names)));
  data.set_label_name(header[label_index]);
  return data;
}

absl::Status WriteCsv(const Dataset& data, const std::string& path) {
  std::ostringstream out;
  for (const std::string& name : data.column_names()) out << name << ',';
  out << data.label_name() << '\n';
  for (int64_t i = 0; i < data.rows(); ++i) {
    for (int64_t j = 0; j < data.cols(); ++j) {
      out << FormatDouble(data.features()(i, j)) << ',';
    }
    out << FormatDouble(data.labels()(i)) << '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  file << out.str();
  file.close();
  if (!file) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<Dataset> StandardizeTransform::Apply(
    const Dataset& data) const {
  if (mean.size() != data.cols() || scale.size() != data.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("transform has ", mean.size(), " columns, dataset has ",
                     data.cols()));
  }
  FeatureMatrix x = data.features();
  for (int64_t j = 0; j < x.cols(); ++j) {
    if (scale(j) == 0.0) {
      x.col(j).setZero();
    } else {
      x.col(j) = (x.col(j).array() - mean(j)) / scale(j);
    }
  }
  return data.WithFeatures(std::move(x));
}

absl::StatusOr<Standardized> Standardize(const Dataset& data) {
  const int64_t n = data.rows();
  if (n < 2) {
    return absl::InvalidArgumentError("standardize needs at least 2 rows");
  }
  StandardizeTransform t;
  t.mean = data.features().colwise().mean().transpose();
  t.scale.resize(data.cols());
  for (int64_t j = 0; j < data.cols(); ++j) {
    auto col = data.features().col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      t.scale(j) = 0.0;
      continue;
    }
    double ss = (col.array() - t.mean(j)).square().sum();
    t.scale(j) = std::sqrt(ss / static_cast<double>(n - 1));
  }
  STABDP_ASSIGN_OR_RETURN(Dataset out, t.Apply(data));
  return Standardized{std::move(out), std::move(t)};
}

absl::StatusOr<Dataset> Projection::Apply(const Dataset& data) const {
  if (basis.rows() != data.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("projection expects ", basis.rows(),
                     " columns, dataset has ", data.cols()));
  }
  FeatureMatrix x = data.features() * basis;
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    names.push_back(absl::StrCat("svd", j));
  }
  STABDP_ASSIGN_OR_RETURN(Dataset out,
                          Dataset::Create(std::move(x), data.labels(),
                                          std::move(names)));
  out.set_label_name(data.label_name());
  return out;
}

absl::StatusOr<Reduced> ReduceDim(const Dataset& data, int64_t k,
                                  uint64_t seed,
                                  std::optional<double> kappa) {
  const int64_t n = data.rows();
  const int64_t d = data.cols();
  if (k < 1 || k > d) {
    return absl::InvalidArgumentError(
        absl::StrCat("k must lie in [1, d = ", d, "], got ", k));
  }
  if (k > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("k = ", k, " exceeds the row count ", n));
  }
  const int64_t l = std::min({k + 8, d, n});
  const Eigen::MatrixXd x = data.features();

  Rng rng(seed);
  Eigen::MatrixXd omega(d, l);
  for (int64_t c = 0; c < l; ++c) {
    for (int64_t r = 0; r < d; ++r) omega(r, c) = rng.Gaussian();
  }
  Eigen::MatrixXd q = Orthonormalize(x * omega);
  for (int iter = 0; iter < 2; ++iter) {
    Eigen::MatrixXd z = Orthonormalize(x.transpose() * q);
    q = Orthonormalize(x * z);
  }
  Eigen::MatrixXd b = q.transpose() * x;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);
  Eigen::MatrixXd v = svd.matrixV().leftCols(k);
  // Fix the sign of each singular vector so the output does not depend on
  // the decomposition's arbitrary choice.
  for (int64_t c = 0; c < k; ++c) {
    Eigen::Index arg;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    if (v(arg, c) < 0) v.col(c) *= -1.0;
  }

  Reduced out{data, Projection{std::move(v)}, 0};
  STABDP_ASSIGN_OR_RETURN(out.data, out.projection.Apply(data));
  if (kappa) {
    STABDP_ASSIGN_OR_RETURN(out.data,
                            BoundRowNorms(out.data, *kappa, &out.rescaled_rows));
  }
  return out;
}

absl::Status SplitPlan::Validate() const {
  if (!(train_fraction > 0 && train_fraction < 1)) {
    return absl::InvalidArgumentError("train_fraction must lie in (0, 1)");
  }
  if (repeats < 1) return absl::InvalidArgumentError("repeats must be >= 1");
  return absl::OkStatus();
}

absl::StatusOr<std::vector<SplitPair>> Split(const Dataset& data,
                                             const SplitPlan& plan) {
  STABDP_RETURN_IF_ERROR(plan.Validate());
  const int64_t n = data.rows();
  const auto n_train = static_cast<int64_t>(
      std::floor(plan.train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "split of ", n, " rows at fraction ", plan.train_fraction,
        " leaves an empty train or test set"));
  }
  std::vector<SplitPair> out;
  out.reserve(plan.repeats);
  Rng root(plan.seed);
  for (int r = 0; r < plan.repeats; ++r) {
    std::vector<int64_t> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng = root.Derive(static_cast<uint64_t>(r));
    rng.Shuffle(perm.begin(), perm.end());
    std::vector<int64_t> train(perm.begin(), perm.begin() + n_train);
    std::vector<int64_t> test(perm.begin() + n_train, perm.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    out.push_back(SplitPair{data.Subset(train), data.Subset(test),
                            std::move(train), std::move(test)});
  }
  return out;
}

absl::Status SynthSpec::Validate() const {
  if (n < 1 || d < 1) return absl::InvalidArgumentError("n and d must be >= 1");
  if (classes < 2) return absl::InvalidArgumentError("classes must be >= 2");
  if (sparsity < 1 || sparsity > d) {
    return absl::InvalidArgumentError(
        absl::StrCat("sparsity must lie in [1, d = ", d, "]"));
  }
  if (!(noise >= 0) || !std::isfinite(noise)) {
    return absl::InvalidArgumentError("noise must be finite and >= 0");
  }
  if (!(signal_scale > 0) || !std::isfinite(signal_scale)) {
    return absl::InvalidArgumentError("signal_scale must be positive");
  }
  return absl::OkStatus();
}

absl::StatusOr<SynthData> SynthClassification(const SynthSpec& spec) {
  STABDP_RETURN_IF_ERROR(spec.Validate());
  Rng root(spec.seed);
  Rng support_rng = root.Derive(0);
  Rng truth_rng = root.Derive(1);
  Rng feature_rng = root.Derive(2);
  Rng noise_rng = root.Derive(3);

  std::vector<int64_t> perm(static_cast<size_t>(spec.d));
  std::iota(perm.begin(), perm.end(), 0);
  support_rng.Shuffle(perm.begin(), perm.end());
  std::vector<int64_t> support(perm.begin(), perm.begin() + spec.sparsity);
  std::sort(support.begin(), support.end());

  const int rows = spec.classes == 2 ? 1 : spec.classes;
  Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(rows, spec.d);
  for (int c = 0; c < rows; ++c) {
    for (int64_t j : support) truth(c, j) = truth_rng.Gaussian();
    double norm = truth.row(c).norm();
    if (norm > 0) truth.row(c) /= norm;
  }

  const double root_d = std::sqrt(static_cast<double>(spec.d));
  Eigen::VectorXd feature_sd = Eigen::VectorXd::Constant(spec.d, 1.0 / root_d);
  for (int64_t j : support) feature_sd(j) *= spec.signal_scale;
  FeatureMatrix x(spec.n, spec.d);
  Eigen::VectorXd y(spec.n);
  for (int64_t i = 0; i < spec.n; ++i) {
    for (int64_t j = 0; j < spec.d; ++j) {
      x(i, j) = feature_rng.Gaussian() * feature_sd(j);
    }
    double norm = x.row(i).norm();
    if (norm > 1.0) x.row(i) /= norm;
    Eigen::VectorXd xi = x.row(i).transpose();
    Eigen::VectorXd scores = (root_d / spec.signal_scale) * (truth * xi);
    for (Eigen::Index c = 0; c < scores.size(); ++c) {
      scores(c) += spec.noise * noise_rng.Gaussian();
    }
    if (spec.classes == 2) {
      y(i) = scores(0) > 0 ? 1.0 : 0.0;
    } else {
      Eigen::Index arg;
      scores.maxCoeff(&arg);
      y(i) = static_cast<double>(arg);
    }
  }
  STABDP_ASSIGN_OR_RETURN(Dataset data,
                          Dataset::Create(std::move(x), std::move(y)));
  STABDP_RETURN_IF_ERROR(data.DeclareKappa(1.0));
  return SynthData{std::move(data), std::move(truth), std::move(support)};
}

}  // namespace stabdp
