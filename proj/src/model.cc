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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"

namespace stabdp {
namespace {

constexpr double kNormSlack = 1e-12;

absl::Status DimensionMismatch(int64_t weights, int64_t features) {
  return absl::InvalidArgumentError(
      absl::StrCat("dimension mismatch: weights have ", weights,
                   " entries, features have ", features));
}

}  // namespace

absl::StatusOr<Dataset> Dataset::Create(FeatureMatrix features,
                                        Eigen::VectorXd labels,
                                        std::vector<std::string> column_names) {
  if (features.rows() < 1) {
    return absl::InvalidArgumentError("dataset needs at least one row");
  }
  if (features.cols() < 1) {
    return absl::InvalidArgumentError("dataset needs at least one column");
  }
  if (labels.size() != features.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("labels length ", labels.size(), " does not match ",
                     features.rows(), " rows"));
  }
  if (!features.allFinite() || !labels.allFinite()) {
    return absl::InvalidArgumentError("dataset contains non-finite values");
  }
  if (column_names.empty()) {
    column_names.reserve(features.cols());
    for (int64_t j = 0; j < features.cols(); ++j) {
      column_names.push_back(absl::StrCat("x", j));
    }
  } else if (static_cast<int64_t>(column_names.size()) != features.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat(column_names.size(), " column names for ",
                     features.cols(), " columns"));
  }
  Dataset data;
  data.features_ = std::move(features);
  data.labels_ = std::move(labels);
  data.column_names_ = std::move(column_names);
  return data;
}

absl::Status Dataset::DeclareKappa(double kappa) {
  if (!(kappa > 0) || !std::isfinite(kappa)) {
    return absl::InvalidArgumentError("kappa must be positive and finite");
  }
  for (int64_t i = 0; i < rows(); ++i) {
    double norm = features_.row(i).norm();
    if (norm > kappa * (1 + kNormSlack)) {
      return absl::FailedPreconditionError(
          absl::StrCat("row ", i, " has norm ", norm, " > kappa ", kappa));
    }
  }
  kappa_ = kappa;
  return absl::OkStatus();
}

absl::StatusOr<Dataset> Dataset::WithRecord(int64_t index,
                                            const Eigen::VectorXd& x,
                                            double y) const {
  if (index < 0 || index >= rows()) {
    return absl::OutOfRangeError(
        absl::StrCat("record index ", index, " outside [0, ", rows(), ")"));
  }
  if (x.size() != cols()) return DimensionMismatch(x.size(), cols());
  if (!x.allFinite() || !std::isfinite(y)) {
    return absl::InvalidArgumentError("record contains non-finite values");
  }
  Dataset copy = *this;
  copy.features_.row(index) = x.transpose();
  copy.labels_(index) = y;
  if (kappa_ && x.norm() > *kappa_ * (1 + kNormSlack)) copy.kappa_.reset();
  return copy;
}

Dataset Dataset::Subset(std::span<const int64_t> rows) const {
  Dataset out;
  out.features_.resize(static_cast<Eigen::Index>(rows.size()), cols());
  out.labels_.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t k = 0; k < rows.size(); ++k) {
    out.features_.row(k) = features_.row(rows[k]);
    out.labels_(k) = labels_(rows[k]);
  }
  out.column_names_ = column_names_;
  out.label_name_ = label_name_;
  out.kappa_ = kappa_;
  return out;
}

absl::StatusOr<Dataset> Dataset::WithLabels(Eigen::VectorXd labels) const {
  if (labels.size() != rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("labels length ", labels.size(), " does not match ",
                     rows(), " rows"));
  }
  if (!labels.allFinite()) {
    return absl::InvalidArgumentError("labels contain non-finite values");
  }
  Dataset copy = *this;
  copy.labels_ = std::move(labels);
  return copy;
}

absl::StatusOr<Dataset> Dataset::WithFeatures(FeatureMatrix features) const {
  if (features.rows() != rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature rows ", features.rows(), " do not match ",
                     rows(), " labels"));
  }
  std::vector<std::string> names;
  if (features.cols() == cols()) names = column_names_;
  auto out = Create(std::move(features), labels_, std::move(names));
  if (out.ok()) out->label_name_ = label_name_;
  return out;
}

absl::StatusOr<Dataset> BoundRowNorms(const Dataset& data, double kappa,
                                      int64_t* rescaled) {
  if (!(kappa > 0) || !std::isfinite(kappa)) {
    return absl::InvalidArgumentError("kappa must be positive and finite");
  }
  FeatureMatrix features = data.features();
  int64_t count = 0;
  for (int64_t i = 0; i < features.rows(); ++i) {
    double norm = features.row(i).norm();
    if (norm > kappa) {
      features.row(i) *= kappa / norm;
      // Guard against the scaled norm rounding just above kappa.
      while (features.row(i).norm() > kappa) {
        features.row(i) *= 1 - 1e-15;
      }
      ++count;
    }
  }
  auto out = data.WithFeatures(std::move(features));
  if (!out.ok()) return out.status();
  absl::Status declared = out->DeclareKappa(kappa);
  if (!declared.ok()) return declared;
  if (rescaled != nullptr) *rescaled = count;
  return out;
}

std::vector<double> DistinctLabels(const Eigen::VectorXd& labels) {
  std::set<double> seen(labels.data(), labels.data() + labels.size());
  return {seen.begin(), seen.end()};
}

Eigen::VectorXd OneVsRestLabels(const Eigen::VectorXd& labels,
                                double positive_class) {
  return labels.unaryExpr(
      [positive_class](double y) { return y == positive_class ? 1.0 : -1.0; });
}

const char* LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kLogistic:
      return "logistic";
    case LossKind::kSquared:
      return "squared";
  }
  return "unknown";
}

const char* PenaltyKindName(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::kL2:
      return "l2";
    case PenaltyKind::kElasticNet:
      return "elastic_net";
  }
  return "unknown";
}

ObjectiveSpec ObjectiveSpec::L2(LossKind loss, double lambda, double kappa) {
  ObjectiveSpec spec;
  spec.loss = loss;
  spec.penalty = PenaltyKind::kL2;
  spec.lambda = lambda;
  spec.gamma = 1.0;
  spec.eta = 0.0;
  spec.kappa = kappa;
  spec.l2_factor = 0.5;
  spec.lipschitz = loss == LossKind::kLogistic
                       ? kappa
                       : SquaredLossLipschitz(kappa, 1.0, lambda);
  return spec;
}

ObjectiveSpec ObjectiveSpec::ElasticNet(LossKind loss, double lambda,
                                        double gamma, double kappa,
                                        std::optional<double> eta) {
  ObjectiveSpec spec;
  spec.loss = loss;
  spec.penalty = PenaltyKind::kElasticNet;
  spec.lambda = lambda;
  spec.gamma = gamma;
  spec.eta = eta.value_or(1.0 - gamma);
  spec.kappa = kappa;
  spec.l2_factor = 1.0;
  spec.lipschitz = loss == LossKind::kLogistic
                       ? kappa
                       : SquaredLossLipschitz(kappa, 1.0, 2 * lambda * gamma);
  return spec;
}

absl::Status ObjectiveSpec::Validate() const {
  if (!(lambda >= 0) || !std::isfinite(lambda)) {
    return absl::InvalidArgumentError("lambda must be finite and >= 0");
  }
  if (penalty == PenaltyKind::kElasticNet) {
    if (!(gamma > 0 && gamma <= 1)) {
      return absl::InvalidArgumentError("gamma must lie in (0, 1]");
    }
    if (!(eta >= 0) || !std::isfinite(eta)) {
      return absl::InvalidArgumentError("eta must be finite and >= 0");
    }
  }
  if (!(kappa > 0) || !std::isfinite(kappa)) {
    return absl::InvalidArgumentError("kappa must be positive and finite");
  }
  if (!(lipschitz > 0) || !std::isfinite(lipschitz)) {
    return absl::InvalidArgumentError("lipschitz must be positive and finite");
  }
  if (!(l2_factor > 0) || !std::isfinite(l2_factor)) {
    return absl::InvalidArgumentError("l2_factor must be positive and finite");
  }
  return absl::OkStatus();
}

double SquaredLossLipschitz(double kappa, double label_bound,
                            double lambda_sc) {
  if (!(lambda_sc > 0)) return std::numeric_limits<double>::infinity();
  double radius = label_bound * std::sqrt(2.0 / lambda_sc);
  return 2.0 * (kappa * radius + label_bound) * kappa;
}

namespace internal {

double Loss(LossKind kind, double z, double y) {
  switch (kind) {
    case LossKind::kLogistic: {
      // log(1 + exp(m)) with m = -y z, evaluated without overflow.
      double m = -y * z;
      return std::log1p(std::exp(-std::abs(m))) + std::max(m, 0.0);
    }
    case LossKind::kSquared: {
      double r = y - z;
      return r * r;
    }
  }
  return 0.0;
}

double LossDerivative(LossKind kind, double z, double y) {
  switch (kind) {
    case LossKind::kLogistic: {
      // -y * sigmoid(-y z)
      double m = -y * z;
      double s = m >= 0 ? 1.0 / (1.0 + std::exp(-m))
                        : std::exp(m) / (1.0 + std::exp(m));
      return -y * s;
    }
    case LossKind::kSquared:
      return -2.0 * (y - z);
  }
  return 0.0;
}

double SmoothObjective(const ObjectiveSpec& spec, const Weights& w,
                       const Dataset& data) {
  Eigen::VectorXd z = data.features() * w;
  const Eigen::VectorXd& y = data.labels();
  double total = 0.0;
  for (int64_t i = 0; i < data.rows(); ++i) {
    total += Loss(spec.loss, z(i), y(i));
  }
  return total / static_cast<double>(data.rows()) +
         spec.l2_weight() * w.squaredNorm();
}

void SmoothGradient(const ObjectiveSpec& spec, const Weights& w,
                    const Dataset& data, std::span<const int64_t> rows,
                    Eigen::VectorXd& out) {
  const FeatureMatrix& x = data.features();
  const Eigen::VectorXd& y = data.labels();
  if (rows.empty()) {
    Eigen::VectorXd z = x * w;
    Eigen::VectorXd coef(data.rows());
    for (int64_t i = 0; i < data.rows(); ++i) {
      coef(i) = LossDerivative(spec.loss, z(i), y(i));
    }
    out.noalias() = x.transpose() * coef;
    out /= static_cast<double>(data.rows());
  } else {
    out.setZero(w.size());
    for (int64_t i : rows) {
      double z = x.row(i).dot(w);
      out.noalias() += LossDerivative(spec.loss, z, y(i)) *
                       x.row(i).transpose();
    }
    out /= static_cast<double>(rows.size());
  }
  out.noalias() += (2.0 * spec.l2_weight()) * w;
}

}  // namespace internal

absl::StatusOr<double> PerExampleLoss(const ObjectiveSpec& spec,
                                      const Weights& w,
                                      const Eigen::VectorXd& x, double y) {
  if (w.size() != x.size()) return DimensionMismatch(w.size(), x.size());
  if (spec.loss == LossKind::kLogistic && y != 1.0 && y != -1.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("logistic loss needs labels in {-1, +1}, got ", y));
  }
  return internal::Loss(spec.loss, w.dot(x), y);
}

namespace {

absl::Status CheckData(const ObjectiveSpec& spec, const Weights& w,
                       const Dataset& data) {
  if (w.size() != data.cols()) return DimensionMismatch(w.size(), data.cols());
  if (spec.loss == LossKind::kLogistic) {
    for (int64_t i = 0; i < data.rows(); ++i) {
      double y = data.labels()(i);
      if (y != 1.0 && y != -1.0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "logistic loss needs labels in {-1, +1}; row ", i, " has ", y));
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> EmpiricalLoss(const ObjectiveSpec& spec,
                                     const Weights& w, const Dataset& data) {
  absl::Status status = CheckData(spec, w, data);
  if (!status.ok()) return status;
  Eigen::VectorXd z = data.features() * w;
  double total = 0.0;
  for (int64_t i = 0; i < data.rows(); ++i) {
    total += internal::Loss(spec.loss, z(i), data.labels()(i));
  }
  return total / static_cast<double>(data.rows());
}

absl::StatusOr<double> Objective(const ObjectiveSpec& spec, const Weights& w,
                                 const Dataset& data) {
  absl::Status status = CheckData(spec, w, data);
  if (!status.ok()) return status;
  return internal::SmoothObjective(spec, w, data) +
         spec.l1_weight() * w.lpNorm<1>();
}

absl::StatusOr<Eigen::VectorXd> Gradient(const ObjectiveSpec& spec,
                                         const Weights& w,
                                         const Dataset& data) {
  absl::Status status = CheckData(spec, w, data);
  if (!status.ok()) return status;
  Eigen::VectorXd out(w.size());
  internal::SmoothGradient(spec, w, data, {}, out);
  return out;
}

absl::StatusOr<Eigen::VectorXd> Gradient(const ObjectiveSpec& spec,
                                         const Weights& w,
                                         const Eigen::VectorXd& x, double y) {
  if (w.size() != x.size()) return DimensionMismatch(w.size(), x.size());
  return internal::LossDerivative(spec.loss, w.dot(x), y) * x +
         2.0 * spec.l2_weight() * w;
}

absl::StatusOr<double> StrongConvexityConstant(const ObjectiveSpec& spec) {
  double value = 2.0 * spec.l2_weight();
  if (!(value > 0)) {
    return absl::FailedPreconditionError("objective not strongly convex");
  }
  return value;
}

double PredictSign(const Weights& w, const Eigen::VectorXd& x) {
  return w.dot(x) >= 0 ? 1.0 : -1.0;
}

}  // namespace stabdp
