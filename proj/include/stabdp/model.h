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

#ifndef STABDP_MODEL_H_
#define STABDP_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace stabdp {

using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Weights = Eigen::VectorXd;

// Feature matrix (n x d) with one label per row. Immutable after
// construction; modifications return new datasets.
class Dataset {
 public:
  // Fails unless n >= 1, d >= 1, labels.size() == n and all entries are
  // finite. column_names, when given, must have d entries.
  static absl::StatusOr<Dataset> Create(
      FeatureMatrix features, Eigen::VectorXd labels,
      std::vector<std::string> column_names = {});

  int64_t rows() const { return features_.rows(); }
  int64_t cols() const { return features_.cols(); }
  const FeatureMatrix& features() const { return features_; }
  const Eigen::VectorXd& labels() const { return labels_; }
  const std::vector<std::string>& column_names() const {
    return column_names_;
  }
  std::string label_name() const { return label_name_; }
  void set_label_name(std::string name) { label_name_ = std::move(name); }

  // Declared Euclidean bound on every row. Set only by DeclareKappa or
  // BoundRowNorms, both of which check it.
  std::optional<double> kappa() const { return kappa_; }
  absl::Status DeclareKappa(double kappa);

  // Copy with row `index` replaced by (x, y). The declared kappa is kept
  // only if the new row respects it.
  absl::StatusOr<Dataset> WithRecord(int64_t index,
                                     const Eigen::VectorXd& x,
                                     double y) const;

  Dataset Subset(std::span<const int64_t> rows) const;

  // Same rows with labels replaced (e.g. one-vs-rest signs).
  absl::StatusOr<Dataset> WithLabels(Eigen::VectorXd labels) const;

  absl::StatusOr<Dataset> WithFeatures(FeatureMatrix features) const;

 private:
  Dataset() = default;

  FeatureMatrix features_;
  Eigen::VectorXd labels_;
  std::vector<std::string> column_names_;
  std::string label_name_ = "label";
  std::optional<double> kappa_;
};

// Rescales every row with norm above kappa onto the kappa-sphere and
// declares the bound. Returns the number of rows rescaled via `rescaled`.
absl::StatusOr<Dataset> BoundRowNorms(const Dataset& data, double kappa,
                                      int64_t* rescaled = nullptr);

// Sorted distinct label values.
std::vector<double> DistinctLabels(const Eigen::VectorXd& labels);

// +1 where label == positive_class, -1 elsewhere.
Eigen::VectorXd OneVsRestLabels(const Eigen::VectorXd& labels,
                                double positive_class);

enum class LossKind { kLogistic, kSquared };
enum class PenaltyKind { kL2, kElasticNet };

const char* LossKindName(LossKind kind);
const char* PenaltyKindName(PenaltyKind kind);

// Loss, penalty and the analytic constants the stability results need.
//
// The L2 block of the penalty is l2_factor * lambda * g * ||w||^2 where g is
// gamma in elastic-net mode and 1 in L2 mode; the L1 block (elastic-net
// only) is lambda * eta * ||w||_1. The defaults give
//   L2:          mean loss + (lambda/2) ||w||^2
//   elastic net: mean loss + lambda (gamma ||w||^2 + eta ||w||_1)
// Keeping l2_factor explicit keeps the strong-convexity constant
// 2 * l2_factor * lambda * g consistent with whichever convention produced
// a given lambda.
//
// The kappa appearing in the two closed-form stability bounds differs: the
// L2 bound uses kappa^2, the elastic-net bound kappa to the first power.
// Both conventions are kept (see stability.h); they agree at kappa = 1.
struct ObjectiveSpec {
  LossKind loss = LossKind::kLogistic;
  PenaltyKind penalty = PenaltyKind::kL2;
  double lambda = 0.0;
  double gamma = 1.0;
  double eta = 0.0;
  double kappa = 1.0;
  // Lipschitz constant of the per-example loss in w over the feasible
  // region. For logistic loss this is kappa.
  double lipschitz = 1.0;
  double l2_factor = 0.5;

  static ObjectiveSpec L2(LossKind loss, double lambda, double kappa = 1.0);
  // eta defaults to 1 - gamma.
  static ObjectiveSpec ElasticNet(LossKind loss, double lambda, double gamma,
                                  double kappa = 1.0,
                                  std::optional<double> eta = std::nullopt);

  double l2_weight() const {
    return l2_factor * lambda * (penalty == PenaltyKind::kElasticNet ? gamma
                                                                     : 1.0);
  }
  double l1_weight() const {
    return penalty == PenaltyKind::kElasticNet ? lambda * eta : 0.0;
  }

  absl::Status Validate() const;
};

// Lipschitz constant of the squared loss (y - <w,x>)^2 on the ball that
// contains every minimizer: ||w*|| <= label_bound * sqrt(2 / lambda_sc).
double SquaredLossLipschitz(double kappa, double label_bound,
                            double lambda_sc);

absl::StatusOr<double> PerExampleLoss(const ObjectiveSpec& spec,
                                      const Weights& w,
                                      const Eigen::VectorXd& x, double y);

// Mean per-example loss, no penalty.
absl::StatusOr<double> EmpiricalLoss(const ObjectiveSpec& spec,
                                     const Weights& w, const Dataset& data);

// Mean loss plus penalty (both blocks).
absl::StatusOr<double> Objective(const ObjectiveSpec& spec, const Weights& w,
                                 const Dataset& data);

// Gradient of the smooth part (mean loss + L2 block). The L1 block is
// handled by the optimizer's proximal step.
absl::StatusOr<Eigen::VectorXd> Gradient(const ObjectiveSpec& spec,
                                         const Weights& w,
                                         const Dataset& data);

// Same, for the single-example objective loss(w; x, y) + L2 block.
absl::StatusOr<Eigen::VectorXd> Gradient(const ObjectiveSpec& spec,
                                         const Weights& w,
                                         const Eigen::VectorXd& x, double y);

absl::StatusOr<double> StrongConvexityConstant(const ObjectiveSpec& spec);

// Predicted class: sign of <w, x> mapped to {-1, +1} (0 maps to +1).
double PredictSign(const Weights& w, const Eigen::VectorXd& x);

namespace internal {

// Unchecked kernels used in solver inner loops. Callers validate dimensions.
// Loss at prediction z = <w,x>.
double Loss(LossKind kind, double z, double y);
// d loss / d <w,x>.
double LossDerivative(LossKind kind, double z, double y);
double SmoothObjective(const ObjectiveSpec& spec, const Weights& w,
                       const Dataset& data);
// Gradient of (mean loss over `rows`) + L2 block. An empty span means all
// rows. Rows are accumulated in ascending order of the span as given.
void SmoothGradient(const ObjectiveSpec& spec, const Weights& w,
                    const Dataset& data, std::span<const int64_t> rows,
                    Eigen::VectorXd& out);

}  // namespace internal
}  // namespace stabdp

#endif  // STABDP_MODEL_H_
