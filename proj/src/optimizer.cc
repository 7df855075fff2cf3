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

#include "stabdp/optimizer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "absl/strings/cord.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "stabdp/status_macros.h"

namespace stabdp {
namespace {

absl::Status CheckSolvable(const ObjectiveSpec& spec, const Dataset& data) {
  STABDP_RETURN_IF_ERROR(spec.Validate());
  // Objective() validates dimensions and label domain in one pass.
  Weights zero = Weights::Zero(data.cols());
  auto value = Objective(spec, zero, data);
  return value.status();
}

// Upper bound on the Hessian norm of the smooth part.
double SmoothnessBound(const ObjectiveSpec& spec, const Dataset& data) {
  double max_sq = data.features().rowwise().squaredNorm().maxCoeff();
  double curvature = spec.loss == LossKind::kLogistic ? 0.25 : 2.0;
  return curvature * max_sq + 2.0 * spec.l2_weight();
}

double ResidualFromGradient(const ObjectiveSpec& spec, const Weights& w,
                            const Eigen::VectorXd& grad) {
  double l1 = spec.l1_weight();
  if (l1 == 0.0) return grad.norm();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    double r;
    if (w(j) > 0) {
      r = grad(j) + l1;
    } else if (w(j) < 0) {
      r = grad(j) - l1;
    } else {
      r = std::max(std::abs(grad(j)) - l1, 0.0);
    }
    sum += r * r;
  }
  return std::sqrt(sum);
}

std::string FormatWeights(const Weights& w) {
  std::string out;
  char buf[32];
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", w(j));
    if (j > 0) out += ',';
    out += buf;
  }
  return out;
}

}  // namespace

Weights SoftThreshold(const Weights& v, double threshold) {
  return v.unaryExpr([threshold](double x) {
    if (x > threshold) return x - threshold;
    if (x < -threshold) return x + threshold;
    return 0.0;
  });
}

Weights ProximalStep(const ObjectiveSpec& spec, const Weights& w,
                     const Eigen::VectorXd& grad, double step) {
  Weights next = w - step * grad;
  double l1 = spec.l1_weight();
  if (l1 > 0) return SoftThreshold(next, step * l1);
  return next;
}

double OptimalityResidual(const ObjectiveSpec& spec, const Dataset& data,
                          const Weights& w) {
  Eigen::VectorXd grad(w.size());
  internal::SmoothGradient(spec, w, data, {}, grad);
  return ResidualFromGradient(spec, w, grad);
}

absl::StatusOr<SolveReport> SolveErm(const ObjectiveSpec& spec,
                                     const Dataset& data, double tolerance,
                                     int64_t max_iterations,
                                     const std::optional<Weights>& initial) {
  if (!(tolerance > 0)) {
    return absl::InvalidArgumentError("tolerance must be positive");
  }
  STABDP_RETURN_IF_ERROR(CheckSolvable(spec, data));
  STABDP_ASSIGN_OR_RETURN(double lambda_sc, StrongConvexityConstant(spec));
  const int64_t d = data.cols();
  if (initial && initial->size() != d) {
    return absl::InvalidArgumentError(
        absl::StrCat("initial iterate has ", initial->size(),
                     " entries, expected ", d));
  }

  auto finish = [&](Weights w, double residual, int64_t iterations) {
    SolveReport report;
    report.weights = std::move(w);
    report.final_gradient_norm = residual;
    report.iterations_used = iterations;
    report.loss_gap_bound = residual * residual / (2.0 * lambda_sc);
    return report;
  };

  Weights x = initial.value_or(Weights::Zero(d));
  Eigen::VectorXd grad_x(d);
  internal::SmoothGradient(spec, x, data, {}, grad_x);
  double residual = ResidualFromGradient(spec, x, grad_x);
  if (residual <= tolerance) return finish(std::move(x), residual, 0);

  Weights best = x;
  double best_residual = residual;

  double step = 2.0 / SmoothnessBound(spec, data);
  Weights y = x;
  Eigen::VectorXd grad_y = grad_x;
  Weights x_next(d);
  Eigen::VectorXd grad_next(d);
  double momentum = 1.0;
  int64_t stalled = 0;

  for (int64_t iter = 1; iter <= max_iterations; ++iter) {
    double move = 0.0;
    while (true) {
      x_next = ProximalStep(spec, y, grad_y, step);
      internal::SmoothGradient(spec, x_next, data, {}, grad_next);
      move = (x_next - y).norm();
      if (move == 0.0) break;
      if ((grad_next - grad_y).norm() * step <= move) break;
      step *= 0.5;
    }
    residual = ResidualFromGradient(spec, x_next, grad_next);
    if (!std::isfinite(residual)) {
      return absl::InternalError(
          absl::StrCat("non-finite residual at iteration ", iter));
    }
    if (residual < best_residual) {
      best_residual = residual;
      best = x_next;
      stalled = 0;
    } else if (++stalled > 1000) {
      break;
    }
    if (residual <= tolerance) return finish(std::move(x_next), residual, iter);

    if ((y - x_next).dot(x_next - x) > 0) {
      // Momentum is pointing uphill; restart from the new point.
      momentum = 1.0;
      y = x_next;
      grad_y = grad_next;
    } else {
      double next_momentum =
          0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      y = x_next + ((momentum - 1.0) / next_momentum) * (x_next - x);
      momentum = next_momentum;
      internal::SmoothGradient(spec, y, data, {}, grad_y);
    }
    x = x_next;
  }

  absl::Status status = absl::DeadlineExceededError(absl::StrCat(
      "solver did not reach tolerance ", tolerance, " within ", max_iterations,
      " iterations; best residual ", best_residual));
  status.SetPayload(kBestIteratePayload, absl::Cord(FormatWeights(best)));
  return status;
}

std::optional<Weights> BestIterateFromStatus(const absl::Status& status) {
  auto payload = status.GetPayload(kBestIteratePayload);
  if (!payload) return std::nullopt;
  std::string text(*payload);
  std::vector<std::string> parts = absl::StrSplit(text, ',');
  Weights w(static_cast<Eigen::Index>(parts.size()));
  for (size_t j = 0; j < parts.size(); ++j) {
    if (!absl::SimpleAtod(parts[j], &w(j))) return std::nullopt;
  }
  return w;
}

absl::StatusOr<std::vector<Weights>> FixedStepDescent(
    const ObjectiveSpec& spec, const Dataset& data, const Weights& start,
    double step, int64_t steps) {
  if (!(step > 0)) return absl::InvalidArgumentError("step must be positive");
  if (steps < 0) return absl::InvalidArgumentError("steps must be >= 0");
  STABDP_RETURN_IF_ERROR(CheckSolvable(spec, data));
  if (start.size() != data.cols()) {
    return absl::InvalidArgumentError("start point has the wrong dimension");
  }
  std::vector<Weights> out;
  out.reserve(static_cast<size_t>(steps));
  Weights w = start;
  Eigen::VectorXd grad(w.size());
  for (int64_t t = 0; t < steps; ++t) {
    internal::SmoothGradient(spec, w, data, {}, grad);
    w = ProximalStep(spec, w, grad, step);
    out.push_back(w);
  }
  return out;
}

Eigen::VectorXd ClipGradient(const Eigen::VectorXd& g, double bound) {
  double norm = g.norm();
  if (norm <= bound) return g;
  return g * (bound / norm);
}

Eigen::VectorXd SDropout(const Eigen::VectorXd& v, double rate, Rng& rng) {
  rate = std::min(rate, 1.0);
  const double target = std::max(rate, 0.0) * v.norm();
  Eigen::VectorXd out = v;
  if (out.norm() <= target) return out;
  std::vector<Eigen::Index> order(static_cast<size_t>(v.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  rng.Shuffle(order.begin(), order.end());
  for (Eigen::Index j : order) {
    out(j) = 0.0;
    if (out.norm() <= target) break;
  }
  return out;
}

absl::Status SgdConfig::Validate(int64_t rows) const {
  if (steps < 0) return absl::InvalidArgumentError("steps must be >= 0");
  if (batch_size < 1 || batch_size > rows) {
    return absl::InvalidArgumentError(absl::StrCat(
        "batch_size must lie in [1, ", rows, "], got ", batch_size));
  }
  if (step_schedule.empty()) {
    if (!(step_size > 0) || !std::isfinite(step_size)) {
      return absl::InvalidArgumentError("step_size must be positive");
    }
  } else {
    if (static_cast<int64_t>(step_schedule.size()) != steps) {
      return absl::InvalidArgumentError(
          "step_schedule length must equal steps");
    }
    for (double a : step_schedule) {
      if (!(a > 0) || !std::isfinite(a)) {
        return absl::InvalidArgumentError("step_schedule entries must be > 0");
      }
    }
  }
  if (clip_bound && !(*clip_bound > 0)) {
    return absl::InvalidArgumentError("clip_bound must be positive");
  }
  if (dropout_rate && !(*dropout_rate > 0 && *dropout_rate <= 1)) {
    return absl::InvalidArgumentError("dropout_rate must lie in (0, 1]");
  }
  if (!averaging.empty()) {
    if (static_cast<int64_t>(averaging.size()) != steps) {
      return absl::InvalidArgumentError("averaging length must equal steps");
    }
    double total = 0.0;
    for (double a : averaging) {
      if (!(a >= 0)) {
        return absl::InvalidArgumentError("averaging weights must be >= 0");
      }
      total += a;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      return absl::InvalidArgumentError(
          absl::StrCat("averaging weights sum to ", total, ", expected 1"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<SolveReport> SgdRun(const ObjectiveSpec& spec,
                                   const Dataset& data, const SgdConfig& cfg,
                                   std::vector<Weights>* trajectory) {
  STABDP_RETURN_IF_ERROR(cfg.Validate(data.rows()));
  STABDP_RETURN_IF_ERROR(CheckSolvable(spec, data));
  const int64_t n = data.rows();
  const int64_t d = data.cols();
  if (cfg.initial && cfg.initial->size() != d) {
    return absl::InvalidArgumentError("initial iterate has the wrong size");
  }

  Rng root(cfg.seed);
  Rng order_rng = root.Derive(0);
  Rng dropout_rng = root.Derive(1);

  Weights w = cfg.initial.value_or(Weights::Zero(d));
  Weights averaged = Weights::Zero(d);
  std::vector<int64_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), int64_t{0});
  int64_t cursor = n;
  std::vector<int64_t> batch;
  Eigen::VectorXd grad(d);
  if (trajectory != nullptr) trajectory->clear();

  const bool full_batch = cfg.batch_size == n;
  for (int64_t t = 0; t < cfg.steps; ++t) {
    if (full_batch) {
      internal::SmoothGradient(spec, w, data, {}, grad);
    } else {
      if (cursor + cfg.batch_size > n) {
        order_rng.Shuffle(order.begin(), order.end());
        cursor = 0;
      }
      batch.assign(order.begin() + cursor,
                   order.begin() + cursor + cfg.batch_size);
      cursor += cfg.batch_size;
      std::sort(batch.begin(), batch.end());
      internal::SmoothGradient(spec, w, data, batch, grad);
    }
    if (cfg.clip_bound) grad = ClipGradient(grad, *cfg.clip_bound);
    if (cfg.dropout_rate) grad = SDropout(grad, *cfg.dropout_rate, dropout_rng);
    double alpha =
        cfg.step_schedule.empty() ? cfg.step_size : cfg.step_schedule[t];
    w = ProximalStep(spec, w, grad, alpha);
    if (!w.allFinite()) {
      return absl::InternalError(
          absl::StrCat("non-finite iterate at step ", t + 1));
    }
    if (!cfg.averaging.empty()) averaged += cfg.averaging[t] * w;
    if (trajectory != nullptr) trajectory->push_back(w);
  }

  SolveReport report;
  report.weights = cfg.averaging.empty() ? w : averaged;
  report.iterations_used = cfg.steps;
  report.final_gradient_norm = OptimalityResidual(spec, data, report.weights);
  auto lambda_sc = StrongConvexityConstant(spec);
  if (lambda_sc.ok()) {
    report.loss_gap_bound = report.final_gradient_norm *
                            report.final_gradient_norm / (2.0 * *lambda_sc);
  }
  return report;
}

absl::StatusOr<double> ConvergenceSensitivityCorrection(
    double base_sensitivity, const SolveReport& report, double lambda_sc) {
  if (!(base_sensitivity >= 0)) {
    return absl::InvalidArgumentError("base sensitivity must be >= 0");
  }
  double delta;
  if (report.weight_gap_bound) {
    delta = *report.weight_gap_bound;
  } else if (report.loss_gap_bound) {
    if (!(lambda_sc > 0)) {
      return absl::InvalidArgumentError("lambda_sc must be positive");
    }
    delta = std::sqrt(2.0 * *report.loss_gap_bound / lambda_sc);
  } else {
    return absl::InvalidArgumentError(
        "report carries neither a weight gap nor a loss gap");
  }
  if (!(delta >= 0)) return absl::InvalidArgumentError("negative gap");
  return base_sensitivity + 2.0 * delta;
}

}  // namespace stabdp
