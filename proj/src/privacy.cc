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

#include "absl/strings/str_cat.h"
#include "stabdp/status_macros.h"

namespace stabdp {
namespace {

struct Wilson {
  double low;
  double high;
};

Wilson WilsonInterval(int64_t count, int64_t total, double z) {
  double n = static_cast<double>(total);
  double p = static_cast<double>(count) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double centre = (p + z2 / (2.0 * n)) / denom;
  double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(centre - half, 0.0), std::min(centre + half, 1.0)};
}

double Median(std::vector<double> values) {
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace

const char* NoiseCalibrationName(NoiseCalibration calibration) {
  switch (calibration) {
    case NoiseCalibration::kL1PerCoordinate:
      return "l1_per_coordinate";
    case NoiseCalibration::kL2Direct:
      return "l2_direct";
  }
  return "unknown";
}

double LaplaceDraw(double scale, Rng& rng) {
  double u = rng.UniformOpen() - 0.5;
  double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0 ? -magnitude : magnitude;
}

absl::StatusOr<std::vector<double>> LaplaceSample(double scale, int64_t count,
                                                  Rng& rng) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive and finite, got ", scale));
  }
  if (count < 0) return absl::InvalidArgumentError("count must be >= 0");
  std::vector<double> out(static_cast<size_t>(count));
  for (double& x : out) x = LaplaceDraw(scale, rng);
  return out;
}

double LaplaceCdf(double x, double scale) {
  if (x < 0) return 0.5 * std::exp(x / scale);
  return 1.0 - 0.5 * std::exp(-x / scale);
}

absl::StatusOr<StabilityCert> ClosedFormCert(const ObjectiveSpec& spec,
                                             int64_t n) {
  STABDP_RETURN_IF_ERROR(spec.Validate());
  if (spec.penalty == PenaltyKind::kL2) {
    return BetaL2Erm(spec.lipschitz, spec.kappa, n, 2.0 * spec.l2_weight());
  }
  return BetaElasticNet(spec.lipschitz, spec.kappa, n,
                        spec.l2_weight() / spec.gamma, spec.gamma);
}

Weights AddLaplaceNoise(const Weights& w, double scale, Rng& rng) {
  if (scale == 0.0) return w;
  Weights out = w;
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    out(j) += LaplaceDraw(scale, rng);
  }
  return out;
}

absl::StatusOr<PrivateRelease> OutputPerturb(
    const Weights& w, const SensitivityBound& sensitivity, double epsilon,
    uint64_t seed, NoiseCalibration calibration) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be positive and finite");
  }
  double used = calibration == NoiseCalibration::kL1PerCoordinate
                    ? sensitivity.l1_value
                    : sensitivity.l2_value;
  if (!std::isfinite(used) || !(used >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be finite and >= 0, got ", used));
  }
  if (!w.allFinite()) {
    return absl::InvalidArgumentError("weights contain non-finite values");
  }
  PrivateRelease release;
  release.epsilon = epsilon;
  release.sensitivity_used = used;
  release.noise_scale = used / epsilon;
  release.calibration = calibration;
  release.seed = seed;
  Rng rng(seed);
  release.noisy_weights = AddLaplaceNoise(w, release.noise_scale, rng);
  return release;
}

ObjectiveSpec ElasticNetParams::Objective() const {
  ObjectiveSpec spec =
      ObjectiveSpec::ElasticNet(loss, lambda, gamma, kappa, eta);
  spec.lipschitz = lipschitz;
  return spec;
}

absl::StatusOr<double> ElasticNetNoiseScale(const ElasticNetParams& params,
                                            int64_t n, int64_t d) {
  if (!(params.epsilon > 0) || !std::isfinite(params.epsilon)) {
    return absl::InvalidArgumentError("epsilon must be positive and finite");
  }
  STABDP_ASSIGN_OR_RETURN(
      StabilityCert cert,
      BetaElasticNet(params.lipschitz, params.kappa, n, params.lambda,
                     params.gamma));
  double l2 = std::sqrt(2.0 * cert.beta / (params.lambda * params.gamma));
  double used = params.calibration == NoiseCalibration::kL1PerCoordinate
                    ? std::sqrt(static_cast<double>(d)) * l2
                    : l2;
  return used / params.epsilon;
}

absl::StatusOr<ElasticNetRelease> PrivatizeElasticNet(
    const Weights& w, int64_t n, const ElasticNetParams& params,
    uint64_t seed) {
  if (!(params.epsilon > 0) || !std::isfinite(params.epsilon)) {
    return absl::InvalidArgumentError("epsilon must be positive and finite");
  }
  ElasticNetRelease out;
  STABDP_ASSIGN_OR_RETURN(
      out.cert, BetaElasticNet(params.lipschitz, params.kappa, n,
                               params.lambda, params.gamma));
  out.l2_sensitivity =
      std::sqrt(2.0 * out.cert.beta / (params.lambda * params.gamma));
  SensitivityBound bound = SensitivityBound::Make(
      out.l2_sensitivity, SensitivityMethod::kBetaRoot, w.size());
  STABDP_ASSIGN_OR_RETURN(
      out.release,
      OutputPerturb(w, bound, params.epsilon, seed, params.calibration));
  return out;
}

absl::StatusOr<ElasticNetRelease> PrivateElasticNet(
    const Dataset& data, const ElasticNetParams& params, uint64_t seed) {
  if (!data.kappa() || *data.kappa() > params.kappa * (1 + 1e-12)) {
    // Re-check explicitly; the declared bound may be absent or looser.
    STABDP_RETURN_IF_ERROR(Dataset(data).DeclareKappa(params.kappa));
  }
  ObjectiveSpec spec = params.Objective();
  STABDP_ASSIGN_OR_RETURN(
      SolveReport solve,
      SolveErm(spec, data, params.tolerance, params.max_iterations));
  STABDP_ASSIGN_OR_RETURN(
      ElasticNetRelease out,
      PrivatizeElasticNet(solve.weights, data.rows(), params, seed));
  out.solve = std::move(solve);
  return out;
}

absl::StatusOr<DpCheckReport> DpMicroCheck(const ScalarRelease& release,
                                           const Dataset& data,
                                           const Dataset& neighbor,
                                           double epsilon,
                                           const DpCheckOptions& options) {
  if (!(epsilon > 0)) return absl::InvalidArgumentError("epsilon must be > 0");
  if (options.bins < 1 || options.samples < 1) {
    return absl::InvalidArgumentError("bins and samples must be positive");
  }
  if (data.rows() != neighbor.rows() || data.cols() != neighbor.cols()) {
    return absl::InvalidArgumentError("datasets differ in shape");
  }
  int64_t differing = 0;
  for (int64_t i = 0; i < data.rows(); ++i) {
    if (data.features().row(i) != neighbor.features().row(i) ||
        data.labels()(i) != neighbor.labels()(i)) {
      ++differing;
    }
  }
  if (differing > 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "datasets are not neighbours: ", differing, " records differ"));
  }

  Rng root(options.seed);
  Rng rng_a = root.Derive(0);
  Rng rng_b = root.Derive(1);
  std::vector<double> a(static_cast<size_t>(options.samples));
  std::vector<double> b(static_cast<size_t>(options.samples));
  for (double& x : a) x = release(data, rng_a);
  for (double& x : b) x = release(neighbor, rng_b);

  double center;
  double scale;
  if (options.center && options.scale) {
    center = *options.center;
    scale = *options.scale;
  } else {
    double med_a = Median(a);
    double med_b = Median(b);
    center = options.center.value_or(0.5 * (med_a + med_b));
    if (options.scale) {
      scale = *options.scale;
    } else {
      double pooled_median = 0.5 * (med_a + med_b);
      double total = 0.0;
      for (double x : a) total += std::abs(x - pooled_median);
      for (double x : b) total += std::abs(x - pooled_median);
      scale = total / static_cast<double>(a.size() + b.size());
    }
  }
  if (!(scale > 0)) {
    return absl::FailedPreconditionError("release output has zero spread");
  }

  const double lo = center - options.half_width_scales * scale;
  const double width = 2.0 * options.half_width_scales * scale / options.bins;
  std::vector<int64_t> counts_a(static_cast<size_t>(options.bins), 0);
  std::vector<int64_t> counts_b(static_cast<size_t>(options.bins), 0);
  auto bin_of = [&](double x) -> int {
    double k = std::floor((x - lo) / width);
    if (k < 0 || k >= options.bins) return -1;
    return static_cast<int>(k);
  };
  for (double x : a) {
    if (int k = bin_of(x); k >= 0) ++counts_a[k];
  }
  for (double x : b) {
    if (int k = bin_of(x); k >= 0) ++counts_b[k];
  }

  DpCheckReport report;
  report.epsilon = epsilon;
  report.bound = std::exp(epsilon);
  report.passed = true;
  for (int k = 0; k < options.bins; ++k) {
    DpBinStat stat;
    stat.lower = lo + k * width;
    stat.upper = stat.lower + width;
    stat.count_a = counts_a[k];
    stat.count_b = counts_b[k];
    stat.adequate = stat.count_a >= options.min_bin_count &&
                    stat.count_b >= options.min_bin_count;
    if (stat.adequate) {
      bool a_larger = stat.count_a >= stat.count_b;
      int64_t num = a_larger ? stat.count_a : stat.count_b;
      int64_t den = a_larger ? stat.count_b : stat.count_a;
      // Equal sample sizes, so count ratios are frequency ratios.
      stat.ratio = static_cast<double>(num) / static_cast<double>(den);
      Wilson wn = WilsonInterval(num, options.samples, options.z);
      Wilson wd = WilsonInterval(den, options.samples, options.z);
      double point = stat.ratio;
      stat.slack = (wn.high / wd.low) / point - 1.0;
      stat.violated = stat.ratio > report.bound * (1.0 + stat.slack);
      ++report.adequate_bins;
      report.max_ratio = std::max(report.max_ratio, stat.ratio);
      report.max_slack = std::max(report.max_slack, stat.slack);
      if (stat.violated) report.passed = false;
    } else {
      ++report.inconclusive_bins;
    }
    report.bins.push_back(stat);
  }
  if (report.adequate_bins == 0) report.passed = false;
  return report;
}

}  // namespace stabdp
