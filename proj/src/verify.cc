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

#include "stabdp/verify.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "stabdp/features.h"
#include "stabdp/stability.h"
#include "stabdp/status_macros.h"

namespace stabdp {
namespace {

constexpr double kMaxFailureFraction = 0.01;

void Finish(OracleReport& report) {
  report.margin = report.bound_value - report.empirical;
}

// A neighbouring pair (first, second) for one trial together with the
// minimizers of both.
struct NeighborPair {
  Weights w_first;
  Weights w_second;
  Dataset second;
  bool ok = false;
};

struct NeighborContext {
  const ObjectiveSpec& spec;
  const Dataset& data;
  const Weights& w_data;
  const NeighborOracleOptions& options;
  const RecordSampler& sampler;
};

// Trial t: even t compares S with S^{i<-z}; odd t starts from S^{i<-z} and
// replaces z back by the original record, warm-starting from its own
// minimizer. Either way the pair differs in exactly record i.
NeighborPair SampleNeighbor(const NeighborContext& ctx, int trial,
                            Rng& rng) {
  NeighborPair out{Weights(), Weights(), ctx.data, false};
  const int64_t i =
      static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(ctx.data.rows())));
  Eigen::VectorXd x;
  double y;
  if (ctx.options.replace_with_self) {
    x = ctx.data.features().row(i).transpose();
    y = ctx.data.labels()(i);
  } else {
    std::tie(x, y) = ctx.sampler(rng);
  }
  auto replaced = ctx.data.WithRecord(i, x, y);
  if (!replaced.ok()) return out;
  if (trial % 2 == 0) {
    auto solved = SolveErm(ctx.spec, *replaced, ctx.options.tolerance,
                           ctx.options.max_iterations, ctx.w_data);
    if (!solved.ok()) return out;
    out.w_first = ctx.w_data;
    out.w_second = solved->weights;
    out.second = *std::move(replaced);
  } else {
    auto first = SolveErm(ctx.spec, *replaced, ctx.options.tolerance,
                          ctx.options.max_iterations);
    if (!first.ok()) return out;
    auto back = SolveErm(ctx.spec, ctx.data, ctx.options.tolerance,
                         ctx.options.max_iterations, first->weights);
    if (!back.ok()) return out;
    out.w_first = back->weights;
    out.w_second = first->weights;
    out.second = *std::move(replaced);
  }
  out.ok = true;
  return out;
}

absl::Status CheckNeighborOptions(const NeighborOracleOptions& options) {
  if (options.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (options.probes < 1) return absl::InvalidArgumentError("probes must be >= 1");
  return absl::OkStatus();
}

bool TooManyFailures(int64_t failures, int64_t trials) {
  return static_cast<double>(failures) >
         kMaxFailureFraction * static_cast<double>(trials);
}

double AbsLossChange(const ObjectiveSpec& spec, const Dataset& data,
                     const Weights& noisy, double base_loss) {
  double loss = 0.0;
  const Eigen::VectorXd z = data.features() * noisy;
  for (int64_t i = 0; i < data.rows(); ++i) {
    loss += internal::Loss(spec.loss, z(i), data.labels()(i));
  }
  loss /= static_cast<double>(data.rows());
  return std::abs(loss - base_loss);
}

}  // namespace

absl::StatusOr<Dataset> BinaryFixture(int64_t n, int64_t d, uint64_t seed) {
  SynthSpec spec;
  spec.n = n;
  spec.d = d;
  spec.classes = 2;
  spec.sparsity = d;
  spec.noise = 0.3;
  spec.seed = seed;
  STABDP_ASSIGN_OR_RETURN(SynthData synth, SynthClassification(spec));
  Eigen::VectorXd y = 2.0 * synth.data.labels().array() - 1.0;
  return synth.data.WithLabels(std::move(y));
}

RecordSampler UniformBallSampler(int64_t d, double kappa) {
  return [d, kappa](Rng& rng) {
    Eigen::VectorXd x(d);
    for (int64_t j = 0; j < d; ++j) x(j) = rng.Gaussian();
    double norm = x.norm();
    double radius = kappa * std::pow(rng.Uniform(), 1.0 / static_cast<double>(d));
    x *= norm > 0 ? radius / norm : 0.0;
    // Guard the ball boundary against rounding.
    while (x.norm() > kappa) x *= 1 - 1e-15;
    double y = rng.Uniform() < 0.5 ? -1.0 : 1.0;
    return std::make_pair(x, y);
  };
}

absl::StatusOr<SensitivityOracleResult> EmpiricalSensitivity(
    const ObjectiveSpec& spec, const Dataset& data,
    const NeighborOracleOptions& options) {
  STABDP_RETURN_IF_ERROR(CheckNeighborOptions(options));
  STABDP_ASSIGN_OR_RETURN(double lambda_sc, StrongConvexityConstant(spec));
  STABDP_ASSIGN_OR_RETURN(StabilityCert cert, ClosedFormCert(spec, data.rows()));
  STABDP_ASSIGN_OR_RETURN(
      SensitivityBound by_lipschitz,
      SensitivityLipschitz(spec.lipschitz, spec.kappa, data.rows(), lambda_sc));
  STABDP_ASSIGN_OR_RETURN(SensitivityBound by_stability, SensitivityBetaRoot(cert));
  STABDP_ASSIGN_OR_RETURN(SolveReport base,
                          SolveErm(spec, data, options.tolerance,
                                   options.max_iterations));
  RecordSampler sampler =
      options.sampler ? options.sampler : UniformBallSampler(data.cols(), spec.kappa);
  NeighborContext ctx{spec, data, base.weights, options, sampler};

  SensitivityOracleResult result;
  result.lipschitz_bound = by_lipschitz.l2_value;
  result.stability_bound = by_stability.l2_value;
  OracleReport& report = result.report;
  report.name = "empirical_sensitivity";
  report.bound_value = std::min(by_lipschitz.l2_value, by_stability.l2_value);
  report.trials = options.trials;
  Rng root(options.seed);
  double sum = 0.0;
  for (int t = 0; t < options.trials; ++t) {
    Rng rng = root.Derive(static_cast<uint64_t>(t));
    NeighborPair pair = SampleNeighbor(ctx, t, rng);
    if (!pair.ok) {
      ++report.failures;
      continue;
    }
    double dist = (pair.w_first - pair.w_second).norm();
    sum += dist;
    report.empirical = std::max(report.empirical, dist);
    if (dist > by_lipschitz.l2_value) ++result.lipschitz_violations;
    if (dist > by_stability.l2_value) ++result.stability_violations;
  }
  const int64_t solved = report.trials - report.failures;
  report.passed = result.lipschitz_violations == 0 &&
                  result.stability_violations == 0 &&
                  !TooManyFailures(report.failures, report.trials);
  report.observations = {
      {"lipschitz_bound", result.lipschitz_bound},
      {"stability_bound", result.stability_bound},
      {"mean", solved > 0 ? sum / static_cast<double>(solved) : 0.0},
      {"ratio_to_lipschitz_bound", report.empirical / result.lipschitz_bound},
      {"lipschitz_violations", static_cast<double>(result.lipschitz_violations)},
      {"stability_violations", static_cast<double>(result.stability_violations)},
  };
  Finish(report);
  return result;
}

absl::StatusOr<StabilityOracleResult> EmpiricalStability(
    const ObjectiveSpec& spec, const Dataset& data,
    const NeighborOracleOptions& options) {
  STABDP_RETURN_IF_ERROR(CheckNeighborOptions(options));
  STABDP_ASSIGN_OR_RETURN(StabilityCert cert, ClosedFormCert(spec, data.rows()));
  STABDP_ASSIGN_OR_RETURN(SolveReport base,
                          SolveErm(spec, data, options.tolerance,
                                   options.max_iterations));
  RecordSampler sampler =
      options.sampler ? options.sampler : UniformBallSampler(data.cols(), spec.kappa);
  NeighborContext ctx{spec, data, base.weights, options, sampler};

  StabilityOracleResult result;
  OracleReport& report = result.report;
  report.name = "empirical_stability";
  report.bound_value = cert.beta;
  report.trials = options.trials;
  Rng root(options.seed);
  for (int t = 0; t < options.trials; ++t) {
    Rng rng = root.Derive(static_cast<uint64_t>(t));
    NeighborPair pair = SampleNeighbor(ctx, t, rng);
    if (!pair.ok) {
      ++report.failures;
      continue;
    }
    // Probe stream is separate from the neighbour stream.
    Rng probe_rng = rng.Derive(1);
    for (int p = 0; p < options.probes; ++p) {
      const int64_t i = static_cast<int64_t>(
          probe_rng.UniformInt(static_cast<uint64_t>(data.rows())));
      const auto x = data.features().row(i);
      const double y = data.labels()(i);
      double diff = std::abs(
          internal::Loss(spec.loss, x.dot(pair.w_first), y) -
          internal::Loss(spec.loss, x.dot(pair.w_second), y));
      result.max_in_sample = std::max(result.max_in_sample, diff);
    }
    for (int p = 0; p < options.probes; ++p) {
      auto [x, y] = sampler(probe_rng);
      double diff =
          std::abs(internal::Loss(spec.loss, x.dot(pair.w_first), y) -
                   internal::Loss(spec.loss, x.dot(pair.w_second), y));
      result.max_fresh = std::max(result.max_fresh, diff);
    }
  }
  report.empirical = std::max(result.max_in_sample, result.max_fresh);
  report.passed = report.empirical <= report.bound_value &&
                  !TooManyFailures(report.failures, report.trials);
  report.observations = {
      {"max_in_sample", result.max_in_sample},
      {"max_fresh", result.max_fresh},
      {"probes_per_trial", static_cast<double>(options.probes)},
      {"ratio_to_beta", report.empirical / report.bound_value},
  };
  Finish(report);
  return result;
}

absl::StatusOr<OracleReport> EmpiricalPrivacyError(
    const ObjectiveSpec& spec, const Dataset& data, double epsilon,
    const PrivacyErrorOptions& options) {
  if (options.draws < 2) return absl::InvalidArgumentError("draws must be >= 2");
  STABDP_ASSIGN_OR_RETURN(StabilityCert cert, ClosedFormCert(spec, data.rows()));
  STABDP_ASSIGN_OR_RETURN(double bound, PrivacyErrorBound(spec.lipschitz,
                                                          data.cols(), epsilon,
                                                          cert));
  STABDP_ASSIGN_OR_RETURN(SensitivityBound sens,
                          SensitivityBetaRoot(cert, data.cols()));
  STABDP_ASSIGN_OR_RETURN(SolveReport solve,
                          SolveErm(spec, data, options.tolerance));
  STABDP_ASSIGN_OR_RETURN(double base_loss,
                          EmpiricalLoss(spec, solve.weights, data));

  Rng root(options.seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  double scale = 0.0;
  for (int64_t k = 0; k < options.draws; ++k) {
    STABDP_ASSIGN_OR_RETURN(
        PrivateRelease release,
        OutputPerturb(solve.weights, sens, epsilon, root.Derive(k).NextU64(),
                      options.calibration));
    scale = release.noise_scale;
    double e = AbsLossChange(spec, data, release.noisy_weights, base_loss);
    sum += e;
    sum_sq += e * e;
  }
  const double n = static_cast<double>(options.draws);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
  const double se = std::sqrt(var / n);

  OracleReport report;
  report.name = "empirical_privacy_error";
  report.bound_value = bound;
  report.empirical = mean;
  report.trials = options.draws;
  report.passed = mean <= bound + 3.0 * se;
  report.observations = {
      {"epsilon", epsilon},
      {"standard_error", se},
      {"noise_scale", scale},
      {"ratio_to_bound", mean / bound},
  };
  Finish(report);
  return report;
}

absl::StatusOr<PrivacyErrorScaling> PrivacyErrorVersusEpsilon(
    const ObjectiveSpec& spec, const Dataset& data,
    const std::vector<double>& epsilons, const PrivacyErrorOptions& options) {
  if (epsilons.size() < 2) {
    return absl::InvalidArgumentError("need at least two epsilon values");
  }
  PrivacyErrorScaling out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double eps : epsilons) {
    STABDP_ASSIGN_OR_RETURN(OracleReport r,
                            EmpiricalPrivacyError(spec, data, eps, options));
    if (!(r.empirical > 0)) {
      return absl::FailedPreconditionError(
          "zero mean privacy error; slope undefined");
    }
    double lx = std::log(eps);
    double ly = std::log(r.empirical);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    out.reports.push_back(std::move(r));
  }
  const double m = static_cast<double>(epsilons.size());
  const double denom = m * sxx - sx * sx;
  if (!(denom > 0)) {
    return absl::InvalidArgumentError("epsilon values must be distinct");
  }
  out.slope = (m * sxy - sx * sy) / denom;
  return out;
}

absl::StatusOr<OracleReport> GradientCheck(
    const std::vector<ObjectiveSpec>& specs, int fixtures, uint64_t seed) {
  if (fixtures < 1) return absl::InvalidArgumentError("fixtures must be >= 1");
  constexpr double kStep = 1e-6;
  OracleReport report;
  report.name = "gradient_check";
  report.bound_value = 1e-5;
  Rng root(seed);
  int64_t checks = 0;
  for (int f = 0; f < fixtures; ++f) {
    Rng rng = root.Derive(static_cast<uint64_t>(f));
    const int64_t n = 5 + static_cast<int64_t>(rng.UniformInt(16));
    const int64_t d = 2 + static_cast<int64_t>(rng.UniformInt(7));
    for (const ObjectiveSpec& spec : specs) {
      STABDP_RETURN_IF_ERROR(spec.Validate());
      RecordSampler sampler = UniformBallSampler(d, spec.kappa);
      FeatureMatrix x(n, d);
      Eigen::VectorXd y(n);
      for (int64_t i = 0; i < n; ++i) {
        auto [xi, yi] = sampler(rng);
        x.row(i) = xi.transpose();
        y(i) = spec.loss == LossKind::kSquared ? 2.0 * rng.Uniform() - 1.0
                                               : yi;
      }
      STABDP_ASSIGN_OR_RETURN(Dataset data, Dataset::Create(x, y));
      Weights w(d);
      for (int64_t j = 0; j < d; ++j) w(j) = 2.0 * rng.Gaussian();
      STABDP_ASSIGN_OR_RETURN(Eigen::VectorXd g, Gradient(spec, w, data));
      Eigen::VectorXd fd(d);
      for (int64_t j = 0; j < d; ++j) {
        Weights plus = w, minus = w;
        plus(j) += kStep;
        minus(j) -= kStep;
        fd(j) = (internal::SmoothObjective(spec, plus, data) -
                 internal::SmoothObjective(spec, minus, data)) /
                (2.0 * kStep);
      }
      double rel = (g - fd).norm() / std::max(g.norm(), 1e-3);
      report.empirical = std::max(report.empirical, rel);
      ++checks;
    }
  }
  report.trials = checks;
  report.passed = report.empirical < report.bound_value;
  report.observations = {{"fixtures", static_cast<double>(fixtures)},
                         {"objectives", static_cast<double>(specs.size())}};
  Finish(report);
  return report;
}

absl::StatusOr<FlipRateResult> FlipRateCheck(const FlipGridOptions& options) {
  if (options.draws < 1) return absl::InvalidArgumentError("draws must be >= 1");
  FlipRateResult result;
  OracleReport& report = result.report;
  report.name = "flip_rate";
  report.passed = true;
  Rng root(options.seed);
  uint64_t cell_index = 0;
  double worst_z = 0.0;
  for (double eps : options.epsilons) {
    FlipParams params{eps, options.lambda, options.eta, options.n,
                      options.lipschitz, options.kappa};
    STABDP_ASSIGN_OR_RETURN(double scale, FlipNoiseScale(params));
    for (double t : options.thresholds) {
      FlipCell cell;
      cell.threshold = t;
      cell.epsilon = eps;
      STABDP_ASSIGN_OR_RETURN(cell.predicted, FlipProbability(t, 0.0, params));
      Rng rng = root.Derive(cell_index++);
      int64_t flips = 0;
      for (int64_t k = 0; k < options.draws; ++k) {
        if (std::abs(LaplaceDraw(scale, rng)) > t) ++flips;
      }
      const double draws = static_cast<double>(options.draws);
      cell.observed = static_cast<double>(flips) / draws;
      cell.standard_error =
          std::sqrt(cell.predicted * (1.0 - cell.predicted) / draws);
      const double gap = std::abs(cell.observed - cell.predicted);
      cell.passed = gap <= 3.0 * cell.standard_error;
      if (cell.standard_error > 0) {
        worst_z = std::max(worst_z, gap / cell.standard_error);
      }
      report.empirical = std::max(report.empirical, gap);
      report.passed = report.passed && cell.passed;
      result.cells.push_back(cell);
    }
  }
  report.trials = static_cast<int64_t>(result.cells.size()) * options.draws;
  report.bound_value = 0.0;
  for (const FlipCell& c : result.cells) {
    report.bound_value = std::max(report.bound_value, 3.0 * c.standard_error);
  }
  report.observations = {{"max_standard_errors", worst_z},
                         {"cells", static_cast<double>(result.cells.size())}};
  Finish(report);
  return result;
}

absl::StatusOr<DpProbeResult> MeanQueryDpCheck(double epsilon,
                                               double noise_fraction,
                                               int64_t n,
                                               const DpCheckOptions& options) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (!(noise_fraction > 0)) {
    return absl::InvalidArgumentError("noise_fraction must be positive");
  }
  if (!(epsilon > 0)) return absl::InvalidArgumentError("epsilon must be > 0");
  Rng values_rng(options.seed, 1);
  FeatureMatrix x(n, 1);
  for (int64_t i = 0; i < n; ++i) x(i, 0) = values_rng.Uniform();
  x(0, 0) = 0.0;
  STABDP_ASSIGN_OR_RETURN(Dataset data,
                          Dataset::Create(x, Eigen::VectorXd::Zero(n)));
  STABDP_ASSIGN_OR_RETURN(Dataset neighbor,
                          data.WithRecord(0, Eigen::VectorXd::Ones(1), 0.0));
  const double sensitivity = 1.0 / static_cast<double>(n);
  const double scale = noise_fraction * sensitivity / epsilon;
  ScalarRelease release = [scale](const Dataset& s, Rng& rng) {
    double mean = s.features().col(0).array().min(1.0).max(0.0).mean();
    return mean + LaplaceDraw(scale, rng);
  };
  DpCheckOptions opts = options;
  if (!opts.scale) opts.scale = scale;
  STABDP_ASSIGN_OR_RETURN(DpCheckReport detail,
                          DpMicroCheck(release, data, neighbor, epsilon, opts));
  DpProbeResult out;
  out.shift = sensitivity;
  out.noise_scale = scale;
  out.report.name = noise_fraction >= 1.0 ? "dp_mean_query"
                                          : "dp_mean_query_under_noised";
  out.report.bound_value = detail.bound;
  out.report.empirical = detail.max_ratio;
  out.report.trials = opts.samples;
  out.report.passed = detail.passed;
  out.report.observations = {
      {"max_slack", detail.max_slack},
      {"adequate_bins", static_cast<double>(detail.adequate_bins)},
      {"inconclusive_bins", static_cast<double>(detail.inconclusive_bins)},
      {"noise_scale", scale},
  };
  Finish(out.report);
  out.detail = std::move(detail);
  return out;
}

absl::StatusOr<DpProbeResult> ErmDpCheck(const ObjectiveSpec& spec,
                                         const Dataset& data,
                                         const Dataset& neighbor,
                                         double epsilon,
                                         bool negative_control,
                                         const DpCheckOptions& options) {
  STABDP_ASSIGN_OR_RETURN(SolveReport a, SolveErm(spec, data, 1e-9));
  STABDP_ASSIGN_OR_RETURN(SolveReport b, SolveErm(spec, neighbor, 1e-9));
  STABDP_ASSIGN_OR_RETURN(StabilityCert cert, ClosedFormCert(spec, data.rows()));
  STABDP_ASSIGN_OR_RETURN(SensitivityBound sens,
                          SensitivityBetaRoot(cert, data.cols()));
  const double shift = std::abs(a.weights(0) - b.weights(0));
  double scale;
  if (negative_control) {
    if (!(shift > 0)) {
      return absl::FailedPreconditionError(
          "neighbouring minimizers coincide in coordinate 0");
    }
    scale = 0.5 * shift / epsilon;
  } else {
    scale = sens.l1_value / epsilon;
  }
  const double w_a = a.weights(0);
  const double w_b = b.weights(0);
  const Dataset* data_ptr = &data;
  ScalarRelease release = [=](const Dataset& s, Rng& rng) {
    return (&s == data_ptr ? w_a : w_b) + LaplaceDraw(scale, rng);
  };
  DpCheckOptions opts = options;
  if (!opts.scale) opts.scale = scale;
  STABDP_ASSIGN_OR_RETURN(DpCheckReport detail,
                          DpMicroCheck(release, data, neighbor, epsilon, opts));
  DpProbeResult out;
  out.shift = shift;
  out.noise_scale = scale;
  out.report.name =
      negative_control ? "dp_erm_under_noised" : "dp_erm_output_perturbation";
  out.report.bound_value = detail.bound;
  out.report.empirical = detail.max_ratio;
  out.report.trials = opts.samples;
  out.report.passed = detail.passed;
  out.report.observations = {
      {"coordinate0_shift", shift},
      {"sensitivity_l2_bound", sens.l2_value},
      {"noise_scale", scale},
      {"max_slack", detail.max_slack},
      {"adequate_bins", static_cast<double>(detail.adequate_bins)},
  };
  Finish(out.report);
  out.detail = std::move(detail);
  return out;
}

}  // namespace stabdp
