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

// Acceptance harness: runs each project-level acceptance criterion and
// prints one PASS/FAIL line per criterion. Exits 0 iff every criterion
// passes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "oracles.h"
#include "stabdp/data_io.h"
#include "stabdp/experiment.h"
#include "stabdp/optimizer.h"
#include "stabdp/privacy.h"
#include "stabdp/stability.h"
#include "stabdp/verify.h"

#ifndef STABDP_CONFIG_DIR
#error "STABDP_CONFIG_DIR must point at the bundled experiment configs"
#endif

namespace stabdp {
namespace {

namespace fs = std::filesystem;

constexpr uint64_t kSeed = 20240601;
const double kFixtureLambdas[] = {0.1, 0.5, 2.0};

struct Outcome {
  bool passed = false;
  std::string detail;
};

Outcome Fail(const absl::Status& status) {
  return {false, absl::StrCat("error: ", status.ToString())};
}

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path WorkDir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "stabdp_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& file,
                                            const std::string& subdir) {
  const std::string text = ReadFile(fs::path(STABDP_CONFIG_DIR) / file);
  if (text.empty()) {
    return absl::NotFoundError(absl::StrCat("missing config ", file));
  }
  absl::StatusOr<ExperimentConfig> config = ParseExperimentConfig(text);
  if (config.ok()) config->output_dir = (WorkDir() / subdir).string();
  return config;
}

// Aggregate (repeat == -1) values of `column`, in file order.
std::vector<double> AggregateColumn(const fs::path& csv,
                                    const std::string& column) {
  std::istringstream in(ReadFile(csv));
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header = absl::StrSplit(line, ',');
  const auto col = std::find(header.begin(), header.end(), column) - header.begin();
  const auto rep = std::find(header.begin(), header.end(), "repeat") - header.begin();
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::vector<std::string> f = absl::StrSplit(line, ',');
    if (f.at(rep) == "-1") out.push_back(std::stod(f.at(col)));
  }
  return out;
}

std::string Join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) absl::StrAppend(&s, s.empty() ? "" : " ", absl::StrFormat("%.3f", x));
  return s;
}

std::vector<ObjectiveSpec> FixtureSpecs(double lambda) {
  return {ObjectiveSpec::L2(LossKind::kLogistic, lambda),
          ObjectiveSpec::ElasticNet(LossKind::kLogistic, lambda, 0.85)};
}

Outcome SensitivitySoundness() {
  Stopwatch clock;
  int64_t violations = 0;
  double worst_ratio = 0.0;
  for (double lambda : kFixtureLambdas) {
    auto data = BinaryFixture(50, 5, kSeed);
    if (!data.ok()) return Fail(data.status());
    for (const ObjectiveSpec& spec : FixtureSpecs(lambda)) {
      NeighborOracleOptions options;
      options.trials = 200;
      options.seed = DeriveKey({kSeed, 1, DoubleBits(lambda)});
      auto r = EmpiricalSensitivity(spec, *data, options);
      if (!r.ok()) return Fail(r.status());
      violations += r->lipschitz_violations + r->stability_violations +
                    r->report.failures;
      worst_ratio = std::max(
          worst_ratio, r->report.empirical /
                           std::min(r->lipschitz_bound, r->stability_bound));
    }
  }
  const double t = clock.Seconds();
  return {violations == 0 && t < 120,
          absl::StrFormat("violations=%d max_ratio_to_bound=%.3f time=%.1fs",
                          violations, worst_ratio, t)};
}

Outcome StabilitySoundness() {
  Stopwatch clock;
  int64_t violations = 0;
  double worst_ratio = 0.0;
  for (double lambda : kFixtureLambdas) {
    auto data = BinaryFixture(50, 5, kSeed);
    if (!data.ok()) return Fail(data.status());
    for (const ObjectiveSpec& spec : FixtureSpecs(lambda)) {
      NeighborOracleOptions options;
      options.trials = 200;
      options.probes = 50;
      options.seed = DeriveKey({kSeed, 2, DoubleBits(lambda)});
      auto r = EmpiricalStability(spec, *data, options);
      if (!r.ok()) return Fail(r.status());
      violations += !r->report.passed;
      worst_ratio =
          std::max(worst_ratio, r->report.empirical / r->report.bound_value);
    }
  }
  const double t = clock.Seconds();
  return {violations == 0 && t < 180,
          absl::StrFormat("violations=%d max_ratio_to_beta=%.3f time=%.1fs",
                          violations, worst_ratio, t)};
}

Outcome LaplaceCalibration() {
  Rng rng(kSeed, 3);
  auto draws = LaplaceSample(1.0, 1000000, rng);
  if (!draws.ok()) return Fail(draws.status());
  const double n = static_cast<double>(draws->size());
  double mean = 0.0;
  for (double x : *draws) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : *draws) var += (x - mean) * (x - mean);
  var /= n - 1;
  const bool var_ok = std::abs(var - 2.0) <= 0.02 * 2.0;
  // Quartiles of the unit Laplace distribution.
  double worst = 0.0;
  for (double p : {0.25, 0.5, 0.75}) {
    const double q = p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
    double below = 0;
    for (double x : *draws) below += x <= q;
    const double expected =
        q < 0 ? 0.5 * oracle::LaplaceTail(-q, 1.0)
              : 1.0 - 0.5 * oracle::LaplaceTail(q, 1.0);
    worst = std::max(worst, std::abs(below / n - expected) / expected);
  }
  return {var_ok && worst <= 0.005,
          absl::StrFormat("variance=%.4f max_cdf_rel_err=%.5f", var, worst)};
}

Outcome DpMicroCheckCriterion() {
  Stopwatch clock;
  DpCheckOptions options;
  options.samples = 1000000;
  options.seed = DeriveKey({kSeed, 4});
  auto good = MeanQueryDpCheck(1.0, 1.0, 100, options);
  if (!good.ok()) return Fail(good.status());
  auto bad = MeanQueryDpCheck(1.0, 0.5, 100, options);
  if (!bad.ok()) return Fail(bad.status());
  const double t = clock.Seconds();
  const bool ok = good->detail.passed &&
                  good->detail.max_ratio <= std::exp(1.0) * 1.05 &&
                  !bad->detail.passed && t < 120;
  return {ok, absl::StrFormat(
                  "calibrated_max_ratio=%.4f (limit %.4f) "
                  "half_noise_max_ratio=%.4f half_noise_passed=%d time=%.1fs",
                  good->detail.max_ratio, std::exp(1.0) * 1.05,
                  bad->detail.max_ratio, bad->detail.passed, t)};
}

Outcome EnhancementIdentity() {
  oracle::Xorshift rng(kSeed);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double beta1 = 1e-4 + rng.Uniform();
    const double beta2 = beta1 * (1e-3 + rng.Uniform());
    const double lambda = 1e-3 + 10.0 * rng.Uniform();
    const double eps = 0.05 + 5.0 * rng.Uniform();
    auto eps2 = PrivacyEnhancement(eps, beta1, beta2);
    if (!eps2.ok()) return Fail(eps2.status());
    const double lhs = std::sqrt(2.0 * beta1) / (eps * std::sqrt(lambda));
    const double rhs = std::sqrt(2.0 * beta2) / (*eps2 * std::sqrt(lambda));
    worst = std::max(worst, std::abs(lhs - rhs) / lhs);
    const double lib = std::abs(StabilityNoiseScale(beta1, lambda, eps) -
                                StabilityNoiseScale(beta2, lambda, *eps2)) /
                       lhs;
    worst = std::max(worst, lib);
  }
  return {worst <= 1e-12, absl::StrFormat("max_rel_err=%.3g", worst)};
}

Outcome PrivacyErrorBoundCriterion() {
  auto data = BinaryFixture(50, 5, kSeed);
  if (!data.ok()) return Fail(data.status());
  PrivacyErrorOptions options;
  options.draws = 10000;
  options.seed = DeriveKey({kSeed, 6});
  auto scaling = PrivacyErrorVersusEpsilon(
      ObjectiveSpec::L2(LossKind::kLogistic, 0.5), *data, {10.0, 20.0, 40.0},
      options);
  if (!scaling.ok()) return Fail(scaling.status());
  bool all = true;
  std::string ratios;
  for (const OracleReport& r : scaling->reports) {
    all = all && r.passed;
    absl::StrAppend(&ratios, ratios.empty() ? "" : ",",
                    absl::StrFormat("%.3f", r.empirical / r.bound_value));
  }
  const bool slope_ok = scaling->slope >= -1.2 && scaling->slope <= -0.8;
  return {all && slope_ok,
          absl::StrFormat("ratio_to_bound=[%s] slope=%.3f", ratios,
                          scaling->slope)};
}

Outcome FlipRates() {
  FlipGridOptions options;
  options.draws = 100000;
  options.seed = DeriveKey({kSeed, 7});
  auto r = FlipRateCheck(options);
  if (!r.ok()) return Fail(r.status());
  double worst_z = 0.0;
  for (const FlipCell& c : r->cells) {
    worst_z = std::max(worst_z,
                       std::abs(c.observed - c.predicted) / c.standard_error);
  }
  return {r->report.passed && r->cells.size() == 9,
          absl::StrFormat("cells=%d max_z=%.2f", r->cells.size(), worst_z)};
}

Outcome DropoutContract() {
  Rng rng(kSeed, 8);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const int64_t size = 1 + static_cast<int64_t>(rng.UniformInt(50));
    Eigen::VectorXd v(size);
    for (int64_t j = 0; j < size; ++j) v(j) = rng.Gaussian() * 10.0;
    const double rate = rng.Uniform();
    Eigen::VectorXd out = SDropout(v, rate, rng);
    violations += out.norm() > rate * v.norm() * (1.0 + 1e-15);
  }
  return {violations == 0, absl::StrFormat("violations=%d of 10000", violations)};
}

Outcome AccuracyShape() {
  Stopwatch clock;
  auto optimal = LoadConfig("accuracy_sweep.json", "accuracy_optimal");
  if (!optimal.ok()) return Fail(optimal.status());
  ExperimentConfig fixed = *optimal;
  fixed.output_dir = (WorkDir() / "accuracy_fixed").string();
  fixed.noise.mode = NoiseMode::kFixedScale;
  fixed.noise.fixed_scale = 0.1;
  for (const ExperimentConfig* c : {&*optimal, &fixed}) {
    auto run = RunExperimentCommand("sweep", *c);
    if (!run.ok()) return Fail(run.status());
  }
  const auto a = AggregateColumn(
      fs::path(optimal->output_dir) / (optimal->name + ".csv"), "test_accuracy");
  const auto b = AggregateColumn(
      fs::path(fixed.output_dir) / (fixed.name + ".csv"), "test_accuracy");
  const size_t m = a.size();
  if (m < 3 || b.size() != m) {
    return {false, "unexpected sweep shape"};
  }
  const size_t peak = std::max_element(a.begin(), a.end()) - a.begin();
  const double gain = a[peak] - a.front();
  const bool interior = peak > 0 && peak + 1 < m;
  bool decays = true;
  for (size_t i = m / 2; i + 1 < m; ++i) decays = decays && b[i + 1] <= b[i];
  const double t = clock.Seconds();
  return {interior && gain >= 0.05 && decays && t < 600,
          absl::StrFormat("optimal=[%s] peak_index=%d gain=%.3f fixed=[%s] "
                          "time=%.1fs",
                          Join(a), peak, gain, Join(b), t)};
}

Outcome SelectionShape() {
  auto config = LoadConfig("feature_selection.json", "selection");
  if (!config.ok()) return Fail(config.status());
  auto run = RunExperimentCommand("select", *config);
  if (!run.ok()) return Fail(run.status());
  const auto f1 = AggregateColumn(
      fs::path(config->output_dir) / (config->name + ".csv"), "f1");
  if (f1.size() < 2) return {false, "unexpected select shape"};
  bool nondecreasing = true;
  for (size_t i = f1.size() / 2; i + 1 < f1.size(); ++i) {
    nondecreasing = nondecreasing && f1[i + 1] >= f1[i];
  }
  return {nondecreasing, absl::StrFormat("f1=[%s]", Join(f1))};
}

Outcome GradientChecks() {
  const std::vector<ObjectiveSpec> specs = {
      ObjectiveSpec::L2(LossKind::kLogistic, 0.1),
      ObjectiveSpec::L2(LossKind::kSquared, 0.1),
      ObjectiveSpec::ElasticNet(LossKind::kLogistic, 0.1, 0.85),
      ObjectiveSpec::ElasticNet(LossKind::kSquared, 0.1, 0.85)};
  oracle::Xorshift rng(kSeed);
  double worst = 0.0;
  int checks = 0;
  for (int f = 0; f < 100; ++f) {
    const int n = 5 + static_cast<int>(rng.Next() % 16);
    const int d = 2 + static_cast<int>(rng.Next() % 7);
    for (const ObjectiveSpec& spec : specs) {
      FeatureMatrix x(n, d);
      Eigen::VectorXd y(n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) x(i, j) = rng.Normal();
        x.row(i) *= rng.Uniform() / x.row(i).norm();
        y(i) = spec.loss == LossKind::kLogistic
                   ? (rng.Uniform() < 0.5 ? -1.0 : 1.0)
                   : 2.0 * rng.Uniform() - 1.0;
      }
      auto data = Dataset::Create(x, y);
      if (!data.ok()) return Fail(data.status());
      Eigen::VectorXd w(d);
      for (int j = 0; j < d; ++j) w(j) = 2.0 * rng.Normal();
      auto g = Gradient(spec, w, *data);
      if (!g.ok()) return Fail(g.status());
      // The smooth part only: the L1 block of the elastic net is handled by
      // the proximal step.
      oracle::Problem p{x, y,
                        spec.loss == LossKind::kLogistic
                            ? oracle::Loss::kLogistic
                            : oracle::Loss::kSquared,
                        spec.l2_weight(), 0.0};
      Eigen::VectorXd fd = oracle::NumericGradient(
          [&](const Eigen::VectorXd& v) { return oracle::ObjectiveValue(p, v); },
          w);
      worst = std::max(worst, (*g - fd).norm() / std::max(g->norm(), 1e-3));
      ++checks;
    }
  }
  return {worst < 1e-5,
          absl::StrFormat("checks=%d max_rel_err=%.3g", checks, worst)};
}

// Runs `action` twice and compares every file it produces byte for byte.
absl::StatusOr<int> CompareReruns(const fs::path& dir,
                                  const std::function<absl::Status()>& action,
                                  std::vector<std::string>* mismatches) {
  std::map<std::string, std::string> first;
  fs::remove_all(dir);
  if (absl::Status s = action(); !s.ok()) return s;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) first[e.path().string()] = ReadFile(e.path());
  }
  fs::remove_all(dir);
  if (absl::Status s = action(); !s.ok()) return s;
  int compared = 0;
  for (const auto& [path, bytes] : first) {
    ++compared;
    if (!fs::exists(path) || ReadFile(path) != bytes) {
      mismatches->push_back(path);
    }
  }
  return compared;
}

absl::Status RunInto(const std::string& command, ExperimentConfig config) {
  return RunExperimentCommand(command, config).status();
}

Outcome Determinism() {
  std::vector<std::string> mismatches;
  int files = 0;
  // train, sweep and select on the bundled configs.
  struct Case {
    const char* command;
    const char* config;
  };
  for (const Case& c : {Case{"train", "accuracy_sweep.json"},
                        Case{"sweep", "accuracy_sweep.json"},
                        Case{"select", "feature_selection.json"}}) {
    const std::string sub = absl::StrCat("determinism_", c.command);
    auto config = LoadConfig(c.config, sub);
    if (!config.ok()) return Fail(config.status());
    auto n = CompareReruns(config->output_dir,
                           [&] { return RunInto(c.command, *config); },
                           &mismatches);
    if (!n.ok()) return Fail(n.status());
    files += *n;
  }
  // fetch from a local file:// source into a fresh cache.
  const fs::path remote = WorkDir() / "remote_adult.data";
  const std::string raw =
      "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, "
      "Not-in-family, White, Male, 2174, 0, 40, United-States, <=50K\n"
      "50, Self-emp-not-inc, 83311, Bachelors, 13, Married-civ-spouse, "
      "Exec-managerial, Husband, White, Male, 0, 0, 13, United-States, >50K\n";
  std::ofstream(remote, std::ios::binary) << raw;
  ExperimentConfig fetch;
  fetch.fetch.url = "file://" + remote.string();
  fetch.fetch.sha256 = Sha256Hex(raw);
  fetch.fetch.cache_dir = (WorkDir() / "determinism_fetch").string();
  auto n = CompareReruns(fetch.fetch.cache_dir,
                         [&] { return RunInto("fetch", fetch); }, &mismatches);
  if (!n.ok()) return Fail(n.status());
  files += *n;
  // verify reports.
  const fs::path verify_dir = WorkDir() / "determinism_verify";
  n = CompareReruns(
      verify_dir,
      [&]() -> absl::Status {
        auto outcome = RunVerifySuite("all", kSeed);
        if (!outcome.ok()) return outcome.status();
        fs::create_directories(verify_dir);
        std::ofstream(verify_dir / "report.json", std::ios::binary)
            << outcome->json;
        return absl::OkStatus();
      },
      &mismatches);
  if (!n.ok()) return Fail(n.status());
  files += *n;
  std::string detail = absl::StrFormat("files=%d mismatches=%d", files,
                                       mismatches.size());
  for (const std::string& m : mismatches) absl::StrAppend(&detail, " ", m);
  return {mismatches.empty() && files >= 8, detail};
}

int Main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"sensitivity_soundness", &SensitivitySoundness},
      {"stability_soundness", &StabilitySoundness},
      {"laplace_calibration", &LaplaceCalibration},
      {"dp_micro_check", &DpMicroCheckCriterion},
      {"privacy_enhancement_identity", &EnhancementIdentity},
      {"privacy_error_bound", &PrivacyErrorBoundCriterion},
      {"flip_rates", &FlipRates},
      {"s_dropout_contract", &DropoutContract},
      {"accuracy_vs_lambda_shape", &AccuracyShape},
      {"selection_f1_shape", &SelectionShape},
      {"gradient_checks", &GradientChecks},
      {"determinism", &Determinism},
  };
  int failed = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome o = c.run();
    failed += !o.passed;
    std::printf("%s %2d %s: %s\n", o.passed ? "PASS" : "FAIL", index, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace stabdp

int main() { return stabdp::Main(); }
