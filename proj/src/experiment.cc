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

#include "stabdp/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "stabdp/features.h"
#include "stabdp/optimizer.h"
#include "stabdp/rng.h"
#include "stabdp/stability.h"
#include "stabdp/status_macros.h"
#include "stabdp/text.h"
#include "stabdp/verify.h"

namespace stabdp {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config parsing.

std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : absl::StrCat(path, ".", key);
}

absl::Status FieldError(const std::string& path, const std::string& what) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", what));
}

absl::Status CheckKeys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) return FieldError(path.empty() ? "<root>" : path,
                                          "expected an object");
  for (const auto& item : obj.items()) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* a) { return item.key() == a; });
    if (!known) {
      return FieldError(Join(path, item.key()),
                        absl::StrCat("unknown field; expected one of ",
                                     absl::StrJoin(allowed, ", ")));
    }
  }
  return absl::OkStatus();
}

absl::Status ReadDouble(const json& obj, const std::string& path,
                        const char* key, double* out) {
  if (!obj.contains(key)) return absl::OkStatus();
  const json& v = obj.at(key);
  if (!v.is_number()) return FieldError(Join(path, key), "expected a number");
  *out = v.get<double>();
  return absl::OkStatus();
}

template <typename Int>
absl::Status ReadInteger(const json& obj, const std::string& path,
                         const char* key, Int* out) {
  if (!obj.contains(key)) return absl::OkStatus();
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    return FieldError(Join(path, key), "expected an integer");
  }
  if (std::is_unsigned_v<Int> && v.is_number_integer() && !v.is_number_unsigned() &&
      v.get<int64_t>() < 0) {
    return FieldError(Join(path, key), "expected a nonnegative integer");
  }
  *out = v.get<Int>();
  return absl::OkStatus();
}

absl::Status ReadBool(const json& obj, const std::string& path,
                      const char* key, bool* out) {
  if (!obj.contains(key)) return absl::OkStatus();
  const json& v = obj.at(key);
  if (!v.is_boolean()) return FieldError(Join(path, key), "expected a boolean");
  *out = v.get<bool>();
  return absl::OkStatus();
}

absl::Status ReadString(const json& obj, const std::string& path,
                        const char* key, std::string* out) {
  if (!obj.contains(key)) return absl::OkStatus();
  const json& v = obj.at(key);
  if (!v.is_string()) return FieldError(Join(path, key), "expected a string");
  *out = v.get<std::string>();
  return absl::OkStatus();
}

absl::Status ReadDoubleList(const json& obj, const std::string& path,
                            const char* key, std::vector<double>* out) {
  if (!obj.contains(key)) return absl::OkStatus();
  const json& v = obj.at(key);
  if (!v.is_array()) return FieldError(Join(path, key), "expected an array");
  std::vector<double> values;
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      return FieldError(absl::StrCat(Join(path, key), "[", i, "]"),
                        "expected a number");
    }
    values.push_back(v[i].get<double>());
  }
  *out = std::move(values);
  return absl::OkStatus();
}

template <typename Enum>
absl::Status ReadEnum(const json& obj, const std::string& path,
                      const char* key,
                      const std::vector<std::pair<const char*, Enum>>& names,
                      Enum* out) {
  std::string text;
  if (!obj.contains(key)) return absl::OkStatus();
  STABDP_RETURN_IF_ERROR(ReadString(obj, path, key, &text));
  std::vector<std::string> allowed;
  for (const auto& [name, value] : names) {
    if (text == name) {
      *out = value;
      return absl::OkStatus();
    }
    allowed.push_back(name);
  }
  return FieldError(Join(path, key),
                    absl::StrCat("unknown value '", text, "'; expected one of ",
                                 absl::StrJoin(allowed, ", ")));
}

const std::vector<std::pair<const char*, LossKind>> kLossNames = {
    {"logistic", LossKind::kLogistic}, {"squared", LossKind::kSquared}};
const std::vector<std::pair<const char*, PenaltyKind>> kPenaltyNames = {
    {"l2", PenaltyKind::kL2}, {"elastic_net", PenaltyKind::kElasticNet}};
const std::vector<std::pair<const char*, NoiseMode>> kNoiseNames = {
    {"stability_optimal", NoiseMode::kStabilityOptimal},
    {"fixed_scale", NoiseMode::kFixedScale},
    {"none", NoiseMode::kNone}};
const std::vector<std::pair<const char*, NoiseCalibration>> kCalibrationNames =
    {{"l1_per_coordinate", NoiseCalibration::kL1PerCoordinate},
     {"l2_direct", NoiseCalibration::kL2Direct}};
const std::vector<std::pair<const char*, ThresholdMode>> kThresholdNames = {
    {"dynamic", ThresholdMode::kDynamic}, {"static", ThresholdMode::kStatic}};

template <typename Enum>
const char* EnumName(const std::vector<std::pair<const char*, Enum>>& names,
                     Enum value) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "unknown";
}

absl::Status ParseSynthetic(const json& obj, const std::string& path,
                            SynthSpec* s) {
  STABDP_RETURN_IF_ERROR(
      CheckKeys(obj, path, {"n", "d", "classes", "sparsity", "noise", "signal_scale",
                       "seed"}));
  STABDP_RETURN_IF_ERROR(ReadInteger(obj, path, "n", &s->n));
  STABDP_RETURN_IF_ERROR(ReadInteger(obj, path, "d", &s->d));
  STABDP_RETURN_IF_ERROR(ReadInteger(obj, path, "classes", &s->classes));
  STABDP_RETURN_IF_ERROR(ReadInteger(obj, path, "sparsity", &s->sparsity));
  STABDP_RETURN_IF_ERROR(ReadDouble(obj, path, "noise", &s->noise));
  STABDP_RETURN_IF_ERROR(
      ReadDouble(obj, path, "signal_scale", &s->signal_scale));
  STABDP_RETURN_IF_ERROR(ReadInteger(obj, path, "seed", &s->seed));
  return absl::OkStatus();
}

absl::Status ParseDataset(const json& obj, const std::string& path,
                          DatasetConfig* d) {
  STABDP_RETURN_IF_ERROR(CheckKeys(
      obj, path, {"source", "path", "label_column", "synthetic", "reduce_dim",
                  "standardize", "kappa", "seed"}));
  STABDP_RETURN_IF_ERROR(ReadString(obj, path, "source", &d->source));
  STABDP_RETURN_IF_ERROR(ReadString(obj, path, "path", &d->path));
  STABDP_RETURN_IF_ERROR(
      ReadString(obj, path, "label_column", &d->label_column));
  if (obj.contains("synthetic")) {
    STABDP_RETURN_IF_ERROR(ParseSynthetic(obj.at("synthetic"),
                                          Join(path, "synthetic"),
                                          &d->synthetic));
  }
  STABDP_RETURN_IF_ERROR(ReadInteger(obj, path, "reduce_dim", &d->reduce_dim));
  STABDP_RETURN_IF_ERROR(ReadBool(obj, path, "standardize", &d->standardize));
  STABDP_RETURN_IF_ERROR(ReadDouble(obj, path, "kappa", &d->kappa));
  STABDP_RETURN_IF_ERROR(ReadInteger(obj, path, "seed", &d->seed));
  return absl::OkStatus();
}

absl::Status ParseModel(const json& obj, const std::string& path,
                        ModelConfig* m) {
  STABDP_RETURN_IF_ERROR(CheckKeys(
      obj, path, {"loss", "penalty", "gamma", "eta", "lambda", "epsilon",
                  "tolerance", "max_iterations"}));
  STABDP_RETURN_IF_ERROR(ReadEnum(obj, path, "loss", kLossNames, &m->loss));
  STABDP_RETURN_IF_ERROR(
      ReadEnum(obj, path, "penalty", kPenaltyNames, &m->penalty));
  STABDP_RETURN_IF_ERROR(ReadDouble(obj, path, "gamma", &m->gamma));
  STABDP_RETURN_IF_ERROR(ReadDouble(obj, path, "eta", &m->eta));
  STABDP_RETURN_IF_ERROR(ReadDouble(obj, path, "lambda", &m->lambda));
  STABDP_RETURN_IF_ERROR(ReadDouble(obj, path, "epsilon", &m->epsilon));
  STABDP_RETURN_IF_ERROR(ReadDouble(obj, path, "tolerance", &m->tolerance));
  STABDP_RETURN_IF_ERROR(
      ReadInteger(obj, path, "max_iterations", &m->max_iterations));
  return absl::OkStatus();
}

absl::Status RequirePositiveField(double value, const std::string& path) {
  if (!(value > 0) || !std::isfinite(value)) {
    return FieldError(path, absl::StrCat("must be positive and finite, got ",
                                         FormatDouble(value)));
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// Data preparation.

struct PreparedSplit {
  Dataset train;
  Dataset test;
  // One +-1 target dataset per binary problem (1 for two classes, one per
  // class otherwise).
  std::vector<Dataset> problems;
};

struct Prepared {
  std::vector<double> classes;
  int64_t source_rows = 0;
  int64_t source_cols = 0;
  int64_t rescaled_train_rows = 0;
  std::vector<PreparedSplit> splits;
};

absl::StatusOr<Dataset> LoadSource(const ExperimentConfig& config) {
  const DatasetConfig& d = config.dataset;
  if (d.source == "synthetic") {
    STABDP_ASSIGN_OR_RETURN(SynthData synth,
                            SynthClassification(d.synthetic));
    return std::move(synth.data);
  }
  if (d.source == "csv") {
    if (d.path.empty()) return FieldError("dataset.path", "required for csv");
    return LoadCsv(d.path, d.label_column);
  }
  if (d.source == "adult") {
    FetchOptions fetch = config.fetch;
    fetch.name = "adult";
    STABDP_ASSIGN_OR_RETURN(std::string path,
                            FetchDataset(FetchOptionsFromEnvironment(fetch)));
    return LoadCsv(path, d.label_column.empty() ? "income" : d.label_column);
  }
  return FieldError("dataset.source",
                    absl::StrCat("unknown source '", d.source,
                                 "'; expected synthetic, csv or adult"));
}

std::vector<Eigen::VectorXd> Targets(const Eigen::VectorXd& labels,
                                     const std::vector<double>& classes) {
  std::vector<Eigen::VectorXd> out;
  if (classes.size() == 2) {
    out.push_back(OneVsRestLabels(labels, classes[1]));
  } else {
    for (double c : classes) out.push_back(OneVsRestLabels(labels, c));
  }
  return out;
}

absl::StatusOr<Prepared> Prepare(const ExperimentConfig& config) {
  STABDP_ASSIGN_OR_RETURN(Dataset source, LoadSource(config));
  Prepared out;
  out.source_rows = source.rows();
  out.source_cols = source.cols();
  out.classes = DistinctLabels(source.labels());
  if (out.classes.size() < 2) {
    return absl::InvalidArgumentError("dataset has fewer than two classes");
  }
  STABDP_ASSIGN_OR_RETURN(std::vector<SplitPair> splits,
                          Split(source, config.split));
  const DatasetConfig& d = config.dataset;
  for (SplitPair& pair : splits) {
    Dataset train = std::move(pair.train);
    Dataset test = std::move(pair.test);
    if (d.reduce_dim > 0 && d.reduce_dim < train.cols()) {
      STABDP_ASSIGN_OR_RETURN(Reduced reduced,
                              ReduceDim(train, d.reduce_dim, d.seed));
      train = std::move(reduced.data);
      STABDP_ASSIGN_OR_RETURN(test, reduced.projection.Apply(test));
    }
    if (d.standardize) {
      STABDP_ASSIGN_OR_RETURN(Standardized s, Standardize(train));
      train = std::move(s.data);
      STABDP_ASSIGN_OR_RETURN(test, s.transform.Apply(test));
    }
    int64_t rescaled = 0;
    STABDP_ASSIGN_OR_RETURN(train, BoundRowNorms(train, d.kappa, &rescaled));
    STABDP_ASSIGN_OR_RETURN(test, BoundRowNorms(test, d.kappa));
    out.rescaled_train_rows += rescaled;
    PreparedSplit prepared{train, test, {}};
    for (Eigen::VectorXd& y : Targets(train.labels(), out.classes)) {
      STABDP_ASSIGN_OR_RETURN(Dataset problem, train.WithLabels(std::move(y)));
      prepared.problems.push_back(std::move(problem));
    }
    out.splits.push_back(std::move(prepared));
  }
  return out;
}

ObjectiveSpec MakeSpec(const ExperimentConfig& config, double lambda) {
  const ModelConfig& m = config.model;
  if (m.penalty == PenaltyKind::kL2) {
    return ObjectiveSpec::L2(m.loss, lambda, config.dataset.kappa);
  }
  return ObjectiveSpec::ElasticNet(m.loss, lambda, m.gamma,
                                   config.dataset.kappa, m.eta);
}

// ---------------------------------------------------------------------------
// Training.

template <typename F>
void ParallelFor(int64_t count, int threads, F&& fn) {
  if (threads <= 1 || count <= 1) {
    for (int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::thread> pool;
  const int workers = static_cast<int>(std::min<int64_t>(threads, count));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int64_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

// Non-private weights for one (lambda, repeat): one vector per problem.
struct Solved {
  std::vector<Weights> weights;
  int64_t nonconverged = 0;
  absl::Status status;
};

Solved SolveProblems(const ObjectiveSpec& spec, const PreparedSplit& split,
                     const ModelConfig& model) {
  Solved out;
  for (const Dataset& problem : split.problems) {
    auto solved =
        SolveErm(spec, problem, model.tolerance, model.max_iterations);
    if (solved.ok()) {
      out.weights.push_back(std::move(solved->weights));
      continue;
    }
    std::optional<Weights> best = BestIterateFromStatus(solved.status());
    if (solved.status().code() == absl::StatusCode::kDeadlineExceeded &&
        best) {
      // Keep the best iterate; the count is reported in the metadata.
      out.weights.push_back(std::move(*best));
      ++out.nonconverged;
      continue;
    }
    out.status = solved.status();
    return out;
  }
  return out;
}

absl::StatusOr<std::vector<Solved>> SolveGrid(
    const ExperimentConfig& config, const Prepared& prepared,
    const std::vector<double>& lambdas) {
  const int64_t repeats = static_cast<int64_t>(prepared.splits.size());
  std::vector<Solved> solved(lambdas.size() * repeats);
  ParallelFor(static_cast<int64_t>(solved.size()), config.threads,
              [&](int64_t task) {
                const size_t li = static_cast<size_t>(task / repeats);
                const size_t r = static_cast<size_t>(task % repeats);
                solved[task] =
                    SolveProblems(MakeSpec(config, lambdas[li]),
                                  prepared.splits[r], config.model);
              });
  for (const Solved& s : solved) STABDP_RETURN_IF_ERROR(s.status);
  return solved;
}

struct CellNoise {
  double scale = 0.0;
  double beta = 0.0;
  double sensitivity_l2 = 0.0;
};

absl::StatusOr<CellNoise> NoiseFor(const ExperimentConfig& config,
                                   double lambda, double epsilon, int64_t n,
                                   int64_t d) {
  const ObjectiveSpec spec = MakeSpec(config, lambda);
  CellNoise out;
  double derived_scale = 0.0;
  if (spec.penalty == PenaltyKind::kElasticNet) {
    ElasticNetParams params;
    params.lambda = lambda;
    params.gamma = spec.gamma;
    params.eta = spec.eta;
    params.epsilon = epsilon;
    params.loss = spec.loss;
    params.kappa = spec.kappa;
    params.lipschitz = spec.lipschitz;
    params.calibration = config.noise.calibration;
    STABDP_ASSIGN_OR_RETURN(StabilityCert cert,
                            BetaElasticNet(spec.lipschitz, spec.kappa, n,
                                           lambda, spec.gamma));
    out.beta = cert.beta;
    out.sensitivity_l2 = std::sqrt(2.0 * cert.beta / (lambda * spec.gamma));
    STABDP_ASSIGN_OR_RETURN(derived_scale, ElasticNetNoiseScale(params, n, d));
  } else {
    STABDP_ASSIGN_OR_RETURN(StabilityCert cert, ClosedFormCert(spec, n));
    STABDP_ASSIGN_OR_RETURN(SensitivityBound sens, SensitivityBetaRoot(cert, d));
    out.beta = cert.beta;
    out.sensitivity_l2 = sens.l2_value;
    derived_scale = (config.noise.calibration ==
                             NoiseCalibration::kL1PerCoordinate
                         ? sens.l1_value
                         : sens.l2_value) /
                    epsilon;
  }
  switch (config.noise.mode) {
    case NoiseMode::kStabilityOptimal:
      out.scale = derived_scale;
      break;
    case NoiseMode::kFixedScale:
      out.scale = config.noise.fixed_scale;
      break;
    case NoiseMode::kNone:
      out.scale = 0.0;
      break;
  }
  return out;
}

Rng CellRng(const ExperimentConfig& config, double lambda, double epsilon,
            int64_t repeat) {
  return Rng(DeriveKey({config.seed, DoubleBits(lambda), DoubleBits(epsilon),
                        static_cast<uint64_t>(repeat)}));
}

std::vector<Weights> Privatize(const std::vector<Weights>& weights,
                               double scale, Rng& cell) {
  std::vector<Weights> out;
  for (size_t c = 0; c < weights.size(); ++c) {
    Rng rng = cell.Derive(c);
    out.push_back(AddLaplaceNoise(weights[c], scale, rng));
  }
  return out;
}

double Accuracy(const std::vector<Weights>& weights, const Dataset& test,
                const std::vector<double>& classes) {
  const int64_t n = test.rows();
  int64_t correct = 0;
  Eigen::MatrixXd w(test.cols(), static_cast<Eigen::Index>(weights.size()));
  for (size_t c = 0; c < weights.size(); ++c) w.col(c) = weights[c];
  const Eigen::MatrixXd scores = test.features() * w;
  for (int64_t i = 0; i < n; ++i) {
    double predicted;
    if (weights.size() == 1) {
      predicted = scores(i, 0) >= 0 ? classes[1] : classes[0];
    } else {
      Eigen::Index arg;
      scores.row(i).maxCoeff(&arg);
      predicted = classes[arg];
    }
    if (predicted == test.labels()(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

std::pair<double, double> MeanStd(const std::vector<double>& values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double sd = values.size() > 1
                  ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                  : 0.0;
  return {mean, sd};
}

// ---------------------------------------------------------------------------
// Output.

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << text;
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

std::string Csv(std::initializer_list<std::string> fields) {
  return absl::StrCat(absl::StrJoin(fields, ","), "\n");
}

ordered_json DatasetSummary(const Prepared& prepared) {
  ordered_json d;
  d["source_rows"] = prepared.source_rows;
  d["source_cols"] = prepared.source_cols;
  d["train_rows"] = prepared.splits.front().train.rows();
  d["test_rows"] = prepared.splits.front().test.rows();
  d["features"] = prepared.splits.front().train.cols();
  d["classes"] = prepared.classes;
  d["rescaled_train_rows"] = prepared.rescaled_train_rows;
  return d;
}

absl::StatusOr<std::string> WriteMetadata(const ExperimentConfig& config,
                                          const std::string& command,
                                          const Prepared& prepared,
                                          int64_t nonconverged,
                                          ordered_json files,
                                          ordered_json columns) {
  ordered_json meta;
  meta["schema_version"] = kResultSchemaVersion;
  meta["command"] = command;
  meta["name"] = config.name;
  meta["config"] = ordered_json::parse(ExperimentConfigJson(config));
  meta["dataset"] = DatasetSummary(prepared);
  meta["solver_nonconverged"] = nonconverged;
  meta["files"] = std::move(files);
  meta["columns"] = std::move(columns);
  const std::string path =
      (std::filesystem::path(config.output_dir) / (config.name + ".json"))
          .string();
  STABDP_RETURN_IF_ERROR(WriteText(path, meta.dump(2) + "\n"));
  return path;
}

std::string OutputPath(const ExperimentConfig& config,
                       const std::string& suffix) {
  return (std::filesystem::path(config.output_dir) / (config.name + suffix))
      .string();
}

absl::StatusOr<std::string> RunAccuracy(const ExperimentConfig& config,
                                        const std::string& command,
                                        const std::vector<double>& lambdas,
                                        const std::vector<double>& epsilons) {
  STABDP_ASSIGN_OR_RETURN(Prepared prepared, Prepare(config));
  STABDP_ASSIGN_OR_RETURN(std::vector<Solved> solved,
                          SolveGrid(config, prepared, lambdas));
  const int64_t repeats = static_cast<int64_t>(prepared.splits.size());
  const int64_t n = prepared.splits.front().train.rows();
  const int64_t d = prepared.splits.front().train.cols();
  const char* mode = NoiseModeName(config.noise.mode);

  std::string csv = Csv({"lambda", "epsilon", "noise_mode", "noise_scale",
                         "beta", "sensitivity_l2", "repeat", "test_accuracy",
                         "test_accuracy_std"});
  int64_t rows = 0;
  int64_t nonconverged = 0;
  for (const Solved& s : solved) nonconverged += s.nonconverged;
  for (size_t li = 0; li < lambdas.size(); ++li) {
    for (double eps : epsilons) {
      STABDP_ASSIGN_OR_RETURN(CellNoise noise,
                              NoiseFor(config, lambdas[li], eps, n, d));
      std::vector<double> accuracies;
      for (int64_t r = 0; r < repeats; ++r) {
        Rng cell = CellRng(config, lambdas[li], eps, r);
        const Solved& s = solved[li * repeats + r];
        std::vector<Weights> released = Privatize(s.weights, noise.scale, cell);
        double acc = Accuracy(released, prepared.splits[r].test,
                              prepared.classes);
        accuracies.push_back(acc);
        csv += Csv({FormatDouble(lambdas[li]), FormatDouble(eps), mode,
                    FormatDouble(noise.scale), FormatDouble(noise.beta),
                    FormatDouble(noise.sensitivity_l2), absl::StrCat(r),
                    FormatDouble(acc), FormatDouble(0.0)});
        ++rows;
      }
      auto [mean, sd] = MeanStd(accuracies);
      csv += Csv({FormatDouble(lambdas[li]), FormatDouble(eps), mode,
                  FormatDouble(noise.scale), FormatDouble(noise.beta),
                  FormatDouble(noise.sensitivity_l2), "-1", FormatDouble(mean),
                  FormatDouble(sd)});
      ++rows;
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  const std::string csv_path = OutputPath(config, ".csv");
  STABDP_RETURN_IF_ERROR(WriteText(csv_path, csv));
  ordered_json files;
  files["csv"] = std::filesystem::path(csv_path).filename().string();
  STABDP_ASSIGN_OR_RETURN(
      std::string meta_path,
      WriteMetadata(config, command, prepared, nonconverged, files,
                    {"lambda", "epsilon", "noise_mode", "noise_scale", "beta",
                     "sensitivity_l2", "repeat", "test_accuracy",
                     "test_accuracy_std"}));
  ordered_json summary;
  summary["command"] = command;
  summary["files"] = {meta_path, csv_path};
  summary["rows"] = rows;
  summary["solver_nonconverged"] = nonconverged;
  return summary.dump();
}

absl::StatusOr<std::string> RunSelect(const ExperimentConfig& config) {
  if (config.model.penalty != PenaltyKind::kElasticNet) {
    return FieldError("model.penalty", "select requires elastic_net");
  }
  STABDP_ASSIGN_OR_RETURN(Prepared prepared, Prepare(config));
  const std::vector<double>& lambdas = config.lambda_grid;
  STABDP_ASSIGN_OR_RETURN(std::vector<Solved> solved,
                          SolveGrid(config, prepared, lambdas));
  const int64_t repeats = static_cast<int64_t>(prepared.splits.size());
  const int64_t n = prepared.splits.front().train.rows();
  const int64_t d = prepared.splits.front().train.cols();
  int64_t nonconverged = 0;
  for (const Solved& s : solved) nonconverged += s.nonconverged;

  std::string csv = Csv({"lambda", "epsilon", "noise_scale",
                         "closed_form_noise_scale", "threshold", "repeat", "f1",
                         "f1_std", "selected_non_private", "selected_private",
                         "flips_observed", "flips_predicted_exact",
                         "flips_variance_exact", "flips_predicted_closed_form"});
  std::string flips_csv =
      Csv({"lambda", "epsilon", "repeat", "problem", "feature", "weight",
           "threshold", "flip_prob_closed_form", "flip_prob_exact", "flipped"});
  const FeatureSource source = config.select.threshold == ThresholdMode::kDynamic
                                   ? FeatureSource::kPrivateDynamicT
                                   : FeatureSource::kPrivateStaticT;
  int64_t rows = 0;
  for (size_t li = 0; li < lambdas.size(); ++li) {
    const double lambda = lambdas[li];
    const ObjectiveSpec spec = MakeSpec(config, lambda);
    for (double eps : config.epsilon_grid) {
      STABDP_ASSIGN_OR_RETURN(CellNoise noise,
                              NoiseFor(config, lambda, eps, n, d));
      FlipParams flip{eps, lambda, spec.eta, n, spec.lipschitz, spec.kappa};
      double closed_form_scale = std::numeric_limits<double>::quiet_NaN();
      if (spec.eta > 0) {
        STABDP_ASSIGN_OR_RETURN(closed_form_scale, FlipNoiseScale(flip));
      }
      double threshold = config.select.static_threshold;
      if (config.select.threshold == ThresholdMode::kDynamic) {
        STABDP_ASSIGN_OR_RETURN(
            threshold, DynamicThreshold(noise.scale, config.select.multiplier));
      }
      std::vector<double> f1s;
      std::vector<double> agg(6, 0.0);
      for (int64_t r = 0; r < repeats; ++r) {
        Rng cell = CellRng(config, lambda, eps, r);
        const Solved& s = solved[li * repeats + r];
        std::vector<Weights> released = Privatize(s.weights, noise.scale, cell);
        const Eigen::Index p = static_cast<Eigen::Index>(s.weights.size());
        Weights all(p * d), all_noisy(p * d);
        for (Eigen::Index c = 0; c < p; ++c) {
          all.segment(c * d, d) = s.weights[c];
          all_noisy.segment(c * d, d) = released[c];
        }
        STABDP_ASSIGN_OR_RETURN(FeatureDecision reference,
                                SelectFeatures(all, 0.0));
        STABDP_ASSIGN_OR_RETURN(FeatureDecision at_t,
                                SelectFeatures(all, threshold));
        STABDP_ASSIGN_OR_RETURN(FeatureDecision priv,
                                SelectFeatures(all_noisy, threshold, source));
        STABDP_ASSIGN_OR_RETURN(double f1, F1Similarity(reference, priv));
        f1s.push_back(f1);
        double observed = 0, exact = 0, variance = 0, closed_form = 0;
        bool closed_form_defined = threshold > 0 && spec.eta > 0;
        for (Eigen::Index i = 0; i < all.size(); ++i) {
          const bool flipped = at_t.decisions[i] != priv.decisions[i];
          observed += flipped ? 1 : 0;
          STABDP_ASSIGN_OR_RETURN(
              double pe, ExactFlipProbability(threshold, all(i), noise.scale));
          exact += pe;
          variance += pe * (1 - pe);
          double pl = std::numeric_limits<double>::quiet_NaN();
          if (closed_form_defined) {
            STABDP_ASSIGN_OR_RETURN(pl, FlipProbability(threshold, all(i), flip));
            closed_form += pl;
          }
          flips_csv += Csv({FormatDouble(lambda), FormatDouble(eps),
                            absl::StrCat(r), absl::StrCat(i / d),
                            absl::StrCat(i % d), FormatDouble(all(i)),
                            FormatDouble(threshold), FormatDouble(pl),
                            FormatDouble(pe), flipped ? "1" : "0"});
        }
        if (!closed_form_defined) closed_form = std::numeric_limits<double>::quiet_NaN();
        const double counts[6] = {static_cast<double>(reference.selected()),
                                  static_cast<double>(priv.selected()),
                                  observed, exact, variance, closed_form};
        for (int k = 0; k < 6; ++k) agg[k] += counts[k];
        csv += Csv({FormatDouble(lambda), FormatDouble(eps),
                    FormatDouble(noise.scale), FormatDouble(closed_form_scale),
                    FormatDouble(threshold), absl::StrCat(r),
                    FormatDouble(f1), FormatDouble(0.0),
                    FormatDouble(counts[0]), FormatDouble(counts[1]),
                    FormatDouble(observed), FormatDouble(exact),
                    FormatDouble(variance), FormatDouble(closed_form)});
        ++rows;
      }
      auto [mean, sd] = MeanStd(f1s);
      const double reps = static_cast<double>(repeats);
      // Aggregate rows hold per-repeat means; the variance column is summed
      // so that the aggregate observed-vs-predicted check can use it.
      csv += Csv({FormatDouble(lambda), FormatDouble(eps),
                  FormatDouble(noise.scale), FormatDouble(closed_form_scale),
                  FormatDouble(threshold), "-1", FormatDouble(mean),
                  FormatDouble(sd), FormatDouble(agg[0] / reps),
                  FormatDouble(agg[1] / reps), FormatDouble(agg[2] / reps),
                  FormatDouble(agg[3] / reps), FormatDouble(agg[4]),
                  FormatDouble(agg[5] / reps)});
      ++rows;
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  const std::string csv_path = OutputPath(config, ".csv");
  const std::string flips_path = OutputPath(config, "_flips.csv");
  STABDP_RETURN_IF_ERROR(WriteText(csv_path, csv));
  STABDP_RETURN_IF_ERROR(WriteText(flips_path, flips_csv));
  ordered_json files;
  files["csv"] = std::filesystem::path(csv_path).filename().string();
  files["flips_csv"] = std::filesystem::path(flips_path).filename().string();
  STABDP_ASSIGN_OR_RETURN(
      std::string meta_path,
      WriteMetadata(config, "select", prepared, nonconverged, files,
                    {"lambda", "epsilon", "noise_scale", "closed_form_noise_scale",
                     "threshold", "repeat", "f1", "f1_std",
                     "selected_non_private", "selected_private",
                     "flips_observed", "flips_predicted_exact",
                     "flips_variance_exact", "flips_predicted_closed_form"}));
  ordered_json summary;
  summary["command"] = "select";
  summary["files"] = {meta_path, csv_path, flips_path};
  summary["rows"] = rows;
  summary["solver_nonconverged"] = nonconverged;
  return summary.dump();
}

absl::StatusOr<std::string> RunFetch(const ExperimentConfig& config) {
  STABDP_ASSIGN_OR_RETURN(std::string path,
                          FetchDataset(FetchOptionsFromEnvironment(config.fetch)));
  ordered_json summary;
  summary["command"] = "fetch";
  summary["files"] = {path};
  return summary.dump();
}

// ---------------------------------------------------------------------------
// Verify suites.

struct CheckEntry {
  OracleReport report;
  bool expected_pass = true;
  ordered_json params;
};

ordered_json CheckJson(const CheckEntry& e) {
  ordered_json j;
  j["name"] = e.report.name;
  j["params"] = e.params;
  j["bound"] = e.report.bound_value;
  j["empirical"] = e.report.empirical;
  j["margin"] = e.report.margin;
  j["trials"] = e.report.trials;
  j["failures"] = e.report.failures;
  j["passed"] = e.report.passed;
  j["expected_pass"] = e.expected_pass;
  j["ok"] = e.report.passed == e.expected_pass;
  ordered_json obs = ordered_json::object();
  for (const auto& [k, v] : e.report.observations) obs[k] = v;
  j["observations"] = obs;
  return j;
}

constexpr double kFixtureLambdas[] = {0.1, 0.5, 2.0};
constexpr int64_t kFixtureRows = 50;
constexpr int64_t kFixtureCols = 5;

std::vector<std::pair<std::string, ObjectiveSpec>> FixtureSpecs() {
  std::vector<std::pair<std::string, ObjectiveSpec>> out;
  for (double lambda : kFixtureLambdas) {
    out.emplace_back("l2", ObjectiveSpec::L2(LossKind::kLogistic, lambda));
    out.emplace_back("elastic_net", ObjectiveSpec::ElasticNet(
                                        LossKind::kLogistic, lambda, 0.85,
                                        1.0, 0.15));
  }
  return out;
}

absl::Status RunSensitivitySuite(uint64_t seed,
                                 std::vector<CheckEntry>& checks) {
  STABDP_ASSIGN_OR_RETURN(Dataset data,
                          BinaryFixture(kFixtureRows, kFixtureCols, seed));
  for (const auto& [penalty, spec] : FixtureSpecs()) {
    NeighborOracleOptions options;
    options.seed = DeriveKey({seed, DoubleBits(spec.lambda), 1});
    STABDP_ASSIGN_OR_RETURN(SensitivityOracleResult r,
                            EmpiricalSensitivity(spec, data, options));
    checks.push_back(
        {r.report, true, {{"penalty", penalty}, {"lambda", spec.lambda}}});
  }
  return absl::OkStatus();
}

absl::Status RunStabilitySuite(uint64_t seed, std::vector<CheckEntry>& checks) {
  STABDP_ASSIGN_OR_RETURN(Dataset data,
                          BinaryFixture(kFixtureRows, kFixtureCols, seed));
  for (const auto& [penalty, spec] : FixtureSpecs()) {
    NeighborOracleOptions options;
    options.seed = DeriveKey({seed, DoubleBits(spec.lambda), 2});
    STABDP_ASSIGN_OR_RETURN(StabilityOracleResult r,
                            EmpiricalStability(spec, data, options));
    checks.push_back(
        {r.report, true, {{"penalty", penalty}, {"lambda", spec.lambda}}});
  }
  return absl::OkStatus();
}

absl::Status RunPrivacyErrorSuite(uint64_t seed,
                                  std::vector<CheckEntry>& checks) {
  STABDP_ASSIGN_OR_RETURN(Dataset data,
                          BinaryFixture(kFixtureRows, kFixtureCols, seed));
  const ObjectiveSpec spec = ObjectiveSpec::L2(LossKind::kLogistic, 0.5);
  PrivacyErrorOptions options;
  options.seed = DeriveKey({seed, 3});
  STABDP_ASSIGN_OR_RETURN(
      PrivacyErrorScaling scaling,
      PrivacyErrorVersusEpsilon(spec, data, {10.0, 20.0, 40.0}, options));
  for (const OracleReport& r : scaling.reports) {
    checks.push_back({r, true, {{"lambda", spec.lambda}}});
  }
  OracleReport slope;
  slope.name = "privacy_error_epsilon_slope";
  slope.empirical = scaling.slope;
  slope.bound_value = -1.0;
  slope.trials = static_cast<int64_t>(scaling.reports.size());
  slope.passed = scaling.slope >= -1.2 && scaling.slope <= -0.8;
  slope.margin = 0.2 - std::abs(scaling.slope + 1.0);
  slope.observations = {{"band_low", -1.2}, {"band_high", -0.8}};
  checks.push_back({slope, true, {{"epsilons", {10.0, 20.0, 40.0}}}});
  return absl::OkStatus();
}

absl::Status RunDpSuite(uint64_t seed, std::vector<CheckEntry>& checks) {
  DpCheckOptions options;
  options.seed = DeriveKey({seed, 4});
  for (double fraction : {1.0, 0.5}) {
    STABDP_ASSIGN_OR_RETURN(DpProbeResult r,
                            MeanQueryDpCheck(1.0, fraction, 100, options));
    checks.push_back({r.report, fraction >= 1.0,
                      {{"epsilon", 1.0}, {"noise_fraction", fraction}}});
  }
  STABDP_ASSIGN_OR_RETURN(Dataset data,
                          BinaryFixture(kFixtureRows, kFixtureCols, seed));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(kFixtureCols);
  x(0) = 1.0;
  STABDP_ASSIGN_OR_RETURN(Dataset neighbor,
                          data.WithRecord(0, x, -data.labels()(0)));
  const ObjectiveSpec spec = ObjectiveSpec::L2(LossKind::kLogistic, 0.5);
  for (bool negative : {false, true}) {
    STABDP_ASSIGN_OR_RETURN(
        DpProbeResult r,
        ErmDpCheck(spec, data, neighbor, 1.0, negative, options));
    checks.push_back({r.report, !negative,
                      {{"epsilon", 1.0}, {"lambda", spec.lambda},
                       {"negative_control", negative}}});
  }
  return absl::OkStatus();
}

std::vector<ObjectiveSpec> GradientSpecs() {
  return {ObjectiveSpec::L2(LossKind::kLogistic, 0.1),
          ObjectiveSpec::L2(LossKind::kSquared, 0.1),
          ObjectiveSpec::ElasticNet(LossKind::kLogistic, 0.1, 0.85, 1.0, 0.15),
          ObjectiveSpec::ElasticNet(LossKind::kSquared, 0.1, 0.85, 1.0, 0.15)};
}

absl::Status RunGradientSuite(uint64_t seed, std::vector<CheckEntry>& checks) {
  STABDP_ASSIGN_OR_RETURN(
      OracleReport r, GradientCheck(GradientSpecs(), 100, DeriveKey({seed, 5})));
  checks.push_back({r, true, {{"fixtures", 100}}});
  return absl::OkStatus();
}

absl::Status RunFlipSuite(uint64_t seed, std::vector<CheckEntry>& checks) {
  FlipGridOptions options;
  options.seed = DeriveKey({seed, 6});
  STABDP_ASSIGN_OR_RETURN(FlipRateResult r, FlipRateCheck(options));
  checks.push_back({r.report, true,
                    {{"lambda", options.lambda},
                     {"eta", options.eta},
                     {"n", options.n}}});
  return absl::OkStatus();
}

using SuiteFn = absl::Status (*)(uint64_t, std::vector<CheckEntry>&);

const std::vector<std::pair<std::string, SuiteFn>>& Suites() {
  static const auto* suites = new std::vector<std::pair<std::string, SuiteFn>>{
      {"sensitivity", &RunSensitivitySuite},
      {"stability", &RunStabilitySuite},
      {"privacy_error", &RunPrivacyErrorSuite},
      {"dp", &RunDpSuite},
      {"gradients", &RunGradientSuite},
      {"flips", &RunFlipSuite},
  };
  return *suites;
}

}  // namespace

const char* NoiseModeName(NoiseMode mode) { return EnumName(kNoiseNames, mode); }

absl::Status ExperimentConfig::Validate() const {
  if (name.empty() || name.find('/') != std::string::npos) {
    return FieldError("name", "must be a nonempty file stem without '/'");
  }
  if (lambda_grid.empty()) return FieldError("lambda_grid", "must be nonempty");
  if (epsilon_grid.empty()) {
    return FieldError("epsilon_grid", "must be nonempty");
  }
  for (size_t i = 0; i < lambda_grid.size(); ++i) {
    STABDP_RETURN_IF_ERROR(RequirePositiveField(
        lambda_grid[i], absl::StrCat("lambda_grid[", i, "]")));
  }
  for (size_t i = 0; i < epsilon_grid.size(); ++i) {
    STABDP_RETURN_IF_ERROR(RequirePositiveField(
        epsilon_grid[i], absl::StrCat("epsilon_grid[", i, "]")));
  }
  STABDP_RETURN_IF_ERROR(RequirePositiveField(model.lambda, "model.lambda"));
  STABDP_RETURN_IF_ERROR(RequirePositiveField(model.epsilon, "model.epsilon"));
  STABDP_RETURN_IF_ERROR(
      RequirePositiveField(model.tolerance, "model.tolerance"));
  if (model.max_iterations < 1) {
    return FieldError("model.max_iterations", "must be >= 1");
  }
  if (model.penalty == PenaltyKind::kElasticNet) {
    if (!(model.gamma > 0 && model.gamma <= 1)) {
      return FieldError("model.gamma", "must lie in (0, 1]");
    }
    if (!(model.eta >= 0) || !std::isfinite(model.eta)) {
      return FieldError("model.eta", "must be finite and >= 0");
    }
  }
  STABDP_RETURN_IF_ERROR(RequirePositiveField(dataset.kappa, "dataset.kappa"));
  if (dataset.reduce_dim < 0) {
    return FieldError("dataset.reduce_dim", "must be >= 0");
  }
  if (dataset.source == "synthetic") {
    absl::Status s = dataset.synthetic.Validate();
    if (!s.ok()) return FieldError("dataset.synthetic", std::string(s.message()));
  }
  absl::Status split_status = split.Validate();
  if (!split_status.ok()) return FieldError("split", std::string(split_status.message()));
  if (noise.mode == NoiseMode::kFixedScale &&
      (!(noise.fixed_scale >= 0) || !std::isfinite(noise.fixed_scale))) {
    return FieldError("noise.fixed_scale", "must be finite and >= 0");
  }
  STABDP_RETURN_IF_ERROR(
      RequirePositiveField(select.multiplier, "select.multiplier"));
  if (!(select.static_threshold >= 0)) {
    return FieldError("select.static_threshold", "must be >= 0");
  }
  if (threads < 1) return FieldError("threads", "must be >= 1");
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config is not valid JSON: ", e.what()));
  }
  ExperimentConfig c;
  STABDP_RETURN_IF_ERROR(CheckKeys(
      root, "", {"name", "output_dir", "dataset", "split", "model",
                 "lambda_grid", "epsilon_grid", "noise", "select", "fetch",
                 "seed", "threads", "schema_version"}));
  STABDP_RETURN_IF_ERROR(ReadString(root, "", "name", &c.name));
  STABDP_RETURN_IF_ERROR(ReadString(root, "", "output_dir", &c.output_dir));
  if (root.contains("dataset")) {
    STABDP_RETURN_IF_ERROR(ParseDataset(root.at("dataset"), "dataset",
                                        &c.dataset));
  }
  if (root.contains("split")) {
    const json& s = root.at("split");
    STABDP_RETURN_IF_ERROR(
        CheckKeys(s, "split", {"seed", "train_fraction", "repeats"}));
    STABDP_RETURN_IF_ERROR(ReadInteger(s, "split", "seed", &c.split.seed));
    STABDP_RETURN_IF_ERROR(
        ReadDouble(s, "split", "train_fraction", &c.split.train_fraction));
    STABDP_RETURN_IF_ERROR(ReadInteger(s, "split", "repeats", &c.split.repeats));
  }
  if (root.contains("model")) {
    STABDP_RETURN_IF_ERROR(ParseModel(root.at("model"), "model", &c.model));
  }
  STABDP_RETURN_IF_ERROR(
      ReadDoubleList(root, "", "lambda_grid", &c.lambda_grid));
  STABDP_RETURN_IF_ERROR(
      ReadDoubleList(root, "", "epsilon_grid", &c.epsilon_grid));
  if (root.contains("noise")) {
    const json& s = root.at("noise");
    STABDP_RETURN_IF_ERROR(
        CheckKeys(s, "noise", {"mode", "fixed_scale", "calibration"}));
    STABDP_RETURN_IF_ERROR(
        ReadEnum(s, "noise", "mode", kNoiseNames, &c.noise.mode));
    STABDP_RETURN_IF_ERROR(
        ReadDouble(s, "noise", "fixed_scale", &c.noise.fixed_scale));
    STABDP_RETURN_IF_ERROR(ReadEnum(s, "noise", "calibration",
                                    kCalibrationNames, &c.noise.calibration));
  }
  if (root.contains("select")) {
    const json& s = root.at("select");
    STABDP_RETURN_IF_ERROR(CheckKeys(
        s, "select", {"threshold", "multiplier", "static_threshold"}));
    STABDP_RETURN_IF_ERROR(ReadEnum(s, "select", "threshold", kThresholdNames,
                                    &c.select.threshold));
    STABDP_RETURN_IF_ERROR(
        ReadDouble(s, "select", "multiplier", &c.select.multiplier));
    STABDP_RETURN_IF_ERROR(ReadDouble(s, "select", "static_threshold",
                                      &c.select.static_threshold));
  }
  if (root.contains("fetch")) {
    const json& s = root.at("fetch");
    STABDP_RETURN_IF_ERROR(CheckKeys(
        s, "fetch",
        {"name", "url", "sha256", "cache_dir", "offline", "timeout_seconds"}));
    STABDP_RETURN_IF_ERROR(ReadString(s, "fetch", "name", &c.fetch.name));
    STABDP_RETURN_IF_ERROR(ReadString(s, "fetch", "url", &c.fetch.url));
    STABDP_RETURN_IF_ERROR(ReadString(s, "fetch", "sha256", &c.fetch.sha256));
    STABDP_RETURN_IF_ERROR(
        ReadString(s, "fetch", "cache_dir", &c.fetch.cache_dir));
    STABDP_RETURN_IF_ERROR(ReadBool(s, "fetch", "offline", &c.fetch.offline));
    STABDP_RETURN_IF_ERROR(ReadInteger(s, "fetch", "timeout_seconds",
                                       &c.fetch.timeout_seconds));
  }
  STABDP_RETURN_IF_ERROR(ReadInteger(root, "", "seed", &c.seed));
  STABDP_RETURN_IF_ERROR(ReadInteger(root, "", "threads", &c.threads));
  if (root.contains("schema_version")) {
    int version = 0;
    STABDP_RETURN_IF_ERROR(ReadInteger(root, "", "schema_version", &version));
    if (version != kResultSchemaVersion) {
      return FieldError("schema_version",
                        absl::StrCat("unsupported version ", version));
    }
  }
  STABDP_RETURN_IF_ERROR(c.Validate());
  return c;
}

std::string ExperimentConfigJson(const ExperimentConfig& c) {
  ordered_json j;
  j["schema_version"] = kResultSchemaVersion;
  j["name"] = c.name;
  j["output_dir"] = c.output_dir;
  ordered_json synth;
  synth["n"] = c.dataset.synthetic.n;
  synth["d"] = c.dataset.synthetic.d;
  synth["classes"] = c.dataset.synthetic.classes;
  synth["sparsity"] = c.dataset.synthetic.sparsity;
  synth["noise"] = c.dataset.synthetic.noise;
  synth["signal_scale"] = c.dataset.synthetic.signal_scale;
  synth["seed"] = c.dataset.synthetic.seed;
  ordered_json dataset;
  dataset["source"] = c.dataset.source;
  dataset["path"] = c.dataset.path;
  dataset["label_column"] = c.dataset.label_column;
  dataset["synthetic"] = synth;
  dataset["reduce_dim"] = c.dataset.reduce_dim;
  dataset["standardize"] = c.dataset.standardize;
  dataset["kappa"] = c.dataset.kappa;
  dataset["seed"] = c.dataset.seed;
  j["dataset"] = dataset;
  ordered_json split;
  split["seed"] = c.split.seed;
  split["train_fraction"] = c.split.train_fraction;
  split["repeats"] = c.split.repeats;
  j["split"] = split;
  ordered_json model;
  model["loss"] = EnumName(kLossNames, c.model.loss);
  model["penalty"] = EnumName(kPenaltyNames, c.model.penalty);
  model["gamma"] = c.model.gamma;
  model["eta"] = c.model.eta;
  model["lambda"] = c.model.lambda;
  model["epsilon"] = c.model.epsilon;
  model["tolerance"] = c.model.tolerance;
  model["max_iterations"] = c.model.max_iterations;
  j["model"] = model;
  j["lambda_grid"] = c.lambda_grid;
  j["epsilon_grid"] = c.epsilon_grid;
  ordered_json noise;
  noise["mode"] = EnumName(kNoiseNames, c.noise.mode);
  noise["fixed_scale"] = c.noise.fixed_scale;
  noise["calibration"] = EnumName(kCalibrationNames, c.noise.calibration);
  j["noise"] = noise;
  ordered_json select;
  select["threshold"] = EnumName(kThresholdNames, c.select.threshold);
  select["multiplier"] = c.select.multiplier;
  select["static_threshold"] = c.select.static_threshold;
  j["select"] = select;
  ordered_json fetch;
  fetch["name"] = c.fetch.name;
  fetch["url"] = c.fetch.url;
  fetch["sha256"] = c.fetch.sha256;
  fetch["cache_dir"] = c.fetch.cache_dir;
  fetch["offline"] = c.fetch.offline;
  fetch["timeout_seconds"] = c.fetch.timeout_seconds;
  j["fetch"] = fetch;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j.dump(2);
}

absl::StatusOr<std::string> RunExperimentCommand(
    const std::string& command, const ExperimentConfig& config) {
  STABDP_RETURN_IF_ERROR(config.Validate());
  if (command == "train") {
    return RunAccuracy(config, "train", {config.model.lambda},
                       {config.model.epsilon});
  }
  if (command == "sweep") {
    return RunAccuracy(config, "sweep", config.lambda_grid,
                       config.epsilon_grid);
  }
  if (command == "select") return RunSelect(config);
  if (command == "fetch") return RunFetch(config);
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown command '", command, "'; expected train, sweep, select or fetch"));
}

std::vector<std::string> VerifySuiteNames() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : Suites()) names.push_back(name);
  names.push_back("all");
  return names;
}

absl::StatusOr<VerifyOutcome> RunVerifySuite(const std::string& suite,
                                             uint64_t seed) {
  std::vector<CheckEntry> checks;
  bool found = false;
  for (const auto& [name, fn] : Suites()) {
    if (suite == name || suite == "all") {
      found = true;
      STABDP_RETURN_IF_ERROR(fn(seed, checks));
    }
  }
  if (!found) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown suite '", suite, "'; expected one of ",
                     absl::StrJoin(VerifySuiteNames(), ", ")));
  }
  VerifyOutcome out;
  out.passed = true;
  ordered_json j;
  j["schema_version"] = kResultSchemaVersion;
  j["suite"] = suite;
  j["seed"] = seed;
  ordered_json list = ordered_json::array();
  for (const CheckEntry& e : checks) {
    out.passed = out.passed && e.report.passed == e.expected_pass;
    list.push_back(CheckJson(e));
  }
  j["passed"] = out.passed;
  j["checks"] = list;
  out.json = j.dump(2);
  return out;
}

}  // namespace stabdp
