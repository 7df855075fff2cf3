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

#include "stabdp/stabdp.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "absl/status/status.h"
#include "stabdp/data_io.h"
#include "stabdp/experiment.h"
#include "stabdp/features.h"
#include "stabdp/model.h"
#include "stabdp/optimizer.h"
#include "stabdp/privacy.h"
#include "stabdp/stability.h"

struct stabdp_dataset {
  stabdp::Dataset data;
};

namespace {

thread_local std::string last_error;

stabdp_status ToCode(absl::StatusCode code) {
  switch (code) {
    case absl::StatusCode::kOk:
      return STABDP_OK;
    case absl::StatusCode::kInvalidArgument:
      return STABDP_INVALID_ARGUMENT;
    case absl::StatusCode::kNotFound:
      return STABDP_NOT_FOUND;
    case absl::StatusCode::kFailedPrecondition:
      return STABDP_FAILED_PRECONDITION;
    case absl::StatusCode::kOutOfRange:
      return STABDP_OUT_OF_RANGE;
    case absl::StatusCode::kDeadlineExceeded:
      return STABDP_DEADLINE_EXCEEDED;
    case absl::StatusCode::kUnavailable:
      return STABDP_UNAVAILABLE;
    case absl::StatusCode::kDataLoss:
      return STABDP_DATA_LOSS;
    case absl::StatusCode::kInternal:
      return STABDP_INTERNAL;
    default:
      return STABDP_UNKNOWN;
  }
}

stabdp_status Fail(const absl::Status& status) {
  last_error = std::string(status.message());
  return ToCode(status.code());
}

stabdp_status Invalid(const char* message) {
  return Fail(absl::InvalidArgumentError(message));
}

stabdp_status Ok() {
  last_error.clear();
  return STABDP_OK;
}

// Runs fn, converting escaped exceptions into STABDP_INTERNAL so none cross
// the C boundary.
template <typename F>
stabdp_status Guard(F&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return Fail(absl::InternalError(e.what()));
  } catch (...) {
    return Fail(absl::InternalError("unknown exception"));
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

absl::StatusOr<stabdp::ObjectiveSpec> ToSpec(const stabdp_objective* o) {
  if (o == nullptr) return absl::InvalidArgumentError("objective is NULL");
  stabdp::LossKind loss;
  switch (o->loss) {
    case STABDP_LOSS_LOGISTIC:
      loss = stabdp::LossKind::kLogistic;
      break;
    case STABDP_LOSS_SQUARED:
      loss = stabdp::LossKind::kSquared;
      break;
    default:
      return absl::InvalidArgumentError("unknown loss");
  }
  stabdp::ObjectiveSpec spec;
  switch (o->penalty) {
    case STABDP_PENALTY_L2:
      spec = stabdp::ObjectiveSpec::L2(loss, o->lambda, o->kappa);
      break;
    case STABDP_PENALTY_ELASTIC_NET:
      spec = stabdp::ObjectiveSpec::ElasticNet(
          loss, o->lambda, o->gamma, o->kappa,
          o->eta < 0 ? std::nullopt : std::optional<double>(o->eta));
      break;
    default:
      return absl::InvalidArgumentError("unknown penalty");
  }
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  return spec;
}

absl::StatusOr<stabdp::StabilityCert> ToCert(const stabdp_stability* c) {
  if (c == nullptr) return absl::InvalidArgumentError("stability is NULL");
  return stabdp::StabilityCert::UserSupplied(c->beta, c->lambda_sc);
}

stabdp::FeatureDecision ToDecision(const uint8_t* values, int64_t size) {
  stabdp::FeatureDecision d;
  d.decisions.assign(values, values + size);
  for (uint8_t& v : d.decisions) v = v != 0;
  return d;
}

stabdp_status WrapDataset(absl::StatusOr<stabdp::Dataset> data,
                          stabdp_dataset** out) {
  if (!data.ok()) return Fail(data.status());
  *out = new stabdp_dataset{*std::move(data)};
  return Ok();
}

}  // namespace

extern "C" {

const char* stabdp_version(void) { return "0.1.0"; }

const char* stabdp_last_error(void) { return last_error.c_str(); }

void stabdp_string_free(char* s) { std::free(s); }

stabdp_status stabdp_dataset_create(const double* features,
                                    const double* labels, int64_t rows,
                                    int64_t cols, stabdp_dataset** out) {
  return Guard([&] {
    if (out == nullptr || labels == nullptr ||
        (features == nullptr && rows * cols > 0)) {
      return Invalid("NULL argument");
    }
    if (rows < 0 || cols < 0) return Invalid("negative shape");
    stabdp::FeatureMatrix x =
        rows * cols > 0
            ? stabdp::FeatureMatrix(
                  Eigen::Map<const stabdp::FeatureMatrix>(features, rows, cols))
            : stabdp::FeatureMatrix(rows, cols);
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(labels, rows);
    return WrapDataset(stabdp::Dataset::Create(std::move(x), std::move(y)),
                       out);
  });
}

stabdp_status stabdp_dataset_load_csv(const char* path,
                                      const char* label_column,
                                      stabdp_dataset** out) {
  return Guard([&] {
    if (path == nullptr || out == nullptr) return Invalid("NULL argument");
    return WrapDataset(
        stabdp::LoadCsv(path, label_column == nullptr ? "" : label_column),
        out);
  });
}

stabdp_status stabdp_dataset_synthetic(int64_t n, int64_t d, int64_t classes,
                                       int64_t sparsity, double noise,
                                       uint64_t seed, stabdp_dataset** out) {
  return Guard([&] {
    if (out == nullptr) return Invalid("NULL argument");
    stabdp::SynthSpec spec;
    spec.n = n;
    spec.d = d;
    spec.classes = classes;
    spec.sparsity = sparsity;
    spec.noise = noise;
    spec.seed = seed;
    auto synth = stabdp::SynthClassification(spec);
    if (!synth.ok()) return Fail(synth.status());
    return WrapDataset(std::move(synth->data), out);
  });
}

int64_t stabdp_dataset_rows(const stabdp_dataset* data) {
  return data == nullptr ? 0 : data->data.rows();
}

int64_t stabdp_dataset_cols(const stabdp_dataset* data) {
  return data == nullptr ? 0 : data->data.cols();
}

stabdp_status stabdp_dataset_copy(const stabdp_dataset* data,
                                  double* features, double* labels) {
  return Guard([&] {
    if (data == nullptr) return Invalid("dataset is NULL");
    const stabdp::Dataset& d = data->data;
    if (features != nullptr) {
      Eigen::Map<stabdp::FeatureMatrix>(features, d.rows(), d.cols()) =
          d.features();
    }
    if (labels != nullptr) {
      Eigen::Map<Eigen::VectorXd>(labels, d.rows()) = d.labels();
    }
    return Ok();
  });
}

stabdp_status stabdp_dataset_bound_norms(stabdp_dataset* data, double kappa) {
  return Guard([&] {
    if (data == nullptr) return Invalid("dataset is NULL");
    auto bounded = stabdp::BoundRowNorms(data->data, kappa);
    if (!bounded.ok()) return Fail(bounded.status());
    data->data = *std::move(bounded);
    return Ok();
  });
}

void stabdp_dataset_free(stabdp_dataset* data) { delete data; }

stabdp_status stabdp_solve_erm(const stabdp_objective* objective,
                               const stabdp_dataset* data, double tolerance,
                               int64_t max_iterations, double* weights) {
  return Guard([&] {
    if (data == nullptr || weights == nullptr) return Invalid("NULL argument");
    auto spec = ToSpec(objective);
    if (!spec.ok()) return Fail(spec.status());
    auto solved = stabdp::SolveErm(*spec, data->data, tolerance,
                                   max_iterations);
    if (!solved.ok()) return Fail(solved.status());
    Eigen::Map<Eigen::VectorXd>(weights, data->data.cols()) = solved->weights;
    return Ok();
  });
}

stabdp_status stabdp_stability_closed_form(const stabdp_objective* objective,
                                           int64_t n, stabdp_stability* out) {
  return Guard([&] {
    if (out == nullptr) return Invalid("NULL argument");
    auto spec = ToSpec(objective);
    if (!spec.ok()) return Fail(spec.status());
    auto cert = stabdp::ClosedFormCert(*spec, n);
    if (!cert.ok()) return Fail(cert.status());
    out->beta = cert->beta;
    out->lambda_sc = cert->lambda_sc;
    return Ok();
  });
}

stabdp_status stabdp_sensitivity_lipschitz(double lipschitz, double kappa,
                                           int64_t n, double lambda,
                                           double* out) {
  return Guard([&] {
    if (out == nullptr) return Invalid("NULL argument");
    auto bound = stabdp::SensitivityLipschitz(lipschitz, kappa, n, lambda);
    if (!bound.ok()) return Fail(bound.status());
    *out = bound->l2_value;
    return Ok();
  });
}

stabdp_status stabdp_sensitivity_stability(const stabdp_stability* cert,
                                           double* out) {
  return Guard([&] {
    if (out == nullptr) return Invalid("NULL argument");
    auto c = ToCert(cert);
    if (!c.ok()) return Fail(c.status());
    auto bound = stabdp::SensitivityBetaRoot(*c);
    if (!bound.ok()) return Fail(bound.status());
    *out = bound->l2_value;
    return Ok();
  });
}

stabdp_status stabdp_privacy_error_bound(double lipschitz, int64_t d,
                                         double epsilon,
                                         const stabdp_stability* cert,
                                         double* out) {
  return Guard([&] {
    if (out == nullptr) return Invalid("NULL argument");
    auto c = ToCert(cert);
    if (!c.ok()) return Fail(c.status());
    auto bound = stabdp::PrivacyErrorBound(lipschitz, d, epsilon, *c);
    if (!bound.ok()) return Fail(bound.status());
    *out = *bound;
    return Ok();
  });
}

stabdp_status stabdp_private_elastic_net(const stabdp_objective* objective,
                                         const stabdp_dataset* data,
                                         double epsilon,
                                         stabdp_calibration calibration,
                                         uint64_t seed, double* weights,
                                         double* noise_scale) {
  return Guard([&] {
    if (data == nullptr || weights == nullptr) return Invalid("NULL argument");
    auto spec = ToSpec(objective);
    if (!spec.ok()) return Fail(spec.status());
    if (spec->penalty != stabdp::PenaltyKind::kElasticNet) {
      return Invalid("private elastic net requires the elastic-net penalty");
    }
    stabdp::ElasticNetParams params;
    params.lambda = spec->lambda;
    params.gamma = spec->gamma;
    params.eta = spec->eta;
    params.epsilon = epsilon;
    params.loss = spec->loss;
    params.kappa = spec->kappa;
    params.lipschitz = spec->lipschitz;
    switch (calibration) {
      case STABDP_CALIBRATION_L1_PER_COORDINATE:
        params.calibration = stabdp::NoiseCalibration::kL1PerCoordinate;
        break;
      case STABDP_CALIBRATION_L2_DIRECT:
        params.calibration = stabdp::NoiseCalibration::kL2Direct;
        break;
      default:
        return Invalid("unknown calibration");
    }
    auto release = stabdp::PrivateElasticNet(data->data, params, seed);
    if (!release.ok()) return Fail(release.status());
    Eigen::Map<Eigen::VectorXd>(weights, data->data.cols()) =
        release->release.noisy_weights;
    if (noise_scale != nullptr) *noise_scale = release->release.noise_scale;
    return Ok();
  });
}

stabdp_status stabdp_laplace_sample(double scale, int64_t count, uint64_t seed,
                                    double* out) {
  return Guard([&] {
    if (out == nullptr && count > 0) return Invalid("NULL argument");
    stabdp::Rng rng(seed);
    auto sample = stabdp::LaplaceSample(scale, count, rng);
    if (!sample.ok()) return Fail(sample.status());
    std::copy(sample->begin(), sample->end(), out);
    return Ok();
  });
}

stabdp_status stabdp_clip(double* v, int64_t size, double bound) {
  return Guard([&] {
    if (v == nullptr && size > 0) return Invalid("NULL argument");
    if (size < 0) return Invalid("negative size");
    if (!(bound > 0)) return Invalid("bound must be positive");
    Eigen::Map<Eigen::VectorXd> map(v, size);
    map = stabdp::ClipGradient(map, bound);
    return Ok();
  });
}

stabdp_status stabdp_s_dropout(double* v, int64_t size, double rate,
                               uint64_t seed) {
  return Guard([&] {
    if (v == nullptr && size > 0) return Invalid("NULL argument");
    if (size < 0) return Invalid("negative size");
    if (!(rate >= 0 && rate <= 1)) return Invalid("rate must lie in [0, 1]");
    stabdp::Rng rng(seed);
    Eigen::Map<Eigen::VectorXd> map(v, size);
    map = stabdp::SDropout(map, rate, rng);
    return Ok();
  });
}

stabdp_status stabdp_select_features(const double* w, int64_t size,
                                     double threshold, uint8_t* selected) {
  return Guard([&] {
    if ((w == nullptr || selected == nullptr) && size > 0) {
      return Invalid("NULL argument");
    }
    if (size < 0) return Invalid("negative size");
    Eigen::VectorXd weights = Eigen::Map<const Eigen::VectorXd>(w, size);
    auto decision = stabdp::SelectFeatures(weights, threshold);
    if (!decision.ok()) return Fail(decision.status());
    std::copy(decision->decisions.begin(), decision->decisions.end(),
              selected);
    return Ok();
  });
}

stabdp_status stabdp_flip_probability(double threshold, double w_i,
                                      double epsilon, double lambda,
                                      double eta, int64_t n, double lipschitz,
                                      double kappa, double* out) {
  return Guard([&] {
    if (out == nullptr) return Invalid("NULL argument");
    stabdp::FlipParams params{epsilon, lambda, eta, n, lipschitz, kappa};
    auto p = stabdp::FlipProbability(threshold, w_i, params);
    if (!p.ok()) return Fail(p.status());
    *out = *p;
    return Ok();
  });
}

stabdp_status stabdp_f1(const uint8_t* a, const uint8_t* b, int64_t size,
                        double* out) {
  return Guard([&] {
    if (out == nullptr || ((a == nullptr || b == nullptr) && size > 0)) {
      return Invalid("NULL argument");
    }
    if (size < 0) return Invalid("negative size");
    auto f1 = stabdp::F1Similarity(ToDecision(a, size), ToDecision(b, size));
    if (!f1.ok()) return Fail(f1.status());
    *out = *f1;
    return Ok();
  });
}

stabdp_status stabdp_run_command(const char* command, const char* config_json,
                                 char** result_json) {
  return Guard([&] {
    if (command == nullptr || config_json == nullptr ||
        result_json == nullptr) {
      return Invalid("NULL argument");
    }
    auto config = stabdp::ParseExperimentConfig(config_json);
    if (!config.ok()) return Fail(config.status());
    auto result = stabdp::RunExperimentCommand(command, *config);
    if (!result.ok()) return Fail(result.status());
    *result_json = CopyString(*result);
    return Ok();
  });
}

stabdp_status stabdp_config_canonical(const char* config_json,
                                      char** canonical_json) {
  return Guard([&] {
    if (config_json == nullptr || canonical_json == nullptr) {
      return Invalid("NULL argument");
    }
    auto config = stabdp::ParseExperimentConfig(config_json);
    if (!config.ok()) return Fail(config.status());
    *canonical_json = CopyString(stabdp::ExperimentConfigJson(*config));
    return Ok();
  });
}

stabdp_status stabdp_run_verify(const char* suite, uint64_t seed,
                                char** report_json, int* passed) {
  return Guard([&] {
    if (suite == nullptr || report_json == nullptr || passed == nullptr) {
      return Invalid("NULL argument");
    }
    auto outcome = stabdp::RunVerifySuite(suite, seed);
    if (!outcome.ok()) return Fail(outcome.status());
    *report_json = CopyString(outcome->json);
    *passed = outcome->passed ? 1 : 0;
    return Ok();
  });
}

stabdp_status stabdp_fetch_dataset(const char* name, const char* url,
                                   const char* sha256, const char* cache_dir,
                                   int offline, char** path) {
  return Guard([&] {
    if (name == nullptr || path == nullptr) return Invalid("NULL argument");
    stabdp::FetchOptions options;
    options.name = name;
    if (url != nullptr) options.url = url;
    if (sha256 != nullptr) options.sha256 = sha256;
    if (cache_dir != nullptr) options.cache_dir = cache_dir;
    options.offline = offline != 0;
    auto fetched = stabdp::FetchDataset(options);
    if (!fetched.ok()) return Fail(fetched.status());
    *path = CopyString(*fetched);
    return Ok();
  });
}

}  // extern "C"
