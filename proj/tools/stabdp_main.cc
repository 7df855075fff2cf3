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

// Command-line front end for the stabdp C API.
//
//   stabdp train  --config exp.json [--set model.lambda=0.1 ...]
//   stabdp sweep  --config exp.json [--set ...]
//   stabdp select --config exp.json [--set ...]
//   stabdp fetch  --config exp.json [--set fetch.offline=true ...]
//   stabdp verify [--config verify.json] [--suite all] [--seed 7]
//
// Overrides use dotted paths into the JSON config; the value is parsed as
// JSON when possible (numbers, booleans, arrays) and taken as a string
// otherwise.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stabdp/stabdp.h"

namespace {

using json = nlohmann::ordered_json;

// Exit codes: 0 success, 1 verification failed, 2 usage or config error,
// 3 runtime failure.
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed;
  std::string output_dir;
  std::string name;
};

bool ReadFile(const std::string& path, std::string* out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  *out = buffer.str();
  return true;
}

// Applies "a.b.c=value" to config, creating intermediate objects.
bool ApplyOverride(const std::string& assignment, json& config,
                   std::string* error) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    *error = "override '" + assignment + "' must look like path=value";
    return false;
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &config;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) {
      *error = "override path '" + path + "' has an empty component";
      return false;
    }
    if (!node->is_object()) {
      *error = "override path '" + path + "' descends into a non-object";
      return false;
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return true;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

// Loads the config file (or an empty object) and applies overrides.
bool BuildConfig(const CommonOptions& options, json* config) {
  *config = json::object();
  if (!options.config_path.empty()) {
    std::string text;
    if (!ReadFile(options.config_path, &text)) {
      std::cerr << "error: cannot read config " << options.config_path
                << "\n";
      return false;
    }
    try {
      *config = json::parse(text);
    } catch (const json::parse_error& e) {
      std::cerr << "error: " << options.config_path << ": " << e.what()
                << "\n";
      return false;
    }
  }
  std::string error;
  for (const std::string& o : options.overrides) {
    if (!ApplyOverride(o, *config, &error)) {
      std::cerr << "error: " << error << "\n";
      return false;
    }
  }
  if (options.seed) (*config)["seed"] = *options.seed;
  if (!options.output_dir.empty()) {
    (*config)["output_dir"] = options.output_dir;
  }
  if (!options.name.empty()) (*config)["name"] = options.name;
  return true;
}

int ReportFailure(stabdp_status status) {
  std::cerr << "error: " << stabdp_last_error() << "\n";
  return status == STABDP_INVALID_ARGUMENT ? kExitUsage : kExitRuntime;
}

int RunCommand(const std::string& command, const CommonOptions& options,
               bool print_config) {
  json config;
  if (!BuildConfig(options, &config)) return kExitUsage;
  const std::string text = config.dump();
  char* out = nullptr;
  if (print_config) {
    stabdp_status status = stabdp_config_canonical(text.c_str(), &out);
    if (status != STABDP_OK) return ReportFailure(status);
    std::cout << out << "\n";
    stabdp_string_free(out);
    return 0;
  }
  stabdp_status status =
      stabdp_run_command(command.c_str(), text.c_str(), &out);
  if (status != STABDP_OK) return ReportFailure(status);
  std::cout << out << "\n";
  stabdp_string_free(out);
  return 0;
}

int RunVerify(const CommonOptions& options, std::string suite,
              const std::string& report_path) {
  json config;
  if (!BuildConfig(options, &config)) return kExitUsage;
  // The verify config holds only a seed and a suite name.
  uint64_t seed = 0;
  for (const auto& item : config.items()) {
    if (item.key() == "seed") {
      if (!item.value().is_number_unsigned()) {
        std::cerr << "error: seed: expected a nonnegative integer\n";
        return kExitUsage;
      }
      seed = item.value().get<uint64_t>();
    } else if (item.key() == "suite") {
      if (!item.value().is_string()) {
        std::cerr << "error: suite: expected a string\n";
        return kExitUsage;
      }
      if (suite.empty()) suite = item.value().get<std::string>();
    } else {
      std::cerr << "error: " << item.key()
                << ": unknown field; expected seed or suite\n";
      return kExitUsage;
    }
  }
  if (suite.empty()) suite = "all";
  char* report = nullptr;
  int passed = 0;
  stabdp_status status =
      stabdp_run_verify(suite.c_str(), seed, &report, &passed);
  if (status != STABDP_OK) return ReportFailure(status);
  const json parsed = json::parse(report);
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
    out << report << "\n";
    if (!out) {
      std::cerr << "error: cannot write " << report_path << "\n";
      stabdp_string_free(report);
      return kExitRuntime;
    }
  }
  stabdp_string_free(report);
  for (const json& check : parsed["checks"]) {
    std::printf("%-4s %-44s bound=%-12.6g empirical=%-12.6g expected=%s\n",
                check["ok"].get<bool>() ? "ok" : "FAIL",
                check["name"].get<std::string>().c_str(),
                check["bound"].get<double>(), check["empirical"].get<double>(),
                check["expected_pass"].get<bool>() ? "pass" : "fail");
  }
  std::printf("%s\n", passed ? "verify: all checks passed"
                             : "verify: some checks failed");
  return passed ? 0 : kExitVerifyFailed;
}

void AddCommon(CLI::App* app, CommonOptions* options, bool config_required) {
  auto* config = app->add_option("-c,--config", options->config_path,
                                 "JSON config file")
                     ->check(CLI::ExistingFile);
  if (config_required) config->required();
  app->add_option("-s,--set", options->overrides,
                  "Override a config field: dotted.path=value (repeatable)");
  app->add_option("--seed", options->seed, "Override the master seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private ERM via stability-calibrated output "
               "perturbation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(stabdp_version()));

  CommonOptions options;
  bool print_config = false;
  std::string suite;
  std::string report_path;

  const char* descriptions[][2] = {
      {"train", "Train one model and release it privately"},
      {"sweep", "Accuracy over the lambda and epsilon grids"},
      {"select", "Private feature selection against the non-private model"},
      {"fetch", "Download and cache a public dataset"},
  };
  std::vector<CLI::App*> commands;
  for (const auto& [name, description] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, description);
    AddCommon(sub, &options, /*config_required=*/false);
    sub->add_option("-o,--output-dir", options.output_dir,
                    "Override output_dir");
    sub->add_option("-n,--name", options.name, "Override the result name");
    sub->add_flag("--print-config", print_config,
                  "Print the canonical config and exit");
    commands.push_back(sub);
  }
  CLI::App* verify =
      app.add_subcommand("verify", "Check the bounds against brute force");
  AddCommon(verify, &options, /*config_required=*/false);
  verify->add_option("--suite", suite,
                     "sensitivity, stability, privacy_error, dp, gradients, "
                     "flips or all");
  verify->add_option("--report", report_path, "Write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (verify->parsed()) return RunVerify(options, suite, report_path);
  for (CLI::App* sub : commands) {
    if (sub->parsed()) return RunCommand(sub->get_name(), options, print_config);
  }
  return kExitUsage;
}
