// Copyright 2026 The Shuffle Leakage Authors
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

// Command-line experiment runner. Exit codes: 0 success, 2 config error,
// 3 resource limit, 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "shuffle_leakage/experiment.h"

namespace {

namespace sl = shuffle_leakage;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

int ExitCodeFor(const absl::Status& status) {
  if (absl::IsResourceExhausted(status)) return kExitResource;
  if (absl::IsInvalidArgument(status) || absl::IsNotFound(status) ||
      absl::IsFailedPrecondition(status)) {
    return kExitConfig;
  }
  return kExitFailure;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int Emit(const std::string& csv, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << csv;
    return std::cout ? kExitOk : kExitFailure;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << csv;
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int Run(const std::vector<sl::ExperimentConfig>& configs,
        const sl::RunOptions& options, const std::string& out_path) {
  absl::StatusOr<std::string> csv = sl::RunExperiments(configs, options);
  if (!csv.ok()) {
    std::cerr << "error: " << csv.status().message() << "\n";
    return ExitCodeFor(csv.status());
  }
  return Emit(*csv, out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leakage of shuffled messages: exact, Monte Carlo, asymptotic "
               "and bound estimates written as CSV."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  int64_t samples = 0;
  uint64_t seed = 0;
  int workers = 0;

  CLI::App* run = app.add_subcommand("run", "Run one experiment config.");
  run->add_option("--config", config_path, "JSON config path")->required();
  run->add_option("--out", out_path, "CSV output path (default stdout)");
  CLI::Option* samples_opt =
      run->add_option("--samples", samples, "Override Monte Carlo samples")
          ->check(CLI::PositiveNumber);
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "Override Monte Carlo seed");
  run->add_option("--workers", workers, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  CLI::App* validate =
      app.add_subcommand("validate", "Print diagnostics for a config.");
  validate->add_option("--config", config_path, "JSON config path")
      ->required();

  std::string preset_name;
  CLI::App* preset = app.add_subcommand("preset", "Run a named preset.");
  preset->add_option("name", preset_name, "fig1, fig2, or fig3")
      ->required()
      ->check(CLI::IsMember(sl::PresetNames()));
  preset->add_option("--out", out_path, "CSV output path (default stdout)");
  preset->add_option("--workers", workers, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  sl::RunOptions options;
  options.workers = workers;

  if (*validate || *run) {
    absl::StatusOr<std::string> text = ReadFile(config_path);
    if (!text.ok()) {
      std::cerr << "error: " << text.status().message() << "\n";
      return kExitConfig;
    }
    const std::vector<sl::Diagnostic> diagnostics = sl::ValidateConfig(*text);
    bool resource_only = !diagnostics.empty();
    for (const sl::Diagnostic& d : diagnostics) {
      std::cerr << (d.field.empty() ? "<config>" : d.field) << ": "
                << d.message << "\n";
      if (d.message.rfind("resource limit", 0) != 0) resource_only = false;
    }
    if (*validate) {
      if (diagnostics.empty()) std::cout << "ok\n";
      return diagnostics.empty()
                 ? kExitOk
                 : (resource_only ? kExitResource : kExitConfig);
    }
    if (!diagnostics.empty()) {
      return resource_only ? kExitResource : kExitConfig;
    }
    absl::StatusOr<sl::ExperimentConfig> config = sl::ParseConfig(*text);
    if (!config.ok()) {
      std::cerr << "error: " << config.status().message() << "\n";
      return ExitCodeFor(config.status());
    }
    if (samples_opt->count() > 0) options.samples = samples;
    if (seed_opt->count() > 0) options.seed = seed;
    return Run({*config}, options, out_path);
  }

  absl::StatusOr<std::vector<sl::ExperimentConfig>> configs =
      sl::PresetConfigs(preset_name);
  if (!configs.ok()) {
    std::cerr << "error: " << configs.status().message() << "\n";
    return ExitCodeFor(configs.status());
  }
  return Run(*configs, options, out_path);
}
