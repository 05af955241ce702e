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

// Config-driven experiment runner producing CSV tables.
//
// A config is one JSON object:
//
//   {
//     "series": "zipf-vs-uniform",        // optional row label
//     "mode": "shuffle_only" | "shuffle_dp",
//     "quantity": "IK" | "IY1" | "IX1",
//     "P": <distribution>, "Q": <distribution>, "q_equals_p": bool,
//     "family": [<distribution>, ...],     // shuffle_only, users 2..n
//     "mechanism": <mechanism>,            // shuffle_dp
//     "prior": <distribution>,             // shuffle_dp, default uniform
//     "inputs": ["1", "2", ...],           // shuffle_dp IK, all n inputs
//     "n_grid": [8, 16, ...],
//     "samples": 100000, "seed": 1,
//     "method": "exact" | "mc" | "asym" | "bounds" | "all"
//               (or a list of these),
//     "max_states": 1e7
//   }
//
// Distribution literals: {"type":"uniform","m":4},
// {"type":"zipf","m":4,"alpha":0.7},
// {"type":"explicit","labels":[...],"probs":[...]}, and, for Q only,
// {"type":"optimal_q"} (the leakage-minimizing Q for the given P).
// Mechanism literals: {"type":"krr","k":4,"eps0":1.0} and
// {"type":"explicit","kernel":[[...],...]} with optional "inputs" and
// "outputs" label lists.
//
// Output columns: series,n,method,quantity,value_nats,stderr. Bounds are
// rows whose method names the bound (bound_ik, bound_unified, ...); stderr
// is empty except for Monte Carlo rows.

#ifndef SHUFFLE_LEAKAGE_EXPERIMENT_H_
#define SHUFFLE_LEAKAGE_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "shuffle_leakage/mechanisms.h"
#include "shuffle_leakage/probability.h"

namespace shuffle_leakage {

enum class Mode { kShuffleOnly, kShuffleDp };
enum class Quantity { kIK, kIY1, kIX1 };
enum class Method { kExact, kMc, kAsym, kBounds, kAll };

struct ExperimentConfig {
  std::string series;
  Mode mode = Mode::kShuffleOnly;
  Quantity quantity = Quantity::kIK;
  std::optional<Categorical> p;
  std::optional<Categorical> q;
  std::vector<Categorical> family;
  std::optional<Randomizer> mechanism;
  std::optional<Categorical> prior;
  std::vector<Label> inputs;
  std::vector<int> n_grid;
  int64_t samples = 100000;
  uint64_t seed = 1;
  // Requested methods in output order; kAll expands to every method the
  // mode and quantity support.
  std::vector<Method> methods = {Method::kAll};
  double max_states = 1e7;
};

struct Diagnostic {
  std::string field;  // JSON path, e.g. "mechanism.eps0" or "n_grid[2]"
  std::string message;
};

// Diagnostics for a config document; empty iff Run would start.
std::vector<Diagnostic> ValidateConfig(std::string_view json_text);

// Parses and validates. On failure the status message lists every
// diagnostic, one per line, as "<field>: <message>".
absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view json_text);

struct RunOptions {
  // Overrides of the config's sample count and seed.
  std::optional<int64_t> samples;
  std::optional<uint64_t> seed;
  // Threads used across n-grid points; 0 picks the hardware concurrency.
  int workers = 0;
};

inline constexpr std::string_view kCsvHeader =
    "series,n,method,quantity,value_nats,stderr";

// Runs configs in order and returns one CSV table (header plus rows).
// Output is byte-identical for identical configs and seeds regardless of
// `options.workers`. Exact methods beyond the enumeration ceiling fail with
// kResourceExhausted when requested explicitly and are skipped under
// Method::kAll.
absl::StatusOr<std::string> RunExperiments(
    std::span<const ExperimentConfig> configs, const RunOptions& options = {});

// Named reproductions of the published figures: "fig1", "fig2", "fig3".
std::vector<std::string> PresetNames();
absl::StatusOr<std::vector<ExperimentConfig>> PresetConfigs(
    std::string_view name);

}  // namespace shuffle_leakage

#endif  // SHUFFLE_LEAKAGE_EXPERIMENT_H_
