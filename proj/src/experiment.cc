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

#include "shuffle_leakage/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "shuffle_leakage/asymptotics.h"
#include "shuffle_leakage/exact_oracle.h"
#include "shuffle_leakage/montecarlo.h"

namespace shuffle_leakage {
namespace {

using json = nlohmann::json;

const char* ModeName(Mode mode) {
  return mode == Mode::kShuffleOnly ? "shuffle_only" : "shuffle_dp";
}

const char* QuantityName(Quantity q) {
  switch (q) {
    case Quantity::kIK:
      return "IK";
    case Quantity::kIY1:
      return "IY1";
    case Quantity::kIX1:
      return "IX1";
  }
  return "";
}

const char* MethodName(Method m) {
  switch (m) {
    case Method::kExact:
      return "exact";
    case Method::kMc:
      return "mc";
    case Method::kAsym:
      return "asym";
    case Method::kBounds:
      return "bounds";
    case Method::kAll:
      return "all";
  }
  return "";
}

// Methods that produce rows for a config, in output order.
std::vector<Method> SupportedMethods(const ExperimentConfig& c) {
  if (c.mode == Mode::kShuffleOnly) {
    if (!c.family.empty()) return {Method::kExact, Method::kBounds};
    if (c.quantity == Quantity::kIK) {
      return {Method::kExact, Method::kMc, Method::kAsym, Method::kBounds};
    }
    return {Method::kExact, Method::kMc, Method::kAsym};
  }
  switch (c.quantity) {
    case Quantity::kIX1:
      return {Method::kExact, Method::kMc, Method::kAsym, Method::kBounds};
    case Quantity::kIK:
      if (c.inputs.empty()) return {Method::kBounds};
      return {Method::kExact, Method::kBounds};
    case Quantity::kIY1:
      return {Method::kBounds};
  }
  return {};
}

std::vector<Method> ExpandMethods(const ExperimentConfig& c) {
  const std::vector<Method> supported = SupportedMethods(c);
  std::vector<Method> out;
  for (Method m : c.methods) {
    if (m == Method::kAll) {
      for (Method s : supported) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
      }
    } else if (std::find(out.begin(), out.end(), m) == out.end()) {
      out.push_back(m);
    }
  }
  return out;
}

bool ExplicitlyRequested(const ExperimentConfig& c, Method m) {
  return std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end();
}

size_t PositiveCount(const Categorical& d) {
  return static_cast<size_t>(std::count_if(
      d.probs().begin(), d.probs().end(), [](double p) { return p > 0.0; }));
}

size_t ActiveUnion(const Categorical& a, const Categorical& b) {
  AlignedPair pair = Align(a, b);
  size_t u = 0;
  for (size_t i = 0; i < pair.labels.size(); ++i) {
    if (pair.first[i] > 0.0 || pair.second[i] > 0.0) ++u;
  }
  return u;
}

size_t FamilyAlphabetSize(const ExperimentConfig& c) {
  std::vector<Label> labels = c.p->labels();
  for (const Categorical& f : c.family) {
    for (const Label& l : f.labels()) {
      if (std::find(labels.begin(), labels.end(), l) == labels.end()) {
        labels.push_back(l);
      }
    }
  }
  return labels.size();
}

double PermutationStates(size_t symbols, int n) {
  return std::pow(static_cast<double>(symbols), n) * std::tgamma(n + 1.0);
}

double HistogramStates(size_t symbols, int n) {
  return static_cast<double>(symbols) *
         CountCompositions(n, static_cast<int64_t>(symbols));
}

// Enumerated states for the exact method at `n`, mirroring the oracles.
double ExactStates(const ExperimentConfig& c, int n) {
  if (c.mode == Mode::kShuffleOnly) {
    if (!c.family.empty()) {
      const size_t symbols = FamilyAlphabetSize(c);
      return c.quantity == Quantity::kIK ? PermutationStates(symbols, n)
                                         : HistogramStates(symbols + 1, n);
    }
    if (c.quantity == Quantity::kIK) {
      return static_cast<double>(PositiveCount(*c.p)) *
             CountCompositions(n - 1, static_cast<int64_t>(PositiveCount(*c.q)));
    }
    if (*c.p == *c.q) return 0.0;  // closed form
    return HistogramStates(ActiveUnion(*c.p, *c.q), n);
  }
  const size_t d = c.mechanism->num_outputs();
  if (c.quantity == Quantity::kIK) return PermutationStates(d, n);
  return HistogramStates(d, n);
}

// ---------------------------------------------------------------------------
// Parsing.

class ConfigParser {
 public:
  explicit ConfigParser(std::vector<Diagnostic>& diagnostics)
      : diagnostics_(diagnostics) {}

  void Error(std::string field, std::string message) {
    diagnostics_.push_back({std::move(field), std::move(message)});
  }

  std::optional<int64_t> Integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) {
      Error(path, "expected an integer");
      return std::nullopt;
    }
    return j.get<int64_t>();
  }

  std::optional<double> Number(const json& j, const std::string& path) {
    if (!j.is_number()) {
      Error(path, "expected a number");
      return std::nullopt;
    }
    return j.get<double>();
  }

  std::optional<std::vector<Label>> Labels(const json& j,
                                           const std::string& path) {
    if (!j.is_array()) {
      Error(path, "expected a list of labels");
      return std::nullopt;
    }
    std::vector<Label> labels;
    for (size_t i = 0; i < j.size(); ++i) {
      if (j[i].is_string()) {
        labels.push_back(j[i].get<std::string>());
      } else if (j[i].is_number_integer()) {
        labels.push_back(std::to_string(j[i].get<int64_t>()));
      } else {
        Error(absl::StrCat(path, "[", i, "]"), "expected a string label");
        return std::nullopt;
      }
    }
    return labels;
  }

  std::optional<std::vector<double>> Numbers(const json& j,
                                             const std::string& path) {
    if (!j.is_array()) {
      Error(path, "expected a list of numbers");
      return std::nullopt;
    }
    std::vector<double> values;
    for (size_t i = 0; i < j.size(); ++i) {
      std::optional<double> v = Number(j[i], absl::StrCat(path, "[", i, "]"));
      if (!v) return std::nullopt;
      values.push_back(*v);
    }
    return values;
  }

  template <typename T>
  std::optional<T> Check(absl::StatusOr<T> value, const std::string& path) {
    if (!value.ok()) {
      Error(path, std::string(value.status().message()));
      return std::nullopt;
    }
    return *std::move(value);
  }

  // `optimal_for` enables {"type":"optimal_q"}.
  std::optional<Categorical> Distribution(
      const json& j, const std::string& path,
      const std::optional<Categorical>& optimal_for = std::nullopt) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
      Error(path, "expected a distribution object with a string \"type\"");
      return std::nullopt;
    }
    const std::string type = j["type"].get<std::string>();
    auto field = [&](const char* name) -> const json* {
      if (!j.contains(name)) {
        Error(absl::StrCat(path, ".", name), "missing field");
        return nullptr;
      }
      return &j[name];
    };
    if (type == "uniform") {
      const json* m = field("m");
      if (!m) return std::nullopt;
      std::optional<int64_t> mv = Integer(*m, path + ".m");
      if (!mv) return std::nullopt;
      return Check(MakeUniform(static_cast<int>(*mv)), path + ".m");
    }
    if (type == "zipf") {
      const json* m = field("m");
      const json* alpha = field("alpha");
      if (!m || !alpha) return std::nullopt;
      std::optional<int64_t> mv = Integer(*m, path + ".m");
      std::optional<double> av = Number(*alpha, path + ".alpha");
      if (!mv || !av) return std::nullopt;
      return Check(MakeZipf(static_cast<int>(*mv), *av), path);
    }
    if (type == "explicit") {
      const json* labels = field("labels");
      const json* probs = field("probs");
      if (!labels || !probs) return std::nullopt;
      std::optional<std::vector<Label>> lv = Labels(*labels, path + ".labels");
      std::optional<std::vector<double>> pv = Numbers(*probs, path + ".probs");
      if (!lv || !pv) return std::nullopt;
      return Check(Categorical::Create(*lv, *pv), path);
    }
    if (type == "optimal_q") {
      if (!optimal_for) {
        Error(path, "\"optimal_q\" is only valid for Q when P is given");
        return std::nullopt;
      }
      return Check(OptimalQ(*optimal_for), path);
    }
    Error(path + ".type", absl::StrCat("unknown distribution type \"", type, "\""));
    return std::nullopt;
  }

  std::optional<Randomizer> Mechanism(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
      Error(path, "expected a mechanism object with a string \"type\"");
      return std::nullopt;
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "krr") {
      if (!j.contains("k")) Error(path + ".k", "missing field");
      if (!j.contains("eps0")) Error(path + ".eps0", "missing field");
      if (!j.contains("k") || !j.contains("eps0")) return std::nullopt;
      std::optional<int64_t> k = Integer(j["k"], path + ".k");
      std::optional<double> eps0 = Number(j["eps0"], path + ".eps0");
      if (!k || !eps0) return std::nullopt;
      return Check(MakeKrr(static_cast<int>(*k), *eps0), path);
    }
    if (type == "explicit") {
      if (!j.contains("kernel") || !j["kernel"].is_array() ||
          j["kernel"].empty()) {
        Error(path + ".kernel", "expected a nonempty list of rows");
        return std::nullopt;
      }
      std::vector<std::vector<double>> kernel;
      for (size_t x = 0; x < j["kernel"].size(); ++x) {
        std::optional<std::vector<double>> row =
            Numbers(j["kernel"][x], absl::StrCat(path, ".kernel[", x, "]"));
        if (!row) return std::nullopt;
        kernel.push_back(*std::move(row));
      }
      auto default_labels = [](size_t count) {
        std::vector<Label> labels;
        for (size_t i = 1; i <= count; ++i) labels.push_back(std::to_string(i));
        return labels;
      };
      std::vector<Label> inputs = default_labels(kernel.size());
      std::vector<Label> outputs = default_labels(kernel[0].size());
      if (j.contains("inputs")) {
        std::optional<std::vector<Label>> v = Labels(j["inputs"], path + ".inputs");
        if (!v) return std::nullopt;
        inputs = *v;
      }
      if (j.contains("outputs")) {
        std::optional<std::vector<Label>> v =
            Labels(j["outputs"], path + ".outputs");
        if (!v) return std::nullopt;
        outputs = *v;
      }
      return Check(Randomizer::Create(inputs, outputs, kernel), path);
    }
    Error(path + ".type", absl::StrCat("unknown mechanism type \"", type, "\""));
    return std::nullopt;
  }

  std::optional<ExperimentConfig> Parse(const json& root);

 private:
  std::vector<Diagnostic>& diagnostics_;
};

std::optional<ExperimentConfig> ConfigParser::Parse(const json& root) {
  if (!root.is_object()) {
    Error("", "config must be a JSON object");
    return std::nullopt;
  }
  static const std::vector<std::string> kKnown = {
      "series", "mode",   "quantity", "P",       "Q",      "q_equals_p",
      "family", "mechanism", "prior", "inputs",  "n_grid", "samples",
      "seed",   "method", "max_states"};
  for (const auto& item : root.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), item.key()) == kKnown.end()) {
      Error(item.key(), "unknown field");
    }
  }

  ExperimentConfig c;
  const size_t errors_before = diagnostics_.size();
  if (root.contains("series")) {
    if (root["series"].is_string()) {
      c.series = root["series"].get<std::string>();
      if (c.series.find_first_of(",\"\n") != std::string::npos) {
        Error("series", "must not contain commas, quotes, or newlines");
      }
    } else {
      Error("series", "expected a string");
    }
  }

  if (!root.contains("mode") || !root["mode"].is_string()) {
    Error("mode", "expected \"shuffle_only\" or \"shuffle_dp\"");
  } else if (root["mode"] == "shuffle_only") {
    c.mode = Mode::kShuffleOnly;
  } else if (root["mode"] == "shuffle_dp") {
    c.mode = Mode::kShuffleDp;
  } else {
    Error("mode", "expected \"shuffle_only\" or \"shuffle_dp\"");
  }

  if (!root.contains("quantity") || !root["quantity"].is_string()) {
    Error("quantity", "expected \"IK\", \"IY1\", or \"IX1\"");
  } else if (root["quantity"] == "IK") {
    c.quantity = Quantity::kIK;
  } else if (root["quantity"] == "IY1") {
    c.quantity = Quantity::kIY1;
  } else if (root["quantity"] == "IX1") {
    c.quantity = Quantity::kIX1;
  } else {
    Error("quantity", "expected \"IK\", \"IY1\", or \"IX1\"");
  }

  if (root.contains("method")) {
    const json& m = root["method"];
    std::vector<std::pair<std::string, std::string>> names;
    if (m.is_string()) {
      names.emplace_back("method", m.get<std::string>());
    } else if (m.is_array() && !m.empty()) {
      for (size_t i = 0; i < m.size(); ++i) {
        const std::string path = absl::StrCat("method[", i, "]");
        if (m[i].is_string()) {
          names.emplace_back(path, m[i].get<std::string>());
        } else {
          Error(path, "expected a method name");
        }
      }
    } else {
      Error("method", "expected a method name or a nonempty list of them");
    }
    c.methods.clear();
    for (const auto& [path, name] : names) {
      static const std::vector<std::pair<std::string, Method>> kMethods = {
          {"exact", Method::kExact}, {"mc", Method::kMc},
          {"asym", Method::kAsym},   {"bounds", Method::kBounds},
          {"all", Method::kAll}};
      auto it = std::find_if(kMethods.begin(), kMethods.end(),
                             [&](const auto& e) { return e.first == name; });
      if (it == kMethods.end()) {
        Error(path, absl::StrCat("unknown method \"", name,
                                 "\"; expected exact, mc, asym, bounds, or all"));
      } else {
        c.methods.push_back(it->second);
      }
    }
    if (c.methods.empty()) c.methods = {Method::kAll};
  }

  if (root.contains("samples")) {
    std::optional<int64_t> v = Integer(root["samples"], "samples");
    if (v && *v < 1) Error("samples", "must be >= 1");
    if (v) c.samples = *v;
  }
  if (root.contains("seed")) {
    if (root["seed"].is_number_unsigned()) {
      c.seed = root["seed"].get<uint64_t>();
    } else {
      Error("seed", "expected a nonnegative integer");
    }
  }
  if (root.contains("max_states")) {
    std::optional<double> v = Number(root["max_states"], "max_states");
    if (v && !(*v > 0.0)) Error("max_states", "must be positive");
    if (v) c.max_states = *v;
  }
  if (root.contains("n_grid")) {
    const json& grid = root["n_grid"];
    if (!grid.is_array() || grid.empty()) {
      Error("n_grid", "expected a nonempty list of user counts");
    } else {
      for (size_t i = 0; i < grid.size(); ++i) {
        const std::string path = absl::StrCat("n_grid[", i, "]");
        std::optional<int64_t> n = Integer(grid[i], path);
        if (!n) continue;
        if (*n < 1 || *n > std::numeric_limits<int>::max()) {
          Error(path, "user count must be a positive int");
          continue;
        }
        c.n_grid.push_back(static_cast<int>(*n));
      }
    }
  }

  if (root.contains("P")) c.p = Distribution(root["P"], "P");
  const bool q_equals_p =
      root.contains("q_equals_p") && root["q_equals_p"].is_boolean() &&
      root["q_equals_p"].get<bool>();
  if (root.contains("q_equals_p") && !root["q_equals_p"].is_boolean()) {
    Error("q_equals_p", "expected a boolean");
  }
  if (q_equals_p && root.contains("Q")) {
    Error("Q", "give either Q or \"q_equals_p\": true, not both");
  }
  if (root.contains("Q")) c.q = Distribution(root["Q"], "Q", c.p);
  if (q_equals_p && c.p) c.q = c.p;
  if (root.contains("family")) {
    const json& f = root["family"];
    if (!f.is_array() || f.empty()) {
      Error("family", "expected a nonempty list of distributions");
    } else {
      for (size_t i = 0; i < f.size(); ++i) {
        std::optional<Categorical> d =
            Distribution(f[i], absl::StrCat("family[", i, "]"));
        if (d) c.family.push_back(*std::move(d));
      }
    }
  }
  if (root.contains("mechanism")) {
    c.mechanism = Mechanism(root["mechanism"], "mechanism");
  }
  if (root.contains("prior")) c.prior = Distribution(root["prior"], "prior");
  if (root.contains("inputs")) {
    std::optional<std::vector<Label>> v = Labels(root["inputs"], "inputs");
    if (v && v->empty()) Error("inputs", "expected at least one input");
    if (v) c.inputs = *v;
  }
  if (diagnostics_.size() != errors_before) return std::nullopt;

  // Cross-field requirements.
  if (c.mode == Mode::kShuffleOnly) {
    for (const char* key : {"mechanism", "prior", "inputs"}) {
      if (root.contains(key)) Error(key, "only applies to shuffle_dp");
    }
    if (!c.p) Error("P", "shuffle_only requires P");
    if (c.family.empty()) {
      if (!c.q) Error("Q", "shuffle_only requires Q or \"q_equals_p\": true");
      if (c.quantity == Quantity::kIX1) {
        Error("quantity",
              "IX1 equals IY1 in the basic shuffle-only setting; use IY1");
      }
    } else {
      if (root.contains("Q") || q_equals_p) {
        Error("Q", "a heterogeneous family replaces Q");
      }
      if (c.quantity == Quantity::kIY1) c.quantity = Quantity::kIX1;
      const int n = static_cast<int>(c.family.size()) + 1;
      if (c.n_grid.empty()) {
        c.n_grid = {n};
      } else if (c.n_grid != std::vector<int>{n}) {
        Error("n_grid", absl::StrCat("a family of ", c.family.size(),
                                     " users fixes n_grid to [", n, "]"));
      }
    }
  } else {
    for (const char* key : {"P", "Q", "q_equals_p", "family"}) {
      if (root.contains(key)) Error(key, "only applies to shuffle_only");
    }
    if (!c.mechanism) {
      Error("mechanism", "shuffle_dp requires a mechanism");
    } else {
      if (!c.prior) {
        c.prior = *MakeUniform(static_cast<int>(c.mechanism->num_inputs()));
        c.prior = *Categorical::Create(c.mechanism->input_labels(),
                                       c.prior->probs());
      } else if (!ProjectOnto(*c.prior, c.mechanism->input_labels()).ok()) {
        Error("prior", "prior has mass outside the mechanism's inputs");
      }
      for (size_t i = 0; i < c.inputs.size(); ++i) {
        if (!c.mechanism->InputIndex(c.inputs[i])) {
          Error(absl::StrCat("inputs[", i, "]"),
                absl::StrCat("\"", c.inputs[i],
                             "\" is not an input of the mechanism"));
        }
      }
    }
    if (!c.inputs.empty()) {
      if (c.quantity != Quantity::kIK) {
        Error("inputs", "fixed inputs only apply to quantity IK");
      }
      const int n = static_cast<int>(c.inputs.size());
      if (c.n_grid.empty()) {
        c.n_grid = {n};
      } else if (c.n_grid != std::vector<int>{n}) {
        Error("n_grid", absl::StrCat(c.inputs.size(),
                                     " fixed inputs fix n_grid to [", n, "]"));
      }
    }
  }
  if (c.n_grid.empty()) Error("n_grid", "missing field");
  if (diagnostics_.size() != errors_before) return std::nullopt;

  const std::vector<Method> supported = SupportedMethods(c);
  for (size_t i = 0; i < c.methods.size(); ++i) {
    const Method m = c.methods[i];
    if (m == Method::kAll) continue;
    if (std::find(supported.begin(), supported.end(), m) == supported.end()) {
      Error(c.methods.size() == 1 ? "method" : absl::StrCat("method[", i, "]"),
            absl::StrCat("method ", MethodName(m), " is not available for ",
                         ModeName(c.mode), " ", QuantityName(c.quantity),
                         c.family.empty() ? "" : " with a family"));
    }
  }
  if (ExplicitlyRequested(c, Method::kExact)) {
    for (size_t i = 0; i < c.n_grid.size(); ++i) {
      const double states = ExactStates(c, c.n_grid[i]);
      if (states > c.max_states) {
        Error(absl::StrCat("n_grid[", i, "]"),
              absl::StrCat("resource limit: exact enumeration at n=",
                           c.n_grid[i], " needs ", states,
                           " states, above max_states=", c.max_states));
      }
    }
  }
  if (c.series.empty()) {
    c.series = absl::StrCat(ModeName(c.mode), "-", QuantityName(c.quantity));
  }
  if (diagnostics_.size() != errors_before) return std::nullopt;
  return c;
}

std::optional<ExperimentConfig> ParseInto(std::string_view text,
                                          std::vector<Diagnostic>& diagnostics) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const size_t byte = std::min<size_t>(e.byte, text.size());
    const size_t line =
        1 + std::count(text.begin(), text.begin() + byte, '\n');
    diagnostics.push_back(
        {"", absl::StrCat("JSON syntax error at line ", line, ": ", e.what())});
    return std::nullopt;
  }
  ConfigParser parser(diagnostics);
  return parser.Parse(root);
}

// ---------------------------------------------------------------------------
// Running.

struct Row {
  std::string method;
  double value = 0.0;
  std::optional<double> standard_error;
};

Randomizer IdentityRandomizer(const Categorical& p) {
  std::vector<std::vector<double>> kernel(
      p.size(), std::vector<double>(p.size(), 0.0));
  for (size_t i = 0; i < p.size(); ++i) kernel[i][i] = 1.0;
  return *Randomizer::Create(p.labels(), p.labels(), std::move(kernel));
}

absl::Status AppendExact(const ExperimentConfig& c, int n,
                         std::vector<Row>& rows) {
  const ExactConfig limits{c.max_states};
  absl::StatusOr<double> value;
  if (c.mode == Mode::kShuffleOnly && !c.family.empty()) {
    if (c.quantity == Quantity::kIK) {
      std::vector<Categorical> users = {*c.p};
      users.insert(users.end(), c.family.begin(), c.family.end());
      absl::StatusOr<Randomizer> r = RandomizerFromFamily(users);
      if (!r.ok()) return r.status();
      value = ExactIKZDp(*r, r->input_labels(), limits);
    } else {
      value = ExactInputLeakage(*c.p, IdentityRandomizer(*c.p), c.family,
                                limits);
    }
  } else if (c.mode == Mode::kShuffleOnly) {
    if (c.quantity == Quantity::kIK) {
      value = ExactIKZ(*c.p, *c.q, n, limits);
    } else if (*c.p == *c.q) {
      value = ClosedFormIY1PeqQ(*c.p, n);
    } else {
      value = ExactIY1Z(*c.p, *c.q, n, limits);
    }
  } else if (c.quantity == Quantity::kIK) {
    value = ExactIKZDp(*c.mechanism, c.inputs, limits);
  } else {
    value = ExactIX1Iid(*c.mechanism, *c.prior, n, limits);
  }
  if (!value.ok()) {
    if (absl::IsResourceExhausted(value.status()) &&
        !ExplicitlyRequested(c, Method::kExact)) {
      return absl::OkStatus();
    }
    return value.status();
  }
  rows.push_back({"exact", *value, std::nullopt});
  return absl::OkStatus();
}

absl::Status AppendMc(const ExperimentConfig& c, int n, const RunOptions& o,
                      std::vector<Row>& rows) {
  McOptions mc;
  mc.samples = o.samples.value_or(c.samples);
  mc.seed = o.seed.value_or(c.seed);
  mc.workers = 1;
  absl::StatusOr<EstimatorResult> r;
  if (c.mode == Mode::kShuffleOnly) {
    r = c.quantity == Quantity::kIK ? McIKZ(*c.p, *c.q, n, mc)
                                    : McIY1Z(*c.p, *c.q, n, mc);
  } else {
    r = McIX1ZIid(*c.mechanism, *c.prior, n, mc);
  }
  if (!r.ok()) return r.status();
  rows.push_back({"mc", r->estimate, r->standard_error});
  return absl::OkStatus();
}

absl::Status AppendAsym(const ExperimentConfig& c, int n,
                        std::vector<Row>& rows) {
  if (c.mode == Mode::kShuffleOnly) {
    absl::StatusOr<AsymptoticTerm> term = c.quantity == Quantity::kIK
                                              ? AsymIK(*c.p, *c.q)
                                              : AsymIY1(*c.p, *c.q);
    if (!term.ok()) return term.status();
    rows.push_back({"asym", term->Evaluate(n), std::nullopt});
    return absl::OkStatus();
  }
  absl::StatusOr<Categorical> q = OutputMarginal(*c.mechanism, *c.prior);
  if (!q.ok()) return q.status();
  absl::StatusOr<double> rate = LemmaRate(*c.prior, *c.mechanism, *q, n - 1);
  if (!rate.ok()) return rate.status();
  rows.push_back({"asym", *rate, std::nullopt});
  return absl::OkStatus();
}

absl::Status AppendBounds(const ExperimentConfig& c, int n,
                          std::vector<Row>& rows) {
  auto push = [&](std::string name, absl::StatusOr<double> v) -> absl::Status {
    if (!v.ok()) return v.status();
    if (std::isfinite(*v)) rows.push_back({std::move(name), *v, std::nullopt});
    return absl::OkStatus();
  };
  if (c.mode == Mode::kShuffleOnly) {
    std::vector<Categorical> users = {*c.p};
    if (c.family.empty()) {
      users.push_back(*c.q);
    } else {
      users.insert(users.end(), c.family.begin(), c.family.end());
    }
    if (c.quantity == Quantity::kIK) {
      absl::StatusOr<Randomizer> r = RandomizerFromFamily(users);
      if (!r.ok()) return r.status();
      return push("bound_ik", 2.0 * LdpEpsilon(*r));
    }
    absl::StatusOr<BlanketDecomposition> blanket = BlanketOfFamily(c.family);
    if (!blanket.ok()) return blanket.status();
    std::vector<Categorical> reduced(c.family.size(),
                                     blanket->generalized_blanket);
    return push("bound_blanket_reduction",
                ExactInputLeakage(*c.p, IdentityRandomizer(*c.p), reduced,
                                  ExactConfig{c.max_states}));
  }
  const double eps0 = LdpEpsilon(*c.mechanism);
  switch (c.quantity) {
    case Quantity::kIK:
      return push("bound_ik", BoundIKDp(eps0));
    case Quantity::kIY1:
      return push("bound_clone",
                  CloneBoundIY1(static_cast<int>(c.mechanism->num_outputs()),
                                eps0, n));
    case Quantity::kIX1:
      if (absl::Status s =
              push("bound_blanket", BlanketBoundIX(*c.prior, *c.mechanism, n));
          !s.ok()) {
        return s;
      }
      return push("bound_unified", BoundIXDp(eps0, n));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Row>> RowsAt(const ExperimentConfig& c, int n,
                                        const RunOptions& o) {
  std::vector<Row> rows;
  for (Method m : ExpandMethods(c)) {
    absl::Status s;
    switch (m) {
      case Method::kExact:
        s = AppendExact(c, n, rows);
        break;
      case Method::kMc:
        s = AppendMc(c, n, o, rows);
        break;
      case Method::kAsym:
        s = AppendAsym(c, n, rows);
        break;
      case Method::kBounds:
        s = AppendBounds(c, n, rows);
        break;
      case Method::kAll:
        break;
    }
    if (!s.ok()) return s;
  }
  return rows;
}

std::string FormatValue(double v) { return absl::StrFormat("%.17g", v); }

}  // namespace

std::vector<Diagnostic> ValidateConfig(std::string_view json_text) {
  std::vector<Diagnostic> diagnostics;
  ParseInto(json_text, diagnostics);
  return diagnostics;
}

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view json_text) {
  std::vector<Diagnostic> diagnostics;
  std::optional<ExperimentConfig> config = ParseInto(json_text, diagnostics);
  if (config && diagnostics.empty()) return *std::move(config);
  std::vector<std::string> lines;
  for (const Diagnostic& d : diagnostics) {
    lines.push_back(absl::StrCat(d.field.empty() ? "<config>" : d.field, ": ",
                                 d.message));
  }
  const bool resource = std::any_of(
      diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) {
        return d.message.rfind("resource limit", 0) == 0;
      });
  const std::string message = absl::StrJoin(lines, "\n");
  return resource && diagnostics.size() == 1
             ? absl::ResourceExhaustedError(message)
             : absl::InvalidArgumentError(message);
}

absl::StatusOr<std::string> RunExperiments(
    std::span<const ExperimentConfig> configs, const RunOptions& options) {
  struct Task {
    const ExperimentConfig* config;
    int n;
  };
  std::vector<Task> tasks;
  for (const ExperimentConfig& c : configs) {
    for (int n : c.n_grid) tasks.push_back({&c, n});
  }
  std::vector<absl::StatusOr<std::vector<Row>>> results(
      tasks.size(), absl::UnknownError("not run"));

  int workers = options.workers > 0
                    ? options.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp<int>(workers, 1, std::max<int>(1, tasks.size()));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      results[i] = RowsAt(*tasks[i].config, tasks[i].n, options);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work);
    for (std::thread& t : threads) t.join();
  }

  std::string csv = absl::StrCat(std::string(kCsvHeader), "\n");
  for (size_t i = 0; i < tasks.size(); ++i) {
    if (!results[i].ok()) return results[i].status();
    const ExperimentConfig& c = *tasks[i].config;
    for (const Row& row : *results[i]) {
      absl::StrAppend(&csv, c.series, ",", tasks[i].n, ",", row.method, ",",
                      QuantityName(c.quantity), ",", FormatValue(row.value),
                      ",",
                      row.standard_error ? FormatValue(*row.standard_error)
                                         : "",
                      "\n");
    }
  }
  return csv;
}

std::vector<std::string> PresetNames() { return {"fig1", "fig2", "fig3"}; }

absl::StatusOr<std::vector<ExperimentConfig>> PresetConfigs(
    std::string_view name) {
  std::vector<std::string> documents;
  const std::string small_grid =
      "[8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192]";
  if (name == "fig1") {
    for (const auto& [series, p] :
         std::vector<std::pair<std::string, std::string>>{
             {"fig1a-uniform4", R"({"type":"uniform","m":4})"},
             {"fig1b-zipf4-0.7", R"({"type":"zipf","m":4,"alpha":0.7})"}}) {
      documents.push_back(absl::StrCat(
          R"({"series":")", series, R"(","mode":"shuffle_only",)",
          R"("quantity":"IY1","P":)", p, R"(,"q_equals_p":true,)",
          R"("method":["exact","asym"],"n_grid":)", small_grid, "}"));
    }
  } else if (name == "fig2") {
    const std::string zipf = R"({"type":"zipf","m":4,"alpha":0.7})";
    const std::string grid = "[50, 100, 200, 500, 1000, 2000]";
    const std::string common = absl::StrCat(
        R"("mode":"shuffle_only","P":)", zipf,
        R"(,"method":["mc","asym"],"samples":100000,"seed":1,"n_grid":)", grid);
    documents.push_back(absl::StrCat(
        R"({"series":"fig2a-uniformQ","quantity":"IK","Q":{"type":"uniform","m":4},)",
        common, "}"));
    documents.push_back(absl::StrCat(
        R"({"series":"fig2a-uniformQ","quantity":"IY1","Q":{"type":"uniform","m":4},)",
        common, "}"));
    documents.push_back(absl::StrCat(
        R"({"series":"fig2b-Q=P","quantity":"IY1","q_equals_p":true,)", common,
        "}"));
    documents.push_back(absl::StrCat(
        R"({"series":"fig2b-optimalQ","quantity":"IY1","Q":{"type":"optimal_q"},)",
        common, "}"));
  } else if (name == "fig3") {
    documents.push_back(
        R"({"series":"fig3-krr4-eps1","mode":"shuffle_dp","quantity":"IX1",)"
        R"("mechanism":{"type":"krr","k":4,"eps0":1.0},)"
        R"("prior":{"type":"uniform","m":4},)"
        R"("method":["mc","asym","bounds"],"samples":100000,"seed":1,)"
        R"("n_grid":[16, 32, 64, 128, 256, 512, 1024]})");
  } else {
    return absl::NotFoundError(absl::StrCat(
        "unknown preset \"", std::string(name), "\"; expected one of ",
        absl::StrJoin(PresetNames(), ", ")));
  }
  std::vector<ExperimentConfig> configs;
  for (const std::string& doc : documents) {
    absl::StatusOr<ExperimentConfig> c = ParseConfig(doc);
    if (!c.ok()) return c.status();
    configs.push_back(*std::move(c));
  }
  return configs;
}

}  // namespace shuffle_leakage
