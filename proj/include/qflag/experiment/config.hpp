// Copyright 2026 The qflag Authors
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


#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qflag/code513/code.hpp"
#include "qflag/fit/fit.hpp"

namespace qflag {

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Prep, PrepPlusIdles, PrepPlusStabilizer, IdealProtocol, HardwareProtocol, Tomo, Fit, Route };

inline constexpr std::array<std::pair<ExperimentKind, std::string_view>, 8> kExperimentKinds{{
    {ExperimentKind::Prep, "prep"},
    {ExperimentKind::PrepPlusIdles, "prep-plus-idles"},
    {ExperimentKind::PrepPlusStabilizer, "prep-plus-stabilizer"},
    {ExperimentKind::IdealProtocol, "ideal-protocol"},
    {ExperimentKind::HardwareProtocol, "hardware-protocol"},
    {ExperimentKind::Tomo, "tomo"},
    {ExperimentKind::Fit, "fit"},
    {ExperimentKind::Route, "route"},
}};

inline std::string_view experiment_kind_name(ExperimentKind k) {
  for (const auto& [kind, name] : kExperimentKinds) {
    if (kind == k) return name;
  }
  return "";
}

inline ExperimentKind experiment_kind_from_name(std::string_view name) {
  for (const auto& [kind, n] : kExperimentKinds) {
    if (n == name) return kind;
  }
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

/// CLI subcommand that runs a given kind.
inline std::string_view command_for(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Prep:
    case ExperimentKind::PrepPlusIdles:
    case ExperimentKind::PrepPlusStabilizer: return "simulate";
    case ExperimentKind::IdealProtocol:
    case ExperimentKind::HardwareProtocol: return "protocol";
    case ExperimentKind::Tomo: return "tomo";
    case ExperimentKind::Fit: return "fit";
    case ExperimentKind::Route: return "route";
  }
  return "";
}

inline bool is_prep_kind(ExperimentKind k) {
  return k == ExperimentKind::Prep || k == ExperimentKind::PrepPlusIdles || k == ExperimentKind::PrepPlusStabilizer;
}

inline bool is_protocol_kind(ExperimentKind k) {
  return k == ExperimentKind::IdealProtocol || k == ExperimentKind::HardwareProtocol;
}

/// Named Melbourne layouts.
inline std::optional<std::vector<int>> named_layout(std::string_view name) {
  if (name == "A") return std::vector<int>{1, 2, 3, 11, 12};
  if (name == "B") return std::vector<int>{11, 12, 13, 1, 2};
  if (name == "C") return std::vector<int>{11, 12, 13, 1, 2, 3, 4};
  return std::nullopt;
}

struct NoiseToggles {
  bool gates = true;
  bool idle = true;
  bool readout = true;
};

/// Uniform gate depolarizing noise that replaces the device's noise.
struct DepolarizingNoise {
  double p1 = 0;
  double p2 = 0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Prep;
  std::string device;       // device name under the data directory, or a path
  std::string layout_name;  // "A", "B", "C"; empty when explicit or unset
  std::vector<int> layout;  // physical qubits, resolved from layout_name if set
  std::string prep;         // preparation variant
  std::string circuit;      // route/tomo: built-in name, "fixture:<name>" or a .qasm path
  std::string input;        // fit: report holding a density matrix
  std::vector<int> data_qubits;
  std::vector<int> ancillas;
  std::string condition;  // condition[i] is demanded of ancillas[i]
  std::uint64_t shots = 8192;
  std::optional<std::uint64_t> calibration_shots;  // defaults to shots
  std::uint64_t seed = 1;
  int replicas = 3;
  int workers = 1;
  NoiseToggles noise;
  std::optional<DepolarizingNoise> depolarizing;
  bool mitigation = true;
  bool fit = false;
  std::pair<int, int> fault_qubits{1, 5};  // 1-based
  std::string objective = "spectral-norm";
  int idle_cycles = 106;
  int first_generator = 0;
  bool include_counts = false;
  std::string out;
};

/// Directories searched for shipped data: $QFLAG_DATA_DIR, then the build's
/// source data directory.
inline std::vector<std::filesystem::path> data_dirs() {
  std::vector<std::filesystem::path> dirs;
  if (const char* env = std::getenv("QFLAG_DATA_DIR"); env != nullptr && *env != '\0') dirs.emplace_back(env);
#ifdef QFLAG_DATA_DIR
  dirs.emplace_back(QFLAG_DATA_DIR);
#endif
  return dirs;
}

/// Resolves a device reference: an existing path, else <data>/devices/<name>
/// with or without a .json suffix.
inline std::filesystem::path resolve_device_path(const std::string& ref) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(ref)) return fs::path(ref);
  for (const fs::path& d : data_dirs()) {
    for (const std::string& cand : {ref, ref + ".json"}) {
      const fs::path p = d / "devices" / cand;
      if (fs::is_regular_file(p)) return p;
    }
  }
  throw ConfigError("device file '" + ref + "' not found");
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys{
      "experiment", "device",     "layout",       "prep",        "circuit",        "input",
      "data_qubits", "ancillas",  "condition",    "shots",       "calibration_shots", "seed",
      "replicas",   "workers",    "noise",        "depolarizing", "mitigation",     "fit",
      "fault_qubits", "objective", "idle_cycles", "first_generator", "include_counts", "out"};
  return keys;
}

template <class T>
T config_get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

inline std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad ") + what + " '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string("empty ") + what);
  return out;
}

}  // namespace detail

/// Sets the layout from a name ("A", "B", "C") or a comma-separated list.
inline void set_layout(ExperimentConfig& cfg, const std::string& text) {
  if (auto named = named_layout(text)) {
    cfg.layout_name = text;
    cfg.layout = *named;
    return;
  }
  cfg.layout_name.clear();
  cfg.layout = detail::parse_int_list(text, "layout");
}

inline void set_fault_qubits(ExperimentConfig& cfg, const std::string& text) {
  const std::vector<int> q = detail::parse_int_list(text, "fault qubit pair");
  if (q.size() != 2) throw ConfigError("fault qubit pair needs two entries");
  cfg.fault_qubits = {q[0], q[1]};
}

/// Reads the JSON configuration. Unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!detail::config_keys().count(k)) throw ConfigError("unknown config field '" + k + "'");
  }
  using detail::config_get;
  ExperimentConfig c;
  if (j.contains("experiment")) c.kind = experiment_kind_from_name(config_get<std::string>(j, "experiment"));
  if (j.contains("device")) c.device = config_get<std::string>(j, "device");
  if (j.contains("layout")) {
    if (j["layout"].is_string()) {
      set_layout(c, j["layout"].get<std::string>());
    } else {
      c.layout = config_get<std::vector<int>>(j, "layout");
    }
  }
  if (j.contains("prep")) c.prep = config_get<std::string>(j, "prep");
  if (j.contains("circuit")) c.circuit = config_get<std::string>(j, "circuit");
  if (j.contains("input")) c.input = config_get<std::string>(j, "input");
  if (j.contains("data_qubits")) c.data_qubits = config_get<std::vector<int>>(j, "data_qubits");
  if (j.contains("ancillas")) c.ancillas = config_get<std::vector<int>>(j, "ancillas");
  if (j.contains("condition")) c.condition = config_get<std::string>(j, "condition");
  if (j.contains("shots")) c.shots = config_get<std::uint64_t>(j, "shots");
  if (j.contains("calibration_shots")) c.calibration_shots = config_get<std::uint64_t>(j, "calibration_shots");
  if (j.contains("seed")) c.seed = config_get<std::uint64_t>(j, "seed");
  if (j.contains("replicas")) c.replicas = config_get<int>(j, "replicas");
  if (j.contains("workers")) c.workers = config_get<int>(j, "workers");
  if (j.contains("noise")) {
    const nlohmann::json& n = j["noise"];
    if (!n.is_object()) throw ConfigError("config field 'noise' must be an object");
    for (const auto& [k, v] : n.items()) {
      if (k != "gates" && k != "idle" && k != "readout") throw ConfigError("unknown noise toggle '" + k + "'");
    }
    if (n.contains("gates")) c.noise.gates = config_get<bool>(n, "gates");
    if (n.contains("idle")) c.noise.idle = config_get<bool>(n, "idle");
    if (n.contains("readout")) c.noise.readout = config_get<bool>(n, "readout");
  }
  if (j.contains("depolarizing") && !j["depolarizing"].is_null()) {
    const nlohmann::json& d = j["depolarizing"];
    if (!d.is_object()) throw ConfigError("config field 'depolarizing' must be an object");
    DepolarizingNoise dn;
    if (d.contains("p1")) dn.p1 = config_get<double>(d, "p1");
    if (d.contains("p2")) dn.p2 = config_get<double>(d, "p2");
    c.depolarizing = dn;
  }
  if (j.contains("mitigation")) c.mitigation = config_get<bool>(j, "mitigation");
  if (j.contains("fit")) c.fit = config_get<bool>(j, "fit");
  if (j.contains("fault_qubits")) {
    if (j["fault_qubits"].is_string()) {
      set_fault_qubits(c, j["fault_qubits"].get<std::string>());
    } else {
      const auto q = config_get<std::vector<int>>(j, "fault_qubits");
      if (q.size() != 2) throw ConfigError("fault qubit pair needs two entries");
      c.fault_qubits = {q[0], q[1]};
    }
  }
  if (j.contains("objective")) c.objective = config_get<std::string>(j, "objective");
  if (j.contains("idle_cycles")) c.idle_cycles = config_get<int>(j, "idle_cycles");
  if (j.contains("first_generator")) c.first_generator = config_get<int>(j, "first_generator");
  if (j.contains("include_counts")) c.include_counts = config_get<bool>(j, "include_counts");
  if (j.contains("out")) c.out = config_get<std::string>(j, "out");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

/// Qubits a kind needs, or -1 when it depends on the circuit.
inline int layout_width(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Prep:
    case ExperimentKind::PrepPlusIdles: return 5;
    case ExperimentKind::PrepPlusStabilizer:
    case ExperimentKind::IdealProtocol: return 7;
    case ExperimentKind::HardwareProtocol: return 11;
    default: return -1;
  }
}

/// Fills kind-dependent defaults and validates the result. Throws ConfigError.
inline ExperimentConfig finalize_config(ExperimentConfig c) {
  const ExperimentKind k = c.kind;
  const bool needs_device = is_prep_kind(k) || k == ExperimentKind::Tomo || k == ExperimentKind::Route;
  if (c.device.empty() && needs_device) c.device = "melbourne";
  if (!c.device.empty()) (void)resolve_device_path(c.device);

  if (c.prep.empty()) {
    if (is_prep_kind(k)) c.prep = "melbourne-depth4";
    if (is_protocol_kind(k)) c.prep = "ideal-depth3";
  }
  if (!c.prep.empty()) {
    try {
      (void)prep_variant_from_name(c.prep);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (c.layout.empty()) {
    if (k == ExperimentKind::Prep || k == ExperimentKind::PrepPlusIdles) set_layout(c, "A");
    if (k == ExperimentKind::PrepPlusStabilizer) set_layout(c, "C");
    if (k == ExperimentKind::IdealProtocol && !c.device.empty()) set_layout(c, "C");
  }
  if (k == ExperimentKind::PrepPlusStabilizer) {
    if (c.condition.empty()) c.condition = "00";
    if (c.prep != "melbourne-depth4") throw ConfigError("prep-plus-stabilizer uses the melbourne-depth4 preparation");
  }

  if ((k == ExperimentKind::Tomo || k == ExperimentKind::Route) && c.circuit.empty()) {
    throw ConfigError("experiment '" + std::string(experiment_kind_name(k)) + "' needs a circuit");
  }
  if (!c.circuit.empty() && c.circuit.find(':') == std::string::npos && c.circuit != "prep" &&
      c.circuit != "prep+stab-ZXIXZ" && !std::filesystem::is_regular_file(c.circuit)) {
    throw ConfigError("circuit file '" + c.circuit + "' not found");
  }
  if (k == ExperimentKind::Fit) {
    if (c.input.empty()) throw ConfigError("experiment 'fit' needs an input report");
    if (!std::filesystem::is_regular_file(c.input)) throw ConfigError("input report '" + c.input + "' not found");
  }
  if ((k == ExperimentKind::Tomo || k == ExperimentKind::Route) && c.layout.empty()) {
    throw ConfigError("experiment '" + std::string(experiment_kind_name(k)) + "' needs a layout");
  }
  if (k == ExperimentKind::HardwareProtocol && !c.device.empty() && c.layout.empty()) {
    throw ConfigError("hardware-protocol on a device needs an explicit 11-qubit layout");
  }
  if (const int w = layout_width(k); w > 0 && !c.layout.empty() && static_cast<int>(c.layout.size()) != w) {
    throw ConfigError("experiment '" + std::string(experiment_kind_name(k)) + "' needs a " + std::to_string(w) +
                      "-qubit layout, got " + std::to_string(c.layout.size()));
  }
  std::set<int> seen;
  for (int q : c.layout) {
    if (q < 0) throw ConfigError("layout qubit " + std::to_string(q) + " is negative");
    if (!seen.insert(q).second) throw ConfigError("layout repeats qubit " + std::to_string(q));
  }

  if (c.shots == 0 && is_protocol_kind(k)) {
    throw ConfigError("shots must be positive");
  }
  if (c.replicas < 1) throw ConfigError("replicas must be at least 1");
  if (c.workers < 1) throw ConfigError("workers must be at least 1");
  if (c.idle_cycles < 0) throw ConfigError("idle_cycles must be nonnegative");
  if (c.first_generator < 0 || c.first_generator > 3) throw ConfigError("first_generator must be in 0..3");
  const auto [fa, fb] = c.fault_qubits;
  if (fa < 1 || fa > 5 || fb < 1 || fb > 5 || fa == fb) {
    throw ConfigError("fault qubits must be two distinct indices in 1..5");
  }
  try {
    (void)fit_objective_from_name(c.objective);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.depolarizing) {
    for (double p : {c.depolarizing->p1, c.depolarizing->p2}) {
      if (!(p >= 0 && p <= 1)) throw ConfigError("depolarizing error rates must lie in [0, 1]");
    }
  }
  for (char ch : c.condition) {
    if (ch != '0' && ch != '1') throw ConfigError("condition must be a string of 0 and 1");
  }
  if (k == ExperimentKind::PrepPlusStabilizer && c.condition.size() != 2) {
    throw ConfigError("prep-plus-stabilizer conditions on the syndrome and flag bits (2 characters)");
  }
  if (k == ExperimentKind::Tomo && !c.ancillas.empty() && c.ancillas.size() != c.condition.size()) {
    throw ConfigError("condition needs one character per ancilla");
  }
  return c;
}

/// Resolved configuration as JSON; feeding it back reproduces the run.
inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = std::string(experiment_kind_name(c.kind));
  j["device"] = c.device;
  if (!c.layout_name.empty()) {
    j["layout"] = c.layout_name;
  } else {
    j["layout"] = c.layout;
  }
  j["prep"] = c.prep;
  j["circuit"] = c.circuit;
  j["input"] = c.input;
  j["data_qubits"] = c.data_qubits;
  j["ancillas"] = c.ancillas;
  j["condition"] = c.condition;
  j["shots"] = c.shots;
  j["calibration_shots"] = c.calibration_shots.value_or(c.shots);
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  j["workers"] = c.workers;
  j["noise"] = {{"gates", c.noise.gates}, {"idle", c.noise.idle}, {"readout", c.noise.readout}};
  j["depolarizing"] = c.depolarizing ? nlohmann::json{{"p1", c.depolarizing->p1}, {"p2", c.depolarizing->p2}}
                                     : nlohmann::json(nullptr);
  j["mitigation"] = c.mitigation;
  j["fit"] = c.fit;
  j["fault_qubits"] = {c.fault_qubits.first, c.fault_qubits.second};
  j["objective"] = c.objective;
  j["idle_cycles"] = c.idle_cycles;
  j["first_generator"] = c.first_generator;
  j["include_counts"] = c.include_counts;
  j["out"] = c.out;
  return j;
}

}  // namespace qflag
