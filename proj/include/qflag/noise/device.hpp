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

// Device descriptions: coupling graph, native gate durations and error
// rates, coherence times and readout flip probabilities. See
// docs/device-schema.md for the JSON format.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace qflag {

using Edge = std::pair<int, int>;

inline Edge normalized_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

struct GateOverride {
  std::optional<double> duration_us;
  std::optional<double> error;
};

/// One native gate. per_qubit applies to 1-qubit gates, per_edge to cx
/// (keys are normalized so that first < second).
struct GateSpec {
  double duration_us = 0;
  double error = 0;
  std::map<int, GateOverride> per_qubit;
  std::map<Edge, GateOverride> per_edge;
};

struct QubitSpec {
  double t1_us = std::numeric_limits<double>::infinity();
  double t2_us = std::numeric_limits<double>::infinity();
  double readout_p1_given_0 = 0;
  double readout_p0_given_1 = 0;
};

/// Duration and error of a (possibly composite) gate on specific qubits.
struct GateCost {
  double duration_us = 0;
  double error = 0;
};

/// Raised by load_device; lists every schema violation.
class DeviceSchemaError : public std::runtime_error {
 public:
  explicit DeviceSchemaError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "device schema violation";
    for (const auto& i : v) s += "\n  " + i;
    return s;
  }
  std::vector<std::string> issues_;
};

struct DeviceModel {
  std::string name;
  int num_qubits = 0;
  std::vector<Edge> edges;  // undirected, normalized, sorted
  std::map<std::string, GateSpec> gates;
  std::vector<QubitSpec> qubits;
  std::string source_hash;  // FNV-1a 64 of the file bytes when loaded from disk

  bool has_edge(int a, int b) const {
    const Edge e = normalized_edge(a, b);
    return std::binary_search(edges.begin(), edges.end(), e);
  }

  const GateSpec& native(const std::string& g) const {
    auto it = gates.find(g);
    if (it == gates.end()) {
      throw std::out_of_range("device '" + name + "' has no entry for native gate '" + g + "'");
    }
    return it->second;
  }

  /// Duration/error of a native 1-qubit gate on qubit q.
  GateCost native_1q(const std::string& g, int q) const {
    const GateSpec& spec = native(g);
    GateCost c{spec.duration_us, spec.error};
    if (auto it = spec.per_qubit.find(q); it != spec.per_qubit.end()) {
      if (it->second.duration_us) c.duration_us = *it->second.duration_us;
      if (it->second.error) c.error = *it->second.error;
    }
    return c;
  }

  /// Duration/error of cx on the (unordered) pair a, b.
  GateCost native_cx(int a, int b) const {
    const GateSpec& spec = native("cx");
    GateCost c{spec.duration_us, spec.error};
    if (auto it = spec.per_edge.find(normalized_edge(a, b)); it != spec.per_edge.end()) {
      if (it->second.duration_us) c.duration_us = *it->second.duration_us;
      if (it->second.error) c.error = *it->second.error;
    }
    return c;
  }

  /// Cost of a circuit-level gate via its native decomposition:
  /// h, u2 -> u2; x, y, u3 -> u3; z, s, sdg, u1 -> u1; id -> id;
  /// cx -> cx; cz -> cx plus two u2 on the target (error of cx only);
  /// swap -> three cx.
  GateCost gate_cost(const std::string& g, const std::vector<int>& q) const {
    if (g == "h" || g == "u2") return native_1q("u2", q.at(0));
    if (g == "x" || g == "y" || g == "u3") return native_1q("u3", q.at(0));
    if (g == "z" || g == "s" || g == "sdg" || g == "u1") return native_1q("u1", q.at(0));
    if (g == "id") return native_1q("id", q.at(0));
    if (g == "cx") return native_cx(q.at(0), q.at(1));
    if (g == "cz") {
      GateCost c = native_cx(q.at(0), q.at(1));
      c.duration_us += 2 * native_1q("u2", q.at(1)).duration_us;
      return c;
    }
    if (g == "swap") {
      GateCost c = native_cx(q.at(0), q.at(1));
      c.duration_us *= 3;
      c.error = 1 - std::pow(1 - c.error, 3);
      return c;
    }
    throw std::out_of_range("no native decomposition for gate '" + g + "'");
  }

  /// Device restricted to `layout` (slot i = physical layout[i]); edges are
  /// the induced subgraph relabelled to slots.
  DeviceModel restricted(const std::vector<int>& layout) const {
    DeviceModel d;
    d.name = name;
    d.source_hash = source_hash;
    d.num_qubits = static_cast<int>(layout.size());
    std::map<int, int> slot_of;
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const int p = layout[i];
      if (p < 0 || p >= num_qubits) throw std::out_of_range("layout qubit outside device");
      if (!slot_of.emplace(p, static_cast<int>(i)).second) {
        throw std::invalid_argument("layout is not injective");
      }
      d.qubits.push_back(qubits.at(static_cast<std::size_t>(p)));
    }
    for (const Edge& e : edges) {
      auto a = slot_of.find(e.first), b = slot_of.find(e.second);
      if (a != slot_of.end() && b != slot_of.end()) d.edges.push_back(normalized_edge(a->second, b->second));
    }
    std::sort(d.edges.begin(), d.edges.end());
    for (const auto& [g, spec] : gates) {
      GateSpec s{spec.duration_us, spec.error, {}, {}};
      for (const auto& [q, o] : spec.per_qubit) {
        if (auto it = slot_of.find(q); it != slot_of.end()) s.per_qubit[it->second] = o;
      }
      for (const auto& [e, o] : spec.per_edge) {
        auto a = slot_of.find(e.first), b = slot_of.find(e.second);
        if (a != slot_of.end() && b != slot_of.end()) {
          s.per_edge[normalized_edge(a->second, b->second)] = o;
        }
      }
      d.gates[g] = s;
    }
    return d;
  }

  /// Synthetic all-to-all device: uniform gate errors, zero durations, no
  /// decoherence, no readout error. Used for abstract noise studies.
  static DeviceModel uniform(int num_qubits, double error_1q, double error_2q,
                             double readout_flip = 0) {
    DeviceModel d;
    d.name = "uniform";
    d.num_qubits = num_qubits;
    for (int a = 0; a < num_qubits; ++a) {
      for (int b = a + 1; b < num_qubits; ++b) d.edges.emplace_back(a, b);
    }
    for (const char* g : {"id", "u1", "u2", "u3"}) d.gates[g] = GateSpec{0, error_1q, {}, {}};
    d.gates["u1"].error = 0;
    d.gates["id"].error = 0;
    d.gates["cx"] = GateSpec{0, error_2q, {}, {}};
    d.qubits.assign(static_cast<std::size_t>(num_qubits),
                    QubitSpec{std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity(), readout_flip, readout_flip});
    return d;
  }
};

// ---------------------------------------------------------------------------
// Hashing and JSON.

/// FNV-1a 64-bit hash, hex encoded.
inline std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::optional<Edge> parse_edge_key(const std::string& key) {
  int a = 0, b = 0;
  char comma = 0;
  std::istringstream in(key);
  if (!(in >> a >> comma >> b) || comma != ',' || !in.eof()) return std::nullopt;
  return normalized_edge(a, b);
}

inline void read_override(const nlohmann::json& j, const std::string& path, GateOverride& o,
                          std::vector<std::string>& issues) {
  if (!j.is_object()) {
    issues.push_back(path + ": expected an object");
    return;
  }
  if (j.contains("duration_us")) {
    if (!j["duration_us"].is_number() || j["duration_us"].get<double>() < 0) {
      issues.push_back(path + ".duration_us: expected a nonnegative number");
    } else {
      o.duration_us = j["duration_us"].get<double>();
    }
  }
  if (j.contains("error")) {
    if (!j["error"].is_number() || j["error"].get<double>() < 0 || j["error"].get<double>() > 1) {
      issues.push_back(path + ".error: expected a number in [0, 1]");
    } else {
      o.error = j["error"].get<double>();
    }
  }
}

}  // namespace detail

/// Parses and validates a device description; throws DeviceSchemaError
/// naming every offending field.
inline DeviceModel device_from_json(const nlohmann::json& j) {
  std::vector<std::string> issues;
  DeviceModel d;
  if (!j.is_object()) throw DeviceSchemaError({"<root>: expected an object"});

  if (!j.contains("name") || !j["name"].is_string()) {
    issues.push_back("name: expected a string");
  } else {
    d.name = j["name"].get<std::string>();
  }
  if (!j.contains("num_qubits") || !j["num_qubits"].is_number_integer() ||
      j["num_qubits"].get<int>() <= 0) {
    issues.push_back("num_qubits: expected a positive integer");
    throw DeviceSchemaError(issues);
  }
  d.num_qubits = j["num_qubits"].get<int>();

  if (!j.contains("edges") || !j["edges"].is_array()) {
    issues.push_back("edges: expected an array of [a, b] pairs");
  } else {
    for (std::size_t i = 0; i < j["edges"].size(); ++i) {
      const auto& e = j["edges"][i];
      const std::string path = "edges[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        issues.push_back(path + ": expected [a, b]");
        continue;
      }
      const int a = e[0].get<int>(), b = e[1].get<int>();
      if (a < 0 || b < 0 || a >= d.num_qubits || b >= d.num_qubits || a == b) {
        issues.push_back(path + ": references an invalid qubit pair");
        continue;
      }
      d.edges.push_back(normalized_edge(a, b));
    }
    std::sort(d.edges.begin(), d.edges.end());
    d.edges.erase(std::unique(d.edges.begin(), d.edges.end()), d.edges.end());
  }

  if (!j.contains("gates") || !j["gates"].is_object()) {
    issues.push_back("gates: expected an object");
  } else {
    for (const auto& [g, spec] : j["gates"].items()) {
      const std::string path = "gates." + g;
      if (g != "id" && g != "u1" && g != "u2" && g != "u3" && g != "cx") {
        issues.push_back(path + ": unknown native gate");
        continue;
      }
      GateOverride base;
      detail::read_override(spec, path, base, issues);
      if (!spec.is_object()) continue;
      if (!spec.contains("duration_us")) issues.push_back(path + ".duration_us: required");
      if (!spec.contains("error")) issues.push_back(path + ".error: required");
      GateSpec gs{base.duration_us.value_or(0), base.error.value_or(0), {}, {}};
      if (spec.contains("per_qubit")) {
        if (g == "cx" || !spec["per_qubit"].is_object()) {
          issues.push_back(path + ".per_qubit: only 1-qubit gates take a per_qubit object");
        } else {
          for (const auto& [key, o] : spec["per_qubit"].items()) {
            int q = -1;
            try {
              std::size_t used = 0;
              q = std::stoi(key, &used);
              if (used != key.size()) q = -1;
            } catch (const std::exception&) {
              q = -1;
            }
            if (q < 0 || q >= d.num_qubits) {
              issues.push_back(path + ".per_qubit." + key + ": not a valid qubit index");
              continue;
            }
            detail::read_override(o, path + ".per_qubit." + key, gs.per_qubit[q], issues);
          }
        }
      }
      if (spec.contains("per_edge")) {
        if (g != "cx" || !spec["per_edge"].is_object()) {
          issues.push_back(path + ".per_edge: only cx takes a per_edge object");
        } else {
          for (const auto& [key, o] : spec["per_edge"].items()) {
            auto e = detail::parse_edge_key(key);
            if (!e || e->first < 0 || e->second >= d.num_qubits ||
                !std::binary_search(d.edges.begin(), d.edges.end(), *e)) {
              issues.push_back(path + ".per_edge." + key + ": not a coupling edge");
              continue;
            }
            detail::read_override(o, path + ".per_edge." + key, gs.per_edge[*e], issues);
          }
        }
      }
      d.gates[g] = gs;
    }
  }

  if (!j.contains("qubits") || !j["qubits"].is_array()) {
    issues.push_back("qubits: expected an array");
  } else if (static_cast<int>(j["qubits"].size()) != d.num_qubits) {
    issues.push_back("qubits: expected " + std::to_string(d.num_qubits) + " entries");
  } else {
    for (std::size_t i = 0; i < j["qubits"].size(); ++i) {
      const auto& q = j["qubits"][i];
      const std::string path = "qubits[" + std::to_string(i) + "]";
      QubitSpec qs;
      auto num = [&](const char* key, double lo, double hi, bool open_lo) -> std::optional<double> {
        if (!q.contains(key) || !q[key].is_number()) {
          issues.push_back(path + "." + key + ": required number");
          return std::nullopt;
        }
        const double v = q[key].get<double>();
        if ((open_lo ? v <= lo : v < lo) || v > hi) {
          issues.push_back(path + "." + key + ": value " + std::to_string(v) + " out of range");
          return std::nullopt;
        }
        return v;
      };
      if (!q.is_object()) {
        issues.push_back(path + ": expected an object");
        continue;
      }
      const double inf = std::numeric_limits<double>::infinity();
      auto t1 = num("t1_us", 0, inf, true), t2 = num("t2_us", 0, inf, true);
      auto r0 = num("readout_p1_given_0", 0, 1, false), r1 = num("readout_p0_given_1", 0, 1, false);
      if (t1 && t2 && *t2 > 2 * *t1 + 1e-12) issues.push_back(path + ".t2_us: exceeds 2 * t1_us");
      qs.t1_us = t1.value_or(inf);
      qs.t2_us = t2.value_or(inf);
      qs.readout_p1_given_0 = r0.value_or(0);
      qs.readout_p0_given_1 = r1.value_or(0);
      d.qubits.push_back(qs);
    }
  }
  if (!issues.empty()) throw DeviceSchemaError(issues);
  return d;
}

inline DeviceModel load_device(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open device file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw DeviceSchemaError({std::string("<file>: not valid JSON: ") + e.what()});
  }
  DeviceModel d = device_from_json(j);
  d.source_hash = fnv1a64_hex(bytes);
  return d;
}

inline nlohmann::json device_to_json(const DeviceModel& d) {
  nlohmann::json j;
  j["name"] = d.name;
  j["num_qubits"] = d.num_qubits;
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : d.edges) j["edges"].push_back({e.first, e.second});
  nlohmann::json gates = nlohmann::json::object();
  auto write_override = [](const GateOverride& o) {
    nlohmann::json x = nlohmann::json::object();
    if (o.duration_us) x["duration_us"] = *o.duration_us;
    if (o.error) x["error"] = *o.error;
    return x;
  };
  for (const auto& [g, s] : d.gates) {
    nlohmann::json x{{"duration_us", s.duration_us}, {"error", s.error}};
    for (const auto& [q, o] : s.per_qubit) x["per_qubit"][std::to_string(q)] = write_override(o);
    for (const auto& [e, o] : s.per_edge) {
      x["per_edge"][std::to_string(e.first) + "," + std::to_string(e.second)] = write_override(o);
    }
    gates[g] = x;
  }
  j["gates"] = gates;
  j["qubits"] = nlohmann::json::array();
  for (const QubitSpec& q : d.qubits) {
    j["qubits"].push_back({{"t1_us", q.t1_us},
                           {"t2_us", q.t2_us},
                           {"readout_p1_given_0", q.readout_p1_given_0},
                           {"readout_p0_given_1", q.readout_p0_given_1}});
  }
  return j;
}

}  // namespace qflag
