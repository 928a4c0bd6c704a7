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

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflag/code513/code.hpp"
#include "qflag/flag/extraction.hpp"
#include "qflag/qasm/qasm.hpp"
#include "qflag/transpile/route.hpp"

namespace qflag {

/// Hand-routed device circuit. `circuit` uses compact wires 0..k-1, placed on
/// physical qubit layout[w]; initial_layout / final_permutation map the ideal
/// circuit's qubits to compact wires.
struct Fixture {
  std::string name;
  std::string device;  // device file under data/devices
  std::string ideal;   // name understood by ideal_circuit()
  std::vector<int> layout;
  Circuit circuit;
  std::vector<int> initial_layout;
  std::vector<int> final_permutation;
  int swap_count = 0;

  /// The circuit on a `num_physical`-qubit device register.
  RoutedCircuit routed(int num_physical) const {
    RoutedCircuit r;
    r.circuit = Circuit(num_physical, circuit.num_clbits());
    r.circuit.metadata() = circuit.metadata();
    for (Instruction in : circuit.instructions()) {
      for (int& q : in.qubits) q = layout.at(static_cast<std::size_t>(q));
      r.circuit.append(std::move(in));
    }
    r.swap_permutation.resize(static_cast<std::size_t>(num_physical));
    std::iota(r.swap_permutation.begin(), r.swap_permutation.end(), 0);
    for (std::size_t l = 0; l < initial_layout.size(); ++l) {
      const int from = layout.at(static_cast<std::size_t>(initial_layout[l]));
      const int to = layout.at(static_cast<std::size_t>(final_permutation[l]));
      r.initial_layout.push_back(from);
      r.final_permutation.push_back(to);
      r.swap_permutation[static_cast<std::size_t>(from)] = to;
    }
    r.swap_count = swap_count;
    return r;
  }
};

/// Reference circuits the fixtures implement: "prep" (ideal 5-qubit
/// preparation of |-><sub>L</sub>) and "prep+stab-ZXIXZ" (that preparation followed
/// by flagged ZXIXZ extraction with syndrome qubit 5 and flag qubit 6).
inline Circuit ideal_circuit(const std::string& name) {
  if (name == "prep") return prep_minus_logical(PrepVariant::IdealDepth3).circuit;
  if (name == "prep+stab-ZXIXZ") {
    Circuit c(7, 2);
    c.compose(prep_minus_logical(PrepVariant::IdealDepth3).circuit);
    c.compose(flagged_syndrome_circuit(five_qubit_code(), 3, {0, 1, 2, 3, 4}, 5, 6).circuit);
    c.metadata().name = name;
    return c;
  }
  throw std::invalid_argument("unknown ideal circuit '" + name + "'");
}

namespace detail {

inline Fixture prep_fixture(const std::string& name, PrepVariant v, const std::string& device,
                            std::vector<int> layout) {
  PrepCircuit p = prep_minus_logical(v);
  Fixture f;
  f.name = name;
  f.device = device;
  f.ideal = "prep";
  f.layout = std::move(layout);
  f.circuit = std::move(p.circuit);
  f.circuit.metadata().name = name;
  f.initial_layout = p.input_order;
  f.final_permutation = p.output_order;
  return f;
}

// Depth-4 preparation, then ZXIXZ coupled in the order l1, l4, l0, l3 with two
// swaps that bring l0 and l3 next to the syndrome wire 5. Compact edges:
// 0-1 1-2 2-3 3-4 1-4 4-5 5-6 0-5.
inline Fixture stab_fixture() {
  Fixture f;
  f.name = "melbourne-stab-ZXIXZ";
  f.device = "melbourne.json";
  f.ideal = "prep+stab-ZXIXZ";
  f.layout = {11, 12, 13, 1, 2, 3, 4};
  Circuit c(7, 2);
  c.compose(prep_minus_logical(PrepVariant::MelbourneDepth4).circuit);  // l1 on 0, l0 on 1
  const int s = 5, fl = 6;
  auto swap3 = [&](int a, int b) { c.cx(a, b).cx(b, a).cx(a, b); };
  c.h(fl);
  c.h(0).cx(0, s).h(0);  // X on l1
  swap3(0, 1);            // l0 -> 0, l1 -> 1
  c.cx(fl, s);
  c.cx(4, s);             // Z on l4
  swap3(3, 4);            // l3 -> 4, l4 -> 3
  c.cx(0, s);             // Z on l0
  c.cx(fl, s);
  c.h(4).cx(4, s).h(4);  // X on l3
  c.h(fl);
  c.measure(s, ExtractionCircuit::kSyndromeBit).measure(fl, ExtractionCircuit::kFlagBit);
  c.metadata().name = f.name;
  f.circuit = std::move(c);
  f.initial_layout = {0, 1, 2, 3, 4, 5, 6};
  f.final_permutation = {0, 1, 2, 4, 3, 5, 6};
  f.swap_count = 2;
  return f;
}

}  // namespace detail

/// The shipped device circuits, keyed by name.
inline const std::map<std::string, Fixture>& fixtures() {
  static const std::map<std::string, Fixture> all = [] {
    std::map<std::string, Fixture> m;
    const std::vector<int> melbourne_b{11, 12, 13, 1, 2};
    for (Fixture f : {detail::prep_fixture("melbourne-prep-depth6", PrepVariant::MelbourneDepth6, "melbourne.json",
                                           melbourne_b),
                      detail::prep_fixture("melbourne-prep-depth4", PrepVariant::MelbourneDepth4, "melbourne.json",
                                           melbourne_b),
                      detail::prep_fixture("vigo-prep", PrepVariant::Vigo, "vigo.json", {0, 1, 2, 3, 4}),
                      detail::stab_fixture()}) {
      m.emplace(f.name, std::move(f));
    }
    return m;
  }();
  return all;
}

inline const Fixture& fixture(const std::string& name) {
  auto it = fixtures().find(name);
  if (it == fixtures().end()) throw std::invalid_argument("unknown fixture '" + name + "'");
  return it->second;
}

/// Sidecar JSON stored next to the fixture's .qasm file.
inline nlohmann::json fixture_sidecar(const Fixture& f) {
  return {{"name", f.name},
          {"device", f.device},
          {"ideal", f.ideal},
          {"layout", f.layout},
          {"initial_layout", f.initial_layout},
          {"final_permutation", f.final_permutation},
          {"swap_count", f.swap_count}};
}

/// Reads <dir>/<name>.qasm and <dir>/<name>.json.
inline Fixture load_fixture(const std::string& dir, const std::string& name) {
  std::ifstream in(dir + "/" + name + ".json");
  if (!in) throw std::runtime_error("cannot open fixture sidecar " + dir + "/" + name + ".json");
  const nlohmann::json j = nlohmann::json::parse(in);
  Fixture f;
  f.name = j.at("name").get<std::string>();
  f.device = j.at("device").get<std::string>();
  f.ideal = j.at("ideal").get<std::string>();
  f.layout = j.at("layout").get<std::vector<int>>();
  f.initial_layout = j.at("initial_layout").get<std::vector<int>>();
  f.final_permutation = j.at("final_permutation").get<std::vector<int>>();
  f.swap_count = j.at("swap_count").get<int>();
  f.circuit = load_qasm(dir + "/" + name + ".qasm");
  f.circuit.metadata().name = f.name;
  return f;
}

}  // namespace qflag
