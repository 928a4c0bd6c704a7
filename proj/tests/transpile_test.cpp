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


#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "qflag/circuit/schedule.hpp"
#include "qflag/transpile/fixtures.hpp"
#include "test_util.hpp"

namespace qflag {
namespace {

const std::vector<int> kLayoutB{11, 12, 13, 1, 2};

const DeviceModel& melbourne() {
  static const DeviceModel d = load_device(test::device_path("melbourne.json"));
  return d;
}

bool respects_edges(const Circuit& c, const CouplingGraph& g) {
  for (const auto& in : c.instructions()) {
    if (in.is_two_qubit_gate() && !g.has_edge(in.qubits[0], in.qubits[1])) return false;
  }
  return true;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CouplingGraph, LexicographicShortestPath) {
  const CouplingGraph g(melbourne());
  EXPECT_EQ(g.shortest_path(2, 11), (std::vector<int>{2, 3, 11}));
  EXPECT_EQ(g.shortest_path(11, 2), (std::vector<int>{11, 3, 2}));
  EXPECT_EQ(g.shortest_path(4, 4), (std::vector<int>{4}));
  const CouplingGraph split(4, {{0, 1}, {2, 3}});
  EXPECT_THROW(split.shortest_path(0, 3), std::invalid_argument);
  EXPECT_THROW(CouplingGraph(2, {{0, 2}}), std::invalid_argument);
}

TEST(Route, CompatibleCircuitUnchanged) {
  Circuit c(3, 1);
  c.h(0).cx(0, 1).cx(2, 1).measure(1, 0);
  const CouplingGraph line(3, {{0, 1}, {1, 2}});
  const RoutedCircuit r = route(c, line, {0, 1, 2});
  EXPECT_EQ(r.swap_count, 0);
  EXPECT_EQ(r.circuit.instructions(), c.instructions());
  EXPECT_EQ(r.final_permutation, (std::vector<int>{0, 1, 2}));
}

TEST(Route, DistanceTwoNeedsOneSwap) {
  Circuit c(3);
  c.cx(0, 2);
  const RoutedCircuit r = route(c, CouplingGraph(3, {{0, 1}, {1, 2}}), {0, 1, 2});
  EXPECT_EQ(r.swap_count, 1);
  EXPECT_EQ(gate_counts(r.circuit)["cx"], 4);
  EXPECT_EQ(r.final_permutation, (std::vector<int>{1, 0, 2}));
  EXPECT_TRUE(verify_equivalence(c, r));
}

TEST(Route, IdealPrepOnLayoutB) {
  const Circuit prep = prep_minus_logical(PrepVariant::IdealDepth3).circuit;
  const CouplingGraph g(melbourne());
  const RoutedCircuit r = route(prep, g, kLayoutB);
  EXPECT_LE(cnot_depth(r.circuit), 6);
  EXPECT_TRUE(respects_edges(r.circuit, g));
  EXPECT_TRUE(verify_equivalence(prep, r));
  for (std::size_t l = 0; l < r.initial_layout.size(); ++l) {
    EXPECT_EQ(r.final_permutation[l], r.swap_permutation[static_cast<std::size_t>(r.initial_layout[l])]);
  }
}

TEST(Route, RejectsBadLayouts) {
  Circuit c(2);
  c.cx(0, 1);
  const CouplingGraph g(melbourne());
  EXPECT_THROW(route(c, g, {3, 3}), std::invalid_argument);
  EXPECT_THROW(route(c, g, {3, 15}), std::invalid_argument);
  EXPECT_THROW(route(c, g, {3}), std::invalid_argument);
  EXPECT_THROW(route(c, CouplingGraph(4, {{0, 1}, {2, 3}}), {0, 3}), std::invalid_argument);
}

TEST(Route, DeterministicSerialization) {
  const Circuit c = ideal_circuit("prep+stab-ZXIXZ");
  const CouplingGraph g(melbourne());
  const std::string first = serialize_qasm(route(c, g, {11, 12, 13, 1, 2, 3, 4}).circuit);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(serialize_qasm(route(c, g, {11, 12, 13, 1, 2, 3, 4}).circuit), first);
}

TEST(VerifyEquivalence, DetectsDeletedGate) {
  const RoutedCircuit good = fixture("melbourne-prep-depth4").routed(15);
  RoutedCircuit bad = good;
  Circuit trimmed(15, good.circuit.num_clbits());
  bool dropped = false;
  for (const auto& in : good.circuit.instructions()) {
    if (!dropped && in.name == "cx") {
      dropped = true;
      continue;
    }
    trimmed.append(in);
  }
  bad.circuit = trimmed;
  EXPECT_TRUE(verify_equivalence(ideal_circuit("prep"), good));
  EXPECT_FALSE(verify_equivalence(ideal_circuit("prep"), bad));
}

TEST(VerifyEquivalence, RejectsTooManyQubits) {
  Circuit c(9);
  for (int q = 0; q + 1 < 9; ++q) c.cx(q, q + 1);
  std::vector<Edge> edges;
  for (int q = 0; q + 1 < 9; ++q) edges.emplace_back(q, q + 1);
  const RoutedCircuit r = route(c, CouplingGraph(9, edges), {0, 1, 2, 3, 4, 5, 6, 7, 8});
  EXPECT_THROW(verify_equivalence(c, r), ResourceLimitError);
}

TEST(RouteProperty, RandomCircuitsOnMelbourne) {
  const CouplingGraph g(melbourne());
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    Circuit c(5);
    for (int k = 0; k < 12; ++k) {
      const int a = static_cast<int>(rng() % 5);
      const int b = static_cast<int>((a + 1 + rng() % 4) % 5);
      switch (rng() % 5) {
        case 0: c.h(a); break;
        case 1: c.u3(uniform01(rng) * 3, uniform01(rng), uniform01(rng), a); break;
        case 2: c.cz(a, b); break;
        default: c.cx(a, b); break;
      }
    }
    const RoutedCircuit r = route(c, g, kLayoutB);
    ASSERT_TRUE(respects_edges(r.circuit, g)) << trial;
    ASSERT_TRUE(verify_equivalence(c, r)) << trial;
  }
}

TEST(LayoutScore, ZeroErrorDeviceScoresZero) {
  DeviceModel d = DeviceModel::uniform(5, 0, 0);
  const Circuit c = prep_minus_logical(PrepVariant::IdealDepth3).circuit;
  EXPECT_EQ(layout_score(c, d, {0, 1, 2, 3, 4}), 0.0);
}

TEST(LayoutScore, AvoidingHighErrorEdgeScoresLower) {
  const Circuit prep = fixture("melbourne-prep-depth4").circuit;
  // Layout B uses edge (13, 1); (10, 11, 12, 2, 3) has the same compact edges.
  const std::vector<int> avoiding{10, 11, 12, 2, 3};
  EXPECT_EQ(route(prep, CouplingGraph(melbourne()), avoiding).swap_count, 0);
  EXPECT_LT(layout_score(prep, melbourne(), avoiding), layout_score(prep, melbourne(), kLayoutB));
}

TEST(LayoutScore, AdditiveOverConcatenation) {
  const Circuit a = fixture("melbourne-prep-depth4").circuit;
  Circuit b(5);
  b.h(2).cx(1, 4).u3(0.3, 0.1, 0.2, 0);
  Circuit ab(5);
  ab.compose(a).compose(b);
  EXPECT_NEAR(layout_score(ab, melbourne(), kLayoutB),
              layout_score(a, melbourne(), kLayoutB) + layout_score(b, melbourne(), kLayoutB), 1e-12);
}

TEST(Fixtures, PublishedMetrics) {
  const auto& stab = fixture("melbourne-stab-ZXIXZ");
  EXPECT_EQ(cnot_depth(stab.circuit), 10);
  EXPECT_EQ(gate_counts(stab.circuit)["cx"], 18);
  EXPECT_EQ(cnot_depth(fixture("melbourne-prep-depth4").circuit), 4);
  EXPECT_EQ(cnot_depth(fixture("melbourne-prep-depth6").circuit), 6);
  const RoutedCircuit vigo = fixture("vigo-prep").routed(5);
  EXPECT_EQ(vigo.initial_layout, (std::vector<int>{1, 2, 0, 3, 4}));
  EXPECT_EQ(vigo.final_permutation, (std::vector<int>{2, 0, 1, 4, 3}));
}

TEST(Fixtures, SyndromeAndFlagWires) {
  const auto& stab = fixture("melbourne-stab-ZXIXZ");
  const auto& ins = stab.circuit.instructions();
  ASSERT_GE(ins.size(), 2u);
  EXPECT_EQ(ins[ins.size() - 2].qubits[0], 5);
  EXPECT_EQ(ins[ins.size() - 2].clbit, ExtractionCircuit::kSyndromeBit);
  EXPECT_EQ(ins.back().qubits[0], 6);
  EXPECT_EQ(ins.back().clbit, ExtractionCircuit::kFlagBit);
  // The coupling order used on hardware (l1, l4, l0, l3) keeps the FT property.
  const auto ec = flagged_syndrome_circuit(five_qubit_code(), 3, {0, 1, 2, 3, 4}, 5, 6, {1, 4, 0, 3});
  EXPECT_TRUE(enumerate_single_faults(ec).dangerous.empty());
}

TEST(Fixtures, EquivalentToIdealAndOnDeviceEdges) {
  for (const auto& [name, f] : fixtures()) {
    const DeviceModel dev = load_device(test::device_path(f.device));
    const RoutedCircuit r = f.routed(dev.num_qubits);
    EXPECT_TRUE(respects_edges(r.circuit, CouplingGraph(dev))) << name;
    EXPECT_TRUE(verify_equivalence(ideal_circuit(f.ideal), r)) << name;
  }
}

TEST(Fixtures, ShippedFilesMatchBuiltins) {
  for (const auto& [name, f] : fixtures()) {
    const std::string dir = test::data_path("fixtures");
    EXPECT_EQ(read_file(dir + "/" + name + ".qasm"), serialize_qasm(f.circuit)) << name;
    EXPECT_EQ(read_file(dir + "/" + name + ".json"), fixture_sidecar(f).dump(2) + "\n") << name;
    const Fixture loaded = load_fixture(dir, name);
    EXPECT_EQ(loaded.circuit.instructions(), f.circuit.instructions()) << name;
    EXPECT_EQ(loaded.final_permutation, f.final_permutation) << name;
  }
}

}  // namespace
}  // namespace qflag
