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

#include <set>

#include "oracles.hpp"
#include "qflag/circuit/schedule.hpp"
#include "qflag/circuit/simulate.hpp"
#include "qflag/code513/code.hpp"

namespace qflag {
namespace {

// Symplectic product computed from raw letters, independent of PauliString.
int symplectic(const std::string& a, const std::string& b) {
  int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool ax = a[i] == 'X' || a[i] == 'Y', az = a[i] == 'Z' || a[i] == 'Y';
    const bool bx = b[i] == 'X' || b[i] == 'Y', bz = b[i] == 'Z' || b[i] == 'Y';
    s ^= (ax && bz) ^ (az && bx);
  }
  return s;
}

std::vector<PauliString> weight_one_paulis() {
  std::vector<PauliString> out;
  for (int q = 0; q < 5; ++q) {
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) out.push_back(PauliString::single(5, q, p));
  }
  return out;
}

TEST(FiveQubitCode, GeneratorsAndLogicals) {
  const auto& code = five_qubit_code();
  EXPECT_EQ(code.generators[0].str(false), "XZZXI");
  EXPECT_EQ(code.generators[3].str(false), "ZXIXZ");
  for (const auto& a : code.generators) {
    for (const auto& b : code.generators) EXPECT_EQ(symplectic(a.str(false), b.str(false)), 0);
    EXPECT_EQ(symplectic(a.str(false), "XXXXX"), 0);
    EXPECT_EQ(symplectic(a.str(false), "ZZZZZ"), 0);
  }
  EXPECT_EQ(symplectic("XXXXX", "ZZZZZ"), 1);
}

TEST(FiveQubitCode, GeneratorsAreIndependent) {
  // Rank over GF(2) of the 4 x 10 symplectic matrix.
  std::vector<unsigned> rows;
  for (const auto& g : five_qubit_code().generators) {
    unsigned r = 0;
    for (int q = 0; q < 5; ++q) {
      r |= static_cast<unsigned>(has_x(g[q])) << q;
      r |= static_cast<unsigned>(has_z(g[q])) << (q + 5);
    }
    rows.push_back(r);
  }
  int rank = 0;
  for (int bit = 0; bit < 10; ++bit) {
    auto it = std::find_if(rows.begin() + rank, rows.end(), [&](unsigned r) { return (r >> bit) & 1; });
    if (it == rows.end()) continue;
    std::iter_swap(rows.begin() + rank, it);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(i) != rank && ((rows[i] >> bit) & 1)) rows[i] ^= rows[static_cast<std::size_t>(rank)];
    }
    ++rank;
  }
  EXPECT_EQ(rank, 4);
}

TEST(Syndrome, Examples) {
  EXPECT_EQ(syndrome_of(PauliString(5)), (Syndrome{0, 0, 0, 0}));
  EXPECT_EQ(syndrome_of(PauliString::from_string("XIIII")), (Syndrome{0, 0, 0, 1}));
  EXPECT_THROW(syndrome_of(PauliString(4)), std::invalid_argument);
}

TEST(Syndrome, MatchesSymplecticOracleAndIsPerfect) {
  std::set<int> seen;
  for (const auto& e : weight_one_paulis()) {
    const Syndrome s = syndrome_of(e);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(s[i], symplectic(e.str(false), five_qubit_code().generators[i].str(false)));
    }
    seen.insert(syndrome_index(s));
  }
  EXPECT_EQ(seen.size(), 15u);
  EXPECT_EQ(seen.count(0), 0u);
}

TEST(Decode, RoundTripOverAllWeightOnePaulis) {
  EXPECT_TRUE(decode(Syndrome{0, 0, 0, 0}).is_identity());
  for (const auto& e : weight_one_paulis()) EXPECT_EQ(decode(syndrome_of(e)).str(), e.str());
  EXPECT_EQ(decode(syndrome_of(PauliString::from_string("IIYII"))).str(false), "IIYII");
}

TEST(ReduceModuloStabilizers, Basics) {
  const auto& g = five_qubit_code().generators;
  for (const auto& s : g) EXPECT_TRUE(reduce_modulo_stabilizers(s).is_identity());
  // X1 * XZZXI = IZZXI reduces back to weight 1.
  EXPECT_EQ(reduce_modulo_stabilizers(PauliString::from_string("IZZXI")).str(false), "XIIII");
  // Logical operators are kept: XXXXX has minimum weight 3 in its coset.
  EXPECT_EQ(reduce_modulo_stabilizers(PauliString::from_string("XXXXX")).weight(), 3);
  EXPECT_EQ(stabilizer_group().size(), 16u);
}

TEST(VerifyCodestate, Examples) {
  const DensityMatrix minus = DensityMatrix::from_pure(minus_logical_state());
  const auto r = verify_codestate(minus);
  for (double g : r.generators) EXPECT_NEAR(g, 1, 1e-12);
  EXPECT_NEAR(r.logical_x, -1, 1e-12);

  const auto flipped = verify_codestate(apply_pauli(minus, PauliString::from_string("XIIII")));
  EXPECT_NEAR(flipped.generators[3], -1, 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(flipped.generators[static_cast<std::size_t>(i)], 1, 1e-12);

  const auto mixed = verify_codestate(DensityMatrix::maximally_mixed(5));
  for (double g : mixed.generators) EXPECT_NEAR(g, 0, 1e-12);
  EXPECT_NEAR(mixed.logical_x, 0, 1e-12);
  EXPECT_THROW(verify_codestate(DensityMatrix(4)), std::invalid_argument);
}

TEST(VerifyCodestate, WeightOneErrorsFlipExactlyTheSyndromeBits) {
  const DensityMatrix minus = DensityMatrix::from_pure(minus_logical_state());
  for (const auto& e : weight_one_paulis()) {
    const auto r = verify_codestate(apply_pauli(minus, e));
    const Syndrome s = syndrome_of(e);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.generators[i], s[i] ? -1 : 1, 1e-12) << e.str();
  }
}

TEST(MinusLogical, MatchesGraphStateOracle) {
  const StateVector psi = minus_logical_state();
  EXPECT_LT((psi.amplitudes() - oracle::c5_graph_state()).norm(), 1e-12);
}

TEST(PrepMinusLogical, EveryVariantPreparesTheCodeState) {
  for (PrepVariant v : kPrepVariants) {
    const PrepCircuit p = prep_minus_logical(v);
    const auto res = simulate_density(p.circuit);
    EXPECT_NEAR(fidelity(minus_logical_state(p.output_order), *res.final_density), 1.0, 1e-9)
        << prep_variant_name(v);
    // Pairwise agreement after undoing the output permutation.
    const DensityMatrix logical = partial_trace(*res.final_density, p.output_order);
    EXPECT_NEAR(fidelity(minus_logical_state(), logical), 1.0, 1e-9);
  }
}

TEST(PrepMinusLogical, DocumentedMetrics) {
  const auto ideal = prep_minus_logical("ideal-depth3");
  EXPECT_EQ(cnot_depth(ideal.circuit), 3);
  EXPECT_EQ(gate_counts(ideal.circuit), (std::map<std::string, int>{{"cz", 5}, {"h", 5}}));
  const auto d4 = prep_minus_logical(PrepVariant::MelbourneDepth4);
  EXPECT_EQ(cnot_depth(d4.circuit), 4);
  EXPECT_EQ(gate_counts(d4.circuit).at("cx"), 6);
  const auto d6 = prep_minus_logical(PrepVariant::MelbourneDepth6);
  EXPECT_EQ(cnot_depth(d6.circuit), 6);
  EXPECT_EQ(gate_counts(d6.circuit).at("cx"), 8);
  const auto vigo = prep_minus_logical(PrepVariant::Vigo);
  EXPECT_EQ(vigo.input_order, (std::vector<int>{1, 2, 0, 3, 4}));
  EXPECT_EQ(vigo.output_order, (std::vector<int>{2, 0, 1, 4, 3}));
  EXPECT_EQ(gate_counts(vigo.circuit).at("cx"), 12);
  EXPECT_THROW(prep_minus_logical("melbourne-depth5"), std::invalid_argument);
}

TEST(PrepMinusLogical, HardwareVariantsRespectTheirWirePairs) {
  auto pairs_of = [](const Circuit& c) {
    std::set<std::pair<int, int>> s;
    for (const auto& in : c.instructions()) {
      if (in.is_two_qubit_gate()) s.insert(std::minmax(in.qubits[0], in.qubits[1]));
    }
    return s;
  };
  const std::set<std::pair<int, int>> melb{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 4}};
  const std::set<std::pair<int, int>> vigo{{0, 1}, {1, 2}, {1, 3}, {3, 4}};
  for (auto v : {PrepVariant::MelbourneDepth4, PrepVariant::MelbourneDepth6}) {
    for (const auto& e : pairs_of(prep_minus_logical(v).circuit)) EXPECT_TRUE(melb.count(e));
  }
  for (const auto& e : pairs_of(prep_minus_logical(PrepVariant::Vigo).circuit)) EXPECT_TRUE(vigo.count(e));
}

}  // namespace
}  // namespace qflag
