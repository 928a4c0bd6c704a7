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

#include "oracles.hpp"
#include "qflag/flag/extraction.hpp"

namespace qflag {
namespace {

const std::vector<int> kData{0, 1, 2, 3, 4};

DensityMatrix code_state() { return DensityMatrix::from_pure(minus_logical_state()); }

// Runs an extraction noiselessly on `data` and returns the record distribution.
std::map<std::string, double> run(const ExtractionCircuit& ec, const DensityMatrix& data) {
  return simulate_density(compile(ec.circuit), detail::embed_data_state(ec, data)).probabilities;
}

// Dense statevector oracle: applies the circuit's gates as full matrices,
// with an optional Pauli inserted after instruction `after`.
oracle::Vec dense_run(const Circuit& c, const oracle::Vec& in, std::optional<FaultLocation> fault) {
  oracle::Vec v = in;
  const int n = c.num_qubits();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& ins = c[i];
    if (ins.kind == OpKind::Gate) v = oracle::embed(gate_matrix(ins.name, ins.params), ins.qubits, n) * v;
    if (fault && fault->instruction_index == i) {
      v = oracle::embed(oracle::pauli(pauli_char(fault->pauli)), {fault->qubit}, n) * v;
    }
  }
  return v;
}

TEST(Extraction, Structure) {
  const auto& code = five_qubit_code();
  const auto ec = flagged_syndrome_circuit(code, 3, kData, 5, 6);
  EXPECT_EQ(ec.circuit.num_qubits(), 7);
  EXPECT_EQ(ec.data_couplings.size(), 4u);
  ASSERT_EQ(ec.flag_couplings.size(), 2u);
  EXPECT_GT(ec.flag_couplings[0], ec.data_couplings.front());
  EXPECT_LT(ec.flag_couplings[1], ec.data_couplings.back());
  for (std::size_t i : ec.data_couplings) EXPECT_EQ(ec.circuit[i].qubits[1], 5);
  EXPECT_THROW(nonft_syndrome_circuit(code, 4, kData, 5), std::out_of_range);
  EXPECT_THROW(nonft_syndrome_circuit(code, 0, kData, 4), std::invalid_argument);
  EXPECT_THROW(flagged_syndrome_circuit(code, 0, kData, 5, 5), std::invalid_argument);
}

TEST(Extraction, NoiselessOnCodeStateGivesZero) {
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(run(nonft_syndrome_circuit(five_qubit_code(), k, kData, 5), code_state()).at("0"), 1, 1e-12);
    EXPECT_NEAR(run(flagged_syndrome_circuit(five_qubit_code(), k, kData, 5, 6), code_state()).at("00"), 1,
                1e-12);
  }
}

TEST(Extraction, OutcomeMatchesSyndromeOfError) {
  for (int k = 0; k < 4; ++k) {
    const auto nonft = nonft_syndrome_circuit(five_qubit_code(), k, kData, 5);
    const auto flagged = flagged_syndrome_circuit(five_qubit_code(), k, kData, 5, 6);
    for (int q = 0; q < 5; ++q) {
      for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
        const PauliString e = PauliString::single(5, q, p);
        const DensityMatrix in = apply_pauli(code_state(), e);
        const int bit = syndrome_of(e)[static_cast<std::size_t>(k)];
        EXPECT_NEAR(run(nonft, in).at(bit ? "1" : "0"), 1, 1e-12);
        EXPECT_NEAR(run(flagged, in).at(bit ? "01" : "00"), 1, 1e-12);
      }
    }
  }
  // X on qubit 1 (position 0) against ZXIXZ.
  const auto ec = nonft_syndrome_circuit(five_qubit_code(), 3, kData, 5);
  EXPECT_NEAR(run(ec, apply_pauli(code_state(), PauliString::from_string("XIIII"))).at("1"), 1, 1e-12);
}

TEST(Extraction, NoiselessFlaggedExtractionIsNonDemolition) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 4; ++k) {
    const auto ec = flagged_syndrome_circuit(five_qubit_code(), k, kData, 5, 6);
    const auto res = simulate_density(compile(ec.circuit), detail::embed_data_state(ec, code_state()));
    const DensityMatrix out = partial_trace(*res.final_density, kData);
    EXPECT_NEAR(fidelity(minus_logical_state(), out), 1, 1e-9);
  }
}

TEST(PropagateFault, MatchesDenseOracleOnAllLocations) {
  // Compare the frame against a dense statevector run on |->_L before the
  // measurements (unitary prefix only).
  const auto ec = flagged_syndrome_circuit(five_qubit_code(), 0, kData, 5, 6);
  Circuit prefix(7);
  for (const auto& in : ec.circuit.instructions()) {
    if (in.kind == OpKind::Gate) prefix.append(in);
  }
  const oracle::Vec in = minus_logical_state().amplitudes();
  oracle::Vec full = oracle::Vec::Zero(128);
  full.head(32) = in;
  const oracle::Vec clean = dense_run(prefix, full, std::nullopt);
  for (const auto& loc : fault_locations(prefix)) {
    const oracle::Vec faulty = dense_run(prefix, full, loc);
    const FrameOutcome fo = propagate_fault(prefix, loc);
    const oracle::Vec predicted = oracle::pauli_string(fo.frame.str(false)) * clean;
    EXPECT_NEAR(std::abs(predicted.dot(faulty)), 1.0, 1e-9);
  }
}

TEST(FaultEnumeration, FlaggedCircuitsHaveNoDangerousFaults) {
  for (int k = 0; k < 4; ++k) {
    const auto ec = flagged_syndrome_circuit(five_qubit_code(), k, kData, 5, 6);
    const FaultReport rep = enumerate_single_faults(ec);
    EXPECT_TRUE(rep.dangerous.empty()) << ec.generator.str();
    EXPECT_EQ(rep.records.size(), fault_locations(ec.circuit).size());
    for (const auto& r : rep.records) {
      EXPECT_TRUE(r.flag_raised || r.residual.weight() <= 1) << ec.generator.str();
    }
  }
}

TEST(FaultEnumeration, UnflaggedCircuitHasDangerousFaults) {
  const auto ec = nonft_syndrome_circuit(five_qubit_code(), 0, kData, 5);
  EXPECT_FALSE(enumerate_single_faults(ec).dangerous.empty());
}

TEST(FaultEnumeration, SyndromeQubitXFaultsNeverReachData) {
  for (const bool flagged : {false, true}) {
    const auto ec = flagged ? flagged_syndrome_circuit(five_qubit_code(), 3, kData, 5, 6)
                            : nonft_syndrome_circuit(five_qubit_code(), 3, kData, 5);
    for (const auto& r : enumerate_single_faults(ec).records) {
      if (r.location.qubit == 5 && r.location.pauli == Pauli::X) EXPECT_EQ(r.residual.weight(), 0);
    }
  }
}

TEST(FaultEnumeration, MeasurementFaultFlipsOnlyTheSyndrome) {
  const auto ec = flagged_syndrome_circuit(five_qubit_code(), 0, kData, 5, 6);
  const std::size_t last_measure = ec.circuit.size() - 2;  // syndrome readout
  ASSERT_EQ(ec.circuit[last_measure].kind, OpKind::Measure);
  for (const auto& r : enumerate_single_faults(ec).records) {
    if (r.location.instruction_index != last_measure || r.location.pauli != Pauli::X) continue;
    EXPECT_TRUE(r.syndrome_flipped);
    EXPECT_FALSE(r.flag_raised);
    EXPECT_EQ(r.residual.weight(), 0);
    EXPECT_NEAR(r.outcomes.at("01"), 1, 1e-12);
  }
}

TEST(FaultEnumeration, ZBetweenFlagCouplingsRaisesFlag) {
  const auto ec = flagged_syndrome_circuit(five_qubit_code(), 0, kData, 5, 6);
  for (std::size_t i = ec.flag_couplings[0]; i < ec.flag_couplings[1]; ++i) {
    for (Pauli p : {Pauli::Z, Pauli::Y}) {
      const FrameOutcome fo = propagate_fault(ec.circuit, {i, 5, p});
      EXPECT_TRUE(record_bit(fo.flipped_bits, ExtractionCircuit::kFlagBit)) << i;
      // Exact simulation agrees.
      const auto sim = simulate_density(compile_with_fault(ec.circuit, {i, 5, p}),
                                        detail::embed_data_state(ec, code_state()));
      double flagged = 0;
      for (const auto& [k, v] : sim.probabilities) flagged += k[0] == '1' ? v : 0;
      EXPECT_NEAR(flagged, 1, 1e-12);
    }
  }
}

TEST(FlagTable, ConsistentForEveryGenerator) {
  for (int k = 0; k < 4; ++k) {
    const FlagTable t = build_flag_table(flagged_syndrome_circuit(five_qubit_code(), k, kData, 5, 6));
    EXPECT_TRUE(t.conflicts.empty()) << k;
    for (int s = 0; s < 16; ++s) {
      const PauliString c = t.correction(syndrome_from_index(s));
      EXPECT_EQ(syndrome_index(syndrome_of(c)), s);
    }
  }
}

TEST(FaultReportJson, HasEveryRecord) {
  const auto ec = flagged_syndrome_circuit(five_qubit_code(), 2, kData, 5, 6);
  const auto j = to_json(enumerate_single_faults(ec));
  EXPECT_EQ(j["records"].size(), fault_locations(ec.circuit).size());
  EXPECT_TRUE(j["dangerous"].empty());
}

}  // namespace
}  // namespace qflag
