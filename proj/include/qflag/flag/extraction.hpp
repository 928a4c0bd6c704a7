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

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflag/circuit/simulate.hpp"
#include "qflag/code513/code.hpp"

namespace qflag {

/// Syndrome-extraction circuit for one generator. The syndrome outcome is
/// written to clbit 0 and, when flagged, the flag outcome to clbit 1.
struct ExtractionCircuit {
  Circuit circuit;
  std::vector<int> data_qubits;
  int syndrome_qubit = -1;
  std::optional<int> flag_qubit;
  PauliString generator;
  int generator_index = -1;
  /// Instruction index of the cx of each data coupling, in circuit order.
  std::vector<std::size_t> data_couplings;
  /// Instruction indices of the two flag couplings (empty when unflagged).
  std::vector<std::size_t> flag_couplings;

  static constexpr int kSyndromeBit = 0;
  static constexpr int kFlagBit = 1;
};

namespace detail {

inline void check_extraction_args(const StabilizerCode& code, int generator_index,
                                  const std::vector<int>& data, std::vector<int> ancillas) {
  if (generator_index < 0 || generator_index >= static_cast<int>(code.generators.size())) {
    throw std::out_of_range("generator index " + std::to_string(generator_index) + " out of range");
  }
  if (static_cast<int>(data.size()) != code.n) {
    throw std::invalid_argument("expected " + std::to_string(code.n) + " data qubits");
  }
  std::vector<int> all = data;
  all.insert(all.end(), ancillas.begin(), ancillas.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end() || all.front() < 0) {
    throw std::invalid_argument("extraction qubits must be distinct and non-negative");
  }
}

// Couples data qubit d to the syndrome target s in the eigenbasis of `p`.
// Returns the index of the cx.
inline std::size_t add_coupling(Circuit& c, Pauli p, int d, int s) {
  switch (p) {
    case Pauli::Z:
      c.cx(d, s);
      return c.size() - 1;
    case Pauli::X: {
      c.h(d).cx(d, s);
      const std::size_t at = c.size() - 1;
      c.h(d);
      return at;
    }
    case Pauli::Y: {
      c.sdg(d).h(d).cx(d, s);
      const std::size_t at = c.size() - 1;
      c.h(d).s(d);
      return at;
    }
    case Pauli::I:
      break;
  }
  throw std::logic_error("identity letters need no coupling");
}

inline ExtractionCircuit build_extraction(const StabilizerCode& code, int k, const std::vector<int>& data,
                                          int s, std::optional<int> f, std::vector<int> order) {
  std::vector<int> ancillas{s};
  if (f) ancillas.push_back(*f);
  check_extraction_args(code, k, data, ancillas);
  int width = s + 1;
  for (int q : data) width = std::max(width, q + 1);
  if (f) width = std::max(width, *f + 1);

  ExtractionCircuit ec;
  ec.circuit = Circuit(width, f ? 2 : 1);
  ec.data_qubits = data;
  ec.syndrome_qubit = s;
  ec.flag_qubit = f;
  ec.generator = code.generators[static_cast<std::size_t>(k)];
  ec.generator_index = k;

  std::vector<int> support;
  for (int j = 0; j < code.n; ++j) {
    if (ec.generator[j] != Pauli::I) support.push_back(j);
  }
  if (!order.empty()) {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != support) {
      throw std::invalid_argument("coupling order must list each support qubit of " + ec.generator.str(false) +
                                  " exactly once");
    }
    support = std::move(order);
  }
  Circuit& c = ec.circuit;
  if (f) c.h(*f);
  for (std::size_t i = 0; i < support.size(); ++i) {
    const int j = support[i];
    if (f && i + 1 == support.size() && support.size() > 1) {
      c.cx(*f, s);
      ec.flag_couplings.push_back(c.size() - 1);
    }
    ec.data_couplings.push_back(add_coupling(c, ec.generator[j], data[static_cast<std::size_t>(j)], s));
    if (f && i == 0 && support.size() > 1) {
      c.cx(*f, s);
      ec.flag_couplings.push_back(c.size() - 1);
    }
  }
  if (f) c.h(*f);
  c.measure(s, ExtractionCircuit::kSyndromeBit);
  if (f) c.measure(*f, ExtractionCircuit::kFlagBit);
  c.metadata().name = std::string(f ? "flagged-" : "nonft-") + ec.generator.str(false);
  return ec;
}

}  // namespace detail

/// Unflagged extraction: one coupling per non-identity generator letter,
/// ordered by data position, with the syndrome qubit as target.
inline ExtractionCircuit nonft_syndrome_circuit(const StabilizerCode& code, int generator_index,
                                                const std::vector<int>& data_qubits, int syndrome_qubit,
                                                std::vector<int> coupling_order = {}) {
  return detail::build_extraction(code, generator_index, data_qubits, syndrome_qubit, std::nullopt,
                                  std::move(coupling_order));
}

/// Flagged extraction: the flag starts in |+>, couples to the syndrome
/// qubit after the first and before the last data coupling, and is read
/// out in the X basis. `coupling_order` lists code qubits in coupling order
/// (default: ascending).
inline ExtractionCircuit flagged_syndrome_circuit(const StabilizerCode& code, int generator_index,
                                                  const std::vector<int>& data_qubits, int syndrome_qubit,
                                                  int flag_qubit, std::vector<int> coupling_order = {}) {
  return detail::build_extraction(code, generator_index, data_qubits, syndrome_qubit, flag_qubit,
                                  std::move(coupling_order));
}

// ---------------------------------------------------------------------------
// Pauli-frame propagation.

/// Single-qubit Pauli fault applied right after instruction
/// `instruction_index`; for a measurement it acts just before readout.
struct FaultLocation {
  std::size_t instruction_index = 0;
  int qubit = 0;
  Pauli pauli = Pauli::X;

  bool operator==(const FaultLocation&) const = default;
};

namespace detail {

inline PauliString conjugate_letters(const std::vector<Pauli>& letters, const Matrix& u) {
  const int k = static_cast<int>(letters.size());
  const Matrix p = PauliString(letters).to_matrix();
  const Matrix m = u * p * u.adjoint();
  const double dim = static_cast<double>(Eigen::Index{1} << k);
  const int total = 1 << (2 * k);
  for (int code = 0; code < total; ++code) {
    std::vector<Pauli> cand(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) cand[static_cast<std::size_t>(j)] = static_cast<Pauli>((code >> (2 * j)) & 3);
    const Matrix q = PauliString(cand).to_matrix();
    if (std::abs(std::abs((q.adjoint() * m).trace()) - dim) < 1e-9) return PauliString(cand);
  }
  throw std::invalid_argument("gate is not Clifford; Pauli frames cannot pass through it");
}

// Operator that flips a measurement outcome in the given basis.
inline Pauli flip_operator(Basis b) { return b == Basis::Z ? Pauli::X : Pauli::Z; }

inline Pauli observable(Basis b) { return b == Basis::X ? Pauli::X : b == Basis::Y ? Pauli::Y : Pauli::Z; }

}  // namespace detail

/// Result of pushing a Pauli frame to the end of a circuit.
struct FrameOutcome {
  PauliString frame;       // residual frame on every qubit
  Record flipped_bits = 0;  // classical bits whose value the frame inverts
};

/// Propagates a single fault through the remainder of `c`. Classically
/// conditioned gates are not supported.
inline FrameOutcome propagate_fault(const Circuit& c, const FaultLocation& loc) {
  const auto& ins = c.instructions();
  if (loc.instruction_index >= ins.size()) throw std::out_of_range("fault instruction index out of range");
  if (loc.qubit < 0 || loc.qubit >= c.num_qubits()) throw std::out_of_range("fault qubit out of range");
  FrameOutcome out{PauliString::single(c.num_qubits(), loc.qubit, loc.pauli), 0};
  PauliString& f = out.frame;
  const bool before = ins[loc.instruction_index].kind == OpKind::Measure;
  for (std::size_t i = loc.instruction_index + (before ? 0 : 1); i < ins.size(); ++i) {
    const Instruction& in = ins[i];
    switch (in.kind) {
      case OpKind::Barrier:
        break;
      case OpKind::Gate: {
        if (in.condition >= 0) throw std::invalid_argument("propagate_fault: conditioned gates unsupported");
        std::vector<Pauli> local;
        bool trivial = true;
        for (int q : in.qubits) {
          local.push_back(f[q]);
          trivial = trivial && f[q] == Pauli::I;
        }
        if (trivial) break;
        const PauliString img = detail::conjugate_letters(local, gate_matrix(in.name, in.params));
        for (std::size_t j = 0; j < in.qubits.size(); ++j) f.set(in.qubits[j], img[static_cast<int>(j)]);
        break;
      }
      case OpKind::Measure: {
        const int q = in.qubits[0];
        const Pauli p = f[q];
        if (p == Pauli::I) break;
        const Pauli obs = detail::observable(in.basis);
        if (p == obs) {
          f.set(q, Pauli::I);
        } else {
          out.flipped_bits ^= Record{1} << in.clbit;
          f.set(q, detail::flip_operator(in.basis));
        }
        break;
      }
      case OpKind::Reset:
        f.set(in.qubits[0], Pauli::I);
        break;
    }
  }
  return out;
}

/// Every (instruction, qubit, Pauli) triple; barriers host no faults.
inline std::vector<FaultLocation> fault_locations(const Circuit& c) {
  std::vector<FaultLocation> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].kind == OpKind::Barrier) continue;
    for (int q : c[i].qubits) {
      for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) out.push_back({i, q, p});
    }
  }
  return out;
}

/// Compiles `c` without noise and inserts the fault as an extra step.
inline CompiledCircuit compile_with_fault(const Circuit& c, const FaultLocation& loc,
                                          const NoiseModel& noise = {}) {
  CompiledCircuit cc = compile(c, noise);
  CompiledStep st;
  st.in = Instruction::gate(std::string(1, static_cast<char>(std::tolower(pauli_char(loc.pauli)))), {loc.qubit});
  st.u = pauli_matrix(loc.pauli);
  const bool before = c[loc.instruction_index].kind == OpKind::Measure;
  const auto at = cc.steps.begin() + static_cast<std::ptrdiff_t>(loc.instruction_index + (before ? 0 : 1));
  cc.steps.insert(at, std::move(st));
  return cc;
}

// ---------------------------------------------------------------------------
// Exhaustive single-fault analysis.

struct FaultRecord {
  FaultLocation location;
  bool flag_raised = false;
  bool syndrome_flipped = false;
  /// Data error reduced modulo the stabilizer group (letter j on data j).
  PauliString residual{5};
  /// Distribution of the classical record, keyed by record string.
  std::map<std::string, double> outcomes;

  /// Weight >= 2 residual that the flag did not catch.
  bool dangerous() const { return residual.weight() >= 2 && !flag_raised; }
};

struct FaultReport {
  std::string circuit_name;
  std::vector<FaultRecord> records;
  std::vector<FaultLocation> dangerous;
};

namespace detail {

// Places a data state on ec.data_qubits with every other wire in |0>.
inline DensityMatrix embed_data_state(const ExtractionCircuit& ec, const DensityMatrix& data) {
  const int w = ec.circuit.num_qubits();
  const int extra = w - static_cast<int>(ec.data_qubits.size());
  const DensityMatrix big = extra > 0 ? tensor_product(DensityMatrix(extra), data) : data;
  // big: qubits 0..4 are data, the rest ancillas. Reorder onto the wires.
  std::vector<int> keep(static_cast<std::size_t>(w), -1);
  for (std::size_t j = 0; j < ec.data_qubits.size(); ++j) keep[static_cast<std::size_t>(ec.data_qubits[j])] = static_cast<int>(j);
  int next = static_cast<int>(ec.data_qubits.size());
  for (int& k : keep) {
    if (k < 0) k = next++;
  }
  return partial_trace(big, keep);
}

}  // namespace detail

/// Injects every single Pauli fault, propagates it as a Pauli frame and
/// cross-checks the frame against an exact density simulation.
inline FaultReport enumerate_single_faults(const ExtractionCircuit& ec, const DensityMatrix& input) {
  if (input.num_qubits() != static_cast<int>(ec.data_qubits.size())) {
    throw std::invalid_argument("enumerate_single_faults: input must cover the data qubits");
  }
  const DensityMatrix init = detail::embed_data_state(ec, input);
  const auto locs = fault_locations(ec.circuit);
  FaultReport rep;
  rep.circuit_name = ec.circuit.metadata().name;
  rep.records.resize(locs.size());
  parallel_for(locs.size(), 1, [&](std::size_t i) {
    const FaultLocation& loc = locs[i];
    const FrameOutcome fo = propagate_fault(ec.circuit, loc);
    FaultRecord r;
    r.location = loc;
    r.syndrome_flipped = record_bit(fo.flipped_bits, ExtractionCircuit::kSyndromeBit);
    r.flag_raised = ec.flag_qubit && record_bit(fo.flipped_bits, ExtractionCircuit::kFlagBit);
    PauliString data_err(static_cast<int>(ec.data_qubits.size()));
    for (std::size_t j = 0; j < ec.data_qubits.size(); ++j) data_err.set(static_cast<int>(j), fo.frame[ec.data_qubits[j]]);
    r.residual = reduce_modulo_stabilizers(data_err);

    const SimulationResult sim = simulate_density(compile_with_fault(ec.circuit, loc), init);
    r.outcomes = sim.probabilities;
    const double p = sim.probability_of(fo.flipped_bits);
    if (std::abs(p - 1) > 1e-9) {
      throw NumericalError("fault frame predicts a record the simulation does not produce");
    }
    for (const auto& b : sim.branches) {
      if (b.record != fo.flipped_bits) continue;
      const DensityMatrix data_state = partial_trace(b.state.normalized(), ec.data_qubits);
      const DensityMatrix expect = apply_pauli(input, r.residual);
      if (trace_distance(data_state, expect) > 1e-9) {
        throw NumericalError("fault frame disagrees with the simulated data state");
      }
    }
    rep.records[i] = std::move(r);
  });
  for (const auto& r : rep.records) {
    if (r.dangerous()) rep.dangerous.push_back(r.location);
  }
  return rep;
}

inline FaultReport enumerate_single_faults(const ExtractionCircuit& ec) {
  return enumerate_single_faults(ec, DensityMatrix::from_pure(minus_logical_state()));
}

// ---------------------------------------------------------------------------
// Flag-raised lookup.

/// Correction table for the flag-raised branch of one generator: the full
/// syndrome of the residual error maps to that error.
struct FlagTable {
  int generator_index = -1;
  std::array<std::optional<PauliString>, 16> entries;
  /// Syndromes reached by residuals from different logical classes.
  std::vector<int> conflicts;

  /// Table entry when present, otherwise the weight-<=1 decoder.
  PauliString correction(const Syndrome& s) const {
    const auto& e = entries[static_cast<std::size_t>(syndrome_index(s))];
    return e ? *e : decode(s);
  }
};

inline FlagTable build_flag_table(const ExtractionCircuit& flagged) {
  if (!flagged.flag_qubit) throw std::invalid_argument("build_flag_table needs a flagged circuit");
  FlagTable t;
  t.generator_index = flagged.generator_index;
  const FaultReport rep = enumerate_single_faults(flagged);
  for (const auto& r : rep.records) {
    if (!r.flag_raised) continue;
    const int idx = syndrome_index(syndrome_of(r.residual));
    auto& slot = t.entries[static_cast<std::size_t>(idx)];
    if (!slot) {
      slot = r.residual;
    } else if (slot->str(false) != r.residual.str(false)) {
      if (std::find(t.conflicts.begin(), t.conflicts.end(), idx) == t.conflicts.end()) t.conflicts.push_back(idx);
      if (r.residual.weight() < slot->weight() ||
          (r.residual.weight() == slot->weight() && r.residual.str(false) < slot->str(false))) {
        slot = r.residual;
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// JSON.

inline nlohmann::json to_json(const FaultLocation& l) {
  return {{"instruction_index", l.instruction_index}, {"qubit", l.qubit}, {"pauli", std::string(1, pauli_char(l.pauli))}};
}

inline nlohmann::json to_json(const FaultReport& rep) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : rep.records) {
    recs.push_back({{"location", to_json(r.location)},
                    {"flag_raised", r.flag_raised},
                    {"syndrome_flipped", r.syndrome_flipped},
                    {"residual", r.residual.str(false)},
                    {"outcomes", r.outcomes}});
  }
  nlohmann::json dang = nlohmann::json::array();
  for (const auto& l : rep.dangerous) dang.push_back(to_json(l));
  return {{"circuit", rep.circuit_name}, {"records", recs}, {"dangerous", dang}};
}

}  // namespace qflag
