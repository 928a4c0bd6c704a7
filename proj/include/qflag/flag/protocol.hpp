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

// Correction protocols built from flagged syndrome extraction.
//
// Wire assignment (compact indices; NoiseModels must cover them):
//   ideal:    data 0-4, syndrome 5, flag 6 (reset between uses)
//   hardware: data 0-4, syndrome 5, flag 6, fresh syndrome qubits 7-10

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflag/flag/extraction.hpp"

namespace qflag {

/// Flag-raised correction tables for the four generators, built once from
/// exhaustive fault enumeration.
inline const std::array<FlagTable, 4>& flag_tables() {
  static const std::array<FlagTable, 4> tables = [] {
    std::array<FlagTable, 4> t;
    for (int k = 0; k < 4; ++k) {
      t[static_cast<std::size_t>(k)] =
          build_flag_table(flagged_syndrome_circuit(five_qubit_code(), k, {0, 1, 2, 3, 4}, 5, 6));
    }
    return t;
  }();
  return tables;
}

/// Syndrome information that selects a correction.
struct SyndromeRecord {
  Syndrome syndrome{};
  bool flag_raised = false;
  /// Generator whose flagged extraction raised the flag.
  int flagged_generator = -1;
};

inline PauliString correction_for(const SyndromeRecord& rec) {
  if (!rec.flag_raised) {
    if (rec.flagged_generator != -1) throw std::invalid_argument("unflagged record names a flagged generator");
    return decode(rec.syndrome);
  }
  if (rec.flagged_generator < 0 || rec.flagged_generator > 3) {
    throw std::invalid_argument("flag-raised record must name the flagged generator (0-3)");
  }
  return flag_tables()[static_cast<std::size_t>(rec.flagged_generator)].correction(rec.syndrome);
}

/// Conjugates a 5-qubit data state by the correction selected by `rec`.
inline DensityMatrix apply_virtual_correction(const DensityMatrix& rho, const SyndromeRecord& rec) {
  if (rho.num_qubits() != 5) throw std::invalid_argument("apply_virtual_correction: expected 5 qubits");
  const PauliString c = correction_for(rec);
  return c.is_identity() ? rho : apply_pauli(rho, c);
}

// ---------------------------------------------------------------------------

/// Single fault injected into one stage of every shot. Stages are numbered
/// in execution order. Ideal: 0 prep, 1-3 verification of generators 0-2,
/// 4 first correction extraction, then later extractions. Hardware: 0 the
/// prep-and-flagged circuit, 1 the follow-up circuit.
struct InjectedFault {
  int stage = 0;
  FaultLocation location;
};

struct ProtocolOptions {
  int first_generator = 0;
  PrepVariant prep = PrepVariant::IdealDepth3;
  int workers = 1;
  std::optional<InjectedFault> fault;
};

struct BranchCounts {
  std::uint64_t f0 = 0;
  std::uint64_t f1 = 0;
  std::uint64_t rejected = 0;
};

struct RecordOutcome {
  std::uint64_t count = 0;
  /// Average corrected data state of the shots with this record.
  DensityMatrix corrected_state;
};

/// Aggregate protocol statistics. "Kept" shots are all shots for the
/// hardware protocol and the verification-passing shots for the ideal one.
/// "Accepted" shots are the kept shots whose first flagged extraction
/// reported syndrome 0 and flag 0 (hardware), or the kept shots (ideal).
struct ProtocolResult {
  std::string protocol;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  BranchCounts branches;
  std::uint64_t kept = 0;
  std::uint64_t accepted = 0;
  double accepted_fraction = 0;
  std::map<std::string, RecordOutcome> records;
  std::optional<DensityMatrix> corrected_state;  // kept shots, corrected
  std::optional<DensityMatrix> raw_state;        // kept shots, uncorrected
  double logical_fidelity = 0;
  double raw_fidelity = 0;
  double accepted_logical_fidelity = 0;
  double accepted_raw_fidelity = 0;
  CodestateReport codestate;
};

namespace detail {

struct StageSet {
  std::vector<CompiledCircuit> clean;
  std::vector<std::optional<CompiledCircuit>> faulty;
};

inline StageSet compile_stages(const std::vector<Circuit>& circuits, const NoiseModel& noise,
                               const std::optional<InjectedFault>& fault) {
  StageSet s;
  for (const Circuit& c : circuits) {
    s.clean.push_back(compile(c, noise));
    if (fault && fault->location.instruction_index < c.size() && fault->location.qubit < c.num_qubits()) {
      s.faulty.push_back(compile_with_fault(c, fault->location, noise));
    } else {
      s.faulty.emplace_back();
    }
  }
  return s;
}

// Runs stage circuits in order, substituting the faulted compilation at
// the configured stage.
class ShotRunner {
 public:
  ShotRunner(const StageSet& stages, const std::optional<InjectedFault>& fault, int width, Rng& rng)
      : stages_(stages), fault_(fault), psi_(width), rng_(rng) {}

  Record run(std::size_t circuit_id) {
    const CompiledCircuit* cc = &stages_.clean[circuit_id];
    if (fault_ && fault_->stage == stage_) {
      if (!stages_.faulty[circuit_id]) throw std::invalid_argument("injected fault does not fit its stage circuit");
      cc = &*stages_.faulty[circuit_id];
    }
    ++stage_;
    Record rec = 0;
    run_trajectory(*cc, psi_, rec, rng_);
    return rec;
  }

  const StateVector& state() const { return psi_; }

 private:
  const StageSet& stages_;
  const std::optional<InjectedFault>& fault_;
  StateVector psi_;
  Rng& rng_;
  int stage_ = 0;
};

// Data state in logical order from a register whose wires 0-4 hold the
// data (logical l on wire order[l]).
inline DensityMatrix data_density(const StateVector& psi, const std::vector<int>& order) {
  const Eigen::Index rest = psi.dim() / 32;
  const Eigen::Map<const Matrix> m(psi.amplitudes().data(), 32, rest);
  const DensityMatrix wires = DensityMatrix::unchecked(m * m.adjoint());
  return partial_trace(wires, order);
}

struct ShotOutcome {
  bool kept = false;
  bool accepted = false;
  bool flagged = false;
  std::string key;
  DensityMatrix raw;
  DensityMatrix corrected;
};

struct Accumulator {
  BranchCounts branches;
  std::uint64_t kept = 0, accepted = 0;
  Matrix raw = Matrix::Zero(32, 32), corrected = Matrix::Zero(32, 32);
  Matrix acc_raw = Matrix::Zero(32, 32), acc_corrected = Matrix::Zero(32, 32);
  std::map<std::string, std::pair<std::uint64_t, Matrix>> records;

  void add(const ShotOutcome& s) {
    if (!s.kept) {
      ++branches.rejected;
      return;
    }
    ++(s.flagged ? branches.f1 : branches.f0);
    ++kept;
    raw += s.raw.matrix();
    corrected += s.corrected.matrix();
    if (s.accepted) {
      ++accepted;
      acc_raw += s.raw.matrix();
      acc_corrected += s.corrected.matrix();
    }
    auto& r = records[s.key];
    if (r.first == 0) r.second = Matrix::Zero(32, 32);
    ++r.first;
    r.second += s.corrected.matrix();
  }

  void merge(const Accumulator& o) {
    branches.f0 += o.branches.f0;
    branches.f1 += o.branches.f1;
    branches.rejected += o.branches.rejected;
    kept += o.kept;
    accepted += o.accepted;
    raw += o.raw;
    corrected += o.corrected;
    acc_raw += o.acc_raw;
    acc_corrected += o.acc_corrected;
    for (const auto& [k, v] : o.records) {
      auto& r = records[k];
      if (r.first == 0) r.second = Matrix::Zero(32, 32);
      r.first += v.first;
      r.second += v.second;
    }
  }
};

// Shots are processed in a fixed number of chunks merged in order, so the
// floating-point sums do not depend on the worker count.
template <typename ShotFn>
Accumulator run_shots(std::uint64_t shots, std::uint64_t seed, int workers, ShotFn&& shot) {
  const std::uint64_t chunks = std::min<std::uint64_t>(shots, 64);
  std::vector<Accumulator> parts(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::uint64_t lo = c * shots / chunks, hi = (c + 1) * shots / chunks;
    for (std::uint64_t i = lo; i < hi; ++i) {
      Rng rng(subseed(seed, i));
      parts[c].add(shot(rng));
    }
  });
  Accumulator total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

inline ProtocolResult finish(std::string name, std::uint64_t shots, std::uint64_t seed, const Accumulator& a,
                             bool accepted_is_kept) {
  ProtocolResult r;
  r.protocol = std::move(name);
  r.shots = shots;
  r.seed = seed;
  r.branches = a.branches;
  r.kept = a.kept;
  r.accepted = accepted_is_kept ? a.kept : a.accepted;
  r.accepted_fraction = static_cast<double>(r.accepted) / static_cast<double>(shots);
  const StateVector target = minus_logical_state();
  auto avg = [](const Matrix& m, std::uint64_t n) {
    return DensityMatrix::unchecked(m / static_cast<double>(n));
  };
  if (a.kept > 0) {
    r.corrected_state = avg(a.corrected, a.kept);
    r.raw_state = avg(a.raw, a.kept);
    r.logical_fidelity = fidelity(target, *r.corrected_state);
    r.raw_fidelity = fidelity(target, *r.raw_state);
    r.codestate = verify_codestate(*r.corrected_state);
  }
  const std::uint64_t acc = accepted_is_kept ? a.kept : a.accepted;
  if (acc > 0) {
    const Matrix& ar = accepted_is_kept ? a.raw : a.acc_raw;
    const Matrix& ac = accepted_is_kept ? a.corrected : a.acc_corrected;
    r.accepted_raw_fidelity = fidelity(target, avg(ar, acc));
    r.accepted_logical_fidelity = fidelity(target, avg(ac, acc));
  }
  for (const auto& [k, v] : a.records) r.records[k] = {v.first, avg(v.second, v.first)};
  return r;
}

inline void check_protocol_options(const ProtocolOptions& o, int width, const NoiseModel& noise) {
  if (o.first_generator < 0 || o.first_generator > 3) throw std::out_of_range("first_generator must be 0-3");
  if (noise.enabled() && noise.device().num_qubits < width) {
    throw std::invalid_argument("noise model covers " + std::to_string(noise.device().num_qubits) +
                                " qubits; the protocol needs " + std::to_string(width));
  }
}

// Non-FT extraction of `generators` on fresh syndrome qubits 7 + k, with
// every readout deferred to the end.
inline Circuit fresh_nonft_block(const std::vector<int>& generators, const std::vector<int>& data, int width) {
  Circuit c(width, static_cast<int>(generators.size()));
  std::vector<Instruction> measures;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const int k = generators[i];
    const auto ec = nonft_syndrome_circuit(five_qubit_code(), k, data, 7 + k);
    for (Instruction in : ec.circuit.instructions()) {
      if (in.kind == OpKind::Measure) {
        in.clbit = static_cast<int>(i);
        measures.push_back(std::move(in));
      } else {
        c.append(std::move(in));
      }
    }
  }
  for (auto& m : measures) c.append(std::move(m));
  return c;
}

}  // namespace detail

/// Simulator-mode protocol with resets and classical branching: prepare,
/// verify with flagged extraction of generators 0-2 (any nonzero bit rejects
/// the shot), then extract syndromes flagged, escalating to a full unflagged
/// round whenever a flag is raised, and correct.
inline ProtocolResult run_ideal_protocol(const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed,
                                         const ProtocolOptions& opts = {}) {
  if (shots == 0) throw std::invalid_argument("shots must be positive");
  constexpr int kWidth = 7;
  detail::check_protocol_options(opts, kWidth, noise);
  const auto& code = five_qubit_code();
  const PrepCircuit prep = prep_minus_logical(opts.prep);
  const std::vector<int>& data = prep.output_order;

  // Circuit ids: 0 prep, 1-4 flagged generator k, 5 full unflagged round.
  std::vector<Circuit> circuits;
  Circuit p(kWidth);
  p.compose(prep.circuit);
  circuits.push_back(std::move(p));
  for (int k = 0; k < 4; ++k) {
    Circuit c(kWidth, 2);
    c.reset(5).reset(6);
    c.compose(flagged_syndrome_circuit(code, k, data, 5, 6).circuit);
    circuits.push_back(std::move(c));
  }
  Circuit full(kWidth, 4);
  for (int k = 0; k < 4; ++k) {
    full.reset(5);
    full.compose(nonft_syndrome_circuit(code, k, data, 5).circuit, {}, {k});
  }
  circuits.push_back(std::move(full));
  const detail::StageSet stages = detail::compile_stages(circuits, noise, opts.fault);
  (void)flag_tables();

  auto shot = [&](Rng& rng) {
    detail::ShotOutcome out;
    detail::ShotRunner run(stages, opts.fault, kWidth, rng);
    run.run(0);
    for (int k = 0; k < 3; ++k) {
      if (run.run(static_cast<std::size_t>(1 + k)) != 0) return out;  // rejected
    }
    out.kept = true;
    out.accepted = true;
    SyndromeRecord rec;
    std::vector<int> order{opts.first_generator};
    for (int k = 0; k < 4; ++k) {
      if (k != opts.first_generator) order.push_back(k);
    }
    for (int k : order) {
      const Record r = run.run(static_cast<std::size_t>(1 + k));
      rec.syndrome[static_cast<std::size_t>(k)] = record_bit(r, ExtractionCircuit::kSyndromeBit);
      if (record_bit(r, ExtractionCircuit::kFlagBit)) {
        rec.flag_raised = true;
        rec.flagged_generator = k;
        rec.syndrome = syndrome_from_index(static_cast<int>(run.run(5)));
        break;
      }
    }
    out.flagged = rec.flag_raised;
    out.key = (rec.flag_raised ? "f1@g" + std::to_string(rec.flagged_generator) : std::string("f0")) + ":" +
              syndrome_string(rec.syndrome);
    out.raw = detail::data_density(run.state(), data);
    out.corrected = apply_virtual_correction(out.raw, rec);
    return out;
  };
  return detail::finish("ideal", shots, seed, detail::run_shots(shots, seed, opts.workers, shot), true);
}

/// Hardware-faithful protocol: no resets, no classical control inside a
/// circuit, a fresh ancilla for every extraction. Circuit P prepares the
/// code state and runs the flagged extraction of the first generator; its
/// flag selects, classically, the follow-up circuit R0 (unflagged extraction
/// of the other three generators) or R1 (all four, discarding P's
/// syndrome). Corrections are applied virtually.
inline ProtocolResult run_hardware_protocol(const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed,
                                            const ProtocolOptions& opts = {}) {
  if (shots == 0) throw std::invalid_argument("shots must be positive");
  constexpr int kWidth = 11;
  detail::check_protocol_options(opts, kWidth, noise);
  const auto& code = five_qubit_code();
  const PrepCircuit prep = prep_minus_logical(opts.prep);
  const std::vector<int>& data = prep.output_order;
  const int first = opts.first_generator;

  std::vector<int> others;
  for (int k = 0; k < 4; ++k) {
    if (k != first) others.push_back(k);
  }
  std::vector<Circuit> circuits;
  Circuit p(kWidth, 2);
  p.compose(prep.circuit);
  p.compose(flagged_syndrome_circuit(code, first, data, 5, 6).circuit);
  circuits.push_back(std::move(p));
  circuits.push_back(detail::fresh_nonft_block(others, data, kWidth));
  circuits.push_back(detail::fresh_nonft_block({0, 1, 2, 3}, data, kWidth));
  const detail::StageSet stages = detail::compile_stages(circuits, noise, opts.fault);
  (void)flag_tables();

  auto shot = [&](Rng& rng) {
    detail::ShotOutcome out;
    detail::ShotRunner run(stages, opts.fault, kWidth, rng);
    const Record r = run.run(0);
    SyndromeRecord rec;
    out.kept = true;
    out.accepted = r == 0;
    if (!record_bit(r, ExtractionCircuit::kFlagBit)) {
      rec.syndrome[static_cast<std::size_t>(first)] = record_bit(r, ExtractionCircuit::kSyndromeBit);
      const Record rest = run.run(1);
      for (std::size_t i = 0; i < others.size(); ++i) {
        rec.syndrome[static_cast<std::size_t>(others[i])] = record_bit(rest, static_cast<int>(i));
      }
    } else {
      rec.flag_raised = true;
      rec.flagged_generator = first;
      rec.syndrome = syndrome_from_index(static_cast<int>(run.run(2)));
    }
    out.flagged = rec.flag_raised;
    out.key = std::string(rec.flag_raised ? "f1" : "f0") + ":" + syndrome_string(rec.syndrome);
    out.raw = detail::data_density(run.state(), data);
    out.corrected = apply_virtual_correction(out.raw, rec);
    return out;
  };
  return detail::finish("hardware", shots, seed, detail::run_shots(shots, seed, opts.workers, shot), false);
}

inline nlohmann::json to_json(const ProtocolResult& r) {
  nlohmann::json recs = nlohmann::json::object();
  const StateVector target = minus_logical_state();
  for (const auto& [k, v] : r.records) {
    recs[k] = {{"count", v.count}, {"fidelity", fidelity(target, v.corrected_state)}};
  }
  return {{"protocol", r.protocol},
          {"shots", r.shots},
          {"seed", r.seed},
          {"branches", {{"f0", r.branches.f0}, {"f1", r.branches.f1}, {"rejected", r.branches.rejected}}},
          {"kept", r.kept},
          {"accepted", r.accepted},
          {"accepted_fraction", r.accepted_fraction},
          {"logical_fidelity", r.logical_fidelity},
          {"raw_fidelity", r.raw_fidelity},
          {"accepted_logical_fidelity", r.accepted_logical_fidelity},
          {"accepted_raw_fidelity", r.accepted_raw_fidelity},
          {"generator_expectations", r.codestate.generators},
          {"logical_x_expectation", r.codestate.logical_x},
          {"records", recs}};
}

}  // namespace qflag
