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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qflag/circuit/circuit.hpp"
#include "qflag/circuit/schedule.hpp"
#include "qflag/core/ops.hpp"
#include "qflag/core/random.hpp"
#include "qflag/noise/model.hpp"

namespace qflag {

/// Classical register contents; bit k is clbit k.
using Record = std::uint64_t;

/// Canonical bitstring of a record, clbit 0 rightmost.
inline std::string record_string(Record r, int num_clbits) {
  std::string s(static_cast<std::size_t>(num_clbits), '0');
  for (int k = 0; k < num_clbits; ++k) {
    if ((r >> k) & 1) s[static_cast<std::size_t>(num_clbits - 1 - k)] = '1';
  }
  return s;
}

inline bool record_bit(Record r, int k) { return (r >> k) & 1; }

/// Circuit lowered against a noise model: schedule-derived idle channels,
/// gate matrices and post-gate channels, all computed once.
struct CompiledStep {
  Instruction in;
  std::vector<std::pair<int, KrausChannel>> idle_before;
  Matrix u;                            // gate matrix
  std::optional<KrausChannel> post;    // gate depolarizing channel
  double error = 0;                    // gate error probability (trajectory sampling)
  std::optional<KrausChannel> during;  // relaxation over an id gate's duration
  std::pair<double, double> readout{0.0, 0.0};
};

struct CompiledCircuit {
  int num_qubits = 0;
  int num_clbits = 0;
  std::vector<CompiledStep> steps;
};

inline CompiledCircuit compile(const Circuit& c, const NoiseModel& noise = {}) {
  if (c.num_clbits() > 64) throw std::invalid_argument("at most 64 classical bits are supported");
  CompiledCircuit cc{c.num_qubits(), c.num_clbits(), {}};
  Scheduler sched(c.num_qubits(), [&](const Instruction& in) {
    return noise.has_idle_noise() ? noise.duration(in.name, in.qubits) : 0.0;
  });
  for (const Instruction& in : c.instructions()) {
    CompiledStep st;
    st.in = in;
    const Scheduler::Slot slot = sched.advance(in);
    for (const auto& [q, gap] : slot.idle_before) {
      if (auto ch = noise.idle_channel(q, gap)) st.idle_before.emplace_back(q, std::move(*ch));
    }
    if (in.kind == OpKind::Gate) {
      st.u = gate_matrix(in.name, in.params);
      st.post = noise.gate_channel(in.name, in.qubits);
      st.error = noise.gate_error(in.name, in.qubits);
      if (in.name == "id") st.during = noise.idle_channel(in.qubits[0], slot.duration);
    } else if (in.kind == OpKind::Measure) {
      st.readout = noise.readout(in.qubits[0]);
    }
    cc.steps.push_back(std::move(st));
  }
  return cc;
}

// ---------------------------------------------------------------------------
// Exact density-matrix simulation.

/// One classical-record branch: probability and the normalized state
/// conditioned on that record.
struct DensityBranch {
  Record record = 0;
  double probability = 0;
  DensityMatrix state;
};

struct SimulationResult {
  int num_clbits = 0;
  // Exact mode.
  std::vector<DensityBranch> branches;  // sorted by record
  std::optional<DensityMatrix> final_density;
  std::map<std::string, double> probabilities;
  // Trajectory mode.
  std::map<std::string, std::uint64_t> counts;
  std::vector<Record> shot_records;
  std::vector<StateVector> shot_states;  // filled when requested

  /// Probability of a record under exact mode (0 when absent).
  double probability_of(Record r) const {
    for (const auto& b : branches) {
      if (b.record == r) return b.probability;
    }
    return 0.0;
  }
};

namespace detail {

struct WeightedBranch {
  Record record;
  Matrix rho;  // unnormalized, trace = branch probability
};

inline void merge_branches(std::vector<WeightedBranch>& br) {
  std::sort(br.begin(), br.end(), [](const auto& a, const auto& b) { return a.record < b.record; });
  std::vector<WeightedBranch> out;
  for (auto& b : br) {
    if (!out.empty() && out.back().record == b.record) {
      out.back().rho += b.rho;
    } else {
      out.push_back(std::move(b));
    }
  }
  br = std::move(out);
}

}  // namespace detail

/// Runs a compiled circuit on a density matrix, branching on measurement
/// outcomes. Branches whose weight falls below 1e-12 of their parent are
/// dropped, which keeps deterministic outcomes deterministic.
inline SimulationResult simulate_density(const CompiledCircuit& cc, const DensityMatrix& initial) {
  if (initial.num_qubits() != cc.num_qubits) {
    throw std::invalid_argument("initial state does not match the circuit width");
  }
  check_density_qubits(cc.num_qubits);
  const int n = cc.num_qubits;
  std::vector<detail::WeightedBranch> br{{0, initial.matrix()}};
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1;
  k1(0, 1) = 1;
  const KrausChannel reset_channel({k0, k1});

  for (const CompiledStep& st : cc.steps) {
    const Instruction& in = st.in;
    for (auto& b : br) {
      for (const auto& [q, ch] : st.idle_before) {
        const int t[1] = {q};
        apply_kraus_inplace(b.rho, n, ch, t);
      }
    }
    switch (in.kind) {
      case OpKind::Barrier:
        break;
      case OpKind::Gate:
        for (auto& b : br) {
          if (in.condition >= 0 && !record_bit(b.record, in.condition)) continue;
          detail::conjugate_inplace(b.rho, n, st.u, in.qubits);
          if (st.during) apply_kraus_inplace(b.rho, n, *st.during, in.qubits);
          if (st.post) apply_kraus_inplace(b.rho, n, *st.post, in.qubits);
        }
        break;
      case OpKind::Reset:
        for (auto& b : br) apply_kraus_inplace(b.rho, n, reset_channel, in.qubits);
        break;
      case OpKind::Measure: {
        const int q = in.qubits[0];
        const Matrix bc = detail::basis_change(in.basis);
        const int t[1] = {q};
        const auto [e0, e1] = st.readout;
        std::vector<detail::WeightedBranch> next;
        for (auto& b : br) {
          const double parent = b.rho.trace().real();
          if (in.basis != Basis::Z) detail::conjugate_inplace(b.rho, n, bc, t);
          for (int m = 0; m < 2; ++m) {
            Matrix part = b.rho;
            detail::project(part, q, m);
            const double w = part.trace().real();
            if (!(w > 1e-12 * parent)) continue;
            if (in.basis != Basis::Z) detail::conjugate_inplace(part, n, bc.adjoint(), t);
            // Readout: recorded bit r with probability P(r | m).
            const double flip = m == 0 ? e0 : e1;
            for (int r = 0; r < 2; ++r) {
              const double pr = r == m ? 1.0 - flip : flip;
              if (pr <= 0) continue;
              Record rec = b.record & ~(Record{1} << in.clbit);
              if (r) rec |= Record{1} << in.clbit;
              next.push_back({rec, pr == 1.0 ? part : Matrix(part * pr)});
            }
          }
        }
        br = std::move(next);
        detail::merge_branches(br);
        break;
      }
    }
  }

  SimulationResult res;
  res.num_clbits = cc.num_clbits;
  detail::merge_branches(br);
  Matrix total = Matrix::Zero(initial.dim(), initial.dim());
  for (auto& b : br) {
    const double p = b.rho.trace().real();
    total += b.rho;
    res.probabilities[record_string(b.record, cc.num_clbits)] += p;
    res.branches.push_back({b.record, p, DensityMatrix::unchecked(b.rho / p)});
  }
  res.final_density = DensityMatrix::unchecked(std::move(total));
  return res;
}

inline SimulationResult simulate_density(const Circuit& c, const NoiseModel& noise = {}) {
  return simulate_density(compile(c, noise), DensityMatrix(c.num_qubits()));
}

inline SimulationResult simulate_density(const Circuit& c, const NoiseModel& noise,
                                         const DensityMatrix& initial) {
  return simulate_density(compile(c, noise), initial);
}

// ---------------------------------------------------------------------------
// Monte-Carlo trajectories.

namespace detail {

/// Samples one Kraus operator with probability ||K psi||^2 and applies it.
inline void apply_kraus_sampled(Vector& psi, int n, const KrausChannel& ch,
                                std::span<const int> targets, Rng& rng) {
  if (ch.is_identity()) return;
  const double u = uniform01(rng);
  double acc = 0;
  Vector candidate;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    candidate = psi;
    apply_matrix(candidate.data(), n, ch.operators()[i], targets);
    const double w = candidate.squaredNorm();
    acc += w;
    if (u < acc || i + 1 == ch.size()) {
      if (w <= 0) continue;
      psi = candidate / std::sqrt(w);
      return;
    }
  }
}

/// Depolarizing error: with probability `error` applies one of the
/// 4^k - 1 non-identity Paulis uniformly.
inline void apply_depolarizing_sampled(Vector& psi, int n, double error,
                                       std::span<const int> targets, Rng& rng) {
  if (error <= 0 || uniform01(rng) >= error) return;
  const int k = static_cast<int>(targets.size());
  const int choices = (1 << (2 * k)) - 1;
  int idx = 1 + static_cast<int>(uniform01(rng) * choices);
  if (idx > choices) idx = choices;
  for (int j = 0; j < k; ++j) {
    const Pauli p = static_cast<Pauli>((idx >> (2 * j)) & 3);
    if (p == Pauli::I) continue;
    const int t[1] = {targets[static_cast<std::size_t>(j)]};
    apply_matrix(psi.data(), n, pauli_matrix(p), t);
  }
}

}  // namespace detail

/// Runs one shot of a compiled circuit in place on `psi`, updating
/// `record`.
inline void run_trajectory(const CompiledCircuit& cc, StateVector& state, Record& record, Rng& rng) {
  const int n = cc.num_qubits;
  Vector& psi = state.mutable_amplitudes();
  for (const CompiledStep& st : cc.steps) {
    const Instruction& in = st.in;
    for (const auto& [q, ch] : st.idle_before) {
      const int t[1] = {q};
      detail::apply_kraus_sampled(psi, n, ch, t, rng);
    }
    switch (in.kind) {
      case OpKind::Barrier:
        break;
      case OpKind::Gate:
        if (in.condition >= 0 && !record_bit(record, in.condition)) break;
        detail::apply_matrix(psi.data(), n, st.u, in.qubits);
        if (st.during) detail::apply_kraus_sampled(psi, n, *st.during, in.qubits, rng);
        detail::apply_depolarizing_sampled(psi, n, st.error, in.qubits, rng);
        break;
      case OpKind::Reset: {
        const int q = in.qubits[0];
        const double p1 = detail::prob_one(psi, q);
        const int m = uniform01(rng) < p1 ? 1 : 0;
        detail::project(psi, q, m);
        psi /= psi.norm();
        if (m == 1) {
          const int t[1] = {q};
          detail::apply_matrix(psi.data(), n, gates::x(), t);
        }
        break;
      }
      case OpKind::Measure: {
        const int q = in.qubits[0];
        const int t[1] = {q};
        const Matrix bc = detail::basis_change(in.basis);
        if (in.basis != Basis::Z) detail::apply_matrix(psi.data(), n, bc, t);
        const double p1 = detail::snap(std::clamp(detail::prob_one(psi, q), 0.0, 1.0));
        const int m = uniform01(rng) < p1 ? 1 : 0;
        detail::project(psi, q, m);
        psi /= psi.norm();
        if (in.basis != Basis::Z) detail::apply_matrix(psi.data(), n, bc.adjoint(), t);
        const double flip = m == 0 ? st.readout.first : st.readout.second;
        int r = m;
        if (flip > 0 && uniform01(rng) < flip) r = 1 - m;
        record = (record & ~(Record{1} << in.clbit)) | (Record(r) << in.clbit);
        break;
      }
    }
  }
}

struct TrajectoryOptions {
  int workers = 1;
  bool keep_states = false;
  std::optional<StateVector> initial;
};

/// Shot-based simulation. Shot i draws from subseed(seed, i), so results
/// are independent of the worker count.
inline SimulationResult simulate_trajectory(const Circuit& c, const NoiseModel& noise,
                                            std::uint64_t shots, std::uint64_t seed,
                                            const TrajectoryOptions& opts = {}) {
  if (shots == 0) throw std::invalid_argument("shots must be positive");
  const CompiledCircuit cc = compile(c, noise);
  const StateVector init = opts.initial ? *opts.initial : StateVector(c.num_qubits());
  if (init.num_qubits() != c.num_qubits()) {
    throw std::invalid_argument("initial state does not match the circuit width");
  }
  SimulationResult res;
  res.num_clbits = c.num_clbits();
  res.shot_records.assign(shots, 0);
  if (opts.keep_states) res.shot_states.assign(shots, init);
  parallel_for(shots, opts.workers, [&](std::size_t i) {
    Rng rng(subseed(seed, i));
    StateVector psi = init;
    Record rec = 0;
    run_trajectory(cc, psi, rec, rng);
    res.shot_records[i] = rec;
    if (opts.keep_states) res.shot_states[i] = std::move(psi);
  });
  for (Record r : res.shot_records) ++res.counts[record_string(r, c.num_clbits())];
  return res;
}

}  // namespace qflag
