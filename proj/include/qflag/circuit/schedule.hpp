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
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qflag/circuit/circuit.hpp"
#include "qflag/noise/device.hpp"

namespace qflag {

/// As-soon-as-possible scheduler. Gates start when all their qubits are
/// free and past any barrier fence; measurements and resets take no time;
/// barriers only fence the listed qubits.
class Scheduler {
 public:
  using DurationFn = std::function<double(const Instruction&)>;

  struct Slot {
    double start = 0;
    double duration = 0;
    std::vector<std::pair<int, double>> idle_before;  // (qubit, gap) with gap > 0
  };

  Scheduler(int num_qubits, DurationFn duration)
      : duration_(std::move(duration)),
        ready_(static_cast<std::size_t>(num_qubits), 0.0),
        fence_(static_cast<std::size_t>(num_qubits), 0.0),
        measured_at_(static_cast<std::size_t>(num_qubits), -1.0) {}

  Slot advance(const Instruction& in) {
    Slot slot;
    if (in.kind == OpKind::Barrier) {
      double t = 0;
      for (int q : in.qubits) t = std::max({t, ready(q), fence(q)});
      for (int q : in.qubits) fence_[static_cast<std::size_t>(q)] = t;
      return slot;
    }
    for (int q : in.qubits) slot.start = std::max({slot.start, ready(q), fence(q)});
    slot.duration = in.kind == OpKind::Gate ? duration_(in) : 0.0;
    for (int q : in.qubits) {
      const double gap = slot.start - ready(q);
      if (gap > 0) slot.idle_before.emplace_back(q, gap);
      ready_[static_cast<std::size_t>(q)] = slot.start + slot.duration;
    }
    if (in.kind == OpKind::Measure) measured_at_[static_cast<std::size_t>(in.qubits[0])] = slot.start;
    return slot;
  }

  /// Max over qubits of the time of the qubit's last measurement, or of its
  /// last busy time when it is never measured.
  double runtime() const {
    double t = 0;
    for (std::size_t q = 0; q < ready_.size(); ++q) {
      t = std::max(t, measured_at_[q] >= 0 ? measured_at_[q] : ready_[q]);
    }
    return t;
  }

 private:
  double ready(int q) const { return ready_.at(static_cast<std::size_t>(q)); }
  double fence(int q) const { return fence_.at(static_cast<std::size_t>(q)); }

  DurationFn duration_;
  std::vector<double> ready_, fence_, measured_at_;
};

/// Number of CNOTs a gate contributes to a dependency chain.
inline int entangling_weight(const Instruction& in) {
  if (!in.is_two_qubit_gate()) return 0;
  return in.name == "swap" ? 3 : 1;
}

/// Longest chain of entangling gates under qubit-sharing dependencies. A
/// swap counts as its three CNOTs; barriers synchronize the listed qubits.
inline int cnot_depth(const Circuit& c) {
  std::vector<int> depth(static_cast<std::size_t>(c.num_qubits()), 0);
  for (const Instruction& in : c.instructions()) {
    if (in.kind == OpKind::Barrier) {
      int d = 0;
      for (int q : in.qubits) d = std::max(d, depth[static_cast<std::size_t>(q)]);
      for (int q : in.qubits) depth[static_cast<std::size_t>(q)] = d;
      continue;
    }
    const int w = entangling_weight(in);
    if (w == 0) continue;
    int d = 0;
    for (int q : in.qubits) d = std::max(d, depth[static_cast<std::size_t>(q)]);
    for (int q : in.qubits) depth[static_cast<std::size_t>(q)] = d + w;
  }
  return depth.empty() ? 0 : *std::max_element(depth.begin(), depth.end());
}

/// Gate name -> number of occurrences (gates only; conditioned gates count).
inline std::map<std::string, int> gate_counts(const Circuit& c) {
  std::map<std::string, int> counts;
  for (const Instruction& in : c.instructions()) {
    if (in.kind == OpKind::Gate) ++counts[in.name];
  }
  return counts;
}

/// Runtime in microseconds: ASAP schedule with device durations, measured
/// up to each qubit's last measurement (measurement time itself excluded).
inline double estimate_runtime(const Circuit& c, const DeviceModel& device) {
  Scheduler s(c.num_qubits(), [&](const Instruction& in) {
    return device.gate_cost(in.name, in.qubits).duration_us;
  });
  for (const Instruction& in : c.instructions()) s.advance(in);
  return s.runtime();
}

}  // namespace qflag
