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
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qflag/circuit/circuit.hpp"
#include "qflag/core/ops.hpp"
#include "qflag/noise/device.hpp"

namespace qflag {

/// Undirected coupling graph; cx runs in either direction on an edge.
class CouplingGraph {
 public:
  CouplingGraph() = default;
  CouplingGraph(int num_qubits, const std::vector<Edge>& edges) : n_(num_qubits), adj_(static_cast<std::size_t>(num_qubits)) {
    for (const auto& [a, b] : edges) {
      if (a < 0 || b < 0 || a >= n_ || b >= n_ || a == b) {
        throw std::invalid_argument("coupling edge (" + std::to_string(a) + ", " + std::to_string(b) + ") is invalid");
      }
      adj_[static_cast<std::size_t>(a)].insert(b);
      adj_[static_cast<std::size_t>(b)].insert(a);
    }
  }
  explicit CouplingGraph(const DeviceModel& d) : CouplingGraph(d.num_qubits, d.edges) {}

  int num_qubits() const { return n_; }
  bool has_edge(int a, int b) const {
    return a >= 0 && a < n_ && adj_[static_cast<std::size_t>(a)].count(b) > 0;
  }
  const std::set<int>& neighbors(int q) const { return adj_.at(static_cast<std::size_t>(q)); }

  /// BFS distances from `q` (-1 when unreachable).
  std::vector<int> distances_from(int q) const {
    std::vector<int> dist(static_cast<std::size_t>(n_), -1);
    std::deque<int> queue{q};
    dist[static_cast<std::size_t>(q)] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : neighbors(u)) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
    return dist;
  }

  /// Lexicographically smallest shortest path from a to b (inclusive).
  std::vector<int> shortest_path(int a, int b) const {
    const std::vector<int> to_b = distances_from(b);
    if (to_b[static_cast<std::size_t>(a)] < 0) {
      throw std::invalid_argument("qubits " + std::to_string(a) + " and " + std::to_string(b) +
                                  " are disconnected in the coupling graph");
    }
    std::vector<int> path{a};
    while (path.back() != b) {
      const int d = to_b[static_cast<std::size_t>(path.back())];
      for (int v : neighbors(path.back())) {
        if (to_b[static_cast<std::size_t>(v)] == d - 1) {
          path.push_back(v);
          break;
        }
      }
    }
    return path;
  }

 private:
  int n_ = 0;
  std::vector<std::set<int>> adj_;
};

/// Circuit on physical qubits. Layout maps are indexed by logical qubit;
/// swap_permutation[p] is where the content initially on physical p ends up.
struct RoutedCircuit {
  Circuit circuit;
  std::vector<int> initial_layout;
  std::vector<int> final_permutation;
  std::vector<int> swap_permutation;
  int swap_count = 0;
};

namespace detail {

inline void check_layout(const std::vector<int>& layout, int logical, int physical) {
  if (static_cast<int>(layout.size()) != logical) {
    throw std::invalid_argument("layout has " + std::to_string(layout.size()) + " entries for " +
                                std::to_string(logical) + " logical qubits");
  }
  std::vector<bool> used(static_cast<std::size_t>(physical), false);
  for (int p : layout) {
    if (p < 0 || p >= physical) throw std::invalid_argument("layout qubit " + std::to_string(p) + " is not on the device");
    if (used[static_cast<std::size_t>(p)]) throw std::invalid_argument("layout is not injective (qubit " + std::to_string(p) + ")");
    used[static_cast<std::size_t>(p)] = true;
  }
}

}  // namespace detail

/// Greedy router: gates are processed in order; a two-qubit gate on
/// non-adjacent qubits first moves the operand on the lower physical index
/// along the lexicographically smallest shortest path, one swap (3 cx) per
/// step, until it neighbours the other operand.
inline RoutedCircuit route(const Circuit& c, const CouplingGraph& g, const std::vector<int>& layout) {
  detail::check_layout(layout, c.num_qubits(), g.num_qubits());
  RoutedCircuit r;
  r.circuit = Circuit(g.num_qubits(), c.num_clbits());
  r.circuit.metadata() = c.metadata();
  r.initial_layout = layout;
  // content[p]: original physical slot whose state now sits on p.
  std::vector<int> content(static_cast<std::size_t>(g.num_qubits()));
  std::iota(content.begin(), content.end(), 0);
  std::vector<int> pos = layout;

  auto do_swap = [&](int a, int b) {
    r.circuit.cx(a, b).cx(b, a).cx(a, b);
    ++r.swap_count;
    std::swap(content[static_cast<std::size_t>(a)], content[static_cast<std::size_t>(b)]);
    for (int& p : pos) {
      if (p == a) {
        p = b;
      } else if (p == b) {
        p = a;
      }
    }
  };

  for (const Instruction& in : c.instructions()) {
    if (in.kind != OpKind::Barrier && in.qubits.size() > 2) throw std::invalid_argument("route: gates on more than two qubits are not supported");
    if (in.kind == OpKind::Gate && in.qubits.size() == 2) {
      int pa = pos[static_cast<std::size_t>(in.qubits[0])];
      int pb = pos[static_cast<std::size_t>(in.qubits[1])];
      if (!g.has_edge(pa, pb)) {
        const bool move_a = pa < pb;
        const std::vector<int> path = g.shortest_path(move_a ? pa : pb, move_a ? pb : pa);
        for (std::size_t i = 0; i + 2 < path.size(); ++i) do_swap(path[i], path[i + 1]);
        pa = pos[static_cast<std::size_t>(in.qubits[0])];
        pb = pos[static_cast<std::size_t>(in.qubits[1])];
      }
    }
    Instruction out = in;
    for (int& q : out.qubits) q = pos[static_cast<std::size_t>(q)];
    if (in.kind == OpKind::Barrier && in.qubits.empty()) out.qubits = pos;
    r.circuit.append(std::move(out));
  }
  r.final_permutation = pos;
  r.swap_permutation.assign(static_cast<std::size_t>(g.num_qubits()), 0);
  for (int p = 0; p < g.num_qubits(); ++p) r.swap_permutation[static_cast<std::size_t>(content[static_cast<std::size_t>(p)])] = p;
  return r;
}

namespace detail {

// Unitary of a measurement-free circuit restricted to `qubits` (qubits[i]
// becomes bit i); terminal measurements are ignored.
inline Matrix circuit_unitary(const Circuit& c, const std::vector<int>& qubits) {
  std::vector<int> slot(static_cast<std::size_t>(c.num_qubits()), -1);
  for (std::size_t i = 0; i < qubits.size(); ++i) slot[static_cast<std::size_t>(qubits[i])] = static_cast<int>(i);
  const int k = static_cast<int>(qubits.size());
  const Eigen::Index dim = Eigen::Index{1} << k;
  Matrix u = Matrix::Identity(dim, dim);
  std::vector<bool> measured(static_cast<std::size_t>(c.num_qubits()), false);
  for (const Instruction& in : c.instructions()) {
    if (in.kind == OpKind::Barrier) continue;
    if (in.kind == OpKind::Measure) {
      measured[static_cast<std::size_t>(in.qubits[0])] = true;
      continue;
    }
    for (int q : in.qubits) {
      if (measured[static_cast<std::size_t>(q)]) {
        throw std::invalid_argument("verify_equivalence: only terminal measurements are supported");
      }
    }
    if (in.kind == OpKind::Reset || in.condition >= 0) {
      throw std::invalid_argument("verify_equivalence: resets and conditioned gates have no unitary");
    }
    std::vector<int> bits;
    for (int q : in.qubits) bits.push_back(slot[static_cast<std::size_t>(q)]);
    const Matrix g = gate_matrix(in.name, in.params);
    for (Eigen::Index col = 0; col < dim; ++col) apply_matrix(u.col(col).data(), k, g, bits);
  }
  return u;
}

}  // namespace detail

/// True iff routed.circuit equals `original` placed on initial_layout,
/// followed by the routing permutation, up to global phase (tolerance 1e-9).
inline bool verify_equivalence(const Circuit& original, const RoutedCircuit& routed, double tol = 1e-9) {
  const int physical = routed.circuit.num_qubits();
  detail::check_layout(routed.initial_layout, original.num_qubits(), physical);
  std::set<int> active_set(routed.initial_layout.begin(), routed.initial_layout.end());
  for (const Instruction& in : routed.circuit.instructions()) {
    if (in.kind != OpKind::Barrier) active_set.insert(in.qubits.begin(), in.qubits.end());
  }
  for (int p : active_set) active_set.insert(routed.swap_permutation.at(static_cast<std::size_t>(p)));
  const std::vector<int> active(active_set.begin(), active_set.end());
  if (active.size() > 8) {
    throw ResourceLimitError("verify_equivalence: " + std::to_string(active.size()) +
                             " active qubits exceed the dense comparison limit of 8");
  }
  const int k = static_cast<int>(active.size());
  std::vector<int> slot(static_cast<std::size_t>(physical), -1);
  for (int i = 0; i < k; ++i) slot[static_cast<std::size_t>(active[static_cast<std::size_t>(i)])] = i;

  // Expected: original on the initial layout (idle elsewhere), then the
  // net permutation of the active slots.
  std::vector<int> placed;
  for (int p : routed.initial_layout) placed.push_back(slot[static_cast<std::size_t>(p)]);
  Circuit embedded(k, original.num_clbits());
  for (Instruction in : original.instructions()) {
    if (in.kind == OpKind::Barrier) continue;
    for (int& q : in.qubits) q = placed[static_cast<std::size_t>(q)];
    embedded.append(std::move(in));
  }
  std::vector<int> all(static_cast<std::size_t>(k));
  std::iota(all.begin(), all.end(), 0);
  const Matrix u_orig = detail::circuit_unitary(embedded, all);
  const Matrix u_routed = detail::circuit_unitary(routed.circuit, active);

  const Eigen::Index dim = u_orig.rows();
  Matrix expected(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    Eigen::Index y = 0;
    for (int i = 0; i < k; ++i) {
      if ((x >> i) & 1) {
        const int dest = routed.swap_permutation[static_cast<std::size_t>(active[static_cast<std::size_t>(i)])];
        y |= Eigen::Index{1} << slot[static_cast<std::size_t>(dest)];
      }
    }
    expected.row(y) = u_orig.row(x);
  }
  Eigen::Index r = 0, cidx = 0;
  expected.cwiseAbs().maxCoeff(&r, &cidx);
  if (std::abs(u_routed(r, cidx)) < 1e-12) return false;
  const cplx phase = u_routed(r, cidx) / expected(r, cidx);
  if (std::abs(std::abs(phase) - 1) > tol) return false;
  return (u_routed - phase * expected).cwiseAbs().maxCoeff() <= tol;
}

/// Sum of -log(1 - error) over the gates of `c` routed onto `device` with
/// `layout`; lower is better.
inline double layout_score(const Circuit& c, const DeviceModel& device, const std::vector<int>& layout) {
  const RoutedCircuit r = route(c, CouplingGraph(device), layout);
  double score = 0;
  for (const Instruction& in : r.circuit.instructions()) {
    if (in.kind != OpKind::Gate) continue;
    const double e = device.gate_cost(in.name, in.qubits).error;
    if (e >= 1) return std::numeric_limits<double>::infinity();
    score += -std::log1p(-e);
  }
  return score;
}

}  // namespace qflag
