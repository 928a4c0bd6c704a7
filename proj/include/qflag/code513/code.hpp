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

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qflag/circuit/circuit.hpp"
#include "qflag/core/ops.hpp"
#include "qflag/core/pauli.hpp"
#include "qflag/core/state.hpp"

namespace qflag {

/// Stabilizer code description. Letter j of every string acts on qubit j.
struct StabilizerCode {
  int n = 0;
  int k = 0;
  int d = 0;
  std::vector<PauliString> generators;
  PauliString logical_x;
  PauliString logical_z;
};

/// The [[5,1,3]] code with the cyclic generator order
/// XZZXI, IXZZX, XIXZZ, ZXIXZ.
inline const StabilizerCode& five_qubit_code() {
  static const StabilizerCode code{
      5,
      1,
      3,
      {PauliString::from_string("XZZXI"), PauliString::from_string("IXZZX"),
       PauliString::from_string("XIXZZ"), PauliString::from_string("ZXIXZ")},
      PauliString::from_string("XXXXX"),
      PauliString::from_string("ZZZZZ"),
  };
  return code;
}

/// Syndrome bits ordered by generator index; bit i is 1 when the error
/// anticommutes with generator i.
using Syndrome = std::array<int, 4>;

/// Packs a syndrome into 0..15 with generator i at bit i.
inline int syndrome_index(const Syndrome& s) {
  int v = 0;
  for (int i = 0; i < 4; ++i) v |= (s[static_cast<std::size_t>(i)] & 1) << i;
  return v;
}

inline Syndrome syndrome_from_index(int v) {
  Syndrome s{};
  for (int i = 0; i < 4; ++i) s[static_cast<std::size_t>(i)] = (v >> i) & 1;
  return s;
}

inline std::string syndrome_string(const Syndrome& s) {
  std::string out;
  for (int b : s) out += static_cast<char>('0' + b);
  return out;
}

inline Syndrome syndrome_of(const PauliString& err, const StabilizerCode& code = five_qubit_code()) {
  if (err.num_qubits() != code.n) {
    throw std::invalid_argument("syndrome_of: expected a " + std::to_string(code.n) + "-qubit Pauli");
  }
  Syndrome s{};
  for (std::size_t i = 0; i < 4; ++i) s[i] = err.commutes_with(code.generators[i]) ? 0 : 1;
  return s;
}

/// All 16 elements of the stabilizer group as letter strings (signs are
/// irrelevant for error reduction and are dropped).
inline const std::vector<PauliString>& stabilizer_group() {
  static const std::vector<PauliString> group = [] {
    const auto& g = five_qubit_code().generators;
    std::vector<PauliString> out;
    for (int mask = 0; mask < 16; ++mask) {
      PauliString p(5);
      for (int i = 0; i < 4; ++i) {
        if ((mask >> i) & 1) p = p.product_up_to_phase(g[static_cast<std::size_t>(i)]);
      }
      p.set_sign(1);
      out.push_back(p);
    }
    return out;
  }();
  return group;
}

/// Minimum-weight representative of err times the stabilizer group; ties go
/// to the lexicographically smallest letter string. Logical operators are
/// not modded out.
inline PauliString reduce_modulo_stabilizers(const PauliString& err) {
  PauliString best(5);
  bool have = false;
  for (const PauliString& s : stabilizer_group()) {
    PauliString cand = err.product_up_to_phase(s);
    cand.set_sign(1);
    if (!have || cand.weight() < best.weight() ||
        (cand.weight() == best.weight() && cand.str(false) < best.str(false))) {
      best = cand;
      have = true;
    }
  }
  return best;
}

/// Unique weight-<=1 Pauli with syndrome `s`.
inline PauliString decode(const Syndrome& s) {
  static const std::array<PauliString, 16> table = [] {
    std::array<PauliString, 16> t;
    t.fill(PauliString(5));
    for (int q = 0; q < 5; ++q) {
      for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
        const PauliString e = PauliString::single(5, q, p);
        t[static_cast<std::size_t>(syndrome_index(syndrome_of(e)))] = e;
      }
    }
    return t;
  }();
  return table[static_cast<std::size_t>(syndrome_index(s))];
}

/// Generator and logical-X expectations of a 5-qubit state.
struct CodestateReport {
  std::array<double, 4> generators{};
  double logical_x = 0;

  bool in_codespace(double tol = 1e-9) const {
    for (double g : generators) {
      if (std::abs(g - 1) > tol) return false;
    }
    return true;
  }
};

inline CodestateReport verify_codestate(const DensityMatrix& rho) {
  if (rho.num_qubits() != 5) throw std::invalid_argument("verify_codestate: expected a 5-qubit state");
  const auto& code = five_qubit_code();
  CodestateReport r;
  for (std::size_t i = 0; i < 4; ++i) r.generators[i] = expectation(rho, code.generators[i]);
  r.logical_x = expectation(rho, code.logical_x);
  return r;
}

/// |-><sub>L</sub> as the 5-cycle graph state with logical qubit l placed on
/// wire order[l] of an order.size()-qubit register (other wires in |0>).
inline StateVector minus_logical_state(const std::vector<int>& order = {0, 1, 2, 3, 4}) {
  if (order.size() != 5) throw std::invalid_argument("minus_logical_state: order needs 5 entries");
  int width = 0;
  for (int w : order) width = std::max(width, w + 1);
  Vector amp = Vector::Zero(Eigen::Index{1} << width);
  const double norm = 1 / std::sqrt(32.0);
  for (int x = 0; x < 32; ++x) {
    std::uint64_t idx = 0;
    for (int l = 0; l < 5; ++l) {
      if ((x >> l) & 1) idx |= std::uint64_t{1} << order[static_cast<std::size_t>(l)];
    }
    int edges = 0;
    for (int l = 0; l < 5; ++l) edges += ((x >> l) & 1) & ((x >> ((l + 1) % 5)) & 1);
    amp(static_cast<Eigen::Index>(idx)) = edges % 2 ? -norm : norm;
  }
  return StateVector(std::move(amp));
}

// --- logical-state preparation ----------------------------------------------

enum class PrepVariant { IdealDepth3, MelbourneDepth4, MelbourneDepth6, Vigo };

inline constexpr std::array<PrepVariant, 4> kPrepVariants{
    PrepVariant::IdealDepth3, PrepVariant::MelbourneDepth4, PrepVariant::MelbourneDepth6, PrepVariant::Vigo};

inline std::string_view prep_variant_name(PrepVariant v) {
  switch (v) {
    case PrepVariant::IdealDepth3: return "ideal-depth3";
    case PrepVariant::MelbourneDepth4: return "melbourne-depth4";
    case PrepVariant::MelbourneDepth6: return "melbourne-depth6";
    case PrepVariant::Vigo: return "vigo";
  }
  return "";
}

inline PrepVariant prep_variant_from_name(std::string_view name) {
  for (PrepVariant v : kPrepVariants) {
    if (prep_variant_name(v) == name) return v;
  }
  throw std::invalid_argument("unknown preparation variant '" + std::string(name) + "'");
}

/// Preparation circuit on 5 wires. Logical qubit l starts on wire
/// input_order[l] and holds its share of |-><sub>L</sub> on wire
/// output_order[l] at the end.
struct PrepCircuit {
  Circuit circuit;
  std::vector<int> input_order;
  std::vector<int> output_order;
};

namespace detail {

// Emits graph-state preparation from a list of wire operations, written
// with h and cx only. Hadamards are applied lazily so adjacent pairs cancel.
class GraphPrepWriter {
 public:
  explicit GraphPrepWriter(int n) : circuit_(n), pending_(static_cast<std::size_t>(n), true) {}

  // CZ between wires a and b.
  void cz(int a, int b) {
    toggle(b);
    cx(a, b);
    toggle(b);
  }
  // CZ followed by exchanging the wires' contents.
  void czswap(int a, int b) {
    toggle(a);
    cx(a, b);
    cx(b, a);
    toggle(b);
  }
  void swap(int a, int b) {
    cx(a, b);
    cx(b, a);
    cx(a, b);
  }

  Circuit finish() {
    for (int q = 0; q < circuit_.num_qubits(); ++q) flush(q);
    return std::move(circuit_);
  }

 private:
  void toggle(int q) { pending_[static_cast<std::size_t>(q)] = !pending_[static_cast<std::size_t>(q)]; }
  void flush(int q) {
    if (pending_[static_cast<std::size_t>(q)]) circuit_.h(q);
    pending_[static_cast<std::size_t>(q)] = false;
  }
  void cx(int c, int t) {
    flush(c);
    flush(t);
    circuit_.cx(c, t);
  }

  Circuit circuit_;
  std::vector<bool> pending_;
};

}  // namespace detail

inline PrepCircuit prep_minus_logical(PrepVariant variant) {
  PrepCircuit out;
  out.input_order = {0, 1, 2, 3, 4};
  out.output_order = {0, 1, 2, 3, 4};
  switch (variant) {
    case PrepVariant::IdealDepth3: {
      Circuit c(5);
      for (int q = 0; q < 5; ++q) c.h(q);
      c.cz(0, 1).cz(2, 3).cz(1, 2).cz(3, 4).cz(4, 0);
      out.circuit = std::move(c);
      break;
    }
    case PrepVariant::MelbourneDepth4: {
      // Needs wire pairs 0-1, 1-2, 2-3, 3-4 and 1-4.
      detail::GraphPrepWriter w(5);
      w.cz(1, 2);
      w.cz(3, 4);
      w.cz(2, 3);
      w.czswap(0, 1);
      w.cz(1, 4);
      out.circuit = w.finish();
      out.output_order = {1, 0, 2, 3, 4};
      break;
    }
    case PrepVariant::MelbourneDepth6: {
      detail::GraphPrepWriter w(5);
      w.cz(1, 2);
      w.cz(3, 4);
      w.cz(0, 1);
      w.cz(2, 3);
      w.swap(0, 1);
      w.cz(1, 4);
      out.circuit = w.finish();
      out.output_order = {1, 0, 2, 3, 4};
      break;
    }
    case PrepVariant::Vigo: {
      // Wire pairs 0-1, 1-2, 1-3 and 3-4 only.
      detail::GraphPrepWriter w(5);
      w.czswap(1, 3);
      w.cz(0, 1);
      w.cz(3, 4);
      w.czswap(1, 3);
      w.czswap(1, 2);
      w.czswap(0, 1);
      w.czswap(3, 4);
      out.circuit = w.finish();
      out.input_order = {1, 2, 0, 3, 4};
      out.output_order = {2, 0, 1, 4, 3};
      break;
    }
  }
  out.circuit.metadata().name = "prep-" + std::string(prep_variant_name(variant));
  return out;
}

inline PrepCircuit prep_minus_logical(std::string_view variant) {
  return prep_minus_logical(prep_variant_from_name(variant));
}

}  // namespace qflag
