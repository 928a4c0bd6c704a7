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
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qflag/core/gates.hpp"
#include "qflag/core/ops.hpp"
#include "qflag/core/types.hpp"

namespace qflag {

struct GateInfo {
  std::string_view name;
  int arity;
  int num_params;
};

/// The supported gate set.
inline constexpr std::array<GateInfo, 13> kGateSet{{
    {"id", 1, 0},
    {"u1", 1, 1},
    {"u2", 1, 2},
    {"u3", 1, 3},
    {"h", 1, 0},
    {"x", 1, 0},
    {"y", 1, 0},
    {"z", 1, 0},
    {"s", 1, 0},
    {"sdg", 1, 0},
    {"cx", 2, 0},
    {"cz", 2, 0},
    {"swap", 2, 0},
}};

/// Returns the gate's table entry or nullptr when unsupported.
inline const GateInfo* find_gate(std::string_view name) {
  for (const GateInfo& g : kGateSet) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

/// Matrix of a supported gate; bit j of the matrix acts on operand j.
inline Matrix gate_matrix(std::string_view name, const std::vector<double>& params = {}) {
  const GateInfo* info = find_gate(name);
  if (!info) throw std::invalid_argument("unsupported gate '" + std::string(name) + "'");
  if (static_cast<int>(params.size()) != info->num_params) {
    throw std::invalid_argument("gate '" + std::string(name) + "' takes " +
                                std::to_string(info->num_params) + " parameters");
  }
  if (name == "id") return gates::id();
  if (name == "u1") return gates::u1(params[0]);
  if (name == "u2") return gates::u2(params[0], params[1]);
  if (name == "u3") return gates::u3(params[0], params[1], params[2]);
  if (name == "h") return gates::h();
  if (name == "x") return gates::x();
  if (name == "y") return gates::y();
  if (name == "z") return gates::z();
  if (name == "s") return gates::s();
  if (name == "sdg") return gates::sdg();
  if (name == "cx") return gates::cx();
  if (name == "cz") return gates::cz();
  return gates::swap();
}

enum class OpKind { Gate, Barrier, Measure, Reset };

/// One circuit element. Gates may carry a classical condition: the gate runs
/// only when clbit `condition` holds 1.
struct Instruction {
  OpKind kind = OpKind::Gate;
  std::string name;            // gate name (Gate only)
  std::vector<double> params;  // gate parameters (Gate only)
  std::vector<int> qubits;
  int clbit = -1;         // Measure destination
  Basis basis = Basis::Z;  // Measure basis
  int condition = -1;     // Gate condition bit, -1 when unconditioned

  bool is_gate() const { return kind == OpKind::Gate; }
  bool is_two_qubit_gate() const { return kind == OpKind::Gate && qubits.size() == 2; }

  bool operator==(const Instruction&) const = default;

  static Instruction gate(std::string name, std::vector<int> qubits,
                          std::vector<double> params = {}) {
    Instruction in;
    in.kind = OpKind::Gate;
    in.name = std::move(name);
    in.qubits = std::move(qubits);
    in.params = std::move(params);
    return in;
  }
  static Instruction barrier(std::vector<int> qubits) {
    Instruction in;
    in.kind = OpKind::Barrier;
    in.qubits = std::move(qubits);
    return in;
  }
  static Instruction measure(int qubit, int clbit, Basis basis = Basis::Z) {
    Instruction in;
    in.kind = OpKind::Measure;
    in.qubits = {qubit};
    in.clbit = clbit;
    in.basis = basis;
    return in;
  }
  static Instruction reset(int qubit) {
    Instruction in;
    in.kind = OpKind::Reset;
    in.qubits = {qubit};
    return in;
  }
};

struct CircuitMetadata {
  std::string name;
  std::vector<int> layout;  // logical -> physical, empty when unset
};

/// Ordered instruction list over one quantum and one classical register.
/// Every append is validated, so a Circuit is always well formed.
class Circuit {
 public:
  Circuit() = default;
  Circuit(int num_qubits, int num_clbits = 0) : num_qubits_(num_qubits), num_clbits_(num_clbits) {
    if (num_qubits < 0 || num_clbits < 0) throw std::invalid_argument("negative register size");
  }

  int num_qubits() const { return num_qubits_; }
  int num_clbits() const { return num_clbits_; }
  const std::vector<Instruction>& instructions() const { return instrs_; }
  std::size_t size() const { return instrs_.size(); }
  bool empty() const { return instrs_.empty(); }
  const Instruction& operator[](std::size_t i) const { return instrs_.at(i); }

  CircuitMetadata& metadata() { return meta_; }
  const CircuitMetadata& metadata() const { return meta_; }

  /// Equality of registers and instructions; metadata is ignored.
  bool operator==(const Circuit& o) const {
    return num_qubits_ == o.num_qubits_ && num_clbits_ == o.num_clbits_ && instrs_ == o.instrs_;
  }

  Circuit& append(Instruction in) {
    validate(in);
    if (in.kind == OpKind::Measure) written_.at(static_cast<std::size_t>(in.clbit)) = true;
    instrs_.push_back(std::move(in));
    return *this;
  }

  Circuit& gate(std::string name, std::vector<int> qubits, std::vector<double> params = {}) {
    return append(Instruction::gate(std::move(name), std::move(qubits), std::move(params)));
  }

  Circuit& id(int q) { return gate("id", {q}); }
  Circuit& h(int q) { return gate("h", {q}); }
  Circuit& x(int q) { return gate("x", {q}); }
  Circuit& y(int q) { return gate("y", {q}); }
  Circuit& z(int q) { return gate("z", {q}); }
  Circuit& s(int q) { return gate("s", {q}); }
  Circuit& sdg(int q) { return gate("sdg", {q}); }
  Circuit& u1(double l, int q) { return gate("u1", {q}, {l}); }
  Circuit& u2(double p, double l, int q) { return gate("u2", {q}, {p, l}); }
  Circuit& u3(double t, double p, double l, int q) { return gate("u3", {q}, {t, p, l}); }
  Circuit& cx(int c, int t) { return gate("cx", {c, t}); }
  Circuit& cz(int a, int b) { return gate("cz", {a, b}); }
  Circuit& swap(int a, int b) { return gate("swap", {a, b}); }

  /// Barrier on `qubits`, or on every qubit when empty.
  Circuit& barrier(std::vector<int> qubits = {}) {
    if (qubits.empty()) {
      qubits.resize(static_cast<std::size_t>(num_qubits_));
      std::iota(qubits.begin(), qubits.end(), 0);
    }
    return append(Instruction::barrier(std::move(qubits)));
  }
  Circuit& measure(int q, int c, Basis basis = Basis::Z) {
    return append(Instruction::measure(q, c, basis));
  }
  Circuit& reset(int q) { return append(Instruction::reset(q)); }

  /// Gate executed only when clbit `cond` is 1.
  Circuit& c_if(int cond, std::string name, std::vector<int> qubits,
                std::vector<double> params = {}) {
    Instruction in = Instruction::gate(std::move(name), std::move(qubits), std::move(params));
    in.condition = cond;
    return append(std::move(in));
  }

  /// Appends `other`, mapping its qubit i to qubit_map[i] and clbit j to
  /// clbit_map[j] (identity maps when empty).
  Circuit& compose(const Circuit& other, const std::vector<int>& qubit_map = {},
                   const std::vector<int>& clbit_map = {}) {
    auto mq = [&](int q) { return qubit_map.empty() ? q : qubit_map.at(static_cast<std::size_t>(q)); };
    auto mc = [&](int c) { return clbit_map.empty() ? c : clbit_map.at(static_cast<std::size_t>(c)); };
    for (Instruction in : other.instrs_) {
      for (int& q : in.qubits) q = mq(q);
      if (in.clbit >= 0) in.clbit = mc(in.clbit);
      if (in.condition >= 0) in.condition = mc(in.condition);
      append(std::move(in));
    }
    return *this;
  }

  /// True when the circuit only contains unconditioned gates and barriers.
  bool is_unitary_only() const {
    return std::all_of(instrs_.begin(), instrs_.end(), [](const Instruction& in) {
      return in.kind == OpKind::Barrier || (in.kind == OpKind::Gate && in.condition < 0);
    });
  }

 private:
  void validate(const Instruction& in) const {
    for (int q : in.qubits) {
      if (q < 0 || q >= num_qubits_) {
        throw std::out_of_range("qubit " + std::to_string(q) + " outside register of width " +
                                std::to_string(num_qubits_));
      }
    }
    for (std::size_t i = 0; i < in.qubits.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (in.qubits[i] == in.qubits[j]) {
          throw std::invalid_argument("repeated qubit " + std::to_string(in.qubits[i]));
        }
      }
    }
    switch (in.kind) {
      case OpKind::Gate: {
        const GateInfo* info = find_gate(in.name);
        if (!info) throw std::invalid_argument("unsupported gate '" + in.name + "'");
        if (static_cast<int>(in.qubits.size()) != info->arity) {
          throw std::invalid_argument("gate '" + in.name + "' acts on " +
                                      std::to_string(info->arity) + " qubit(s)");
        }
        if (static_cast<int>(in.params.size()) != info->num_params) {
          throw std::invalid_argument("gate '" + in.name + "' takes " +
                                      std::to_string(info->num_params) + " parameter(s)");
        }
        if (in.condition >= 0) {
          if (in.condition >= num_clbits_) throw std::out_of_range("condition bit out of range");
          if (!written_.at(static_cast<std::size_t>(in.condition))) {
            throw std::invalid_argument("condition on classical bit " +
                                        std::to_string(in.condition) +
                                        " before any measurement writes it");
          }
        }
        break;
      }
      case OpKind::Barrier:
        if (in.qubits.empty()) throw std::invalid_argument("barrier needs at least one qubit");
        break;
      case OpKind::Measure:
        if (in.qubits.size() != 1) throw std::invalid_argument("measure acts on one qubit");
        if (in.clbit < 0 || in.clbit >= num_clbits_) {
          throw std::out_of_range("classical bit " + std::to_string(in.clbit) + " out of range");
        }
        break;
      case OpKind::Reset:
        if (in.qubits.size() != 1) throw std::invalid_argument("reset acts on one qubit");
        break;
    }
    if (in.kind != OpKind::Gate && in.condition >= 0) {
      throw std::invalid_argument("only gates may be classically conditioned");
    }
  }

  int num_qubits_ = 0;
  int num_clbits_ = 0;
  std::vector<Instruction> instrs_;
  std::vector<bool> written_ = std::vector<bool>(static_cast<std::size_t>(num_clbits_), false);
  CircuitMetadata meta_;
};

}  // namespace qflag
