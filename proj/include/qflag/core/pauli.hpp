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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qflag/core/types.hpp"

namespace qflag {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I':
    case '_':
      return Pauli::I;
    case 'X':
      return Pauli::X;
    case 'Y':
      return Pauli::Y;
    case 'Z':
      return Pauli::Z;
    default:
      throw std::invalid_argument(std::string("not a Pauli letter: '") + c + "'");
  }
}

inline bool has_x(Pauli p) { return p == Pauli::X || p == Pauli::Y; }
inline bool has_z(Pauli p) { return p == Pauli::Z || p == Pauli::Y; }

inline Pauli pauli_from_bits(bool x, bool z) {
  if (x && z) return Pauli::Y;
  if (x) return Pauli::X;
  if (z) return Pauli::Z;
  return Pauli::I;
}

/// 2x2 matrix of a single-qubit Pauli.
inline Matrix pauli_matrix(Pauli p) {
  Matrix m(2, 2);
  switch (p) {
    case Pauli::I:
      m << 1, 0, 0, 1;
      break;
    case Pauli::X:
      m << 0, 1, 1, 0;
      break;
    case Pauli::Y:
      m << 0, cplx(0, -1), cplx(0, 1), 0;
      break;
    case Pauli::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

/// n-qubit Pauli operator with a +-1 sign. Letter i acts on qubit i, so
/// "XZZXI" puts X on qubits 0 and 3.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int num_qubits) : letters_(static_cast<std::size_t>(num_qubits), Pauli::I) {}
  PauliString(std::vector<Pauli> letters, int sign = 1) : letters_(std::move(letters)), sign_(sign) {
    if (sign_ != 1 && sign_ != -1) throw std::invalid_argument("Pauli sign must be +1 or -1");
  }

  /// Parses "+XZZXI", "-XZ" or "XZZXI" ('_' is accepted for I).
  static PauliString from_string(std::string_view text) {
    int sign = 1;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
      sign = text.front() == '-' ? -1 : 1;
      text.remove_prefix(1);
    }
    std::vector<Pauli> letters;
    letters.reserve(text.size());
    for (char c : text) letters.push_back(pauli_from_char(c));
    return PauliString(std::move(letters), sign);
  }

  /// Weight-one Pauli `p` on `qubit` of an n-qubit register.
  static PauliString single(int num_qubits, int qubit, Pauli p) {
    PauliString s(num_qubits);
    s.set(qubit, p);
    return s;
  }

  int num_qubits() const { return static_cast<int>(letters_.size()); }
  int sign() const { return sign_; }
  void set_sign(int s) {
    if (s != 1 && s != -1) throw std::invalid_argument("Pauli sign must be +1 or -1");
    sign_ = s;
  }
  const std::vector<Pauli>& letters() const { return letters_; }

  Pauli operator[](int q) const { return letters_.at(static_cast<std::size_t>(q)); }
  void set(int q, Pauli p) { letters_.at(static_cast<std::size_t>(q)) = p; }

  int weight() const {
    int w = 0;
    for (Pauli p : letters_) w += p != Pauli::I;
    return w;
  }
  bool is_identity() const { return weight() == 0; }

  /// Symplectic product: true when the operators commute.
  bool commutes_with(const PauliString& other) const {
    check_same_size(other);
    int anti = 0;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      Pauli a = letters_[i], b = other.letters_[i];
      if (a != Pauli::I && b != Pauli::I && a != b) ++anti;
    }
    return anti % 2 == 0;
  }

  /// Letter-wise product with the phase dropped.
  PauliString product_up_to_phase(const PauliString& other) const {
    check_same_size(other);
    PauliString out(num_qubits());
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      Pauli a = letters_[i], b = other.letters_[i];
      out.letters_[i] = pauli_from_bits(has_x(a) != has_x(b), has_z(a) != has_z(b));
    }
    return out;
  }

  /// Full operator product; throws if the product carries an imaginary phase
  /// (i.e. the factors anticommute).
  PauliString operator*(const PauliString& other) const {
    check_same_size(other);
    // Phase exponent of i accumulated letter by letter.
    int ipow = 0;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      ipow += letter_phase(letters_[i], other.letters_[i]);
    }
    ipow = ((ipow % 4) + 4) % 4;
    if (ipow % 2 != 0) {
      throw std::domain_error("product of anticommuting Paulis is not Hermitian");
    }
    PauliString out = product_up_to_phase(other);
    out.sign_ = sign_ * other.sign_ * (ipow == 2 ? -1 : 1);
    return out;
  }

  bool operator==(const PauliString& other) const = default;

  /// Equality of letters, ignoring the sign.
  bool same_letters(const PauliString& other) const { return letters_ == other.letters_; }

  std::string str(bool with_sign = true) const {
    std::string s;
    if (with_sign) s += sign_ < 0 ? '-' : '+';
    for (Pauli p : letters_) s += pauli_char(p);
    return s;
  }

  /// Dense 2^n x 2^n matrix (qubit 0 = least-significant index bit).
  Matrix to_matrix() const {
    const std::uint64_t dim = std::uint64_t{1} << letters_.size();
    std::uint64_t xmask = 0, zmask = 0;
    int ycount = 0;
    for (std::size_t q = 0; q < letters_.size(); ++q) {
      if (has_x(letters_[q])) xmask |= std::uint64_t{1} << q;
      if (has_z(letters_[q])) zmask |= std::uint64_t{1} << q;
      if (letters_[q] == Pauli::Y) ++ycount;
    }
    // Y = i X Z, so P|c> = i^{#Y} (-1)^{|c & z|} |c ^ x>.
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    const cplx global = ipow[ycount % 4] * static_cast<double>(sign_);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::uint64_t col = 0; col < dim; ++col) {
      const bool odd = std::popcount(col & zmask) & 1;
      m(static_cast<Eigen::Index>(col ^ xmask), static_cast<Eigen::Index>(col)) =
          odd ? -global : global;
    }
    return m;
  }

 private:
  void check_same_size(const PauliString& other) const {
    if (other.letters_.size() != letters_.size()) {
      throw std::invalid_argument("Pauli strings have different lengths");
    }
  }

  // Exponent k such that a*b = i^k * (a.b) letter-wise.
  static int letter_phase(Pauli a, Pauli b) {
    if (a == Pauli::I || b == Pauli::I || a == b) return 0;
    // XY = iZ, YZ = iX, ZX = iY; reversed order gives -i.
    int ai = static_cast<int>(a), bi = static_cast<int>(b);
    return ((bi - ai + 3) % 3 == 1) ? 1 : 3;
  }

  std::vector<Pauli> letters_;
  int sign_ = 1;
};

}  // namespace qflag
