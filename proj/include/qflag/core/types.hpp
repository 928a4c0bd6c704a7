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

#include <Eigen/Dense>

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qflag {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Tolerances shared by every module.
inline constexpr double kNormTol = 1e-10;
inline constexpr double kPsdTol = 1e-8;

/// Raised when an operation would exceed the configured qubit cap.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numerical routine cannot produce a trustworthy answer
/// (singular calibration, failed eigen-decomposition, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Limits {
  int max_density_qubits = 12;
  int max_state_qubits = 20;
};

inline Limits& limits() {
  static Limits l;
  return l;
}

inline void check_density_qubits(int n) {
  if (n > limits().max_density_qubits) {
    throw ResourceLimitError("density matrix over " + std::to_string(n) +
                             " qubits exceeds the cap of " +
                             std::to_string(limits().max_density_qubits));
  }
}

inline void check_state_qubits(int n) {
  if (n > limits().max_state_qubits) {
    throw ResourceLimitError("state vector over " + std::to_string(n) +
                             " qubits exceeds the cap of " +
                             std::to_string(limits().max_state_qubits));
  }
}

/// Number of qubits for a power-of-two dimension; throws otherwise.
inline int qubits_for_dimension(Eigen::Index dim) {
  if (dim <= 0 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
    throw std::invalid_argument("dimension " + std::to_string(dim) +
                                " is not a power of two");
  }
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

inline bool is_unitary(const Matrix& u, double tol = kNormTol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

}  // namespace qflag
