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
#include <utility>
#include <vector>

#include "qflag/core/types.hpp"

namespace qflag {

/// Pure state over `num_qubits` qubits; qubit 0 is the least-significant
/// bit of the amplitude index.
class StateVector {
 public:
  StateVector() : StateVector(0) {}

  /// |0...0> on n qubits.
  explicit StateVector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 0) throw std::invalid_argument("negative qubit count");
    check_state_qubits(num_qubits);
    amps_ = Vector::Zero(Eigen::Index{1} << num_qubits);
    amps_(0) = 1.0;
  }

  /// Wraps amplitudes; throws unless the vector is normalized within 1e-10.
  explicit StateVector(Vector amplitudes) {
    num_qubits_ = qubits_for_dimension(amplitudes.size());
    check_state_qubits(num_qubits_);
    amps_ = std::move(amplitudes);
    const double norm2 = amps_.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTol) {
      throw std::invalid_argument("state vector norm^2 is " + std::to_string(norm2));
    }
  }

  static StateVector basis(int num_qubits, std::uint64_t index) {
    StateVector s(num_qubits);
    if (index >= static_cast<std::uint64_t>(s.dim())) {
      throw std::out_of_range("basis index out of range");
    }
    s.amps_(0) = 0.0;
    s.amps_(static_cast<Eigen::Index>(index)) = 1.0;
    return s;
  }

  /// Rescales an arbitrary nonzero vector to unit norm.
  static StateVector normalized(Vector v) {
    const double n = v.norm();
    if (!(n > 0)) throw NumericalError("cannot normalize a zero vector");
    return StateVector(Vector(v / n));
  }

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  cplx operator[](Eigen::Index i) const { return amps_(i); }

  /// Mutable access for simulator kernels; callers restore normalization.
  Vector& mutable_amplitudes() { return amps_; }

 private:
  int num_qubits_ = 0;
  Vector amps_;
};

/// Mixed state. Construction validates the invariants (Hermitian, unit
/// trace, PSD within 1e-8); `unchecked` skips them for internal use.
class DensityMatrix {
 public:
  DensityMatrix() : DensityMatrix(0) {}

  /// |0...0><0...0| on n qubits.
  explicit DensityMatrix(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 0) throw std::invalid_argument("negative qubit count");
    check_density_qubits(num_qubits);
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    mat_ = Matrix::Zero(d, d);
    mat_(0, 0) = 1.0;
  }

  explicit DensityMatrix(Matrix m) : DensityMatrix(std::move(m), Unchecked{}) {
    std::string why;
    if (!check(&why)) throw std::invalid_argument("invalid density matrix: " + why);
  }

  static DensityMatrix unchecked(Matrix m) { return DensityMatrix(std::move(m), Unchecked{}); }

  static DensityMatrix from_pure(const StateVector& psi) {
    const Vector& a = psi.amplitudes();
    return unchecked(a * a.adjoint());
  }

  static DensityMatrix maximally_mixed(int num_qubits) {
    check_density_qubits(num_qubits);
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    return unchecked(Matrix::Identity(d, d) / static_cast<double>(d));
  }

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }
  Matrix& mutable_matrix() { return mat_; }
  cplx operator()(Eigen::Index r, Eigen::Index c) const { return mat_(r, c); }

  double trace() const { return mat_.trace().real(); }

  /// Checks the invariants; fills `why` with the first failure.
  bool check(std::string* why = nullptr) const {
    auto fail = [&](std::string msg) {
      if (why) *why = std::move(msg);
      return false;
    };
    const double herm = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kNormTol) return fail("not Hermitian (deviation " + std::to_string(herm) + ")");
    const double tr = trace();
    if (std::abs(tr - 1.0) > kNormTol) return fail("trace is " + std::to_string(tr));
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) return fail("eigen-decomposition failed");
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -kPsdTol) return fail("minimum eigenvalue " + std::to_string(min_eig));
    return true;
  }

  /// Scales to unit trace; throws on a vanishing trace.
  DensityMatrix normalized() const {
    const double tr = trace();
    if (!(tr > 0)) throw NumericalError("cannot normalize a zero-trace matrix");
    return unchecked(mat_ / tr);
  }

 private:
  struct Unchecked {};
  DensityMatrix(Matrix m, Unchecked) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols()) throw std::invalid_argument("density matrix must be square");
    num_qubits_ = qubits_for_dimension(mat_.rows());
    check_density_qubits(num_qubits_);
  }

  int num_qubits_ = 0;
  Matrix mat_;
};

/// Completely positive map given by Kraus operators on `arity` qubits.
class KrausChannel {
 public:
  KrausChannel() = default;

  /// Throws unless every operator is 2^arity square and sum K^dag K = I
  /// within 1e-10.
  explicit KrausChannel(std::vector<Matrix> operators) : ops_(std::move(operators)) {
    if (ops_.empty()) throw std::invalid_argument("Kraus channel needs at least one operator");
    arity_ = qubits_for_dimension(ops_.front().rows());
    Matrix acc = Matrix::Zero(ops_.front().rows(), ops_.front().rows());
    for (const Matrix& k : ops_) {
      if (k.rows() != ops_.front().rows() || k.cols() != k.rows()) {
        throw std::invalid_argument("Kraus operators must be square and of equal dimension");
      }
      acc += k.adjoint() * k;
    }
    const double dev = (acc - Matrix::Identity(acc.rows(), acc.cols())).cwiseAbs().maxCoeff();
    if (dev > kNormTol) {
      throw std::invalid_argument("Kraus set is not complete (deviation " + std::to_string(dev) +
                                  ")");
    }
  }

  static KrausChannel identity(int arity) {
    const Eigen::Index d = Eigen::Index{1} << arity;
    return KrausChannel({Matrix::Identity(d, d)});
  }

  int arity() const { return arity_; }
  const std::vector<Matrix>& operators() const { return ops_; }
  std::size_t size() const { return ops_.size(); }

  /// True when the channel is a single operator proportional to identity.
  bool is_identity(double tol = 1e-14) const {
    if (ops_.size() != 1) return false;
    const Matrix& k = ops_.front();
    const cplx phase = k(0, 0);
    return (k - phase * Matrix::Identity(k.rows(), k.cols())).cwiseAbs().maxCoeff() <= tol &&
           std::abs(std::abs(phase) - 1.0) <= tol;
  }

 private:
  std::vector<Matrix> ops_;
  int arity_ = 0;
};

}  // namespace qflag
