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

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qflag/core/types.hpp"
#include "qflag/noise/model.hpp"

namespace qflag {

/// Column-stochastic readout confusion matrix: column = prepared basis
/// state, row = observed bitstring. Bit j of either index is qubits[j].
class CalibrationMatrix {
 public:
  CalibrationMatrix() = default;
  explicit CalibrationMatrix(RealMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("calibration matrix must be square");
    num_qubits_ = qubits_for_dimension(m_.rows());
    for (Eigen::Index c = 0; c < m_.cols(); ++c) {
      if (m_.col(c).minCoeff() < -1e-12 || m_.col(c).maxCoeff() > 1 + 1e-12) {
        throw std::invalid_argument("calibration entries must lie in [0, 1]");
      }
      if (std::abs(m_.col(c).sum() - 1.0) > 1e-9) {
        throw std::invalid_argument("calibration column " + std::to_string(c) + " does not sum to 1");
      }
    }
  }

  static CalibrationMatrix identity(int num_qubits) {
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    return CalibrationMatrix(RealMatrix::Identity(d, d));
  }

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dim() const { return m_.rows(); }
  const RealMatrix& matrix() const { return m_; }
  double operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  /// 2-norm condition number.
  double condition_number() const {
    Eigen::JacobiSVD<RealMatrix> svd(m_);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    return smin > 0 ? s(0) / smin : std::numeric_limits<double>::infinity();
  }

 private:
  RealMatrix m_;
  int num_qubits_ = 0;
};

/// Per-qubit confusion [[1-e0, e1], [e0, 1-e1]] with e0 = p(1|0), e1 = p(0|1).
inline RealMatrix single_qubit_confusion(double e0, double e1) {
  RealMatrix m(2, 2);
  m << 1 - e0, e1, e0, 1 - e1;
  return m;
}

/// Tensor product of per-qubit confusion matrices; qubits[0] is the
/// least-significant bit.
inline CalibrationMatrix readout_confusion(const NoiseModel& noise, const std::vector<int>& qubits) {
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (qubits[i] == qubits[j]) throw std::invalid_argument("readout_confusion: repeated qubit");
    }
  }
  RealMatrix m = RealMatrix::Identity(1, 1);
  for (int q : qubits) {
    const auto [e0, e1] = noise.readout(q);
    const RealMatrix c = single_qubit_confusion(e0, e1);
    // New qubit becomes the most-significant bit.
    RealMatrix next(m.rows() * 2, m.cols() * 2);
    for (int r = 0; r < 2; ++r) {
      for (int k = 0; k < 2; ++k) next.block(r * m.rows(), k * m.cols(), m.rows(), m.cols()) = c(r, k) * m;
    }
    m = std::move(next);
  }
  return CalibrationMatrix(std::move(m));
}

inline CalibrationMatrix readout_confusion(const DeviceModel& device, const std::vector<int>& qubits) {
  return readout_confusion(noise_from_device(device, NoiseOptions::readout_only()), qubits);
}

}  // namespace qflag
