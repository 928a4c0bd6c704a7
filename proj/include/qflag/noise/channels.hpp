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
#include <stdexcept>
#include <string>
#include <vector>

#include "qflag/core/ops.hpp"
#include "qflag/core/pauli.hpp"
#include "qflag/core/state.hpp"

namespace qflag {

/// Depolarizing channel with no-error probability p: the identity keeps
/// weight p and the 3 (arity 1) or 15 (arity 2) non-identity Paulis share
/// 1 - p uniformly.
inline KrausChannel depolarizing_channel(double p, int arity = 1) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing p must lie in [0, 1]");
  if (arity != 1 && arity != 2) throw std::invalid_argument("depolarizing arity must be 1 or 2");
  const int num_paulis = arity == 1 ? 4 : 16;
  const Eigen::Index d = Eigen::Index{1} << arity;
  std::vector<Matrix> ops;
  ops.push_back(std::sqrt(p) * Matrix::Identity(d, d));
  if (p < 1.0) {
    const double w = std::sqrt((1.0 - p) / (num_paulis - 1));
    for (int k = 1; k < num_paulis; ++k) {
      const Matrix lo = pauli_matrix(static_cast<Pauli>(k % 4));
      ops.push_back(w * (arity == 1 ? lo : tensor_product(pauli_matrix(static_cast<Pauli>(k / 4)), lo)));
    }
  }
  return KrausChannel(std::move(ops));
}

inline KrausChannel amplitude_damping_channel(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel({k0, k1});
}

inline KrausChannel phase_damping_channel(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - lambda);
  k1(1, 1) = std::sqrt(lambda);
  return KrausChannel({k0, k1});
}

/// Idle decoherence for `duration_us`: amplitude damping with
/// gamma = 1 - exp(-t/T1) followed by pure dephasing with
/// 1/Tphi = 1/T2 - 1/(2 T1) and lambda = 1 - exp(-2t/Tphi), so that
/// coherences decay as exp(-t/T2). Infinite times disable the part.
inline KrausChannel relaxation_channel(double duration_us, double t1_us, double t2_us) {
  if (duration_us < 0) throw std::invalid_argument("idle duration must be nonnegative");
  if (!(t1_us > 0) || !(t2_us > 0)) throw std::invalid_argument("T1 and T2 must be positive");
  const double gamma = std::isinf(t1_us) ? 0.0 : -std::expm1(-duration_us / t1_us);
  const double rate_phi = 1.0 / t2_us - (std::isinf(t1_us) ? 0.0 : 0.5 / t1_us);
  const double lambda = rate_phi > 0 ? -std::expm1(-2.0 * duration_us * rate_phi) : 0.0;
  const KrausChannel ad = amplitude_damping_channel(gamma);
  const KrausChannel pd = phase_damping_channel(lambda);
  std::vector<Matrix> ops;
  for (const Matrix& b : pd.operators()) {
    for (const Matrix& a : ad.operators()) {
      Matrix k = b * a;
      if (k.cwiseAbs().maxCoeff() > 0) ops.push_back(std::move(k));
    }
  }
  return KrausChannel(std::move(ops));
}

}  // namespace qflag
