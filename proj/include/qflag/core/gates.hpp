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

// Standard gate matrices. Multi-qubit matrices index their j-th bit by the
// j-th operand, so cx() acts on (control, target) = (bit 0, bit 1).

#pragma once

#include <cmath>

#include "qflag/core/types.hpp"

namespace qflag::gates {

inline Matrix id() { return Matrix::Identity(2, 2); }

inline Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

inline Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix h() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix m(2, 2);
  m << r, r, r, -r;
  return m;
}

inline Matrix s() {
  Matrix m(2, 2);
  m << 1, 0, 0, cplx(0, 1);
  return m;
}

inline Matrix sdg() {
  Matrix m(2, 2);
  m << 1, 0, 0, cplx(0, -1);
  return m;
}

inline Matrix u1(double lambda) {
  Matrix m(2, 2);
  m << 1, 0, 0, std::polar(1.0, lambda);
  return m;
}

inline Matrix u3(double theta, double phi, double lambda) {
  const double c = std::cos(theta / 2), sn = std::sin(theta / 2);
  Matrix m(2, 2);
  m << c, -std::polar(1.0, lambda) * sn, std::polar(1.0, phi) * sn,
      std::polar(1.0, phi + lambda) * c;
  return m;
}

inline Matrix u2(double phi, double lambda) { return u3(kPi / 2, phi, lambda); }

/// Controlled-NOT with bit 0 = control, bit 1 = target.
inline Matrix cx() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(2, 2) = 1;
  m(3, 1) = 1;
  m(1, 3) = 1;
  return m;
}

inline Matrix cz() {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1;
  return m;
}

inline Matrix swap() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 2) = 1;
  m(2, 1) = 1;
  m(3, 3) = 1;
  return m;
}

}  // namespace qflag::gates
