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
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qflag/core/gates.hpp"
#include "qflag/core/pauli.hpp"
#include "qflag/core/random.hpp"
#include "qflag/core/state.hpp"
#include "qflag/core/types.hpp"

namespace qflag {

enum class Basis : std::uint8_t { X, Y, Z };

inline char basis_char(Basis b) { return "XYZ"[static_cast<int>(b)]; }

inline Basis basis_from_char(char c) {
  switch (c) {
    case 'X':
      return Basis::X;
    case 'Y':
      return Basis::Y;
    case 'Z':
      return Basis::Z;
    default:
      throw std::invalid_argument(std::string("not a measurement basis: '") + c + "'");
  }
}

namespace detail {

/// Applies the k-qubit matrix `m` in place to a 2^total_bits vector, with
/// matrix bit j acting on index bit bits[j].
inline void apply_matrix(cplx* data, int total_bits, const Matrix& m, std::span<const int> bits) {
  const int k = static_cast<int>(bits.size());
  const std::size_t sub = std::size_t{1} << k;
  std::vector<std::uint64_t> offsets(sub, 0);
  for (std::size_t s = 0; s < sub; ++s) {
    for (int j = 0; j < k; ++j) {
      if ((s >> j) & 1) offsets[s] |= std::uint64_t{1} << bits[j];
    }
  }
  std::vector<int> sorted(bits.begin(), bits.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<cplx> in(sub);
  const std::uint64_t outer = std::uint64_t{1} << (total_bits - k);
  for (std::uint64_t i = 0; i < outer; ++i) {
    // Spread i over the non-target bit positions.
    std::uint64_t base = i;
    for (int b : sorted) {
      const std::uint64_t low = base & ((std::uint64_t{1} << b) - 1);
      base = ((base >> b) << (b + 1)) | low;
    }
    for (std::size_t s = 0; s < sub; ++s) in[s] = data[base | offsets[s]];
    for (std::size_t r = 0; r < sub; ++r) {
      cplx acc = 0;
      for (std::size_t c = 0; c < sub; ++c) {
        acc += m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
      }
      data[base | offsets[r]] = acc;
    }
  }
}

/// rho -> K rho K^dag on the column-major storage of rho, viewed as a vector
/// over 2n bits (rows on bits [0,n), columns on bits [n,2n)).
inline void conjugate_inplace(Matrix& rho, int n, const Matrix& k, std::span<const int> targets) {
  std::vector<int> col_bits(targets.size());
  for (std::size_t j = 0; j < targets.size(); ++j) col_bits[j] = targets[j] + n;
  apply_matrix(rho.data(), 2 * n, k, targets);
  apply_matrix(rho.data(), 2 * n, k.conjugate(), col_bits);
}

inline void check_targets(std::span<const int> targets, int num_qubits, Eigen::Index op_dim) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= num_qubits) {
      throw std::out_of_range("target qubit " + std::to_string(targets[i]) + " out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) {
        throw std::invalid_argument("repeated target qubit " + std::to_string(targets[i]));
      }
    }
  }
  if (op_dim != (Eigen::Index{1} << targets.size())) {
    throw std::invalid_argument("operator dimension does not match the number of targets");
  }
}

inline void check_qubit(int q, int num_qubits) {
  if (q < 0 || q >= num_qubits) {
    throw std::out_of_range("qubit " + std::to_string(q) + " out of range");
  }
}

/// Unitary mapping the measurement basis onto the computational basis.
inline Matrix basis_change(Basis b) {
  switch (b) {
    case Basis::X:
      return gates::h();
    case Basis::Y:
      return gates::h() * gates::sdg();
    case Basis::Z:
      break;
  }
  return gates::id();
}

// Eigenvalues of a Hermitian matrix, ascending.
inline RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
  return es.eigenvalues();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tensor products (plain Kronecker product; the second operand occupies the
// low-order qubits).

inline Matrix tensor_product(const Matrix& a, const Matrix& b) {
  const int qa = qubits_for_dimension(a.rows()), qb = qubits_for_dimension(b.rows());
  check_density_qubits(qa + qb);
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline StateVector tensor_product(const StateVector& a, const StateVector& b) {
  check_state_qubits(a.num_qubits() + b.num_qubits());
  Vector out(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i) out.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
  return StateVector::normalized(std::move(out));
}

inline DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::unchecked(tensor_product(a.matrix(), b.matrix()));
}

// ---------------------------------------------------------------------------
// Unitaries and channels.

inline StateVector apply_unitary(const StateVector& state, const Matrix& u,
                                 std::span<const int> targets) {
  detail::check_targets(targets, state.num_qubits(), u.rows());
  if (!is_unitary(u)) throw std::invalid_argument("matrix is not unitary");
  StateVector out = state;
  detail::apply_matrix(out.mutable_amplitudes().data(), out.num_qubits(), u, targets);
  return out;
}

inline DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                                   std::span<const int> targets) {
  detail::check_targets(targets, rho.num_qubits(), u.rows());
  if (!is_unitary(u)) throw std::invalid_argument("matrix is not unitary");
  DensityMatrix out = rho;
  detail::conjugate_inplace(out.mutable_matrix(), out.num_qubits(), u, targets);
  return out;
}

inline StateVector apply_unitary(const StateVector& s, const Matrix& u,
                                 std::initializer_list<int> targets) {
  return apply_unitary(s, u, std::span<const int>(targets.begin(), targets.size()));
}
inline DensityMatrix apply_unitary(const DensityMatrix& r, const Matrix& u,
                                   std::initializer_list<int> targets) {
  return apply_unitary(r, u, std::span<const int>(targets.begin(), targets.size()));
}

/// In-place Kraus application for simulators; no validation.
inline void apply_kraus_inplace(Matrix& rho, int n, const KrausChannel& ch,
                                std::span<const int> targets) {
  if (ch.is_identity()) return;
  if (ch.size() == 1) {
    detail::conjugate_inplace(rho, n, ch.operators().front(), targets);
    return;
  }
  Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
  Matrix tmp;
  for (const Matrix& k : ch.operators()) {
    tmp = rho;
    detail::conjugate_inplace(tmp, n, k, targets);
    acc += tmp;
  }
  rho = std::move(acc);
}

inline DensityMatrix apply_kraus(const DensityMatrix& rho, const KrausChannel& ch,
                                 std::span<const int> targets) {
  if (static_cast<int>(targets.size()) != ch.arity()) {
    throw std::invalid_argument("channel arity does not match the number of targets");
  }
  detail::check_targets(targets, rho.num_qubits(), Eigen::Index{1} << ch.arity());
  DensityMatrix out = rho;
  apply_kraus_inplace(out.mutable_matrix(), out.num_qubits(), ch, targets);
  return out;
}

inline DensityMatrix apply_kraus(const DensityMatrix& rho, const KrausChannel& ch,
                                 std::initializer_list<int> targets) {
  return apply_kraus(rho, ch, std::span<const int>(targets.begin(), targets.size()));
}

/// Applies a Pauli string as a unitary (sign included).
inline StateVector apply_pauli(const StateVector& s, const PauliString& p) {
  if (p.num_qubits() != s.num_qubits()) throw std::invalid_argument("Pauli length mismatch");
  StateVector out = s;
  Vector& a = out.mutable_amplitudes();
  for (int q = 0; q < p.num_qubits(); ++q) {
    if (p[q] == Pauli::I) continue;
    const int t[1] = {q};
    detail::apply_matrix(a.data(), s.num_qubits(), pauli_matrix(p[q]), t);
  }
  if (p.sign() < 0) a = -a;
  return out;
}

inline DensityMatrix apply_pauli(const DensityMatrix& rho, const PauliString& p) {
  if (p.num_qubits() != rho.num_qubits()) throw std::invalid_argument("Pauli length mismatch");
  DensityMatrix out = rho;
  for (int q = 0; q < p.num_qubits(); ++q) {
    if (p[q] == Pauli::I) continue;
    const int t[1] = {q};
    detail::conjugate_inplace(out.mutable_matrix(), rho.num_qubits(), pauli_matrix(p[q]), t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expectations.

/// Tr(rho P), real part (P Hermitian).
inline double expectation(const DensityMatrix& rho, const PauliString& p) {
  if (p.num_qubits() != rho.num_qubits()) throw std::invalid_argument("Pauli length mismatch");
  std::uint64_t xmask = 0, zmask = 0;
  int ycount = 0;
  for (int q = 0; q < p.num_qubits(); ++q) {
    if (has_x(p[q])) xmask |= std::uint64_t{1} << q;
    if (has_z(p[q])) zmask |= std::uint64_t{1} << q;
    ycount += p[q] == Pauli::Y;
  }
  static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  cplx acc = 0;
  const Matrix& m = rho.matrix();
  for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(rho.dim()); ++c) {
    // (rho P)(c, c) = rho(c, c ^ x) * P(c ^ x, c)
    const std::uint64_t r = c ^ xmask;
    const double sgn = (std::popcount(c & zmask) & 1) ? -1.0 : 1.0;
    acc += m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) * sgn;
  }
  return (acc * ipow[ycount % 4]).real() * p.sign();
}

inline double expectation(const StateVector& s, const PauliString& p) {
  const StateVector ps = apply_pauli(s, p);
  return s.amplitudes().dot(ps.amplitudes()).real();
}

// ---------------------------------------------------------------------------
// Measurement.

template <class State>
struct MeasurementBranch {
  int outcome = 0;
  double probability = 0;
  State state;  // renormalized post-measurement state (input copy if probability is 0)
};

namespace detail {

inline double prob_one(const Vector& a, int q) {
  double p = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if ((i >> q) & 1) p += std::norm(a(i));
  }
  return p;
}

inline double prob_one(const Matrix& m, int q) {
  double p = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if ((i >> q) & 1) p += m(i, i).real();
  }
  return p;
}

// Keeps only the outcome-`bit` block of qubit q.
inline void project(Vector& a, int q, int bit) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (((i >> q) & 1) != bit) a(i) = 0;
  }
}

inline void project(Matrix& m, int q, int bit) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const bool cb = ((c >> q) & 1) == bit;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (!cb || ((r >> q) & 1) != bit) m(r, c) = 0;
    }
  }
}

inline void rotate(StateVector& s, const Matrix& u, int q) {
  const int t[1] = {q};
  apply_matrix(s.mutable_amplitudes().data(), s.num_qubits(), u, t);
}

inline void rotate(DensityMatrix& r, const Matrix& u, int q) {
  const int t[1] = {q};
  conjugate_inplace(r.mutable_matrix(), r.num_qubits(), u, t);
}

inline double raw_prob_one(const StateVector& s, int q) { return prob_one(s.amplitudes(), q); }
inline double raw_prob_one(const DensityMatrix& r, int q) { return prob_one(r.matrix(), q); }

inline void raw_project(StateVector& s, int q, int bit, double prob) {
  project(s.mutable_amplitudes(), q, bit);
  s.mutable_amplitudes() /= std::sqrt(prob);
}

inline void raw_project(DensityMatrix& r, int q, int bit, double prob) {
  project(r.mutable_matrix(), q, bit);
  r.mutable_matrix() /= prob;
}

// Outcome probabilities within this distance of 0 or 1 are snapped so that
// deterministic outcomes stay deterministic under rounding.
inline constexpr double kSnapTol = 1e-12;

inline double snap(double p) {
  if (p < kSnapTol) return 0.0;
  if (p > 1.0 - kSnapTol) return 1.0;
  return p;
}

}  // namespace detail

/// Both outcome branches of a projective measurement; probabilities sum to 1.
template <class State>
std::array<MeasurementBranch<State>, 2> measure_exact(const State& state, int qubit,
                                                      Basis basis = Basis::Z) {
  detail::check_qubit(qubit, state.num_qubits());
  const Matrix b = detail::basis_change(basis);
  State rotated = state;
  if (basis != Basis::Z) detail::rotate(rotated, b, qubit);
  const double p1 = detail::snap(std::clamp(detail::raw_prob_one(rotated, qubit), 0.0, 1.0));
  std::array<MeasurementBranch<State>, 2> out;
  const double probs[2] = {1.0 - p1, p1};
  for (int bit = 0; bit < 2; ++bit) {
    out[bit].outcome = bit;
    out[bit].probability = probs[bit];
    if (probs[bit] <= 0) {
      out[bit].state = state;
      continue;
    }
    State post = rotated;
    detail::raw_project(post, qubit, bit, probs[bit]);
    if (basis != Basis::Z) detail::rotate(post, b.adjoint(), qubit);
    out[bit].state = std::move(post);
  }
  return out;
}

/// Samples one outcome of a projective measurement.
template <class State>
MeasurementBranch<State> measure_projective(const State& state, int qubit, Basis basis, Rng& rng) {
  auto branches = measure_exact(state, qubit, basis);
  const int bit = uniform01(rng) < branches[1].probability ? 1 : 0;
  return std::move(branches[bit]);
}

// ---------------------------------------------------------------------------
// Reduced states and metrics.

/// Traces out every qubit not in `keep`; keep[j] becomes qubit j of the
/// result.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const int n = rho.num_qubits();
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::vector<bool> kept(static_cast<std::size_t>(n), false);
  for (int q : keep) {
    detail::check_qubit(q, n);
    if (kept[static_cast<std::size_t>(q)]) throw std::invalid_argument("partial_trace: repeated qubit");
    kept[static_cast<std::size_t>(q)] = true;
  }
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (!kept[static_cast<std::size_t>(q)]) traced.push_back(q);
  }
  auto scatter = [](std::uint64_t v, const auto& positions) {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < positions.size(); ++j) {
      if ((v >> j) & 1) out |= std::uint64_t{1} << positions[j];
    }
    return out;
  };
  const std::uint64_t dk = std::uint64_t{1} << keep.size();
  const std::uint64_t dt = std::uint64_t{1} << traced.size();
  std::vector<std::uint64_t> kidx(dk), tidx(dt);
  for (std::uint64_t i = 0; i < dk; ++i) kidx[i] = scatter(i, keep);
  for (std::uint64_t i = 0; i < dt; ++i) tidx[i] = scatter(i, traced);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  const Matrix& m = rho.matrix();
  for (std::uint64_t c = 0; c < dk; ++c) {
    for (std::uint64_t r = 0; r < dk; ++r) {
      cplx acc = 0;
      for (std::uint64_t t = 0; t < dt; ++t) {
        acc += m(static_cast<Eigen::Index>(kidx[r] | tidx[t]),
                 static_cast<Eigen::Index>(kidx[c] | tidx[t]));
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  }
  return DensityMatrix::unchecked(std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

/// Largest singular value.
inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

/// (1/2) * trace norm of a - b for Hermitian inputs.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  return 0.5 * detail::hermitian_eigenvalues(a.matrix() - b.matrix()).cwiseAbs().sum();
}

/// <psi| rho |psi>.
inline double fidelity(const StateVector& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const Vector& a = psi.amplitudes();
  return std::clamp(a.dot(rho.matrix() * a).real(), 0.0, 1.0);
}

inline double fidelity(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  return std::clamp(std::norm(a.amplitudes().dot(b.amplitudes())), 0.0, 1.0);
}

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2. When either argument is
/// pure to within 1e-10 this reduces to <psi|rho|psi>.
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  auto pure_vector = [](const DensityMatrix& r, Vector* psi) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(r.matrix());
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
    const Eigen::Index top = es.eigenvalues().size() - 1;
    if (std::abs(es.eigenvalues()(top) - 1.0) > kNormTol) return false;
    *psi = es.eigenvectors().col(top);
    return true;
  };
  Vector psi;
  if (pure_vector(a, &psi)) return std::clamp(psi.dot(b.matrix() * psi).real(), 0.0, 1.0);
  if (pure_vector(b, &psi)) return std::clamp(psi.dot(a.matrix() * psi).real(), 0.0, 1.0);

  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
  RealVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix sqrt_a = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  const Matrix inner = sqrt_a * b.matrix() * sqrt_a;
  const RealVector lam = detail::hermitian_eigenvalues(0.5 * (inner + inner.adjoint()));
  double sum = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > 1e-14) sum += std::sqrt(lam(i));
  }
  return std::clamp(sum * sum, 0.0, 1.0);
}

}  // namespace qflag
