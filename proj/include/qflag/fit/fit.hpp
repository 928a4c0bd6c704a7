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

#include "json.hpp"
#include "qflag/core/ops.hpp"
#include "qflag/core/random.hpp"
#include "qflag/noise/channels.hpp"

namespace qflag {

/// Probability of each individual Pauli error, (1 - p) / 3.
inline double per_pauli_error_rate(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("per_pauli_error_rate: p must lie in [0, 1]");
  return (1.0 - p) / 3.0;
}

/// Independent single-qubit depolarizing channels (no-error probability p) on
/// both fault qubits.
inline DensityMatrix eq1_channel(const DensityMatrix& rho, double p, std::pair<int, int> fault_qubits = {0, 4}) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("eq1_channel: p must lie in [0, 1]");
  const auto [a, b] = fault_qubits;
  if (a == b) throw std::invalid_argument("eq1_channel: fault qubits must be distinct");
  detail::check_qubit(a, rho.num_qubits());
  detail::check_qubit(b, rho.num_qubits());
  const KrausChannel ch = depolarizing_channel(p);
  return apply_kraus(apply_kraus(rho, ch, {a}), ch, {b});
}

enum class FitObjective { SpectralNorm, TraceDistance };

inline std::string_view fit_objective_name(FitObjective o) {
  return o == FitObjective::SpectralNorm ? "spectral-norm" : "trace-distance";
}

inline FitObjective fit_objective_from_name(std::string_view name) {
  if (name == "spectral-norm") return FitObjective::SpectralNorm;
  if (name == "trace-distance") return FitObjective::TraceDistance;
  throw std::invalid_argument("unknown fit objective '" + std::string(name) + "'");
}

struct FitResult {
  double p_opt = 1;
  double residual = 0;
  double per_pauli_error_rate = 0;
  FitObjective objective = FitObjective::SpectralNorm;
  std::pair<int, int> fault_qubits{0, 4};
  std::vector<std::pair<double, double>> scan;  // (p, residual) on the grid
};

namespace detail {

// rho(p) = p^2 R + p(1-p) (Ta R + Tb R) + (1-p)^2 Ta Tb R, where T replaces
// rho by the average of its three non-identity Pauli conjugations.
class Eq1Family {
 public:
  Eq1Family(const DensityMatrix& ideal, std::pair<int, int> q) : r_(ideal.matrix()) {
    const Matrix ta = twirl(ideal, q.first).matrix();
    const Matrix tb = twirl(ideal, q.second).matrix();
    one_ = ta + tb;
    two_ = twirl(DensityMatrix::unchecked(ta), q.second).matrix();
  }

  Matrix at(double p) const { return p * p * r_ + p * (1 - p) * one_ + (1 - p) * (1 - p) * two_; }

 private:
  static DensityMatrix twirl(const DensityMatrix& rho, int q) {
    const int n = rho.num_qubits();
    Matrix sum = Matrix::Zero(rho.dim(), rho.dim());
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) sum += apply_pauli(rho, PauliString::single(n, q, p)).matrix();
    return DensityMatrix::unchecked(sum / 3.0);
  }

  Matrix r_, one_, two_;
};

inline double fit_residual(const Matrix& diff, FitObjective obj) {
  const RealVector ev = hermitian_eigenvalues(0.5 * (diff + diff.adjoint()));
  if (obj == FitObjective::SpectralNorm) return ev.cwiseAbs().maxCoeff();
  return 0.5 * ev.cwiseAbs().sum();
}

}  // namespace detail

/// Fits the no-error probability p of eq1_channel so that the channel applied
/// to `ideal` best matches `recon`: grid scan at step 1e-3, then
/// golden-section refinement to 1e-5 around the best grid point.
inline FitResult fit_p(const DensityMatrix& recon, const DensityMatrix& ideal,
                       std::pair<int, int> fault_qubits = {0, 4},
                       FitObjective objective = FitObjective::SpectralNorm, int workers = 1) {
  if (recon.num_qubits() != 5 || ideal.num_qubits() != 5) {
    throw std::invalid_argument("fit_p: expected 5-qubit density matrices");
  }
  for (const DensityMatrix* m : {&recon, &ideal}) {
    std::string why;
    if (!m->check(&why)) throw std::invalid_argument("fit_p: invalid density matrix: " + why);
  }
  // Validates the qubit pair.
  (void)eq1_channel(ideal, 1.0, fault_qubits);

  const detail::Eq1Family family(ideal, fault_qubits);
  auto residual = [&](double p) { return detail::fit_residual(family.at(p) - recon.matrix(), objective); };

  FitResult r;
  r.objective = objective;
  r.fault_qubits = fault_qubits;
  constexpr int kGrid = 1000;
  r.scan.resize(kGrid + 1);
  parallel_for(kGrid + 1, workers, [&](std::size_t i) {
    const double p = static_cast<double>(i) / kGrid;
    r.scan[i] = {p, residual(p)};
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.scan.size(); ++i) {
    if (r.scan[i].second < r.scan[best].second) best = i;
  }

  double lo = std::max(0.0, r.scan[best].first - 1.0 / kGrid);
  double hi = std::min(1.0, r.scan[best].first + 1.0 / kGrid);
  const double phi = 0.5 * (std::sqrt(5.0) - 1);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = residual(x1), f2 = residual(x2);
  while (hi - lo > 1e-5) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = residual(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = residual(x2);
    }
  }
  const double refined = 0.5 * (lo + hi);
  const double refined_res = residual(refined);
  if (refined_res <= r.scan[best].second) {
    r.p_opt = refined;
    r.residual = refined_res;
  } else {
    r.p_opt = r.scan[best].first;
    r.residual = r.scan[best].second;
  }
  r.per_pauli_error_rate = per_pauli_error_rate(r.p_opt);
  return r;
}

/// Fault qubits are reported 1-based, matching the CLI flag.
inline nlohmann::json to_json(const FitResult& r) {
  nlohmann::json scan = nlohmann::json::array();
  for (const auto& [p, res] : r.scan) scan.push_back({p, res});
  return {{"p_opt", r.p_opt},
          {"residual", r.residual},
          {"per_pauli_error_rate", r.per_pauli_error_rate},
          {"objective", std::string(fit_objective_name(r.objective))},
          {"fault_qubits", {r.fault_qubits.first + 1, r.fault_qubits.second + 1}},
          {"scan", scan}};
}

}  // namespace qflag
