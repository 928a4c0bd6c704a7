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
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflag/circuit/simulate.hpp"
#include "qflag/core/random.hpp"
#include "qflag/noise/calibration.hpp"

namespace qflag {

/// Measurement basis letters; letter j applies to data qubit j.
using BasisSetting = std::string;

inline constexpr std::uint64_t kDefaultShotsPerSetting = 8192;

/// All 3^n settings, lexicographic with X < Y < Z.
inline std::vector<BasisSetting> tomo_settings(int n) {
  if (n < 1) throw std::invalid_argument("tomo_settings: need at least one qubit");
  if (n > 8) throw ResourceLimitError("tomo_settings: at most 8 qubits");
  std::vector<BasisSetting> out{""};
  for (int j = 0; j < n; ++j) {
    std::vector<BasisSetting> next;
    next.reserve(out.size() * 3);
    for (const auto& s : out) {
      for (char c : {'X', 'Y', 'Z'}) next.push_back(s + c);
    }
    out = std::move(next);
  }
  return out;
}

/// Post-selection on ancilla outcomes; required[i] is the bit demanded of
/// ancillas[i].
struct TomographyCondition {
  std::vector<int> ancillas;
  std::string required;
};

/// Outcome index layout: bit j is data qubit j; in `joint`, ancilla i sits at
/// bit num_data() + i. Exact datasets hold probabilities (total 1).
struct TomographyDataset {
  std::vector<int> data_qubits;
  TomographyCondition condition;
  bool exact = false;
  std::uint64_t shots_per_setting = 0;
  std::vector<BasisSetting> settings;
  std::vector<std::vector<double>> joint;   // per setting, 2^(data+ancilla)
  std::vector<std::vector<double>> counts;  // per setting, 2^data, condition applied
  std::vector<double> accepted;
  std::vector<double> total;

  int num_data() const { return static_cast<int>(data_qubits.size()); }
  int num_ancillas() const { return static_cast<int>(condition.ancillas.size()); }

  double accepted_fraction() const {
    const double a = std::accumulate(accepted.begin(), accepted.end(), 0.0);
    const double t = std::accumulate(total.begin(), total.end(), 0.0);
    return t > 0 ? a / t : 0.0;
  }

  /// Rebuilds counts/accepted/total from `joint`.
  void apply_condition() {
    const int nd = num_data();
    const std::uint64_t dd = std::uint64_t{1} << nd;
    std::uint64_t want = 0;
    for (std::size_t i = 0; i < condition.required.size(); ++i) {
      if (condition.required[i] == '1') want |= std::uint64_t{1} << i;
    }
    counts.assign(joint.size(), std::vector<double>(dd, 0.0));
    accepted.assign(joint.size(), 0.0);
    total.assign(joint.size(), 0.0);
    for (std::size_t s = 0; s < joint.size(); ++s) {
      for (std::uint64_t idx = 0; idx < joint[s].size(); ++idx) {
        const double w = joint[s][idx];
        total[s] += w;
        if ((idx >> nd) != want) continue;
        counts[s][idx & (dd - 1)] += w;
        accepted[s] += w;
      }
    }
  }
};

namespace detail {

inline void check_condition(int width, const std::vector<int>& data, const TomographyCondition& cond) {
  if (data.empty()) throw std::invalid_argument("collect: no data qubits");
  if (cond.required.size() != cond.ancillas.size()) {
    throw std::invalid_argument("collect: condition bitstring length must match the ancilla list");
  }
  for (char ch : cond.required) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("collect: condition bits must be 0 or 1");
  }
  std::vector<int> all = data;
  all.insert(all.end(), cond.ancillas.begin(), cond.ancillas.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] < 0 || all[i] >= width) {
      throw std::invalid_argument("collect: qubit " + std::to_string(all[i]) + " outside the circuit");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (all[i] == all[j]) {
        throw std::invalid_argument(j < data.size() && i >= data.size()
                                        ? "collect: condition qubit " + std::to_string(all[i]) +
                                              " is also a data qubit"
                                        : "collect: repeated qubit " + std::to_string(all[i]));
      }
    }
  }
}

// Drops terminal measurements; anything else measurement-related is rejected
// because the appended readout replaces it.
inline Circuit strip_terminal_measurements(const Circuit& c) {
  const auto& ins = c.instructions();
  std::vector<bool> touched_after(static_cast<std::size_t>(c.num_qubits()), false);
  std::vector<bool> keep(ins.size(), true);
  for (std::size_t i = ins.size(); i-- > 0;) {
    const Instruction& in = ins[i];
    if (in.kind == OpKind::Gate && in.condition >= 0) {
      throw std::invalid_argument("collect: classically conditioned gates are not supported");
    }
    if (in.kind == OpKind::Measure) {
      if (touched_after[static_cast<std::size_t>(in.qubits[0])]) {
        throw std::invalid_argument("collect: mid-circuit measurement on qubit " + std::to_string(in.qubits[0]));
      }
      keep[i] = false;
      continue;
    }
    if (in.kind == OpKind::Barrier) continue;
    for (int q : in.qubits) touched_after[static_cast<std::size_t>(q)] = true;
  }
  Circuit out(c.num_qubits());
  out.metadata() = c.metadata();
  for (std::size_t i = 0; i < ins.size(); ++i) {
    if (keep[i]) out.append(ins[i]);
  }
  return out;
}

// Outcome distribution of a suffix made of gates followed by one Z
// measurement per qubit. Idle channels in the measurement block act only on
// the qubit about to be measured, so they commute with the other
// measurements and are applied up front; readout flips act classically.
inline std::vector<double> terminal_distribution(CompiledCircuit cc, const DensityMatrix& rho) {
  std::size_t first_measure = 0;
  while (first_measure < cc.steps.size() && cc.steps[first_measure].in.kind != OpKind::Measure) ++first_measure;
  std::vector<CompiledStep> measures(cc.steps.begin() + static_cast<std::ptrdiff_t>(first_measure), cc.steps.end());
  cc.steps.resize(first_measure);
  Matrix m = simulate_density(cc, rho).final_density->matrix();
  const int n = cc.num_qubits;
  for (const CompiledStep& st : measures) {
    for (const auto& [q, ch] : st.idle_before) {
      const int t[1] = {q};
      apply_kraus_inplace(m, n, ch, t);
    }
  }
  std::vector<double> probs(std::size_t{1} << cc.num_clbits, 0.0);
  for (Eigen::Index x = 0; x < m.rows(); ++x) {
    std::uint64_t rec = 0;
    for (const CompiledStep& st : measures) {
      if ((x >> st.in.qubits[0]) & 1) rec |= std::uint64_t{1} << st.in.clbit;
    }
    probs[rec] += m(x, x).real();
  }
  for (const CompiledStep& st : measures) {
    const auto [e0, e1] = st.readout;
    if (e0 == 0 && e1 == 0) continue;
    const std::uint64_t bit = std::uint64_t{1} << st.in.clbit;
    for (std::uint64_t r = 0; r < probs.size(); ++r) {
      if (r & bit) continue;
      const double p0 = probs[r], p1 = probs[r | bit];
      probs[r] = (1 - e0) * p0 + e1 * p1;
      probs[r | bit] = e0 * p0 + (1 - e1) * p1;
    }
  }
  for (double& p : probs) p = std::max(p, 0.0);
  return probs;
}

}  // namespace detail

/// Runs every setting and records outcome statistics. The circuit must not
/// contain mid-circuit measurements; terminal ones are replaced by the
/// tomography readout. shots_per_setting == 0 selects exact mode, which
/// stores outcome probabilities. Finite-shot counts are multinomial draws
/// from the exact outcome distribution with seed subseed(seed, setting).
inline TomographyDataset collect(const Circuit& c, const std::vector<int>& data_qubits,
                                 const TomographyCondition& condition,
                                 const std::vector<BasisSetting>& settings,
                                 std::uint64_t shots_per_setting, const NoiseModel& noise,
                                 std::uint64_t seed, int workers = 1) {
  detail::check_condition(c.num_qubits(), data_qubits, condition);
  const int nd = static_cast<int>(data_qubits.size());
  const int na = static_cast<int>(condition.ancillas.size());
  if (nd + na > 12) throw ResourceLimitError("collect: at most 12 measured qubits");
  for (const auto& s : settings) {
    if (static_cast<int>(s.size()) != nd) {
      throw std::invalid_argument("collect: setting '" + s + "' does not match the data qubit count");
    }
    for (char ch : s) basis_from_char(ch);
  }

  const Circuit body = detail::strip_terminal_measurements(c);
  const CompiledCircuit prefix = compile(body, noise);
  const SimulationResult pre = simulate_density(prefix, DensityMatrix(c.num_qubits()));
  const DensityMatrix rho = *pre.final_density;
  const std::size_t body_len = body.instructions().size();

  TomographyDataset ds;
  ds.data_qubits = data_qubits;
  ds.condition = condition;
  ds.exact = shots_per_setting == 0;
  ds.shots_per_setting = shots_per_setting;
  ds.settings = settings;
  ds.joint.assign(settings.size(), {});

  parallel_for(settings.size(), workers, [&](std::size_t si) {
    Circuit full(c.num_qubits(), nd + na);
    for (const auto& in : body.instructions()) full.append(in);
    for (int j = 0; j < nd; ++j) {
      const int q = data_qubits[static_cast<std::size_t>(j)];
      switch (settings[si][static_cast<std::size_t>(j)]) {
        case 'X': full.h(q); break;
        case 'Y': full.sdg(q).h(q); break;
        default: break;
      }
    }
    for (int j = 0; j < nd; ++j) full.measure(data_qubits[static_cast<std::size_t>(j)], j);
    for (int i = 0; i < na; ++i) full.measure(condition.ancillas[static_cast<std::size_t>(i)], nd + i);
    CompiledCircuit cc = compile(full, noise);
    // The scheduler is causal, so the body's compiled steps are shared by
    // every setting; only the readout suffix is simulated here.
    cc.steps.erase(cc.steps.begin(), cc.steps.begin() + static_cast<std::ptrdiff_t>(body_len));
    std::vector<double> probs = detail::terminal_distribution(cc, rho);
    if (shots_per_setting == 0) {
      ds.joint[si] = std::move(probs);
      return;
    }
    Rng rng(subseed(seed, si));
    const auto drawn = sample_multinomial(probs, shots_per_setting, rng);
    ds.joint[si].assign(drawn.begin(), drawn.end());
  });
  ds.apply_condition();
  return ds;
}

/// Exact dataset of a known data-qubit state (no ancillas, noiseless
/// readout); the ideal counterpart of collect.
inline TomographyDataset exact_dataset(const DensityMatrix& rho, const std::vector<BasisSetting>& settings) {
  const int n = rho.num_qubits();
  TomographyDataset ds;
  ds.data_qubits.resize(static_cast<std::size_t>(n));
  std::iota(ds.data_qubits.begin(), ds.data_qubits.end(), 0);
  ds.exact = true;
  ds.settings = settings;
  for (const auto& s : settings) {
    if (static_cast<int>(s.size()) != n) throw std::invalid_argument("exact_dataset: setting length mismatch");
    DensityMatrix r = rho;
    for (int j = 0; j < n; ++j) {
      const Basis b = basis_from_char(s[static_cast<std::size_t>(j)]);
      if (b != Basis::Z) r = apply_unitary(r, detail::basis_change(b), {j});
    }
    const RealVector d = r.matrix().diagonal().real();
    ds.joint.emplace_back(d.data(), d.data() + d.size());
  }
  ds.apply_condition();
  return ds;
}

/// Euclidean projection of v onto {x >= 0, sum x = total}.
inline RealVector project_simplex(const RealVector& v, double total = 1.0) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double acc = 0, theta = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += u[i];
    const double t = (acc - total) / static_cast<double>(i + 1);
    if (u[i] - t > 0) theta = t;
  }
  RealVector out = (v.array() - theta).max(0.0).matrix();
  return out;
}

/// Linear-inversion estimate over Pauli expectations, projected onto unit-trace
/// PSD matrices by eigenvalue simplex projection.
inline DensityMatrix reconstruct(const TomographyDataset& ds) {
  const int n = ds.num_data();
  if (n < 1) throw std::invalid_argument("reconstruct: dataset has no data qubits");
  check_density_qubits(n);
  const std::size_t nsettings = static_cast<std::size_t>(std::pow(3, n));
  if (ds.settings.size() != ds.counts.size() || ds.accepted.size() != ds.counts.size()) {
    throw std::invalid_argument("reconstruct: inconsistent dataset");
  }
  // Settings indexed base 3 with qubit j at digit j.
  std::vector<int> seen(nsettings, -1);
  for (std::size_t s = 0; s < ds.settings.size(); ++s) {
    if (static_cast<int>(ds.settings[s].size()) != n) throw std::invalid_argument("reconstruct: bad setting length");
    std::size_t code = 0, mul = 1;
    for (int j = 0; j < n; ++j, mul *= 3) {
      code += static_cast<std::size_t>(basis_from_char(ds.settings[s][static_cast<std::size_t>(j)])) * mul;
    }
    if (ds.accepted[s] <= 0) throw NumericalError("reconstruct: setting " + ds.settings[s] + " has no accepted shots");
    seen[code] = static_cast<int>(s);
  }
  for (std::size_t code = 0; code < nsettings; ++code) {
    if (seen[code] < 0) throw std::invalid_argument("reconstruct: missing measurement settings");
  }

  // Pooled expectation of every Pauli (base-4 code, 0 = I) over compatible
  // settings, weighted by accepted shots.
  const std::size_t npaulis = std::size_t{1} << (2 * n);
  const std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<double> sum(npaulis, 0.0), weight(npaulis, 0.0);
  for (std::size_t s = 0; s < ds.settings.size(); ++s) {
    const auto& cnt = ds.counts[s];
    for (std::uint64_t mask = 0; mask < dim; ++mask) {
      double e = 0;
      for (std::uint64_t x = 0; x < dim; ++x) e += (std::popcount(x & mask) & 1) ? -cnt[x] : cnt[x];
      std::size_t code = 0;
      for (int j = 0; j < n; ++j) {
        if ((mask >> j) & 1) {
          const int letter = 1 + static_cast<int>(basis_from_char(ds.settings[s][static_cast<std::size_t>(j)]));
          code |= static_cast<std::size_t>(letter) << (2 * j);
        }
      }
      sum[code] += e;
      weight[code] += ds.accepted[s];
    }
  }

  Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t code = 0; code < npaulis; ++code) {
    const double ev = code == 0 ? 1.0 : sum[code] / weight[code];
    std::uint64_t xm = 0, zm = 0;
    int ny = 0;
    for (int j = 0; j < n; ++j) {
      const int letter = static_cast<int>((code >> (2 * j)) & 3);  // 1 X, 2 Y, 3 Z
      if (letter == 1 || letter == 2) xm |= std::uint64_t{1} << j;
      if (letter == 2 || letter == 3) zm |= std::uint64_t{1} << j;
      if (letter == 2) ++ny;
    }
    static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx ph = ipow[ny % 4] * ev;
    // P|c> = i^ny (-1)^{|c & zm|} |c ^ xm>
    for (std::uint64_t col = 0; col < dim; ++col) {
      const cplx v = (std::popcount(col & zm) & 1) ? -ph : ph;
      rho(static_cast<Eigen::Index>(col ^ xm), static_cast<Eigen::Index>(col)) += v;
    }
  }
  rho /= static_cast<double>(dim);
  rho = (rho + rho.adjoint()).eval() * 0.5;

  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  if (es.info() != Eigen::Success) throw NumericalError("reconstruct: eigen-decomposition failed");
  const RealVector lam = project_simplex(es.eigenvalues());
  Matrix out = es.eigenvectors() * lam.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  out = (out + out.adjoint()).eval() * 0.5;
  out /= out.trace().real();
  return DensityMatrix::unchecked(std::move(out));
}

/// Measured confusion matrix over `qubits` (qubits[0] is the least-significant
/// bit). Each basis state is prepared with x gates and read out under `noise`
/// restricted to those qubits. shots == 0 returns readout_confusion.
inline CalibrationMatrix build_calibration(const NoiseModel& noise, const std::vector<int>& qubits,
                                           std::uint64_t shots, std::uint64_t seed) {
  const int m = static_cast<int>(qubits.size());
  if (m < 1) throw std::invalid_argument("build_calibration: no qubits");
  if (m > 12) throw ResourceLimitError("build_calibration: at most 12 qubits");
  if (!noise.enabled()) return CalibrationMatrix::identity(m);
  if (shots == 0) return readout_confusion(noise, qubits);
  noise.check_qubits(qubits);
  const NoiseModel local(noise.device().restricted(qubits), noise.options());
  const Eigen::Index dim = Eigen::Index{1} << m;
  RealMatrix mat = RealMatrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    Circuit c(m, m);
    for (int j = 0; j < m; ++j) {
      if ((b >> j) & 1) c.x(j);
    }
    for (int j = 0; j < m; ++j) c.measure(j, j);
    const std::vector<double> probs = detail::terminal_distribution(compile(c, local), DensityMatrix(m));
    Rng rng(subseed(seed, static_cast<std::uint64_t>(b)));
    const auto drawn = sample_multinomial(probs, shots, rng);
    for (Eigen::Index r = 0; r < dim; ++r) {
      mat(r, b) = static_cast<double>(drawn[static_cast<std::size_t>(r)]) / static_cast<double>(shots);
    }
  }
  return CalibrationMatrix(std::move(mat));
}

namespace detail {

// min ||A x - b|| subject to x >= 0, sum x = sum b, by accelerated projected
// gradient started from the projected unconstrained solution.
inline RealVector constrained_nnls(const RealMatrix& a, const Eigen::PartialPivLU<RealMatrix>& lu,
                                   double lipschitz, const RealVector& b) {
  const double total = b.sum();
  if (total <= 0) return RealVector::Zero(b.size());
  RealVector x = lu.solve(b);
  if (x.minCoeff() >= 0) {
    x *= total / x.sum();
    return x;
  }
  x = project_simplex(x, total);
  RealVector y = x, prev = x;
  double t = 1;
  const double step = 1.0 / lipschitz;
  for (int it = 0; it < 20000; ++it) {
    const RealVector grad = a.transpose() * (a * y - b);
    x = project_simplex(y - step * grad, total);
    const double t_next = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
    y = x + ((t - 1) / t_next) * (x - prev);
    const double moved = (x - prev).lpNorm<1>();
    prev = x;
    t = t_next;
    if (moved <= 1e-12 * total) break;
  }
  return x;
}

}  // namespace detail

/// Readout mitigation on the joint data+ancilla outcomes, followed by the
/// ancilla condition. Calibration bit order: data qubits, then ancillas.
inline TomographyDataset mitigate(const TomographyDataset& ds, const CalibrationMatrix& cal) {
  const int width = ds.num_data() + ds.num_ancillas();
  if (cal.num_qubits() != width) {
    throw std::invalid_argument("mitigate: calibration covers " + std::to_string(cal.num_qubits()) +
                                " qubits but the dataset measures " + std::to_string(width));
  }
  const double cond = cal.condition_number();
  if (!(cond <= 1e8)) {
    throw NumericalError("mitigate: calibration matrix is singular (condition number " + std::to_string(cond) + ")");
  }
  TomographyDataset out = ds;
  const RealMatrix& a = cal.matrix();
  if (a.isIdentity(0.0)) return out;
  const Eigen::PartialPivLU<RealMatrix> lu(a);
  const double sigma = spectral_norm(a.cast<cplx>());
  for (std::size_t s = 0; s < ds.joint.size(); ++s) {
    const RealVector b = Eigen::Map<const RealVector>(ds.joint[s].data(), static_cast<Eigen::Index>(ds.joint[s].size()));
    const RealVector x = detail::constrained_nnls(a, lu, sigma * sigma, b);
    out.joint[s].assign(x.data(), x.data() + x.size());
  }
  out.apply_condition();
  return out;
}

// --- JSON --------------------------------------------------------------------

/// Data-outcome label with data qubit 0 rightmost.
inline std::string outcome_string(std::uint64_t x, int bits) { return record_string(x, bits); }

inline nlohmann::json to_json(const TomographyDataset& ds) {
  nlohmann::json settings = nlohmann::json::array();
  for (std::size_t s = 0; s < ds.settings.size(); ++s) {
    nlohmann::json counts = nlohmann::json::object();
    for (std::uint64_t x = 0; x < ds.counts[s].size(); ++x) {
      if (ds.counts[s][x] != 0) counts[outcome_string(x, ds.num_data())] = ds.counts[s][x];
    }
    settings.push_back({{"setting", ds.settings[s]},
                        {"counts", counts},
                        {"accepted", ds.accepted[s]},
                        {"total", ds.total[s]}});
  }
  return {{"data_qubits", ds.data_qubits},
          {"condition", {{"ancillas", ds.condition.ancillas}, {"required", ds.condition.required}}},
          {"exact", ds.exact},
          {"shots_per_setting", ds.shots_per_setting},
          {"accepted_fraction", ds.accepted_fraction()},
          {"settings", settings}};
}

/// Nested [row][col] = [re, im] arrays.
inline nlohmann::json to_json(const DensityMatrix& rho) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < rho.dim(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < rho.dim(); ++c) row.push_back({rho(r, c).real(), rho(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qflag
