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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qflag/code513/code.hpp"
#include "qflag/flag/extraction.hpp"
#include "qflag/noise/channels.hpp"
#include "qflag/noise/device.hpp"
#include "qflag/tomography/tomography.hpp"
#include "test_util.hpp"

namespace qflag {
namespace {

const TomographyCondition kNoCondition{};

Circuit prep_circuit() { return prep_minus_logical(PrepVariant::IdealDepth3).circuit; }

// Prep of |-><sub>L</sub> on 0..4 followed by flagged ZXIXZ extraction (s = 5, f = 6).
Circuit stabilizer_circuit() {
  Circuit c(7, 2);
  c.compose(prep_circuit());
  c.compose(flagged_syndrome_circuit(five_qubit_code(), 3, {0, 1, 2, 3, 4}, 5, 6).circuit);
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

double min_eigenvalue(const DensityMatrix& r) { return detail::hermitian_eigenvalues(r.matrix()).minCoeff(); }

TEST(TomoSettings, LexicographicOrder) {
  EXPECT_EQ(tomo_settings(1), (std::vector<BasisSetting>{"X", "Y", "Z"}));
  const auto two = tomo_settings(2);
  ASSERT_EQ(two.size(), 9u);
  EXPECT_EQ(two.front(), "XX");
  EXPECT_EQ(two[1], "XY");
  EXPECT_EQ(two.back(), "ZZ");
  const auto five = tomo_settings(5);
  EXPECT_EQ(five.size(), 243u);
  EXPECT_TRUE(std::is_sorted(five.begin(), five.end()));
  EXPECT_EQ(std::adjacent_find(five.begin(), five.end()), five.end());
  EXPECT_THROW(tomo_settings(0), std::invalid_argument);
}

TEST(Collect, NoiselessStabilizerCircuitAlwaysAccepted) {
  const auto ds = collect(stabilizer_circuit(), {0, 1, 2, 3, 4}, {{5, 6}, "00"}, tomo_settings(5), 0, {}, 1);
  for (std::size_t s = 0; s < ds.settings.size(); ++s) EXPECT_NEAR(ds.accepted[s] / ds.total[s], 1.0, 1e-12);
  EXPECT_NEAR(ds.accepted_fraction(), 1.0, 1e-12);
}

TEST(Collect, AncillaReadoutFlipsLowerAcceptance) {
  DeviceModel dev = DeviceModel::uniform(7, 0, 0);
  for (int q : {5, 6}) {
    dev.qubits[static_cast<std::size_t>(q)].readout_p1_given_0 = 0.05;
    dev.qubits[static_cast<std::size_t>(q)].readout_p0_given_1 = 0.05;
  }
  const NoiseModel noise(dev, NoiseOptions::readout_only());
  const auto settings = tomo_settings(5);
  const auto exact = collect(stabilizer_circuit(), {0, 1, 2, 3, 4}, {{5, 6}, "00"}, settings, 0, noise, 1);
  EXPECT_NEAR(exact.accepted_fraction(), 0.9025, 1e-12);

  const std::uint64_t shots = 1024;
  const auto sampled = collect(stabilizer_circuit(), {0, 1, 2, 3, 4}, {{5, 6}, "00"}, settings, shots, noise, 7);
  const double n = static_cast<double>(shots * settings.size());
  const double sigma = std::sqrt(0.9025 * 0.0975 / n);
  EXPECT_NEAR(sampled.accepted_fraction(), 0.9025, 5 * sigma);
  for (std::size_t s = 0; s < settings.size(); ++s) {
    double sum = 0;
    for (double c : sampled.counts[s]) sum += c;
    EXPECT_DOUBLE_EQ(sum, sampled.accepted[s]);
    EXPECT_LE(sampled.accepted[s], sampled.total[s]);
    EXPECT_DOUBLE_EQ(sampled.total[s], static_cast<double>(shots));
  }
}

TEST(Collect, ZeroStateConcentratesOnZero) {
  const auto ds = collect(Circuit(1), {0}, kNoCondition, {"Z"}, 100, {}, 3);
  EXPECT_EQ(ds.counts[0][0], 100);
  EXPECT_EQ(ds.counts[0][1], 0);
}

TEST(Collect, RejectsBadArguments) {
  const Circuit c = stabilizer_circuit();
  EXPECT_THROW(collect(c, {0, 1, 2, 3, 5}, {{5, 6}, "00"}, {"ZZZZZ"}, 0, {}, 1), std::invalid_argument);
  EXPECT_THROW(collect(c, {0, 1, 2, 3, 4}, {{5, 6}, "0"}, {"ZZZZZ"}, 0, {}, 1), std::invalid_argument);
  EXPECT_THROW(collect(c, {0, 1, 2, 3, 4}, {{5, 6}, "00"}, {"ZZZ"}, 0, {}, 1), std::invalid_argument);
  EXPECT_THROW(collect(c, {0, 1, 2, 3, 9}, kNoCondition, {"ZZZZZ"}, 0, {}, 1), std::invalid_argument);
  Circuit mid(1, 1);
  mid.measure(0, 0).h(0);
  EXPECT_THROW(collect(mid, {0}, kNoCondition, {"Z"}, 0, {}, 1), std::invalid_argument);
}

TEST(Collect, WorkerCountDoesNotChangeCounts) {
  const auto noise = NoiseModel::uniform_depolarizing(7, 0.001, 0.02);
  const auto settings = tomo_settings(5);
  const auto a = collect(stabilizer_circuit(), {0, 1, 2, 3, 4}, {{5, 6}, "00"}, settings, 256, noise, 11, 1);
  const auto b = collect(stabilizer_circuit(), {0, 1, 2, 3, 4}, {{5, 6}, "00"}, settings, 256, noise, 11, 3);
  EXPECT_EQ(a.joint, b.joint);
}

TEST(Reconstruct, ZeroState) {
  const auto ds = collect(Circuit(1), {0}, kNoCondition, tomo_settings(1), 0, {}, 0);
  const DensityMatrix r = reconstruct(ds);
  EXPECT_NEAR(std::abs(r(0, 0) - 1.0), 0, 1e-10);
  EXPECT_NEAR(r.matrix().cwiseAbs().sum() - 1.0, 0, 1e-10);
}

TEST(Reconstruct, NoiselessCodeState) {
  const auto ds = collect(prep_circuit(), {0, 1, 2, 3, 4}, kNoCondition, tomo_settings(5), 0, {}, 0);
  EXPECT_GE(fidelity(minus_logical_state(), reconstruct(ds)), 1 - 1e-6);
}

TEST(Reconstruct, DepolarizedCodeStateMatchesChannelOracle) {
  // No-error probability 0.8 on qubits 0 and 4: each non-identity Pauli
  // applied with probability 0.2 / 3.
  const Matrix pure = DensityMatrix::from_pure(minus_logical_state()).matrix();
  Matrix expected = pure;
  for (int q : {0, 4}) {
    const DensityMatrix cur = DensityMatrix::unchecked(expected);
    Matrix flips = Matrix::Zero(32, 32);
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) flips += apply_pauli(cur, PauliString::single(5, q, p)).matrix();
    expected = 0.8 * expected + (0.2 / 3) * flips;
  }
  DensityMatrix damaged = DensityMatrix::from_pure(minus_logical_state());
  for (int q : {0, 4}) damaged = apply_kraus(damaged, depolarizing_channel(0.8), {q});
  ASSERT_LT((damaged.matrix() - expected).norm(), 1e-12);

  const DensityMatrix r = reconstruct(exact_dataset(damaged, tomo_settings(5)));
  EXPECT_LT(trace_distance(r, DensityMatrix::unchecked(expected)), 1e-6);
}

TEST(Reconstruct, RejectsIncompleteData) {
  auto ds = exact_dataset(DensityMatrix(2), tomo_settings(2));
  auto missing = ds;
  missing.settings.pop_back();
  missing.counts.pop_back();
  missing.accepted.pop_back();
  EXPECT_THROW(reconstruct(missing), std::invalid_argument);
  auto empty = ds;
  empty.accepted[3] = 0;
  EXPECT_THROW(reconstruct(empty), NumericalError);
}

// Random circuits on 4 qubits: data {0,1,2} in a shuffled order, ancilla 3
// post-selected; oracle is the branch state of a direct simulation.
TEST(ReconstructProperty, ExactPipelineMatchesConditionedState) {
  Rng rng(2024);
  const auto noise = NoiseModel::uniform_depolarizing(4, 0, 0.03);
  const std::vector<std::vector<int>> orders{{0, 1, 2}, {2, 0, 1}, {1, 2, 0}};
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    Circuit c(4);
    for (int g = 0; g < 14; ++g) {
      const int a = static_cast<int>(rng() % 4);
      const int b = static_cast<int>((a + 1 + rng() % 3) % 4);
      switch (rng() % 4) {
        case 0: c.h(a); break;
        case 1: c.u3(uniform01(rng) * 3, uniform01(rng) * 6, uniform01(rng) * 6, a); break;
        case 2: c.s(a); break;
        default: c.cx(a, b); break;
      }
    }
    const std::string want = trial % 2 ? "1" : "0";
    Circuit m(4, 1);
    m.compose(c);
    m.measure(3, 0);
    const SimulationResult sim = simulate_density(m, noise);
    const double p = sim.probability_of(want == "1" ? 1 : 0);
    if (p < 1e-3) continue;
    const auto& order = orders[static_cast<std::size_t>(trial) % orders.size()];
    DensityMatrix branch;
    for (const auto& b : sim.branches) {
      if (b.record == (want == "1" ? 1u : 0u)) branch = b.state;
    }
    const DensityMatrix truth = partial_trace(branch, std::span<const int>(order));
    const auto ds = collect(c, order, {{3}, want}, tomo_settings(3), 0, noise, 0);
    EXPECT_NEAR(ds.accepted_fraction(), p, 1e-9);
    const DensityMatrix r = reconstruct(ds);
    EXPECT_LT(trace_distance(r, truth), 1e-6) << "trial " << trial;
    ++checked;
  }
  EXPECT_GE(checked, 8);
}

TEST(ReconstructProperty, OutputIsAValidState) {
  const auto noise = NoiseModel::uniform_depolarizing(5, 0.01, 0.05);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto ds = collect(prep_circuit(), {0, 1, 2}, kNoCondition, tomo_settings(3), 64, noise, seed);
    const DensityMatrix r = reconstruct(ds);
    EXPECT_EQ(r.matrix(), r.matrix().adjoint().eval());
    EXPECT_NEAR(r.trace(), 1, 1e-12);
    EXPECT_GE(min_eigenvalue(r), -1e-12);
  }
}

TEST(ReconstructProperty, ErrorShrinksWithShots) {
  Circuit c(3);
  c.h(0).cx(0, 1).u3(0.7, 0.2, 0.1, 2).cx(1, 2);
  const DensityMatrix truth = *simulate_density(c).final_density;
  std::vector<double> medians;
  for (std::uint64_t shots : {256u, 1024u, 8192u}) {
    std::vector<double> d;
    for (std::uint64_t seed = 0; seed < 9; ++seed) {
      d.push_back(trace_distance(reconstruct(collect(c, {0, 1, 2}, kNoCondition, tomo_settings(3), shots, {}, seed)), truth));
    }
    medians.push_back(median(d));
  }
  EXPECT_GT(medians[0], medians[1]);
  EXPECT_GT(medians[1], medians[2]);
}

TEST(Calibration, ZeroReadoutNoiseIsIdentity) {
  const NoiseModel noise(DeviceModel::uniform(3, 0, 0), NoiseOptions::readout_only());
  EXPECT_TRUE(build_calibration(noise, {0, 1, 2}, 1000, 1).matrix().isIdentity(0));
  EXPECT_TRUE(build_calibration(noise, {0, 1, 2}, 0, 1).matrix().isIdentity(0));
  EXPECT_TRUE(build_calibration(NoiseModel{}, {0, 1}, 1000, 1).matrix().isIdentity(0));
}

TEST(Calibration, ExactModeIsReadoutConfusion) {
  const DeviceModel dev = load_device(test::device_path("vigo.json"));
  const NoiseModel noise = noise_from_device(dev, NoiseOptions::readout_only());
  EXPECT_EQ(build_calibration(noise, {3, 1, 4}, 0, 1).matrix(), readout_confusion(dev, {3, 1, 4}).matrix());
}

TEST(Calibration, FiniteShotColumnsWithinBinomialNoise) {
  const DeviceModel dev = load_device(test::device_path("vigo.json"));
  const NoiseModel noise = noise_from_device(dev, NoiseOptions::readout_only());
  const std::vector<int> qubits{0, 1, 2};
  const RealMatrix exact = readout_confusion(dev, qubits).matrix();
  int good = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    const RealMatrix m = build_calibration(noise, qubits, 8192, static_cast<std::uint64_t>(seed)).matrix();
    double worst = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) worst = std::max(worst, 0.5 * (m.col(c) - exact.col(c)).lpNorm<1>());
    good += worst <= 0.03;
  }
  EXPECT_GE(good, 19);
}

TEST(Mitigate, IdentityCalibrationLeavesDatasetUnchanged) {
  const auto noise = NoiseModel::uniform_depolarizing(7, 0.001, 0.02);
  const auto ds = collect(stabilizer_circuit(), {0, 1, 2, 3, 4}, {{5, 6}, "00"}, tomo_settings(5), 128, noise, 5);
  const auto m = mitigate(ds, CalibrationMatrix::identity(7));
  EXPECT_EQ(m.joint, ds.joint);
  EXPECT_EQ(m.counts, ds.counts);
  EXPECT_EQ(m.accepted, ds.accepted);
}

TEST(Mitigate, RecoversKnownDistribution) {
  const RealMatrix a1 = single_qubit_confusion(0.04, 0.09);
  const RealMatrix a2 = single_qubit_confusion(0.02, 0.06);
  const RealMatrix a3 = single_qubit_confusion(0.07, 0.03);
  RealMatrix a(8, 8);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) a(r, c) = a1(r & 1, c & 1) * a2((r >> 1) & 1, (c >> 1) & 1) * a3(r >> 2, c >> 2);
  }
  const CalibrationMatrix cal(a);
  RealVector truth(8);
  truth << 0.30, 0.0, 0.05, 0.15, 0.0, 0.25, 0.2, 0.05;
  const RealVector observed = a * truth;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto drawn = sample_multinomial(std::span<const double>(observed.data(), 8), 8192, rng);
    TomographyDataset ds;
    ds.data_qubits = {0, 1, 2};
    ds.settings = {"ZZZ"};
    ds.joint = {std::vector<double>(drawn.begin(), drawn.end())};
    ds.apply_condition();
    const auto m = mitigate(ds, cal);
    double tv = 0, sum = 0;
    for (int i = 0; i < 8; ++i) {
      EXPECT_GE(m.joint[0][static_cast<std::size_t>(i)], 0);
      sum += m.joint[0][static_cast<std::size_t>(i)];
      tv += std::abs(m.joint[0][static_cast<std::size_t>(i)] / 8192 - truth(i));
    }
    EXPECT_NEAR(sum, 8192, 1e-6);
    EXPECT_LE(tv / 2, 0.02) << "seed " << seed;
  }
}

TEST(Mitigate, RejectsMismatchedOrSingularCalibration) {
  const auto ds = exact_dataset(DensityMatrix(2), tomo_settings(2));
  EXPECT_THROW(mitigate(ds, CalibrationMatrix::identity(3)), std::invalid_argument);
  RealMatrix half = RealMatrix::Constant(4, 4, 0.25);
  EXPECT_THROW(mitigate(ds, CalibrationMatrix(half)), NumericalError);
}

TEST(Mitigate, JointMitigationUndoesAncillaReadout) {
  DeviceModel dev = DeviceModel::uniform(7, 0, 0);
  for (std::size_t q = 0; q < 7; ++q) {
    dev.qubits[q].readout_p1_given_0 = 0.02 + 0.005 * static_cast<double>(q);
    dev.qubits[q].readout_p0_given_1 = 0.05;
  }
  const NoiseModel noise(dev, NoiseOptions::readout_only());
  const std::vector<int> measured{0, 1, 2, 3, 4, 5, 6};
  const auto ds = collect(stabilizer_circuit(), {0, 1, 2, 3, 4}, {{5, 6}, "00"}, tomo_settings(5), 0, noise, 1);
  EXPECT_LT(ds.accepted_fraction(), 0.95);
  const auto m = mitigate(ds, build_calibration(noise, measured, 0, 0));
  EXPECT_NEAR(m.accepted_fraction(), 1.0, 1e-9);
  EXPECT_GE(fidelity(minus_logical_state(), reconstruct(m)), 1 - 1e-6);
}

// Readout-only noise with the shipped Melbourne rates on the compact prep
// layout: tomography sees about 0.71 before mitigation.
TEST(Mitigate, MelbourneReadoutOnlyPrep) {
  const DeviceModel dev = load_device(test::device_path("melbourne.json")).restricted({11, 12, 13, 1, 2});
  const NoiseModel noise(dev, NoiseOptions::readout_only());
  const PrepCircuit prep = prep_minus_logical(PrepVariant::MelbourneDepth4);
  const StateVector target = minus_logical_state();

  const auto exact = collect(prep.circuit, prep.output_order, kNoCondition, tomo_settings(5), 0, noise, 0);
  EXPECT_NEAR(fidelity(target, reconstruct(exact)), 0.71, 0.03);
  const auto exact_m = mitigate(exact, build_calibration(noise, prep.output_order, 0, 0));
  EXPECT_GE(fidelity(target, reconstruct(exact_m)), 0.98);

  const CalibrationMatrix cal = build_calibration(noise, prep.output_order, 8192, 17);
  for (std::uint64_t seed : {1u, 2u}) {
    const auto ds = collect(prep.circuit, prep.output_order, kNoCondition, tomo_settings(5), 8192, noise, seed);
    EXPECT_NEAR(fidelity(target, reconstruct(ds)), 0.71, 0.03);
    EXPECT_GE(fidelity(target, reconstruct(mitigate(ds, cal))), 0.97);
  }
  const auto big = collect(prep.circuit, prep.output_order, kNoCondition, tomo_settings(5), 32768, noise, 3);
  EXPECT_GE(fidelity(target, reconstruct(mitigate(big, build_calibration(noise, prep.output_order, 32768, 4)))), 0.98);
}

TEST(TomographyJson, CountsSumToAccepted) {
  const auto ds = collect(stabilizer_circuit(), {0, 1, 2, 3, 4}, {{5, 6}, "00"}, {"ZZZZZ", "XXXXX"}, 100, {}, 1);
  const auto j = to_json(ds);
  EXPECT_EQ(j["condition"]["required"], "00");
  for (const auto& s : j["settings"]) {
    double sum = 0;
    for (const auto& [k, v] : s["counts"].items()) {
      EXPECT_EQ(k.size(), 5u);
      sum += v.get<double>();
    }
    EXPECT_DOUBLE_EQ(sum, s["accepted"].get<double>());
  }
  const auto rho = to_json(DensityMatrix(1));
  EXPECT_EQ(rho[0][0][0], 1.0);
  EXPECT_EQ(rho[1][1][1], 0.0);
}

}  // namespace
}  // namespace qflag
