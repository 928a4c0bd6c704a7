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

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qflag/core/ops.hpp"

namespace qflag {
namespace {

constexpr double kTight = 1e-10;

StateVector plus() { return apply_unitary(StateVector(1), gates::h(), {0}); }

DensityMatrix dm(const StateVector& s) { return DensityMatrix::from_pure(s); }

std::vector<Matrix> depol_kraus(double p) {
  std::vector<Matrix> ks{std::sqrt(p) * gates::id()};
  for (auto m : {gates::x(), gates::y(), gates::z()}) ks.push_back(std::sqrt((1 - p) / 3) * m);
  return ks;
}

// --- Pauli strings -----------------------------------------------------------

TEST(PauliString, ParsesAndPrints) {
  auto p = PauliString::from_string("-XZZXI");
  EXPECT_EQ(p.sign(), -1);
  EXPECT_EQ(p.weight(), 4);
  EXPECT_EQ(p[0], Pauli::X);
  EXPECT_EQ(p.str(), "-XZZXI");
  EXPECT_THROW(PauliString::from_string("XQ"), std::invalid_argument);
}

TEST(PauliString, MatrixMatchesDenseOracle) {
  for (const char* s : {"X", "YZ", "XZZXI", "ZXIXZ", "YYIXZ"}) {
    const auto p = PauliString::from_string(s);
    EXPECT_LT((p.to_matrix() - oracle::pauli_string(s)).cwiseAbs().maxCoeff(), kTight) << s;
  }
}

TEST(PauliString, ProductMatchesMatrixProduct) {
  const char letters[] = "IXYZ";
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      std::string sa{letters[a % 4], letters[a / 4]}, sb{letters[b % 4], letters[b / 4]};
      auto pa = PauliString::from_string(sa), pb = PauliString::from_string(sb);
      const bool commute = pa.commutes_with(pb);
      const Matrix ab = pa.to_matrix() * pb.to_matrix(), ba = pb.to_matrix() * pa.to_matrix();
      EXPECT_EQ(commute, (ab - ba).cwiseAbs().maxCoeff() < kTight) << sa << " " << sb;
      if (commute) {
        EXPECT_LT(((pa * pb).to_matrix() - ab).cwiseAbs().maxCoeff(), kTight) << sa << " " << sb;
      } else {
        EXPECT_THROW(pa * pb, std::domain_error);
      }
    }
  }
}

// --- tensor_product ----------------------------------------------------------

TEST(TensorProduct, IdentityTimesIdentity) {
  EXPECT_TRUE(tensor_product(gates::id(), gates::id()).isApprox(Matrix::Identity(4, 4)));
}

TEST(TensorProduct, KetZeroKetOneIsIndexOne) {
  const auto s = tensor_product(StateVector::basis(1, 0), StateVector::basis(1, 1));
  EXPECT_NEAR(std::abs(s[1]), 1.0, kTight);
}

TEST(TensorProduct, XTensorZOnZeroZero) {
  const Vector out = tensor_product(gates::x(), gates::z()) * StateVector(2).amplitudes();
  // Kronecker order: X sits on the high qubit, giving index 0b10.
  EXPECT_NEAR(std::abs(out(2)), 1.0, kTight);
  EXPECT_NEAR(out.norm(), 1.0, kTight);
}

TEST(TensorProduct, EnforcesQubitCap) {
  const Matrix big = Matrix::Identity(1 << 7, 1 << 7);
  EXPECT_THROW(tensor_product(big, big), ResourceLimitError);
}

// --- apply_unitary -----------------------------------------------------------

TEST(ApplyUnitary, HadamardOnZero) {
  const auto s = plus();
  EXPECT_NEAR(s[0].real(), 1 / std::sqrt(2.0), kTight);
  EXPECT_NEAR(s[1].real(), 1 / std::sqrt(2.0), kTight);
}

TEST(ApplyUnitary, CnotControlZeroTargetOne) {
  // Qubit 0 set, qubit 1 clear.
  const auto out = apply_unitary(StateVector::basis(2, 0b01), gates::cx(), {0, 1});
  EXPECT_NEAR(std::abs(out[0b11]), 1.0, kTight);
}

TEST(ApplyUnitary, CzOnPlusPlusIsGraphState) {
  auto s = apply_unitary(StateVector(2), gates::h(), {0});
  s = apply_unitary(s, gates::h(), {1});
  s = apply_unitary(s, gates::cz(), {0, 1});
  const double expect[4] = {0.5, 0.5, 0.5, -0.5};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(s[i].real(), expect[i], kTight);
}

TEST(ApplyUnitary, RejectsBadInput) {
  Matrix bad = gates::h();
  bad(0, 0) = 2;
  EXPECT_THROW(apply_unitary(StateVector(1), bad, {0}), std::invalid_argument);
  EXPECT_THROW(apply_unitary(StateVector(2), gates::cx(), {1, 1}), std::invalid_argument);
  EXPECT_THROW(apply_unitary(StateVector(2), gates::h(), {2}), std::out_of_range);
}

TEST(ApplyUnitary, RandomCircuitsMatchOracleAndPreserveNorm) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    StateVector s(oracle::random_state(n, rng));
    DensityMatrix rho = DensityMatrix::from_pure(s);
    oracle::Vec ref = s.amplitudes();
    const int gates_in_circuit = 1 + static_cast<int>(rng() % 6);
    for (int g = 0; g < gates_in_circuit; ++g) {
      const int k = n == 1 ? 1 : 1 + static_cast<int>(rng() % 2);
      std::vector<int> targets;
      while (static_cast<int>(targets.size()) < k) {
        const int q = static_cast<int>(rng() % static_cast<unsigned>(n));
        if (std::find(targets.begin(), targets.end(), q) == targets.end()) targets.push_back(q);
      }
      const Matrix u = oracle::haar_unitary(1 << k, rng);
      s = apply_unitary(s, u, targets);
      rho = apply_unitary(rho, u, targets);
      ref = oracle::embed(u, targets, n) * ref;
    }
    ASSERT_NEAR(s.amplitudes().squaredNorm(), 1.0, kTight);
    ASSERT_NEAR(rho.trace(), 1.0, kTight);
    ASSERT_LT((s.amplitudes() - ref).cwiseAbs().maxCoeff(), 1e-10);
    ASSERT_LT((rho.matrix() - ref * ref.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

// --- apply_kraus -------------------------------------------------------------

TEST(ApplyKraus, IdentityChannelLeavesStateUnchanged) {
  std::mt19937_64 rng(1);
  const DensityMatrix rho(oracle::random_density(3, rng));
  const auto out = apply_kraus(rho, KrausChannel::identity(1), {1});
  EXPECT_LT((out.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), kTight);
}

TEST(ApplyKraus, FullDepolarizingLimitOnZero) {
  const KrausChannel ch(depol_kraus(0.0));
  const auto out = apply_kraus(DensityMatrix(1), ch, {0});
  EXPECT_NEAR(out(0, 0).real(), 1.0 / 3, kTight);
  EXPECT_NEAR(out(1, 1).real(), 2.0 / 3, kTight);
}

TEST(ApplyKraus, DepolarizingOnPlusMatchesClosedForm) {
  const double p = 0.64258;
  const double pt = p - (1 - p) / 3;
  const auto out = apply_kraus(dm(plus()), KrausChannel(depol_kraus(p)), {0});
  Matrix plus_proj = Matrix::Constant(2, 2, 0.5);
  Matrix minus_proj(2, 2);
  minus_proj << 0.5, -0.5, -0.5, 0.5;
  const Matrix expect = (1 + pt) / 2 * plus_proj + (1 - pt) / 2 * minus_proj;
  EXPECT_LT((out.matrix() - expect).cwiseAbs().maxCoeff(), kTight);
}

TEST(ApplyKraus, RejectsIncompleteSetsAndArityMismatch) {
  EXPECT_THROW(KrausChannel({0.5 * gates::id()}), std::invalid_argument);
  EXPECT_THROW(apply_kraus(DensityMatrix(2), KrausChannel::identity(1), {0, 1}),
               std::invalid_argument);
}

TEST(ApplyKraus, MatchesFullMatrixOracleOnRandomInputs) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const DensityMatrix rho(oracle::random_density(n, rng));
    const double p = std::uniform_real_distribution<double>(0, 1)(rng);
    const int q = static_cast<int>(rng() % static_cast<unsigned>(n));
    const auto out = apply_kraus(rho, KrausChannel(depol_kraus(p)), {q});
    const Matrix ref = oracle::kraus_sum(oracle::depolarizing_full(p, q, n), rho.matrix());
    ASSERT_LT((out.matrix() - ref).cwiseAbs().maxCoeff(), kTight);
    ASSERT_NEAR(out.trace(), 1.0, kTight);
    ASSERT_TRUE(out.check());
  }
}

TEST(ApplyKraus, DepolarizingCommutesWithPauliConjugation) {
  std::mt19937_64 rng(5);
  const KrausChannel ch(depol_kraus(0.37));
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho(oracle::random_density(1, rng));
    for (const Matrix& u : {gates::x(), gates::y(), gates::z()}) {
      const auto lhs = apply_kraus(apply_unitary(rho, u, {0}), ch, {0});
      const auto rhs = apply_unitary(apply_kraus(rho, ch, {0}), u, {0});
      ASSERT_LT((lhs.matrix() - rhs.matrix()).cwiseAbs().maxCoeff(), kTight);
    }
  }
}

// --- measurement -------------------------------------------------------------

TEST(Measure, PlusInXBasisIsDeterministic) {
  const auto b = measure_exact(plus(), 0, Basis::X);
  EXPECT_NEAR(b[0].probability, 1.0, kTight);
  EXPECT_NEAR(b[1].probability, 0.0, kTight);
}

TEST(Measure, PlusInZBasisIsUniform) {
  const auto b = measure_exact(dm(plus()), 0, Basis::Z);
  EXPECT_NEAR(b[0].probability, 0.5, kTight);
  EXPECT_NEAR(b[1].probability, 0.5, kTight);
  EXPECT_NEAR(b[1].state(1, 1).real(), 1.0, kTight);
}

TEST(Measure, YBasisPostStateIsEigenstate) {
  const auto b = measure_exact(StateVector(1), 0, Basis::Y);
  EXPECT_NEAR(b[0].probability + b[1].probability, 1.0, kTight);
  for (const auto& br : b) {
    const double y = expectation(br.state, PauliString::from_string("Y"));
    EXPECT_NEAR(y, br.outcome == 0 ? 1.0 : -1.0, kTight);
  }
}

TEST(Measure, SampledFrequenciesFollowBornRule) {
  Rng rng(11);
  const auto s = plus();
  int ones = 0;
  const int shots = 20000;
  for (int i = 0; i < shots; ++i) ones += measure_projective(s, 0, Basis::Z, rng).outcome;
  EXPECT_NEAR(static_cast<double>(ones) / shots, 0.5, 0.02);
}

// --- partial trace -----------------------------------------------------------

TEST(PartialTrace, ProductState) {
  // Qubit 0 in |0>, qubit 1 in |1>.
  const auto rho = dm(StateVector::basis(2, 0b10));
  const auto red = partial_trace(rho, {0});
  EXPECT_NEAR(red(0, 0).real(), 1.0, kTight);
}

TEST(PartialTrace, BellStateMarginalsAreMaximallyMixed) {
  auto s = apply_unitary(StateVector(2), gates::h(), {0});
  s = apply_unitary(s, gates::cx(), {0, 1});
  for (int q : {0, 1}) {
    const auto red = partial_trace(dm(s), {q});
    EXPECT_LT((red.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), kTight);
  }
  EXPECT_THROW(partial_trace(dm(s), std::span<const int>{}), std::invalid_argument);
}

TEST(PartialTrace, RecoversFactorOfProduct) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int na = 1 + static_cast<int>(rng() % 3), nb = 1 + static_cast<int>(rng() % 3);
    const DensityMatrix a(oracle::random_density(na, rng)), b(oracle::random_density(nb, rng));
    // Kronecker order puts `a` on the high qubits.
    std::vector<int> keep;
    for (int q = 0; q < na; ++q) keep.push_back(nb + q);
    const auto red = partial_trace(tensor_product(a, b), keep);
    ASSERT_LT((red.matrix() - a.matrix()).cwiseAbs().maxCoeff(), kTight);
  }
}

// --- metrics -----------------------------------------------------------------

TEST(Fidelity, BasicValues) {
  std::mt19937_64 rng(2);
  const DensityMatrix rho(oracle::random_density(2, rng));
  EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-8);
  EXPECT_NEAR(fidelity(DensityMatrix(1), dm(plus())), 0.5, kTight);
  EXPECT_THROW(fidelity(DensityMatrix(1), DensityMatrix(2)), std::invalid_argument);
}

TEST(Fidelity, PureStatesReduceToOverlap) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const StateVector a(oracle::random_state(3, rng)), b(oracle::random_state(3, rng));
    const double overlap = std::norm(a.amplitudes().dot(b.amplitudes()));
    ASSERT_NEAR(fidelity(dm(a), dm(b)), overlap, kTight);
    ASSERT_NEAR(fidelity(a, dm(b)), overlap, kTight);
  }
}

TEST(Fidelity, CommutingMixedStatesMatchClassicalFormula) {
  Matrix a = Matrix::Zero(4, 4), b = Matrix::Zero(4, 4);
  const double pa[4] = {0.4, 0.3, 0.2, 0.1}, pb[4] = {0.1, 0.2, 0.3, 0.4};
  double bc = 0;
  for (int i = 0; i < 4; ++i) {
    a(i, i) = pa[i];
    b(i, i) = pb[i];
    bc += std::sqrt(pa[i] * pb[i]);
  }
  EXPECT_NEAR(fidelity(DensityMatrix(a), DensityMatrix(b)), bc * bc, 1e-10);
  EXPECT_NEAR(fidelity(DensityMatrix(a), DensityMatrix(b)),
              fidelity(DensityMatrix(b), DensityMatrix(a)), 1e-10);
}

TEST(Fidelity, DepolarizedCodeStateMatchesKrausExpansion) {
  const StateVector psi(oracle::c5_graph_state());
  const double p = 0.9;
  DensityMatrix rho = dm(psi);
  rho = apply_kraus(rho, KrausChannel(depol_kraus(p)), {1});
  rho = apply_kraus(rho, KrausChannel(depol_kraus(p)), {4});
  // Exhaustive expansion over the 16 Pauli pairs with full matrices.
  std::vector<oracle::Mat> ks;
  for (const auto& k1 : oracle::depolarizing_full(p, 1, 5)) {
    for (const auto& k4 : oracle::depolarizing_full(p, 4, 5)) ks.push_back(k4 * k1);
  }
  const oracle::Mat ref = oracle::kraus_sum(ks, psi.amplitudes() * psi.amplitudes().adjoint());
  const double expected = psi.amplitudes().dot(ref * psi.amplitudes()).real();
  EXPECT_NEAR(fidelity(dm(psi), rho), expected, kTight);
  EXPECT_NEAR(fidelity(rho, dm(psi)), expected, kTight);
}

TEST(SpectralNorm, Examples) {
  EXPECT_NEAR(spectral_norm(gates::x()), 1.0, kTight);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.7;
  d(1, 1) = 0.3;
  EXPECT_NEAR(spectral_norm(d - 0.5 * Matrix::Identity(2, 2)), 0.2, kTight);
  EXPECT_EQ(spectral_norm(Matrix::Zero(3, 3)), 0.0);
}

TEST(SpectralNorm, IsSubmultiplicative) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = oracle::random_density(2, rng) * 3.0, b = oracle::haar_unitary(4, rng) * 0.5;
    ASSERT_LE(spectral_norm(a * b), spectral_norm(a) * spectral_norm(b) + 1e-12);
  }
}

TEST(TraceDistance, MatchesSvdOracle) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix a(oracle::random_density(2, rng)), b(oracle::random_density(2, rng));
    ASSERT_NEAR(trace_distance(a, b), oracle::trace_norm_distance(a.matrix(), b.matrix()), 1e-10);
  }
}

TEST(Expectation, MatchesDenseTrace) {
  std::mt19937_64 rng(12);
  const DensityMatrix rho(oracle::random_density(3, rng));
  for (const char* s : {"XYZ", "IZI", "YYX", "-ZIX"}) {
    const auto p = PauliString::from_string(s);
    const double ref = (rho.matrix() * p.to_matrix()).trace().real();
    EXPECT_NEAR(expectation(rho, p), ref, kTight) << s;
  }
}

// --- states ------------------------------------------------------------------

TEST(DensityMatrixInvariants, RejectInvalidMatrices) {
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);  // trace 2
  Matrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DensityMatrix{neg}, std::invalid_argument);
  Matrix nonherm(2, 2);
  nonherm << 0.5, 0.1, 0.2, 0.5;
  EXPECT_THROW(DensityMatrix{nonherm}, std::invalid_argument);
  EXPECT_THROW(StateVector(Vector::Ones(2)), std::invalid_argument);
  EXPECT_THROW(StateVector(Vector::Ones(3) / std::sqrt(3.0)), std::invalid_argument);
}

TEST(Random, ParallelForVisitsEveryIndexOnce) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

}  // namespace
}  // namespace qflag
