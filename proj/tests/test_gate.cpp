// Copyright 2026 The kerrgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "kerrgate/analysis.hpp"
#include "kerrgate/gate.hpp"

namespace kerrgate {
namespace {

const CavityParams kLossless(1e-3, 1e-3, 0.0, 4.0);
const CavityParams kLossy(1e-4, 1e-4, 1e-4, 4.0);

TEST(DetectorModel, ValidatesAndThins) {
  EXPECT_THROW(DetectorModel(1.1, DetectorPort::O1), std::invalid_argument);
  EXPECT_THROW(DetectorModel(-0.1, DetectorPort::O1), std::invalid_argument);
  Rng rng(1);
  EXPECT_EQ(DetectorModel::perfect(DetectorPort::O1).thin(17, rng), 17);
  EXPECT_EQ(DetectorModel(0.0, DetectorPort::O1).thin(17, rng), 0);
  const DetectorModel half(0.5, DetectorPort::O2);
  long sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const int k = half.thin(10, rng);
    ASSERT_GE(k, 0);
    ASSERT_LE(k, 10);
    sum += k;
  }
  EXPECT_NEAR(sum / 20000.0, 5.0, 0.05);
}

TEST(EvolveLossless, BranchesCarryCavityCoefficients) {
  const auto s = evolve_lossless(PolarizationState::uniform(), kLossless);
  ASSERT_EQ(s.branches.size(), 4u);
  EXPECT_NEAR(s.norm_sq(), 1.0, 1e-15);
  for (const auto& b : s.branches) {
    const auto tc = transfer_coefficients(kLossless, signal_photons(b.component));
    EXPECT_EQ(b.o1, tc.kappa * 4.0);
    EXPECT_EQ(b.o2, tc.sigma * 4.0);
  }
  EXPECT_EQ(s.find(Component::HH)->o1, Complex{});
  EXPECT_EQ(s.find(Component::VH)->o1, std::conj(s.find(Component::HV)->o1));
  EXPECT_THROW(evolve_lossless(PolarizationState::uniform(), kLossy), std::invalid_argument);
}

TEST(Feedforward, UndoesImprintedPhaseForRandomCounts) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> n(0, 60);
  std::uniform_real_distribution<double> lg(-6.0, -1.0);
  for (int i = 0; i < 1000; ++i) {
    const double theta = std::pow(10.0, lg(rng));
    const double tau = std::pow(10.0, lg(rng));
    const auto tc = transfer_coefficients(theta, tau, 0);
    const ParityState odd(Parity::Odd, Complex(u(rng), u(rng)), Complex(u(rng), u(rng)));
    const int n1 = n(rng);
    const int n2 = n(rng);
    const auto imprinted = imprint_measurement_phase(odd, n1, n2, tc.kappa, tc.sigma);
    const auto restored = feedforward_phase(imprinted, n1, n2, tc.kappa, tc.sigma);
    ASSERT_NEAR(std::abs(restored.first() - odd.first()), 0.0, 1e-12);
    ASSERT_NEAR(std::abs(restored.second() - odd.second()), 0.0, 1e-12);
  }
}

TEST(Feedforward, ImprintMatchesCountProjection) {
  // <n1, n2 | kappa a, sigma a> carries phase n1 arg(kappa) + n2 arg(sigma);
  // the VH branch sees the conjugate coefficients.
  const auto tc = transfer_coefficients(1e-3, 1e-3, 0);
  const ParityState odd(Parity::Odd, 1.0, 1.0);
  const auto s = imprint_measurement_phase(odd, 3, 5, tc.kappa, tc.sigma);
  const Complex hv = std::pow(tc.kappa, 3) * std::pow(tc.sigma, 5);
  const Complex vh = std::pow(std::conj(tc.kappa), 3) * std::pow(std::conj(tc.sigma), 5);
  EXPECT_NEAR(std::abs(s.first() / std::abs(s.first()) - hv / std::abs(hv)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s.second() / std::abs(s.second()) - vh / std::abs(vh)), 0.0, 1e-12);
  EXPECT_EQ(feedforward_angle(0, 0, tc.kappa, tc.sigma), 0.0);
  EXPECT_THROW(imprint_measurement_phase(ParityState(Parity::Even, 1, 0), 1, 1, tc.kappa,
                                         tc.sigma),
               std::invalid_argument);
}

TEST(SkipO2, ErrorAndDecision) {
  EXPECT_NEAR(o2_skip_error(Complex(0.1, 0), 0.1), 9.9995000166662500e-05, 1e-18);
  const auto tc = transfer_coefficients(10e-3, 1e-3, 0);
  // r = 10: |sigma|^2 is close to 1 / (r^2 + 1).
  EXPECT_NEAR(o2_skip_error(tc.sigma, 3.0), -std::expm1(-9.0 / 101.0), 1e-4);
  EXPECT_TRUE(skip_o2_decision(tc.sigma, 3.0, 0.1));
  EXPECT_FALSE(skip_o2_decision(Complex(0.7, 0), 3.0, 0.01));
  EXPECT_THROW(skip_o2_decision(tc.sigma, 3.0, 0.0), std::invalid_argument);
}

TEST(MeasurePnr, PerfectDetectorsRestoreOddStateExactly) {
  const PolarizationState psi(0.3, Complex(0.4, 0.1), Complex(-0.2, 0.5), 0.6);
  const auto state = evolve_lossless(psi, kLossless.with_alpha(6.0));
  const auto d1 = DetectorModel::perfect(DetectorPort::O1);
  const auto d2 = DetectorModel::perfect(DetectorPort::O2);
  Rng rng(99);
  int odd_seen = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto o = measure_pnr(state, d1, d2, rng);
    ASSERT_TRUE(o.post_state.has_value());
    EXPECT_FALSE(o.phase_error);
    if (o.true_parity == Parity::Even) {
      EXPECT_EQ(o.n_o1, 0);
    }
    if (!o.misclassified) {
      EXPECT_NEAR(fidelity(*o.post_state, ParityState::project(psi, o.classified)), 1.0, 1e-12);
    }
    odd_seen += o.classified == Parity::Odd;
  }
  EXPECT_GT(odd_seen, 0);
}

TEST(MeasurePnr, SeededCallIsDeterministic) {
  const auto state = evolve_lossless(PolarizationState::uniform(), kLossless);
  const DetectorModel d1(0.8, DetectorPort::O1);
  const DetectorModel d2(0.7, DetectorPort::O2);
  for (std::uint64_t seed : {0ull, 1ull, 123456789ull}) {
    const auto a = measure_pnr(state, d1, d2, seed);
    const auto b = measure_pnr(state, d1, d2, seed);
    EXPECT_EQ(a.n_o1, b.n_o1);
    EXPECT_EQ(a.n_o2, b.n_o2);
    EXPECT_EQ(a.true_component, b.true_component);
  }
}

TEST(MeasurePnr, RejectsSwappedDetectors) {
  const auto state = evolve_lossless(PolarizationState::uniform(), kLossless);
  const auto d1 = DetectorModel::perfect(DetectorPort::O1);
  const auto d2 = DetectorModel::perfect(DetectorPort::O2);
  EXPECT_THROW(measure_pnr(state, d2, d1, 1ull), std::invalid_argument);
}

TEST(MeasurePnr, PhaseErrorFlaggedWhenDetectorMissesPhotons) {
  const auto state = evolve_lossless(PolarizationState::basis(Component::HV), kLossless);
  const DetectorModel lossy1(0.5, DetectorPort::O1);
  const auto d2 = DetectorModel::perfect(DetectorPort::O2);
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto o = measure_pnr(state, lossy1, d2, rng);
    EXPECT_EQ(o.phase_error, o.n_o1 != o.true_o1);
  }
}

TEST(OddDensity, ConstructionAndFidelity) {
  EXPECT_THROW(OddDensity(Eigen::Matrix2cd::Zero()), std::invalid_argument);
  Eigen::Matrix2cd bad;
  bad << 1, 0.5, 0.4, 1;
  EXPECT_THROW(OddDensity{bad}, std::invalid_argument);
  const auto rho = OddDensity::dephased(1.0, 1.0, 0.3);
  EXPECT_NEAR(rho.trace(), 1.0, 1e-15);
  EXPECT_TRUE(rho.positive_semidefinite());
  EXPECT_NEAR(rho.fidelity(ParityState(Parity::Odd, 1.0, 1.0)), 0.65, 1e-15);
  EXPECT_EQ(rho.fidelity(ParityState(Parity::Even, 1.0, 1.0)), 0.0);
  EXPECT_THROW(OddDensity::dephased(1.0, 1.0, 1.5), std::invalid_argument);
}

TEST(EvolveLossy, FrozenOverlapFactors) {
  const auto s = evolve_lossy(PolarizationState::uniform(), kLossy);
  EXPECT_NEAR(s.y3, 0.0023354645401685273615, 1e-14);
  EXPECT_NEAR(s.y1, 0.11212942336116066615, 1e-13);
  EXPECT_NEAR(s.y2, 0.11212942336116066615, 1e-13);
  EXPECT_EQ(s.branches.size(), 4u);
}

TEST(EvolveLossy, ReducesToLosslessBranches) {
  const auto lossy = evolve_lossy(PolarizationState::uniform(), kLossless);
  const auto ideal = evolve_lossless(PolarizationState::uniform(), kLossless);
  EXPECT_NEAR(lossy.y1, 1.0, 1e-15);
  EXPECT_NEAR(lossy.y3, 1.0, 1e-15);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(std::abs(lossy.branches[i].o1 - ideal.branches[i].o1), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(lossy.branches[i].o2 - ideal.branches[i].o2), 0.0, 1e-13);
  }
}

TEST(DisplaceAndCorrect, EvenBranchesReturnToVacuum) {
  const auto d = displace_and_correct(evolve_lossy(PolarizationState::uniform(), kLossy));
  for (const auto& b : d.branches) {
    if (parity_of(b.component) == Parity::Even) {
      EXPECT_EQ(b.o1, Complex{});
    }
    EXPECT_NEAR(d.residual_phase(b.component), 0.0, 1e-15);
  }
  const Complex hv = d.branches[1].o1;
  EXPECT_NEAR(hv.real(), -0.82045601484649373177, 1e-12);
  EXPECT_NEAR(hv.imag(), 1.230745557239941849, 1e-12);
  EXPECT_NEAR(std::abs(d.branches[2].o1 - std::conj(hv)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(d.odd.kappa * 4.0 - hv), 0.0, 1e-13);
}

TEST(OddStateAfterLoss, FidelityIsHalfPlusHalfY3) {
  const auto rho = odd_state_after_loss(kLossy);
  EXPECT_TRUE(rho.positive_semidefinite());
  EXPECT_NEAR(rho.fidelity(ParityState(Parity::Odd, 1.0, 1.0)),
              0.5 + 0.5 * 0.0023354645401685273615, 1e-14);
  EXPECT_NEAR(odd_fidelity(kLossy), 0.5 + 0.5 * 0.0023354645401685273615, 1e-12);
}

TEST(MeasurePnrLossy, OddOutcomesCarryDephasedDensity) {
  const auto d = displace_and_correct(evolve_lossy(PolarizationState::uniform(), kLossy));
  const auto d1 = DetectorModel::perfect(DetectorPort::O1);
  const auto d2 = DetectorModel::perfect(DetectorPort::O2);
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto o = measure_pnr_lossy(d, d1, d2, rng);
    if (o.classified == Parity::Odd) {
      ASSERT_TRUE(o.odd_density.has_value());
      EXPECT_NEAR(std::abs(o.odd_density->coherence()), 0.5 * d.source.y3, 1e-14);
    } else {
      ASSERT_TRUE(o.post_state.has_value());
      EXPECT_FALSE(o.odd_density.has_value());
    }
  }
}

}  // namespace
}  // namespace kerrgate
