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

#include "kerrgate/states.hpp"

namespace kerrgate {
namespace {

TEST(Components, ParityAndSignalPhotons) {
  EXPECT_EQ(parity_of(Component::HH), Parity::Even);
  EXPECT_EQ(parity_of(Component::VV), Parity::Even);
  EXPECT_EQ(parity_of(Component::HV), Parity::Odd);
  EXPECT_EQ(parity_of(Component::VH), Parity::Odd);
  EXPECT_EQ(signal_photons(Component::HH), 1);
  EXPECT_EQ(signal_photons(Component::VV), 1);
  EXPECT_EQ(signal_photons(Component::HV), 0);
  EXPECT_EQ(signal_photons(Component::VH), 2);
  EXPECT_EQ(to_string(Component::VH), "VH");
  EXPECT_EQ(to_string(Parity::Odd), "odd");
}

TEST(PolarizationState, NormalizesAndRejectsZero) {
  const PolarizationState s(2.0, 0.0, 0.0, Complex(0, 2));
  EXPECT_NEAR(s.amplitudes().squaredNorm(), 1.0, 1e-15);
  EXPECT_NEAR(s.parity_weight(Parity::Even), 1.0, 1e-15);
  EXPECT_NEAR(s.parity_weight(Parity::Odd), 0.0, 1e-15);
  EXPECT_THROW(PolarizationState(0.0, 0.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(PolarizationState(1e-13, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(PolarizationState, UniformIsBalanced) {
  const auto u = PolarizationState::uniform();
  for (auto c : kComponents) EXPECT_NEAR(std::abs(u.amplitude(c)), 0.5, 1e-15);
  EXPECT_NEAR(u.parity_weight(Parity::Even), 0.5, 1e-15);
}

TEST(RouteThroughPbs, EvenComponentsAreBalancedOddAreBunched) {
  const auto path = route_through_pbs(PolarizationState::uniform());
  ASSERT_EQ(path.branches.size(), 4u);
  EXPECT_NEAR(path.norm_sq(), 1.0, 1e-15);
  for (const auto& b : path.branches) {
    EXPECT_EQ(b.s1 + b.s2, 2);
    EXPECT_EQ(b.s1, signal_photons(b.component));
    EXPECT_EQ(b.balanced(), parity_of(b.component) == Parity::Even);
  }
}

TEST(RouteThroughPbs, SkipsAbsentComponents) {
  const auto path = route_through_pbs(PolarizationState::basis(Component::HV));
  ASSERT_EQ(path.branches.size(), 1u);
  EXPECT_EQ(path.branches[0].component, Component::HV);
  EXPECT_TRUE(path.branches[0].bunched());
}

TEST(ParityState, ProjectEmbedRoundTrip) {
  const PolarizationState s(0.1, Complex(0.3, 0.2), 0.5, Complex(0, -0.7));
  const auto odd = ParityState::project(s, Parity::Odd);
  EXPECT_NEAR(odd.amplitudes().squaredNorm(), 1.0, 1e-15);
  const auto back = odd.embed();
  EXPECT_EQ(back.amplitude(Component::HH), Complex{});
  EXPECT_NEAR(fidelity(ParityState::project(back, Parity::Odd), odd), 1.0, 1e-15);
  EXPECT_THROW(ParityState::project(PolarizationState::basis(Component::HH), Parity::Odd),
               std::invalid_argument);
}

TEST(Fidelity, IgnoresGlobalPhase) {
  const ParityState a(Parity::Odd, 0.6, Complex(0, 0.8));
  const ParityState b(Parity::Odd, Complex(0, 0.6), -0.8);
  EXPECT_NEAR(fidelity(a, b), 1.0, 1e-15);
  const ParityState c(Parity::Odd, 0.8, Complex(0, -0.6));
  EXPECT_NEAR(fidelity(a, c), 0.0, 1e-15);
  EXPECT_EQ(fidelity(a, ParityState(Parity::Even, 0.6, 0.8)), 0.0);
}

TEST(CoherentOverlap, MatchesKnownIdentities) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const Complex b(g(rng), g(rng));
    const Complex c(g(rng), g(rng));
    EXPECT_NEAR(std::abs(coherent_overlap(b, b) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::norm(coherent_overlap(b, c)), std::exp(-std::norm(b - c)), 1e-12);
    EXPECT_NEAR(std::abs(coherent_overlap(b, c) - std::conj(coherent_overlap(c, b))), 0.0, 1e-12);
  }
}

TEST(Json, ComplexIsRealImagPair) {
  const auto j = complex_to_json(Complex(1.5, -2.0));
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[0].get<double>(), 1.5);
  EXPECT_EQ(j[1].get<double>(), -2.0);
  nlohmann::json s = PolarizationState::basis(Component::VV);
  EXPECT_EQ(s["VV"][0].get<double>(), 1.0);
}

}  // namespace
}  // namespace kerrgate
