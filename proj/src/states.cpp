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

#include "kerrgate/states.hpp"

#include <cmath>
#include <stdexcept>

namespace kerrgate {

namespace {

constexpr double kMinNorm = 1e-12;

}  // namespace

Parity parity_of(Component c) {
  return (c == Component::HH || c == Component::VV) ? Parity::Even : Parity::Odd;
}

std::string_view to_string(Component c) {
  switch (c) {
    case Component::HH: return "HH";
    case Component::HV: return "HV";
    case Component::VH: return "VH";
    case Component::VV: return "VV";
  }
  return "?";
}

std::string_view to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

int signal_photons(Component c) {
  switch (c) {
    case Component::HH:
    case Component::VV: return 1;
    case Component::HV: return 0;
    case Component::VH: return 2;
  }
  return 0;
}

PolarizationState::PolarizationState(const Eigen::Vector4cd& amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm >= kMinNorm))
    throw std::invalid_argument("PolarizationState: norm below 1e-12");
  amps_ = amplitudes / norm;
}

PolarizationState::PolarizationState(Complex hh, Complex hv, Complex vh, Complex vv)
    : PolarizationState(Eigen::Vector4cd(hh, hv, vh, vv)) {}

PolarizationState PolarizationState::basis(Component c) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v[static_cast<int>(c)] = 1.0;
  return PolarizationState(v);
}

PolarizationState PolarizationState::uniform() {
  return PolarizationState(Eigen::Vector4cd::Constant(0.5));
}

double PolarizationState::parity_weight(Parity p) const {
  double w = 0.0;
  for (auto c : kComponents)
    if (parity_of(c) == p) w += std::norm(amplitude(c));
  return w;
}

double PathState::norm_sq() const {
  double s = 0.0;
  for (const auto& b : branches) s += std::norm(b.amplitude);
  return s;
}

PathState route_through_pbs(const PolarizationState& psi) {
  // H transmits and V reflects, so HV puts both photons in s2, VH both in s1.
  PathState out;
  for (auto c : kComponents) {
    const Complex amp = psi.amplitude(c);
    if (amp == Complex{}) continue;
    const int s1 = signal_photons(c);
    out.branches.push_back({c, s1, 2 - s1, amp});
  }
  return out;
}

double HybridState::norm_sq() const {
  double s = 0.0;
  for (const auto& b : branches) s += std::norm(b.weight);
  return s;
}

const HybridBranch* HybridState::find(Component c) const {
  for (const auto& b : branches)
    if (b.component == c) return &b;
  return nullptr;
}

ParityState::ParityState(Parity parity, Complex first, Complex second) : parity_(parity) {
  const Eigen::Vector2cd v(first, second);
  const double norm = v.norm();
  if (!(norm >= kMinNorm)) throw std::invalid_argument("ParityState: norm below 1e-12");
  amps_ = v / norm;
}

ParityState ParityState::project(const PolarizationState& psi, Parity parity) {
  if (parity == Parity::Even)
    return {parity, psi.amplitude(Component::HH), psi.amplitude(Component::VV)};
  return {parity, psi.amplitude(Component::HV), psi.amplitude(Component::VH)};
}

PolarizationState ParityState::embed() const {
  if (parity_ == Parity::Even) return {amps_[0], 0.0, 0.0, amps_[1]};
  return {0.0, amps_[0], amps_[1], 0.0};
}

double fidelity(const ParityState& a, const ParityState& b) {
  if (a.parity() != b.parity()) return 0.0;
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double fidelity(const PolarizationState& a, const PolarizationState& b) {
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

Complex coherent_overlap(Complex beta, Complex gamma) {
  return std::exp(-0.5 * std::norm(beta) - 0.5 * std::norm(gamma) + std::conj(beta) * gamma);
}

nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

void to_json(nlohmann::json& j, const PolarizationState& s) {
  j = nlohmann::json::object();
  for (auto c : kComponents) j[std::string(to_string(c))] = complex_to_json(s.amplitude(c));
}

void to_json(nlohmann::json& j, const ParityState& s) {
  const bool even = s.parity() == Parity::Even;
  j = {{"parity", to_string(s.parity())},
       {even ? "HH" : "HV", complex_to_json(s.first())},
       {even ? "VV" : "VH", complex_to_json(s.second())}};
}

void to_json(nlohmann::json& j, const HybridState& s) {
  auto branches = nlohmann::json::array();
  for (const auto& b : s.branches)
    branches.push_back({{"component", to_string(b.component)},
                        {"weight", complex_to_json(b.weight)},
                        {"o1", complex_to_json(b.o1)},
                        {"o2", complex_to_json(b.o2)}});
  j = {{"alpha", complex_to_json(s.alpha)}, {"branches", branches}};
}

}  // namespace kerrgate
