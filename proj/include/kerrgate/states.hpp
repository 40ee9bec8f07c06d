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

#ifndef KERRGATE_STATES_HPP
#define KERRGATE_STATES_HPP

#include <array>
#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace kerrgate {

using Complex = std::complex<double>;

/// Two-qubit polarization basis, in the order |HH>, |HV>, |VH>, |VV>.
enum class Component { HH = 0, HV = 1, VH = 2, VV = 3 };
enum class Parity { Even, Odd };

inline constexpr std::array<Component, 4> kComponents = {Component::HH, Component::HV,
                                                         Component::VH, Component::VV};

Parity parity_of(Component c);
std::string_view to_string(Component c);
std::string_view to_string(Parity p);

/// Photons that end up in the signal path s1 after the first PBS.
int signal_photons(Component c);

/// Normalized two-qubit polarization state.
class PolarizationState {
 public:
  /// Normalizes; throws std::invalid_argument when the norm is below 1e-12.
  explicit PolarizationState(const Eigen::Vector4cd& amplitudes);
  PolarizationState(Complex hh, Complex hv, Complex vh, Complex vv);

  static PolarizationState basis(Component c);
  static PolarizationState uniform();

  Complex amplitude(Component c) const { return amps_[static_cast<int>(c)]; }
  const Eigen::Vector4cd& amplitudes() const { return amps_; }
  /// Total probability of the even or odd subspace.
  double parity_weight(Parity p) const;

 private:
  Eigen::Vector4cd amps_;
};

struct PathBranch {
  Component component;
  int s1 = 0;
  int s2 = 0;
  Complex amplitude;

  /// One photon in each path mode.
  bool balanced() const { return s1 == 1 && s2 == 1; }
  bool bunched() const { return !balanced(); }
};

/// Photon-number content of the two path modes after PBS1.
struct PathState {
  std::vector<PathBranch> branches;

  double norm_sq() const;
};

PathState route_through_pbs(const PolarizationState& psi);

/// One term of the qubit-bus superposition: a polarization component with its
/// weight, times the coherent product state |o1> |o2> on the cavity outputs.
struct HybridBranch {
  Component component;
  Complex weight;
  Complex o1;
  Complex o2;
};

/// Coefficients whose arguments drive the odd-parity feedforward.
struct FeedforwardCoefficients {
  Complex kappa;
  Complex sigma;
};

struct HybridState {
  std::vector<HybridBranch> branches;
  FeedforwardCoefficients odd;
  Complex alpha;

  double norm_sq() const;
  const HybridBranch* find(Component c) const;
};

/// Normalized state restricted to one parity subspace:
/// {HH, VV} for even, {HV, VH} for odd.
class ParityState {
 public:
  ParityState(Parity parity, Complex first, Complex second);

  /// Projection of psi onto the parity subspace; throws when it vanishes.
  static ParityState project(const PolarizationState& psi, Parity parity);

  Parity parity() const { return parity_; }
  Complex first() const { return amps_[0]; }
  Complex second() const { return amps_[1]; }
  const Eigen::Vector2cd& amplitudes() const { return amps_; }
  PolarizationState embed() const;

 private:
  Parity parity_;
  Eigen::Vector2cd amps_;
};

/// |<a|b>|^2, insensitive to global phase.
double fidelity(const ParityState& a, const ParityState& b);
double fidelity(const PolarizationState& a, const PolarizationState& b);

/// <beta|gamma> for coherent states.
Complex coherent_overlap(Complex beta, Complex gamma);

void to_json(nlohmann::json& j, const PolarizationState& s);
void to_json(nlohmann::json& j, const ParityState& s);
void to_json(nlohmann::json& j, const HybridState& s);
nlohmann::json complex_to_json(Complex z);

}  // namespace kerrgate

#endif  // KERRGATE_STATES_HPP
