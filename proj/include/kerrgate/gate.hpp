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

#ifndef KERRGATE_GATE_HPP
#define KERRGATE_GATE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "kerrgate/cavity.hpp"
#include "kerrgate/states.hpp"

namespace kerrgate {

/// Generator used for all sampling. Batches derive their own engines from
/// (seed, batch index), see run_shots.
using Rng = std::mt19937_64;

enum class DetectorPort { O1, O2 };

/// Photon-number-resolving detector with efficiency eta. A true count n is
/// reported as Binomial(n, eta).
class DetectorModel {
 public:
  DetectorModel(double eta, DetectorPort port);

  static DetectorModel perfect(DetectorPort port) { return {1.0, port}; }

  double eta() const { return eta_; }
  DetectorPort port() const { return port_; }
  int thin(int true_count, Rng& rng) const;

 private:
  double eta_;
  DetectorPort port_;
};

/// Density operator on the odd subspace, basis {HV, VH}, unit trace.
class OddDensity {
 public:
  /// Normalizes the trace; throws if rho is not Hermitian within 1e-12 or
  /// has non-positive trace.
  explicit OddDensity(const Eigen::Matrix2cd& rho);

  /// diag(|x1|^2, |x2|^2) with coherence x1 x2^* y3, then normalized.
  static OddDensity dephased(Complex x1, Complex x2, double y3);

  const Eigen::Matrix2cd& matrix() const { return rho_; }
  Complex coherence() const { return rho_(0, 1); }
  double trace() const { return rho_.trace().real(); }
  bool positive_semidefinite(double tol = 1e-12) const;
  /// <phi|rho|phi> for a normalized odd target state.
  double fidelity(const ParityState& target) const;

 private:
  Eigen::Matrix2cd rho_;
};

void to_json(nlohmann::json& j, const OddDensity& rho);

struct GateOutcome {
  int n_o1 = 0;  // detected counts
  int n_o2 = 0;
  int true_o1 = 0;  // counts before detector thinning
  int true_o2 = 0;
  Parity classified = Parity::Even;
  Parity true_parity = Parity::Even;
  Component true_component = Component::HH;
  bool misclassified = false;
  /// Odd branch whose detected counts differ from the true counts, so the
  /// feedforward applied the wrong phase.
  bool phase_error = false;
  /// Normalized qubit state after feedforward, when the classified subspace
  /// has support in the input. Empty for lossy odd outcomes.
  std::optional<ParityState> post_state;
  /// Lossy odd outcomes only.
  std::optional<OddDensity> odd_density;
};

/// Lossless evolution of the qubits and the bus: each polarization component
/// tags a coherent product state on (o1, o2). Throws if params has loss.
HybridState evolve_lossless(const PolarizationState& psi, const CavityParams& params);

/// n1 Arg(kappa) + n2 Arg(sigma).
double feedforward_angle(int n_o1, int n_o2, Complex kappa, Complex sigma);

/// Relative phase picked up by the odd components when (n_o1, n_o2) photons
/// are counted: HV gets e^{i phi}, VH gets e^{-i phi}.
ParityState imprint_measurement_phase(const ParityState& odd, int n_o1, int n_o2, Complex kappa,
                                      Complex sigma);

/// Undoes imprint_measurement_phase for the same counts.
ParityState feedforward_phase(const ParityState& odd, int n_o1, int n_o2, Complex kappa,
                              Complex sigma);

/// Error from not measuring o2: 1 - |<0|sigma alpha>|^2.
double o2_skip_error(Complex sigma, Complex alpha);
bool skip_o2_decision(Complex sigma, Complex alpha, double threshold);

/// Samples one run of the detection protocol: branch by Born weight, true
/// counts from the branch's coherent amplitudes, then detector thinning.
/// n_o1 = 0 is reported as even.
GateOutcome measure_pnr(const HybridState& state, const DetectorModel& d1,
                        const DetectorModel& d2, Rng& rng);
GateOutcome measure_pnr(const HybridState& state, const DetectorModel& d1,
                        const DetectorModel& d2, std::uint64_t seed);

/// Bus-loss evolution after tracing out the loss port o3. Branches carry
/// (A_n alpha, B_n alpha); y1, y2, y3 are the squared overlaps of the traced
/// loss-port amplitudes that scale the even/HV, even/VH and HV/VH coherences.
struct LossyState {
  PolarizationState input;
  LossyTransferCoefficients<double> resonant;  // n = 1
  LossyTransferCoefficients<double> empty;     // n = 0
  Complex alpha;
  std::vector<HybridBranch> branches;
  double y1 = 1.0;
  double y2 = 1.0;
  double y3 = 1.0;
};

LossyState evolve_lossy(const PolarizationState& psi, const CavityParams& params);

/// Lossy state after the displacement D(-A1 alpha) on o1 and the static phase
/// shifters that cancel the displacement phases.
struct DisplacedState {
  LossyState source;
  Complex displacement;
  std::vector<HybridBranch> branches;
  /// Phase Im(beta gamma^*) from D(beta)|gamma>, indexed by Component.
  std::array<double, 4> displacement_phase{};
  /// Static correction applied per component.
  std::array<double, 4> correction_phase{};
  FeedforwardCoefficients odd;

  double residual_phase(Component c) const {
    const auto i = static_cast<std::size_t>(c);
    return displacement_phase[i] + correction_phase[i];
  }
};

DisplacedState displace_and_correct(const LossyState& lossy);

/// Odd-parity output for the given odd amplitudes after loss, displacement,
/// measurement and correction.
OddDensity odd_state_after_loss(const CavityParams& params, Complex x1 = 0.5, Complex x2 = 0.5);
OddDensity odd_state_after_loss(const DisplacedState& displaced);

/// Detection protocol on the displaced lossy state. Feedforward uses
/// Arg(A0 - A1) and Arg(B0).
GateOutcome measure_pnr_lossy(const DisplacedState& state, const DetectorModel& d1,
                              const DetectorModel& d2, Rng& rng);

struct ShotRecord {
  std::uint64_t shot = 0;
  int n_o1 = 0;
  int n_o2 = 0;
  Parity classified = Parity::Even;
  Parity true_parity = Parity::Even;
  bool misclassified = false;
};

struct ShotCounts {
  std::uint64_t shots = 0;
  std::uint64_t classified_even = 0;
  std::uint64_t classified_odd = 0;
  std::uint64_t true_even = 0;
  std::uint64_t true_odd = 0;
  std::uint64_t misclassified = 0;
  std::uint64_t phase_errors = 0;

  void add(const GateOutcome& o);
  ShotCounts& operator+=(const ShotCounts& other);
};

inline constexpr std::uint64_t kShotBatch = 65536;

/// Engine for one batch, derived from (seed, batch).
Rng batch_engine(std::uint64_t seed, std::uint64_t batch);

/// Runs `shots` independent measurements. The result (and the record order)
/// depends only on seed and shots, not on `threads`.
ShotCounts run_shots(const HybridState& state, const DetectorModel& d1, const DetectorModel& d2,
                     std::uint64_t seed, std::uint64_t shots,
                     std::vector<ShotRecord>* records = nullptr, unsigned threads = 1);
ShotCounts run_shots(const DisplacedState& state, const DetectorModel& d1,
                     const DetectorModel& d2, std::uint64_t seed, std::uint64_t shots,
                     std::vector<ShotRecord>* records = nullptr, unsigned threads = 1);

void write_shot_csv_header(std::ostream& os);
void write_shot_csv_row(std::ostream& os, std::uint64_t seed, const ShotRecord& r);

}  // namespace kerrgate

#endif  // KERRGATE_GATE_HPP
