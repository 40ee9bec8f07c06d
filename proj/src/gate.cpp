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

#include "kerrgate/gate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace kerrgate {

DetectorModel::DetectorModel(double eta, DetectorPort port) : eta_(eta), port_(port) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("DetectorModel: efficiency must lie in [0, 1]");
}

int DetectorModel::thin(int true_count, Rng& rng) const {
  if (eta_ == 1.0 || true_count == 0) return true_count;
  if (eta_ == 0.0) return 0;
  return std::binomial_distribution<int>(true_count, eta_)(rng);
}

OddDensity::OddDensity(const Eigen::Matrix2cd& rho) {
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("OddDensity: matrix is not Hermitian");
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw std::invalid_argument("OddDensity: trace must be positive");
  rho_ = rho / tr;
}

OddDensity OddDensity::dephased(Complex x1, Complex x2, double y3) {
  if (!(y3 >= 0.0 && y3 <= 1.0))
    throw std::invalid_argument("OddDensity: coherence factor must lie in [0, 1]");
  Eigen::Matrix2cd m;
  m << std::norm(x1), x1 * std::conj(x2) * y3,
       std::conj(x1) * x2 * y3, std::norm(x2);
  return OddDensity(m);
}

bool OddDensity::positive_semidefinite(double tol) const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

double OddDensity::fidelity(const ParityState& target) const {
  if (target.parity() != Parity::Odd) return 0.0;
  const Eigen::Vector2cd& v = target.amplitudes();
  return (v.adjoint() * rho_ * v)(0, 0).real();
}

void to_json(nlohmann::json& j, const OddDensity& rho) {
  const auto& m = rho.matrix();
  j = {{"basis", {"HV", "VH"}},
       {"rho",
        {{complex_to_json(m(0, 0)), complex_to_json(m(0, 1))},
         {complex_to_json(m(1, 0)), complex_to_json(m(1, 1))}}}};
}

HybridState evolve_lossless(const PolarizationState& psi, const CavityParams& params) {
  if (!params.lossless())
    throw std::invalid_argument("evolve_lossless: params carry bus loss, use evolve_lossy");
  const Complex alpha = params.alpha();
  const auto odd = transfer_coefficients(params, 0);
  HybridState out;
  out.alpha = alpha;
  out.odd = {odd.kappa, odd.sigma};
  for (auto c : kComponents) {
    const Complex w = psi.amplitude(c);
    if (w == Complex{}) continue;
    const auto tc = transfer_coefficients(params, signal_photons(c));
    out.branches.push_back({c, w, tc.kappa * alpha, tc.sigma * alpha});
  }
  return out;
}

double feedforward_angle(int n_o1, int n_o2, Complex kappa, Complex sigma) {
  double phi = 0.0;
  if (n_o1 != 0) phi += n_o1 * principal_arg(kappa);
  if (n_o2 != 0) phi += n_o2 * principal_arg(sigma);
  return phi;
}

namespace {

ParityState rotate_odd(const ParityState& odd, double phi) {
  if (odd.parity() != Parity::Odd)
    throw std::invalid_argument("odd-parity state expected");
  const Complex e = std::polar(1.0, phi);
  return {Parity::Odd, odd.first() * e, odd.second() * std::conj(e)};
}

struct Draw {
  const HybridBranch* branch = nullptr;
  int t1 = 0;
  int t2 = 0;
  int d1 = 0;
  int d2 = 0;
};

int sample_poisson(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<int>(mean)(rng);
}

void check_ports(const DetectorModel& d1, const DetectorModel& d2) {
  if (d1.port() != DetectorPort::O1 || d2.port() != DetectorPort::O2)
    throw std::invalid_argument("measure_pnr: detectors must watch o1 and o2 in that order");
}

Draw draw(const std::vector<HybridBranch>& branches, const DetectorModel& det1,
          const DetectorModel& det2, Rng& rng) {
  double total = 0.0;
  for (const auto& b : branches) total += std::norm(b.weight);
  if (!(total > 0.0)) throw std::invalid_argument("measure_pnr: empty state");

  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  Draw d;
  double acc = 0.0;
  for (const auto& b : branches) {
    const double w = std::norm(b.weight);
    if (w == 0.0) continue;
    d.branch = &b;
    acc += w;
    if (u < acc) break;
  }
  d.t1 = sample_poisson(std::norm(d.branch->o1), rng);
  d.t2 = sample_poisson(std::norm(d.branch->o2), rng);
  d.d1 = det1.thin(d.t1, rng);
  d.d2 = det2.thin(d.t2, rng);
  return d;
}

GateOutcome classify(const Draw& d) {
  GateOutcome o;
  o.n_o1 = d.d1;
  o.n_o2 = d.d2;
  o.true_o1 = d.t1;
  o.true_o2 = d.t2;
  o.classified = d.d1 == 0 ? Parity::Even : Parity::Odd;
  o.true_component = d.branch->component;
  o.true_parity = parity_of(o.true_component);
  o.misclassified = o.classified != o.true_parity;
  o.phase_error = o.true_parity == Parity::Odd && (d.d1 != d.t1 || d.d2 != d.t2);
  return o;
}

Complex branch_weight(const std::vector<HybridBranch>& branches, Component c) {
  for (const auto& b : branches)
    if (b.component == c) return b.weight;
  return {};
}

// Odd amplitudes after the counts imprint their phase and the feedforward
// removes the phase inferred from the detected counts.
ParityState corrected_odd(Complex x1, Complex x2, const Draw& d,
                          const FeedforwardCoefficients& k) {
  const ParityState odd(Parity::Odd, x1, x2);
  const auto imprinted = imprint_measurement_phase(odd, d.t1, d.t2, k.kappa, k.sigma);
  return feedforward_phase(imprinted, d.d1, d.d2, k.kappa, k.sigma);
}

std::optional<ParityState> even_projection(Complex x0, Complex x3) {
  if (std::norm(x0) + std::norm(x3) == 0.0) return std::nullopt;
  return ParityState(Parity::Even, x0, x3);
}

}  // namespace

ParityState imprint_measurement_phase(const ParityState& odd, int n_o1, int n_o2, Complex kappa,
                                      Complex sigma) {
  return rotate_odd(odd, feedforward_angle(n_o1, n_o2, kappa, sigma));
}

ParityState feedforward_phase(const ParityState& odd, int n_o1, int n_o2, Complex kappa,
                              Complex sigma) {
  return rotate_odd(odd, -feedforward_angle(n_o1, n_o2, kappa, sigma));
}

double o2_skip_error(Complex sigma, Complex alpha) { return -std::expm1(-std::norm(sigma * alpha)); }

bool skip_o2_decision(Complex sigma, Complex alpha, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("skip_o2_decision: threshold must be positive");
  return o2_skip_error(sigma, alpha) <= threshold;
}

GateOutcome measure_pnr(const HybridState& state, const DetectorModel& d1,
                        const DetectorModel& d2, Rng& rng) {
  check_ports(d1, d2);
  const Draw d = draw(state.branches, d1, d2, rng);
  GateOutcome o = classify(d);
  const auto& b = state.branches;
  if (o.classified == Parity::Even) {
    o.post_state = even_projection(branch_weight(b, Component::HH), branch_weight(b, Component::VV));
  } else {
    const Complex x1 = branch_weight(b, Component::HV);
    const Complex x2 = branch_weight(b, Component::VH);
    if (std::norm(x1) + std::norm(x2) > 0.0) o.post_state = corrected_odd(x1, x2, d, state.odd);
  }
  return o;
}

GateOutcome measure_pnr(const HybridState& state, const DetectorModel& d1,
                        const DetectorModel& d2, std::uint64_t seed) {
  Rng rng(seed);
  return measure_pnr(state, d1, d2, rng);
}

LossyState evolve_lossy(const PolarizationState& psi, const CavityParams& params) {
  const Complex alpha = params.alpha();
  const std::array<LossyTransferCoefficients<double>, 3> coef = {
      lossy_transfer_coefficients(params, 0), lossy_transfer_coefficients(params, 1),
      lossy_transfer_coefficients(params, 2)};
  LossyState out{psi, coef[1], coef[0], alpha, {}, 1.0, 1.0, 1.0};
  for (auto c : kComponents) {
    const Complex w = psi.amplitude(c);
    if (w == Complex{}) continue;
    const auto& k = coef[static_cast<std::size_t>(signal_photons(c))];
    out.branches.push_back({c, w, k.a * alpha, k.b * alpha});
  }
  // Loss-port amplitudes C_n alpha; their overlaps survive the partial trace.
  const Complex c0 = coef[0].c * alpha;
  const Complex c1 = coef[1].c * alpha;
  const Complex c2 = coef[2].c * alpha;
  out.y1 = std::norm(coherent_overlap(c0, c1));
  out.y2 = std::norm(coherent_overlap(c2, c1));
  out.y3 = std::norm(coherent_overlap(c2, c0));
  return out;
}

DisplacedState displace_and_correct(const LossyState& lossy) {
  DisplacedState out{lossy, -lossy.resonant.a * lossy.alpha, {}, {}, {}, {}};
  for (const auto& b : lossy.branches) {
    const auto i = static_cast<std::size_t>(b.component);
    // D(beta)|gamma> = exp(i Im(beta gamma^*)) |beta + gamma>
    out.displacement_phase[i] = std::imag(out.displacement * std::conj(b.o1));
    out.correction_phase[i] = -out.displacement_phase[i];
    out.branches.push_back({b.component, b.weight, b.o1 + out.displacement, b.o2});
  }
  out.odd = {lossy.empty.a - lossy.resonant.a, lossy.empty.b};
  return out;
}

OddDensity odd_state_after_loss(const DisplacedState& displaced) {
  const auto& psi = displaced.source.input;
  const Complex x1 = psi.amplitude(Component::HV) *
                     std::polar(1.0, displaced.residual_phase(Component::HV));
  const Complex x2 = psi.amplitude(Component::VH) *
                     std::polar(1.0, displaced.residual_phase(Component::VH));
  return OddDensity::dephased(x1, x2, displaced.source.y3);
}

OddDensity odd_state_after_loss(const CavityParams& params, Complex x1, Complex x2) {
  const PolarizationState psi(0.0, x1, x2, 0.0);
  return odd_state_after_loss(displace_and_correct(evolve_lossy(psi, params)));
}

GateOutcome measure_pnr_lossy(const DisplacedState& state, const DetectorModel& d1,
                              const DetectorModel& d2, Rng& rng) {
  check_ports(d1, d2);
  const Draw d = draw(state.branches, d1, d2, rng);
  GateOutcome o = classify(d);
  const auto& psi = state.source.input;
  if (o.classified == Parity::Even) {
    o.post_state = even_projection(psi.amplitude(Component::HH), psi.amplitude(Component::VV));
  } else if (psi.parity_weight(Parity::Odd) > 0.0) {
    const Complex x1 =
        psi.amplitude(Component::HV) * std::polar(1.0, state.residual_phase(Component::HV));
    const Complex x2 =
        psi.amplitude(Component::VH) * std::polar(1.0, state.residual_phase(Component::VH));
    const ParityState pure = corrected_odd(x1, x2, d, state.odd);
    o.odd_density = OddDensity::dephased(pure.first(), pure.second(), state.source.y3);
  }
  return o;
}

void ShotCounts::add(const GateOutcome& o) {
  ++shots;
  ++(o.classified == Parity::Even ? classified_even : classified_odd);
  ++(o.true_parity == Parity::Even ? true_even : true_odd);
  if (o.misclassified) ++misclassified;
  if (o.phase_error) ++phase_errors;
}

ShotCounts& ShotCounts::operator+=(const ShotCounts& other) {
  shots += other.shots;
  classified_even += other.classified_even;
  classified_odd += other.classified_odd;
  true_even += other.true_even;
  true_odd += other.true_odd;
  misclassified += other.misclassified;
  phase_errors += other.phase_errors;
  return *this;
}

Rng batch_engine(std::uint64_t seed, std::uint64_t batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32)};
  return Rng(seq);
}

namespace {

template <typename Measure>
ShotCounts run_batches(Measure measure, std::uint64_t seed, std::uint64_t shots,
                       std::vector<ShotRecord>* records, unsigned threads) {
  const std::uint64_t batches = (shots + kShotBatch - 1) / kShotBatch;
  std::vector<ShotCounts> counts(batches);
  std::vector<std::vector<ShotRecord>> batch_records(records ? batches : 0);

  auto run_batch = [&](std::uint64_t b) {
    Rng rng = batch_engine(seed, b);
    const std::uint64_t first = b * kShotBatch;
    const std::uint64_t last = std::min(shots, first + kShotBatch);
    if (records) batch_records[b].reserve(last - first);
    for (std::uint64_t shot = first; shot < last; ++shot) {
      const GateOutcome o = measure(rng);
      counts[b].add(o);
      if (records)
        batch_records[b].push_back(
            {shot, o.n_o1, o.n_o2, o.classified, o.true_parity, o.misclassified});
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(batches)));
  if (threads == 1) {
    for (std::uint64_t b = 0; b < batches; ++b) run_batch(b);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::uint64_t b = t; b < batches; b += threads) run_batch(b);
      });
  }

  ShotCounts total;
  for (const auto& c : counts) total += c;
  if (records) {
    records->clear();
    records->reserve(shots);
    for (auto& r : batch_records) records->insert(records->end(), r.begin(), r.end());
  }
  return total;
}

}  // namespace

ShotCounts run_shots(const HybridState& state, const DetectorModel& d1, const DetectorModel& d2,
                     std::uint64_t seed, std::uint64_t shots, std::vector<ShotRecord>* records,
                     unsigned threads) {
  check_ports(d1, d2);
  return run_batches([&](Rng& rng) { return measure_pnr(state, d1, d2, rng); }, seed, shots,
                     records, threads);
}

ShotCounts run_shots(const DisplacedState& state, const DetectorModel& d1,
                     const DetectorModel& d2, std::uint64_t seed, std::uint64_t shots,
                     std::vector<ShotRecord>* records, unsigned threads) {
  check_ports(d1, d2);
  return run_batches([&](Rng& rng) { return measure_pnr_lossy(state, d1, d2, rng); }, seed,
                     shots, records, threads);
}

void write_shot_csv_header(std::ostream& os) {
  os << "seed,shot,n_o1,n_o2,classified_parity,true_parity,misclassified\n";
}

void write_shot_csv_row(std::ostream& os, std::uint64_t seed, const ShotRecord& r) {
  os << seed << ',' << r.shot << ',' << r.n_o1 << ',' << r.n_o2 << ','
     << to_string(r.classified) << ',' << to_string(r.true_parity) << ','
     << (r.misclassified ? 1 : 0) << '\n';
}

}  // namespace kerrgate
