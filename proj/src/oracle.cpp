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

#include "kerrgate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kerrgate/gate.hpp"

namespace kerrgate::oracle {

CutoffTooSmall::CutoffTooSmall(int cutoff, double deficit)
    : std::runtime_error("cutoff " + std::to_string(cutoff) +
                         " too small: truncated probability " + std::to_string(deficit)),
      cutoff_(cutoff),
      deficit_(deficit) {}

int default_cutoff(Complex alpha) {
  const double a = std::abs(alpha);
  return static_cast<int>(std::ceil(a * a + 8.0 * a + 16.0));
}

FockVector coherent_fock(Complex alpha, int cutoff, double tail_bound) {
  if (cutoff < 1) throw std::invalid_argument("coherent_fock: cutoff must be >= 1");
  FockVector out;
  out.amplitudes = Eigen::VectorXcd::Zero(cutoff + 1);
  const double mag = std::abs(alpha);
  if (mag == 0.0) {
    out.amplitudes[0] = 1.0;
    return out;
  }
  const double mean = mag * mag;
  // Anchor at the Poisson mode so neither direction of the ratio recurrence
  // starts from an underflowed value.
  const int anchor = std::min(cutoff, static_cast<int>(std::floor(mean)));
  const double log_mag = -0.5 * mean + anchor * std::log(mag) - 0.5 * std::lgamma(anchor + 1.0);
  auto& c = out.amplitudes;
  c[anchor] = std::polar(std::exp(log_mag), anchor * std::arg(alpha));
  for (int n = anchor + 1; n <= cutoff; ++n) c[n] = c[n - 1] * alpha / std::sqrt(double(n));
  for (int n = anchor; n > 0; --n) c[n - 1] = c[n] * std::sqrt(double(n)) / alpha;

  double tail = 0.0;
  double term = std::norm(c[cutoff]);
  for (int n = cutoff + 1;; ++n) {
    term *= mean / n;
    tail += term;
    if (n > mean && (term < 1e-300 || term < 1e-17 * tail)) break;
  }
  out.tail_deficit = tail;
  if (tail > tail_bound) throw CutoffTooSmall(cutoff, tail);
  return out;
}

TwoModeFock::TwoModeFock(int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("TwoModeFock: negative cutoff");
  blocks_.reserve(cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) blocks_.push_back(Eigen::VectorXcd::Zero(n + 1));
}

TwoModeFock TwoModeFock::product(const FockVector& a, const FockVector& b, int cutoff) {
  TwoModeFock out(cutoff);
  for (int n = 0; n <= cutoff; ++n)
    for (int k = 0; k <= n; ++k)
      if (k <= a.cutoff() && n - k <= b.cutoff())
        out.blocks_[n][k] = a.amplitudes[k] * b.amplitudes[n - k];
  return out;
}

Complex TwoModeFock::at(int n1, int n2) const {
  if (n1 < 0 || n2 < 0) throw std::out_of_range("TwoModeFock: negative photon number");
  if (n1 + n2 > cutoff()) return {};
  return blocks_[n1 + n2][n1];
}

Complex& TwoModeFock::at(int n1, int n2) {
  if (n1 < 0 || n2 < 0 || n1 + n2 > cutoff())
    throw std::out_of_range("TwoModeFock: index outside the truncated space");
  return blocks_[n1 + n2][n1];
}

double TwoModeFock::norm_sq() const {
  double s = 0.0;
  for (const auto& b : blocks_) s += b.squaredNorm();
  return s;
}

double distance(const TwoModeFock& a, const TwoModeFock& b) {
  if (a.cutoff() != b.cutoff()) throw std::invalid_argument("distance: cutoff mismatch");
  double s = 0.0;
  for (int n = 0; n <= a.cutoff(); ++n) s += (a.block(n) - b.block(n)).squaredNorm();
  return std::sqrt(s);
}

std::vector<Eigen::MatrixXcd> block_unitaries(const Matrix2c<double>& modes, int cutoff) {
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(cutoff + 1);
  blocks.push_back(Eigen::MatrixXcd::Identity(1, 1));

  // Image of an input creation operator acting on an output vector of block
  // n - 1; mode j's image is column j of `modes`.
  auto create = [&](const Eigen::VectorXcd& v, int n, int j) {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(n + 1);
    for (int k = 0; k < n; ++k) {
      w[k + 1] += modes(0, j) * std::sqrt(double(k + 1)) * v[k];  // a1^dagger
      w[k] += modes(1, j) * std::sqrt(double(n - k)) * v[k];      // a2^dagger
    }
    return w;
  };

  for (int n = 1; n <= cutoff; ++n) {
    const Eigen::MatrixXcd& prev = blocks.back();
    Eigen::MatrixXcd cur(n + 1, n + 1);
    // |0, n> = a2^dagger |0, n-1> / sqrt(n)
    cur.col(0) = create(prev.col(0), n, 1) / std::sqrt(double(n));
    // |k, n-k> = a1^dagger |k-1, n-k> / sqrt(k)
    for (int k = 1; k <= n; ++k) cur.col(k) = create(prev.col(k - 1), n, 0) / std::sqrt(double(k));
    blocks.push_back(std::move(cur));
  }
  return blocks;
}

TwoModeFock apply_two_mode_transform(const TwoModeFock& input, const Matrix2c<double>& modes) {
  if (unitarity_residual(modes) > 1e-10)
    throw std::invalid_argument("apply_two_mode_transform: matrix is not unitary");
  const auto blocks = block_unitaries(modes, input.cutoff());
  TwoModeFock out(input.cutoff());
  for (int n = 0; n <= input.cutoff(); ++n) out.block(n) = blocks[n] * input.block(n);
  return out;
}

namespace {

// T(d, n) = P(d detected | n present).
Eigen::MatrixXd thinning_matrix(double eta, int cutoff) {
  const int dim = cutoff + 1;
  if (eta == 1.0) return Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
  if (eta == 0.0) {
    t.row(0).setOnes();
    return t;
  }
  const double le = std::log(eta);
  const double lf = std::log1p(-eta);
  for (int n = 0; n < dim; ++n)
    for (int d = 0; d <= n; ++d)
      t(d, n) = std::exp(std::lgamma(n + 1.0) - std::lgamma(d + 1.0) - std::lgamma(n - d + 1.0) +
                         d * le + (n - d) * lf);
  return t;
}

Eigen::VectorXd poisson_pmf(double mean, int cutoff) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(cutoff + 1);
  if (mean == 0.0) {
    p[0] = 1.0;
    return p;
  }
  const double lm = std::log(mean);
  for (int n = 0; n <= cutoff; ++n) p[n] = std::exp(-mean + n * lm - std::lgamma(n + 1.0));
  return p;
}

}  // namespace

Eigen::MatrixXd detection_distribution(const TwoModeFock& state, double eta1, double eta2) {
  if (!(eta1 >= 0.0 && eta1 <= 1.0 && eta2 >= 0.0 && eta2 <= 1.0))
    throw std::invalid_argument("detection_distribution: efficiencies must lie in [0, 1]");
  const int c = state.cutoff();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(c + 1, c + 1);
  for (int n = 0; n <= c; ++n)
    for (int k = 0; k <= n; ++k) p(k, n - k) = std::norm(state.block(n)[k]);
  return thinning_matrix(eta1, c) * p * thinning_matrix(eta2, c).transpose();
}

Eigen::MatrixXd poisson_product(double mean1, double mean2, int cutoff) {
  return poisson_pmf(mean1, cutoff) * poisson_pmf(mean2, cutoff).transpose();
}

double total_variation(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  const Eigen::Index rows = std::max(p.rows(), q.rows());
  const Eigen::Index cols = std::max(p.cols(), q.cols());
  Eigen::MatrixXd pp = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::MatrixXd qq = Eigen::MatrixXd::Zero(rows, cols);
  pp.topLeftCorner(p.rows(), p.cols()) = p;
  qq.topLeftCorner(q.rows(), q.cols()) = q;
  return 0.5 * (pp - qq).cwiseAbs().sum();
}

ValidationReport validate_protocol(const CavityParams& params, const PolarizationState& psi,
                                   int cutoff, double tolerance) {
  if (!params.lossless())
    throw std::invalid_argument("validate_protocol: lossless configuration required");
  const Complex alpha = params.alpha();
  ValidationReport report;
  report.cutoff = cutoff > 0 ? cutoff : default_cutoff(alpha);
  report.tolerance = tolerance;

  const FockVector bus = coherent_fock(alpha, report.cutoff);
  report.tail_deficit = bus.tail_deficit;
  FockVector vacuum;
  vacuum.amplitudes = Eigen::VectorXcd::Zero(1);
  vacuum.amplitudes[0] = 1.0;
  const TwoModeFock input = TwoModeFock::product(bus, vacuum, report.cutoff);

  const HybridState analytic = evolve_lossless(psi, params);
  for (const auto& branch : analytic.branches) {
    BranchReport br;
    br.component = branch.component;
    br.signal_photons = signal_photons(branch.component);

    const TwoModeFock out = apply_two_mode_transform(input, mode_unitary(params, br.signal_photons));
    const TwoModeFock expected = TwoModeFock::product(coherent_fock(branch.o1, report.cutoff, 1.0),
                                                      coherent_fock(branch.o2, report.cutoff, 1.0),
                                                      report.cutoff);
    br.state_deviation = distance(out, expected);

    const Eigen::MatrixXd counts = detection_distribution(out, params.eta1(), params.eta2());
    // A thinned Poisson variable is Poisson with the thinned mean.
    const Eigen::MatrixXd poisson =
        poisson_product(params.eta1() * std::norm(branch.o1),
                        params.eta2() * std::norm(branch.o2), report.cutoff);
    br.detection_deviation = total_variation(counts, poisson);
    br.zero_class_oracle = counts.row(0).sum();
    br.zero_class_analytic = std::exp(-params.eta1() * std::norm(branch.o1));

    if (parity_of(branch.component) == Parity::Odd) {
      const double w = std::norm(branch.weight);
      report.p_err_oracle += w * br.zero_class_oracle;
      report.p_err_analytic += w * br.zero_class_analytic;
    }

    const double dev = std::max({br.state_deviation, br.detection_deviation,
                                 std::abs(br.zero_class_oracle - br.zero_class_analytic)});
    report.branches.push_back(br);
    if (report.worst_branch < 0 || dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst_branch = static_cast<int>(report.branches.size()) - 1;
    }
  }
  report.passed = report.max_deviation < tolerance;
  return report;
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
  auto branches = nlohmann::json::array();
  for (const auto& b : r.branches)
    branches.push_back({{"component", to_string(b.component)},
                        {"signal_photons", b.signal_photons},
                        {"state_deviation", b.state_deviation},
                        {"detection_deviation", b.detection_deviation},
                        {"zero_class_oracle", b.zero_class_oracle},
                        {"zero_class_analytic", b.zero_class_analytic}});
  j = {{"cutoff", r.cutoff},
       {"tail_deficit", r.tail_deficit},
       {"tolerance", r.tolerance},
       {"max_deviation", r.max_deviation},
       {"worst_branch", r.worst_branch >= 0
                            ? nlohmann::json(to_string(r.branches[r.worst_branch].component))
                            : nlohmann::json(nullptr)},
       {"p_err_oracle", r.p_err_oracle},
       {"p_err_analytic", r.p_err_analytic},
       {"passed", r.passed},
       {"branches", branches}};
}

}  // namespace kerrgate::oracle
