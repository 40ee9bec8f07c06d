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

// Brute-force photon-number-basis simulation of the lossless protocol, used to
// check the coherent-state branch algebra of gate.hpp. Only the 2x2 cavity
// matrices are shared with it.

#ifndef KERRGATE_ORACLE_HPP
#define KERRGATE_ORACLE_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "kerrgate/cavity.hpp"
#include "kerrgate/states.hpp"

namespace kerrgate::oracle {

class CutoffTooSmall : public std::runtime_error {
 public:
  CutoffTooSmall(int cutoff, double deficit);
  int cutoff() const { return cutoff_; }
  double deficit() const { return deficit_; }

 private:
  int cutoff_;
  double deficit_;
};

inline constexpr double kDefaultTailBound = 1e-12;

/// Single-mode amplitudes on |0> .. |cutoff>.
struct FockVector {
  Eigen::VectorXcd amplitudes;
  /// Probability mass above the cutoff.
  double tail_deficit = 0.0;

  int cutoff() const { return static_cast<int>(amplitudes.size()) - 1; }
};

/// ceil(|alpha|^2 + 8 |alpha| + 16).
int default_cutoff(Complex alpha);

/// Truncated coherent state. Throws CutoffTooSmall when the mass above the
/// cutoff exceeds tail_bound.
FockVector coherent_fock(Complex alpha, int cutoff, double tail_bound = kDefaultTailBound);

/// Two-mode state truncated to total photon number <= cutoff, stored by
/// block: blocks[N][k] is the amplitude of |k, N - k>.
class TwoModeFock {
 public:
  explicit TwoModeFock(int cutoff);

  /// a (x) b restricted to n1 + n2 <= cutoff.
  static TwoModeFock product(const FockVector& a, const FockVector& b, int cutoff);

  int cutoff() const { return static_cast<int>(blocks_.size()) - 1; }
  Complex at(int n1, int n2) const;
  Complex& at(int n1, int n2);
  const Eigen::VectorXcd& block(int total) const { return blocks_.at(total); }
  Eigen::VectorXcd& block(int total) { return blocks_.at(total); }
  double norm_sq() const;

 private:
  std::vector<Eigen::VectorXcd> blocks_;
};

/// L2 distance between two states of equal cutoff.
double distance(const TwoModeFock& a, const TwoModeFock& b);

/// Matrix of the passive transform on each total-photon-number block.
/// Column j of `modes` is the image of a_j^dagger; block N maps |k, N - k>
/// (column k) to the output amplitudes (row k').
std::vector<Eigen::MatrixXcd> block_unitaries(const Matrix2c<double>& modes, int cutoff);

/// Applies the passive linear-optics transform. Throws std::invalid_argument
/// if `modes` is not unitary within 1e-10.
TwoModeFock apply_two_mode_transform(const TwoModeFock& input, const Matrix2c<double>& modes);

/// Joint distribution of detected counts (row n_o1, column n_o2) after
/// binomial thinning with efficiencies eta1, eta2.
Eigen::MatrixXd detection_distribution(const TwoModeFock& state, double eta1, double eta2);

/// Joint distribution of two independent Poisson variables on [0, cutoff]^2.
Eigen::MatrixXd poisson_product(double mean1, double mean2, int cutoff);

/// (1/2) sum |p - q|; p and q may differ in size, missing entries count as 0.
double total_variation(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q);

struct BranchReport {
  Component component;
  int signal_photons = 0;
  double state_deviation = 0.0;
  double detection_deviation = 0.0;
  double zero_class_oracle = 0.0;
  double zero_class_analytic = 0.0;
};

struct ValidationReport {
  int cutoff = 0;
  double tail_deficit = 0.0;
  double tolerance = 1e-7;
  std::vector<BranchReport> branches;
  double max_deviation = 0.0;
  /// Index into branches of the largest deviation, -1 when there are none.
  int worst_branch = -1;
  /// Probability of reading n_o1 = 0 on an odd branch, weighted by the input.
  double p_err_oracle = 0.0;
  double p_err_analytic = 0.0;
  bool passed = true;
};

/// Evolves |alpha, 0> through M_n for each populated branch in the truncated
/// Fock space and compares the output state and its detection statistics with
/// the coherent-state branches of evolve_lossless. cutoff <= 0 picks
/// default_cutoff(alpha).
ValidationReport validate_protocol(const CavityParams& params, const PolarizationState& psi,
                                   int cutoff = 0, double tolerance = 1e-7);

void to_json(nlohmann::json& j, const ValidationReport& r);

}  // namespace kerrgate::oracle

#endif  // KERRGATE_ORACLE_HPP
