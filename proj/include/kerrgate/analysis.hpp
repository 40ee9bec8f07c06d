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

#ifndef KERRGATE_ANALYSIS_HPP
#define KERRGATE_ANALYSIS_HPP

#include <complex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerrgate/cavity.hpp"

namespace kerrgate {

/// Exponents below this are reported as probability 0 (flagged in sweeps).
inline constexpr double kUnderflowExponent = -700.0;

/// exp(exponent), or 0 once the exponent drops below kUnderflowExponent.
double guarded_exp(double exponent);

/// Parity misclassification probability for equal-weight inputs with perfect
/// detectors: (1/2) exp(-|kappa alpha|^2).
double error_probability(double kappa_alpha_mag);

/// Same with an o1 detector of efficiency eta1.
double error_probability_eta(double kappa_alpha_mag, double eta1);

/// Bus amplitude that restores the perfect-detector error rate: alpha / sqrt(eta1).
double compensated_alpha(double alpha_mag, double eta1);

/// Probability that at least one detector undercounts an odd branch, so the
/// feedforward removes the wrong phase:
/// 1 - exp[(eta1 |kappa|^2 + eta2 |sigma|^2 - 1) |alpha|^2].
/// kappa and sigma are lossless coefficients (|kappa|^2 + |sigma|^2 = 1).
double phase_error_probability(std::complex<double> kappa, std::complex<double> sigma,
                               std::complex<double> alpha, double eta1, double eta2);

/// Bus amplitude for a target error rate under the small theta, small tau
/// approximation, r = theta / tau.
double required_alpha(double r, double p_err);

/// Exact counterpart of required_alpha: bisection of |alpha| on [0, 1e3]
/// against (1/2) exp(-|kappa_0(theta, tau) alpha|^2), absolute tolerance 1e-10.
double required_alpha_exact(double theta, double tau, double p_err);

/// Exponent of the lossy parity-discrimination error (1/2) exp(exponent).
double loss_distinguish_exponent(const CavityParams& p);
double loss_distinguish_error(const CavityParams& p);

/// Exponent of the dephasing factor y3 = exp(exponent) of the odd output.
double odd_dephasing_exponent(const CavityParams& p);
/// Overlap of the lossy odd output with the ideal odd state, 1/2 + y3 / 2.
double odd_fidelity(const CavityParams& p);

enum class Spacing { Linear, Log };

/// Evenly spaced grid; Log spaces evenly in log(x) and needs min > 0.
Eigen::VectorXd make_grid(double min, double max, int points, Spacing spacing);

/// A closed-form quantity evaluated over a 1-D grid.
///
/// Targets and the variables they accept:
///   required_alpha        r (uses p_err)
///   required_alpha_exact  r (theta = r * tau, uses p_err)
///   error_probability     kappa_alpha
///   error_probability_eta kappa_alpha (uses fixed.eta1())
///   phase_error           alpha
///   loss_distinguish_error, odd_fidelity
///                         lambda_ratio (lambda = x * theta) or alpha
struct SweepSpec {
  std::string variable;
  double min = 0.0;
  double max = 1.0;
  int points = 2;
  Spacing spacing = Spacing::Linear;
  CavityParams fixed{1e-4, 1e-4};
  std::string target;
  double p_err = 1e-4;
};

/// Column-named table of doubles written as CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Per row: some value hit the underflow guard.
  std::vector<bool> underflow;

  const std::vector<double>& row(std::size_t i) const { return rows.at(i); }
  std::vector<double> column(std::size_t j) const;
};

/// Throws std::invalid_argument on an unknown target, a variable the target
/// does not accept or a malformed range.
Table sweep(const SweepSpec& spec);

/// Figure tables. figure4/figure5 have one column per alpha over lambda / theta
/// and use tau = theta unless tau is given.
Table figure2_table(double p_err, double r_min = 0.1, double r_max = 10.0, int points = 200);
Table figure4_table(double theta, const std::vector<double>& alphas, double ratio_min = 0.0,
                    double ratio_max = 10.0, int points = 201,
                    std::optional<double> tau = std::nullopt);
Table figure5_table(double theta, const std::vector<double>& alphas, double ratio_min = 0.0,
                    double ratio_max = 10.0, int points = 201,
                    std::optional<double> tau = std::nullopt);

/// Header row, then one line per row, values at 17 significant digits.
void write_csv(std::ostream& os, const Table& table);
std::string format_double(double v);

}  // namespace kerrgate

#endif  // KERRGATE_ANALYSIS_HPP
