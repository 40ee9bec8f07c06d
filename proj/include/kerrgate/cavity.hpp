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

#ifndef KERRGATE_CAVITY_HPP
#define KERRGATE_CAVITY_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace kerrgate {

/// Physical knobs of the ring-cavity bus.
///
/// theta is the cross-Kerr phase per signal photon, tau the transmissivity of
/// both cavity beam splitters, lambda the transmissivity of the fictitious
/// beam splitter that models bus loss, alpha the coherent amplitude fed into
/// input port i1 and eta1/eta2 the efficiencies of the detectors on o1/o2.
class CavityParams {
 public:
  CavityParams(double theta, double tau, double lambda_loss = 0.0,
               std::complex<double> alpha = {0.0, 0.0}, double eta1 = 1.0,
               double eta2 = 1.0)
      : theta_(theta),
        tau_(tau),
        lambda_(lambda_loss),
        alpha_(alpha),
        eta1_(eta1),
        eta2_(eta2) {
    if (!std::isfinite(theta) || theta == 0.0)
      throw std::invalid_argument("CavityParams: theta must be finite and non-zero");
    if (!(tau > 0.0 && tau < 1.0))
      throw std::invalid_argument("CavityParams: tau must lie in (0, 1)");
    if (!(lambda_loss >= 0.0 && lambda_loss < 1.0))
      throw std::invalid_argument("CavityParams: lambda must lie in [0, 1)");
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
      throw std::invalid_argument("CavityParams: alpha must be finite");
    if (!(eta1 >= 0.0 && eta1 <= 1.0) || !(eta2 >= 0.0 && eta2 <= 1.0))
      throw std::invalid_argument("CavityParams: detector efficiencies must lie in [0, 1]");
  }

  double theta() const { return theta_; }
  double tau() const { return tau_; }
  double lambda_loss() const { return lambda_; }
  std::complex<double> alpha() const { return alpha_; }
  double eta1() const { return eta1_; }
  double eta2() const { return eta2_; }
  bool lossless() const { return lambda_ == 0.0; }

  CavityParams with_alpha(std::complex<double> alpha) const {
    return {theta_, tau_, lambda_, alpha, eta1_, eta2_};
  }
  CavityParams with_lambda(double lambda_loss) const {
    return {theta_, tau_, lambda_loss, alpha_, eta1_, eta2_};
  }
  CavityParams with_efficiencies(double eta1, double eta2) const {
    return {theta_, tau_, lambda_, alpha_, eta1, eta2};
  }

 private:
  double theta_;
  double tau_;
  double lambda_;
  std::complex<double> alpha_;
  double eta1_;
  double eta2_;
};

/// Principal argument in (-pi, pi].
template <typename Real>
Real principal_arg(const std::complex<Real>& z) {
  const Real a = std::arg(z);
  return a == -Real(M_PI) ? Real(M_PI) : a;
}

template <typename Real = double>
struct TransferCoefficients {
  int n = 0;
  std::complex<Real> kappa;
  std::complex<Real> sigma;
};

template <typename Real = double>
struct LossyTransferCoefficients {
  int n = 0;
  std::complex<Real> a;
  std::complex<Real> b;
  std::complex<Real> c;
  std::complex<Real> gamma;
};

namespace detail {

// exp(i phi) - 1 without the cancellation near phi = 0.
template <typename Real>
std::complex<Real> expm1_i(Real phi) {
  const Real h = std::sin(phi / 2);
  return {-2 * h * h, std::sin(phi)};
}

template <typename Real>
Real detuning(Real theta, int n) {
  return static_cast<Real>(1 - n) * theta;
}

inline void check_photon_number(int n) {
  if (n < 0) throw std::invalid_argument("photon number must be non-negative");
}

}  // namespace detail

/// Lossless reflectivity kappa_n and transmissivity sigma_n of the ring cavity
/// when n photons occupy the signal mode. Exact at resonance (n = 1).
template <typename Real>
TransferCoefficients<Real> transfer_coefficients(Real theta, Real tau, int n) {
  detail::check_photon_number(n);
  const Real q = 1 - tau;
  const auto em1 = detail::expm1_i(detail::detuning(theta, n));
  // 1 - q e^{i phi} = tau - q (e^{i phi} - 1)
  const std::complex<Real> denom = std::complex<Real>(tau) - q * em1;
  return {n, std::sqrt(q) * em1 / denom, std::complex<Real>(tau) / denom};
}

inline TransferCoefficients<double> transfer_coefficients(const CavityParams& p, int n) {
  return transfer_coefficients<double>(p.theta(), p.tau(), n);
}

/// |sigma_n|^2 from the real closed form.
template <typename Real>
Real sigma_sq_closed_form(Real theta, Real tau, int n) {
  const Real h = std::sin(detail::detuning(theta, n) / 2);
  return 1 / (1 + 4 * (1 - tau) / (tau * tau) * h * h);
}

/// Three-port coefficients with the bus-loss beam splitter in the cavity.
/// Reduces to (kappa_n, sigma_n, 0) at lambda = 0.
template <typename Real>
LossyTransferCoefficients<Real> lossy_transfer_coefficients(Real theta, Real tau,
                                                            Real lambda_loss, int n) {
  detail::check_photon_number(n);
  const Real phi = detail::detuning(theta, n);
  const Real q = 1 - tau;
  const Real s = std::sqrt(1 - lambda_loss);
  const Real one_minus_s = lambda_loss / (1 + s);
  const auto em1 = detail::expm1_i(phi);
  const std::complex<Real> e(std::cos(phi), std::sin(phi));
  // 1 - q s e^{i phi} = (tau + q (1 - s)) - q s (e^{i phi} - 1)
  const std::complex<Real> gamma = std::complex<Real>(tau + q * one_minus_s) - q * s * em1;
  // s e^{i phi} - 1 = s (e^{i phi} - 1) - (1 - s)
  const std::complex<Real> a_num = s * em1 - std::complex<Real>(one_minus_s);
  return {n, std::sqrt(q) * a_num / gamma, std::complex<Real>(tau) / gamma,
          std::sqrt(lambda_loss * tau * q) * e / gamma, gamma};
}

inline LossyTransferCoefficients<double> lossy_transfer_coefficients(const CavityParams& p,
                                                                     int n) {
  return lossy_transfer_coefficients<double>(p.theta(), p.tau(), p.lambda_loss(), n);
}

/// Weak-nonlinearity, small-tau magnitudes as a function of r = theta / tau.
/// Returns (|kappa|^2, |sigma|^2).
inline std::pair<double, double> approx_magnitudes(double r) {
  if (!(r > 0.0)) throw std::domain_error("approx_magnitudes: r must be positive");
  if (std::isinf(r)) return {1.0, 0.0};
  const double sigma_sq = 1.0 / (r * r + 1.0);
  return {1.0 - sigma_sq, sigma_sq};
}

template <typename Real>
using Matrix2c = Eigen::Matrix<std::complex<Real>, 2, 2>;
template <typename Real>
using Matrix3c = Eigen::Matrix<std::complex<Real>, 3, 3>;

/// Lossless cavity map. Column j is the image of the input creation operator
/// a_{i_j}^dagger in the (o1, o2) basis, so the coherent input |alpha, 0>
/// leaves as |kappa_n alpha, sigma_n alpha>.
template <typename Real>
Matrix2c<Real> mode_unitary(Real theta, Real tau, int n) {
  const auto tc = transfer_coefficients<Real>(theta, tau, n);
  const Real phi = detail::detuning(theta, n);
  const std::complex<Real> e(std::cos(phi), std::sin(phi));
  Matrix2c<Real> m;
  m << tc.kappa, e * tc.sigma,
       tc.sigma, tc.kappa;
  return m;
}

inline Matrix2c<double> mode_unitary(const CavityParams& p, int n) {
  if (!p.lossless())
    throw std::invalid_argument("mode_unitary: lossless configuration required");
  return mode_unitary<double>(p.theta(), p.tau(), n);
}

/// Three-port (o1, o2, o3) <- (i1, i2, i3) cavity map with bus loss, same
/// column convention as mode_unitary. o3 collects the photons lost from the bus.
template <typename Real>
Matrix3c<Real> lossy_mode_matrix(Real theta, Real tau, Real lambda_loss, int n) {
  const auto c = lossy_transfer_coefficients<Real>(theta, tau, lambda_loss, n);
  const Real phi = detail::detuning(theta, n);
  const Real q = 1 - tau;
  const Real s = std::sqrt(1 - lambda_loss);
  const Real one_minus_s = lambda_loss / (1 + s);
  const std::complex<Real> e(std::cos(phi), std::sin(phi));
  const auto em1 = detail::expm1_i(phi);
  // q e^{i phi} - s = (1 - s) - tau + q (e^{i phi} - 1)
  const std::complex<Real> o3_i3 =
      (std::complex<Real>(one_minus_s - tau) + q * em1) / c.gamma;
  Matrix3c<Real> m;
  m << c.a, tau * s * e / c.gamma, std::sqrt(tau * lambda_loss) / c.gamma,
       c.b, c.a, std::sqrt(lambda_loss * tau * q) / c.gamma,
       c.c, c.c / std::sqrt(q), o3_i3;
  return m;
}

inline Matrix3c<double> lossy_mode_matrix(const CavityParams& p, int n) {
  return lossy_mode_matrix<double>(p.theta(), p.tau(), p.lambda_loss(), n);
}

/// Largest entry of M^dagger M - I.
template <typename Derived>
double unitarity_residual(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const auto id = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(m.cols(), m.cols());
  return static_cast<double>((m.adjoint() * m - id).cwiseAbs().maxCoeff());
}

}  // namespace kerrgate

#endif  // KERRGATE_CAVITY_HPP
