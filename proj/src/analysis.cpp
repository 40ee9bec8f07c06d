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

#include "kerrgate/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

namespace kerrgate {

namespace {

struct LossGeometry {
  double q;      // 1 - tau
  double s;      // sqrt(1 - lambda)
  double u;      // 1 - q s
  double denom;  // |Gamma_0|^2 = 1 - 2 q s cos(theta) + q^2 (1 - lambda)
};

LossGeometry loss_geometry(const CavityParams& p) {
  const double q = 1.0 - p.tau();
  const double s = std::sqrt(1.0 - p.lambda_loss());
  const double u = p.tau() + q * p.lambda_loss() / (1.0 + s);
  const double h = std::sin(0.5 * p.theta());
  return {q, s, u, u * u + 4.0 * q * s * h * h};
}

void require_probability_target(double p_err) {
  if (!(p_err > 0.0 && p_err < 0.5))
    throw std::domain_error("target error probability must lie in (0, 1/2)");
}

void require_efficiency(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::domain_error("detector efficiency must lie in [0, 1]");
}

}  // namespace

double guarded_exp(double exponent) {
  return exponent < kUnderflowExponent ? 0.0 : std::exp(exponent);
}

double error_probability(double kappa_alpha_mag) {
  if (!(kappa_alpha_mag >= 0.0)) throw std::domain_error("error_probability: |kappa alpha| < 0");
  return 0.5 * guarded_exp(-kappa_alpha_mag * kappa_alpha_mag);
}

double error_probability_eta(double kappa_alpha_mag, double eta1) {
  if (!(kappa_alpha_mag >= 0.0))
    throw std::domain_error("error_probability_eta: |kappa alpha| < 0");
  require_efficiency(eta1);
  return 0.5 * guarded_exp(-eta1 * kappa_alpha_mag * kappa_alpha_mag);
}

double compensated_alpha(double alpha_mag, double eta1) {
  if (!(eta1 > 0.0 && eta1 <= 1.0))
    throw std::domain_error("compensated_alpha: efficiency must lie in (0, 1]");
  return alpha_mag / std::sqrt(eta1);
}

double phase_error_probability(std::complex<double> kappa, std::complex<double> sigma,
                               std::complex<double> alpha, double eta1, double eta2) {
  require_efficiency(eta1);
  require_efficiency(eta2);
  // 1 - eta1 |kappa|^2 - eta2 |sigma|^2 with |kappa|^2 + |sigma|^2 = 1; this
  // form is exactly zero for perfect detectors.
  const double rate = (1.0 - eta1) * std::norm(kappa) + (1.0 - eta2) * std::norm(sigma);
  return -std::expm1(-rate * std::norm(alpha));
}

double required_alpha(double r, double p_err) {
  if (!(r > 0.0)) throw std::domain_error("required_alpha: r must be positive");
  require_probability_target(p_err);
  return std::sqrt((1.0 + 1.0 / (r * r)) * std::log(1.0 / (2.0 * p_err)));
}

double required_alpha_exact(double theta, double tau, double p_err) {
  require_probability_target(p_err);
  const double kappa_sq = std::norm(transfer_coefficients<double>(theta, tau, 0).kappa);
  auto excess = [&](double a) { return 0.5 * std::exp(-kappa_sq * a * a) - p_err; };
  double lo = 0.0;
  double hi = 1e3;
  if (excess(hi) > 0.0)
    throw std::domain_error("required_alpha_exact: no solution with |alpha| <= 1e3");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double loss_distinguish_exponent(const CavityParams& p) {
  const auto g = loss_geometry(p);
  const double h = std::sin(0.5 * p.theta());
  const double tau = p.tau();
  // cos(theta) - 1 = -2 sin^2(theta / 2)
  return -4.0 * tau * tau * g.q * (1.0 - p.lambda_loss()) * h * h * std::norm(p.alpha()) /
         (g.denom * g.u * g.u);
}

double loss_distinguish_error(const CavityParams& p) {
  return 0.5 * guarded_exp(loss_distinguish_exponent(p));
}

double odd_dephasing_exponent(const CavityParams& p) {
  const auto g = loss_geometry(p);
  const double st = std::sin(p.theta());
  return -4.0 * p.tau() * g.q * p.lambda_loss() * std::norm(p.alpha()) * st * st /
         (g.denom * g.denom);
}

double odd_fidelity(const CavityParams& p) {
  return 0.5 + 0.5 * guarded_exp(odd_dephasing_exponent(p));
}

Eigen::VectorXd make_grid(double min, double max, int points, Spacing spacing) {
  if (!(min < max)) throw std::invalid_argument("grid: min must be below max");
  if (points < 2) throw std::invalid_argument("grid: at least two points required");
  if (spacing == Spacing::Linear) return Eigen::VectorXd::LinSpaced(points, min, max);
  if (!(min > 0.0)) throw std::invalid_argument("grid: log spacing needs min > 0");
  Eigen::VectorXd g =
      Eigen::VectorXd::LinSpaced(points, std::log(min), std::log(max)).array().exp();
  g[0] = min;
  g[points - 1] = max;
  return g;
}

std::vector<double> Table::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(j));
  return out;
}

namespace {

// Value and whether the underflow guard fired.
struct Point {
  double value;
  bool underflow;
};

using Evaluator = std::function<Point(double)>;

Evaluator make_evaluator(const SweepSpec& spec) {
  const auto& t = spec.target;
  const auto& v = spec.variable;
  const CavityParams& f = spec.fixed;
  auto reject = [&]() -> Evaluator {
    throw std::invalid_argument("sweep: target '" + t + "' does not accept variable '" + v + "'");
  };

  if (t == "required_alpha") {
    if (v != "r") return reject();
    return [p = spec.p_err](double r) { return Point{required_alpha(r, p), false}; };
  }
  if (t == "required_alpha_exact") {
    if (v != "r") return reject();
    return [p = spec.p_err, tau = f.tau()](double r) {
      return Point{required_alpha_exact(r * tau, tau, p), false};
    };
  }
  if (t == "error_probability" || t == "error_probability_eta") {
    if (v != "kappa_alpha") return reject();
    const double eta = t == "error_probability" ? 1.0 : f.eta1();
    return [eta](double m) {
      return Point{error_probability_eta(m, eta), -eta * m * m < kUnderflowExponent};
    };
  }
  if (t == "phase_error") {
    if (v != "alpha") return reject();
    const auto k = transfer_coefficients(f, 0);
    return [k, f](double a) {
      return Point{phase_error_probability(k.kappa, k.sigma, a, f.eta1(), f.eta2()), false};
    };
  }
  if (t == "loss_distinguish_error" || t == "odd_fidelity") {
    std::function<CavityParams(double)> at;
    if (v == "lambda_ratio")
      at = [f](double x) { return f.with_lambda(x * f.theta()); };
    else if (v == "alpha")
      at = [f](double a) { return f.with_alpha(a); };
    else
      return reject();
    if (t == "loss_distinguish_error")
      return [at](double x) {
        const auto p = at(x);
        return Point{loss_distinguish_error(p), loss_distinguish_exponent(p) < kUnderflowExponent};
      };
    return [at](double x) {
      const auto p = at(x);
      return Point{odd_fidelity(p), odd_dephasing_exponent(p) < kUnderflowExponent};
    };
  }
  throw std::invalid_argument("sweep: unknown target '" + t + "'");
}

std::string alpha_label(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", a);
  return buf;
}

Table figure_loss_table(double theta, const std::vector<double>& alphas, double ratio_min,
                        double ratio_max, int points, std::optional<double> tau,
                        const std::string& target, const std::string& prefix) {
  if (alphas.empty()) throw std::invalid_argument("figure: at least one alpha required");
  const CavityParams base(theta, tau.value_or(theta));
  const Eigen::VectorXd grid = make_grid(ratio_min, ratio_max, points, Spacing::Linear);
  Table table;
  table.columns.push_back("lambda_over_theta");
  std::vector<Evaluator> evals;
  for (double a : alphas) {
    table.columns.push_back(prefix + alpha_label(a));
    SweepSpec spec{"lambda_ratio", ratio_min, ratio_max, points, Spacing::Linear,
                   base.with_alpha(a), target};
    evals.push_back(make_evaluator(spec));
  }
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i]};
    bool underflow = false;
    for (const auto& e : evals) {
      const Point pt = e(grid[i]);
      row.push_back(pt.value);
      underflow = underflow || pt.underflow;
    }
    table.rows.push_back(std::move(row));
    table.underflow.push_back(underflow);
  }
  return table;
}

}  // namespace

Table sweep(const SweepSpec& spec) {
  const Evaluator eval = make_evaluator(spec);
  const Eigen::VectorXd grid = make_grid(spec.min, spec.max, spec.points, spec.spacing);
  Table table{{spec.variable, spec.target}, {}, {}};
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Point pt = eval(grid[i]);
    table.rows.push_back({grid[i], pt.value});
    table.underflow.push_back(pt.underflow);
  }
  return table;
}

Table figure2_table(double p_err, double r_min, double r_max, int points) {
  require_probability_target(p_err);
  SweepSpec spec{"r", r_min, r_max, points, Spacing::Log, CavityParams(1e-4, 1e-4),
                 "required_alpha", p_err};
  return sweep(spec);
}

Table figure4_table(double theta, const std::vector<double>& alphas, double ratio_min,
                    double ratio_max, int points, std::optional<double> tau) {
  return figure_loss_table(theta, alphas, ratio_min, ratio_max, points, tau,
                           "loss_distinguish_error",
                           "P_e_alpha_");
}

Table figure5_table(double theta, const std::vector<double>& alphas, double ratio_min,
                    double ratio_max, int points, std::optional<double> tau) {
  return figure_loss_table(theta, alphas, ratio_min, ratio_max, points, tau, "odd_fidelity",
                           "F_odd_alpha_");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t j = 0; j < table.columns.size(); ++j)
    os << (j ? "," : "") << table.columns[j];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << format_double(row[j]);
    os << '\n';
  }
}

}  // namespace kerrgate
