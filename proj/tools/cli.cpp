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

#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "kerrgate/analysis.hpp"
#include "kerrgate/cavity.hpp"
#include "kerrgate/gate.hpp"
#include "kerrgate/oracle.hpp"

namespace kerrgate::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> split_numbers(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw UsageError("not a number: '" + item + "'");
    values.push_back(v);
  }
  return values;
}

std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  const char* dir = std::getenv(kOutputDirEnv);
  if (p.is_relative() && dir != nullptr && *dir != '\0') return std::filesystem::path(dir) / p;
  return p;
}

// Writes to the resolved file, or to `fallback` when path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path.empty()) return;
    const auto resolved = resolve_output(path);
    file_.open(resolved, std::ios::binary);
    if (!file_) throw UsageError("cannot open output file " + resolved.string());
    os_ = &file_;
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

// Physical flags shared by several subcommands.
struct ParamFlags {
  double theta = 1e-3;
  std::optional<double> tau;
  double lambda = 0.0;
  std::string alpha = "4";
  double eta1 = 1.0;
  double eta2 = 1.0;

  void attach(CLI::App* cmd, bool with_lambda) {
    cmd->add_option("--theta", theta, "Cross-Kerr phase per signal photon (rad)")
        ->capture_default_str();
    cmd->add_option("--tau", tau, "Beam-splitter transmissivity (default: theta)");
    if (with_lambda)
      cmd->add_option("--lambda", lambda, "Bus loss parameter")->capture_default_str();
    cmd->add_option("--alpha", alpha, "Bus amplitude, 're' or 're,im'")->capture_default_str();
    cmd->add_option("--eta1", eta1, "Efficiency of the o1 detector")->capture_default_str();
    cmd->add_option("--eta2", eta2, "Efficiency of the o2 detector")->capture_default_str();
  }

  CavityParams params() const {
    return CavityParams(theta, tau.value_or(theta), lambda, parse_complex(alpha), eta1, eta2);
  }
};

json params_json(const CavityParams& p) {
  return {{"theta", p.theta()},       {"tau", p.tau()},   {"lambda", p.lambda_loss()},
          {"alpha", complex_to_json(p.alpha())}, {"eta1", p.eta1()}, {"eta2", p.eta2()}};
}

struct Binomial {
  double expected;
  double observed;
  std::uint64_t trials;

  double sigma() const { return std::sqrt(expected * (1.0 - expected) / double(trials)); }
  json to_json() const {
    const double s = sigma();
    const double z = s > 0.0 ? (observed - expected) / s : (observed == expected ? 0.0 : INFINITY);
    return {{"expected", expected},
            {"observed", observed},
            {"trials", trials},
            {"ci3_low", expected - 3.0 * s},
            {"ci3_high", expected + 3.0 * s},
            {"z", z},
            {"within_3_sigma", std::abs(z) <= 3.0}};
  }
};

int cmd_figure2(double p_err, double r_min, double r_max, int points, const std::string& out_path,
                std::ostream& out) {
  const Table t = figure2_table(p_err, r_min, r_max, points);
  Sink sink(out_path, out);
  write_csv(sink.stream(), t);
  return kExitOk;
}

int cmd_loss_figure(bool fidelity, const ParamFlags& flags, const std::vector<double>& alphas,
                    double ratio_min, double ratio_max, int points, const std::string& out_path,
                    std::ostream& out) {
  const Table t = fidelity
                      ? figure5_table(flags.theta, alphas, ratio_min, ratio_max, points, flags.tau)
                      : figure4_table(flags.theta, alphas, ratio_min, ratio_max, points, flags.tau);
  Sink sink(out_path, out);
  write_csv(sink.stream(), t);
  return kExitOk;
}

struct GateRunFlags {
  ParamFlags params;
  std::optional<double> kappa_alpha;
  std::string input_state = "uniform";
  std::optional<std::uint64_t> seed;
  std::uint64_t shots = 1000;
  unsigned threads = 1;
  std::string out_path;
  std::string summary_path;
};

int cmd_gate_run(const GateRunFlags& f, std::ostream& out, std::ostream& err) {
  if (f.shots < 1) throw UsageError("--shots must be at least 1");
  CavityParams params = f.params.params();
  const PolarizationState psi = parse_input_state(f.input_state);

  // |o1| per unit alpha on the odd branches and the feedforward coefficients.
  auto odd_o1_gain = [](const CavityParams& p) {
    if (p.lossless()) return std::abs(transfer_coefficients(p, 0).kappa);
    return std::abs(lossy_transfer_coefficients(p, 0).a - lossy_transfer_coefficients(p, 1).a);
  };
  if (f.kappa_alpha) {
    if (!(*f.kappa_alpha >= 0.0)) throw UsageError("--kappa-alpha must be non-negative");
    params = params.with_alpha(*f.kappa_alpha / odd_o1_gain(params));
  }

  std::uint64_t seed = 0;
  if (f.seed) {
    seed = *f.seed;
  } else {
    std::random_device rd;
    seed = (std::uint64_t(rd()) << 32) ^ rd();
    err << "seed: " << seed << '\n';
  }

  const DetectorModel d1(params.eta1(), DetectorPort::O1);
  const DetectorModel d2(params.eta2(), DetectorPort::O2);
  std::vector<ShotRecord> records;
  std::vector<ShotRecord>* rec = f.out_path.empty() ? nullptr : &records;

  ShotCounts counts;
  double phase_error_expected = 0.0;
  if (params.lossless()) {
    const HybridState state = evolve_lossless(psi, params);
    counts = run_shots(state, d1, d2, seed, f.shots, rec, f.threads);
    phase_error_expected = phase_error_probability(state.odd.kappa, state.odd.sigma,
                                                   params.alpha(), params.eta1(), params.eta2());
  } else {
    const DisplacedState state = displace_and_correct(evolve_lossy(psi, params));
    counts = run_shots(state, d1, d2, seed, f.shots, rec, f.threads);
    const double m1 = std::norm(state.odd.kappa * params.alpha());
    const double m2 = std::norm(state.odd.sigma * params.alpha());
    phase_error_expected = -std::expm1(-(1.0 - params.eta1()) * m1 - (1.0 - params.eta2()) * m2);
  }

  if (rec) {
    Sink sink(f.out_path, out);
    write_shot_csv_header(sink.stream());
    for (const auto& r : records) write_shot_csv_row(sink.stream(), seed, r);
  }

  const double odd_weight = psi.parity_weight(Parity::Odd);
  const double o1_mag = odd_o1_gain(params) * std::abs(params.alpha());
  // Probability that an odd branch shows no click on o1.
  const double zero_click = 2.0 * error_probability_eta(o1_mag, params.eta1());
  const double n = double(counts.shots);

  json summary = {
      {"seed", seed},
      {"shots", counts.shots},
      {"params", params_json(params)},
      {"input_state", psi},
      {"odd_o1_amplitude", o1_mag},
      {"counts",
       {{"classified_even", counts.classified_even},
        {"classified_odd", counts.classified_odd},
        {"true_even", counts.true_even},
        {"true_odd", counts.true_odd},
        {"misclassified", counts.misclassified},
        {"phase_errors", counts.phase_errors}}},
      {"p_err", Binomial{odd_weight * zero_click, counts.misclassified / n, counts.shots}.to_json()},
      {"classified_even_fraction",
       Binomial{psi.parity_weight(Parity::Even) + odd_weight * zero_click,
                counts.classified_even / n, counts.shots}
           .to_json()}};
  if (counts.true_odd > 0) {
    const double odd_n = double(counts.true_odd);
    summary["misclassified_given_odd"] =
        Binomial{zero_click, counts.misclassified / odd_n, counts.true_odd}.to_json();
    summary["phase_error_given_odd"] =
        Binomial{phase_error_expected, counts.phase_errors / odd_n, counts.true_odd}.to_json();
  }
  Sink sink(f.summary_path, out);
  sink.stream() << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_validate(const ParamFlags& flags, const std::string& input_state, int cutoff,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
  const CavityParams params = flags.params();
  const PolarizationState psi = parse_input_state(input_state);
  oracle::ValidationReport report;
  try {
    report = oracle::validate_protocol(params, psi, cutoff);
  } catch (const oracle::CutoffTooSmall& e) {
    err << "error: cutoff-too-small: cutoff " << e.cutoff() << " leaves probability "
        << e.deficit() << " above the truncation (bound " << oracle::kDefaultTailBound
        << "); try --cutoff " << oracle::default_cutoff(params.alpha()) << '\n';
    return kExitUsage;
  }
  json j = report;
  j["params"] = params_json(params);
  Sink sink(out_path, out);
  sink.stream() << j.dump(2) << '\n';
  if (!report.passed) {
    err << "validation failed: max deviation " << report.max_deviation << " on branch "
        << to_string(report.branches.at(report.worst_branch).component) << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace

std::complex<double> parse_complex(const std::string& text) {
  const auto v = split_numbers(text);
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() == 2) return {v[0], v[1]};
  throw UsageError("expected 're' or 're,im', got '" + text + "'");
}

PolarizationState parse_input_state(const std::string& text) {
  const double h = 1.0 / std::sqrt(2.0);
  if (text == "uniform") return PolarizationState::uniform();
  if (text == "even") return {h, 0.0, 0.0, h};
  if (text == "odd") return {0.0, h, h, 0.0};
  for (auto c : kComponents)
    if (text == to_string(c)) return PolarizationState::basis(c);
  const auto v = split_numbers(text);
  Eigen::Vector4cd amps;
  if (v.size() == 4) {
    amps << v[0], v[1], v[2], v[3];
  } else if (v.size() == 8) {
    for (int i = 0; i < 4; ++i) amps[i] = {v[2 * i], v[2 * i + 1]};
  } else {
    throw UsageError("--input-state needs a preset or 4/8 comma separated numbers");
  }
  return PolarizationState(amps);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ring-cavity cross-Kerr parity gate simulator", "kerrgate"};
  app.require_subcommand(1);

  double p_err = 1e-4;
  double r_min = 0.1, r_max = 10.0;
  int r_points = 200;
  std::string out_path;
  auto* fig2 = app.add_subcommand("figure2", "Bus amplitude needed for a target error vs r");
  fig2->add_option("--perr", p_err, "Target error probability")->capture_default_str();
  fig2->add_option("--r-min", r_min)->capture_default_str();
  fig2->add_option("--r-max", r_max)->capture_default_str();
  fig2->add_option("--points", r_points)->capture_default_str();
  fig2->add_option("--out", out_path, "CSV file (default: stdout)");

  ParamFlags loss_flags;
  loss_flags.theta = 1e-4;
  std::vector<double> alphas{2.0, 4.0, 30.0};
  double ratio_min = 0.0, ratio_max = 10.0;
  int ratio_points = 201;
  auto add_loss_figure = [&](const char* name, const char* desc) {
    auto* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--theta", loss_flags.theta, "Cross-Kerr phase; tau defaults to it")
        ->capture_default_str();
    cmd->add_option("--tau", loss_flags.tau, "Beam-splitter transmissivity (default: theta)");
    cmd->add_option("--alpha", alphas, "Bus amplitudes, one column each")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--ratio-min", ratio_min)->capture_default_str();
    cmd->add_option("--ratio-max", ratio_max)->capture_default_str();
    cmd->add_option("--points", ratio_points)->capture_default_str();
    cmd->add_option("--out", out_path, "CSV file (default: stdout)");
    return cmd;
  };
  auto* fig4 = add_loss_figure("figure4", "Parity discrimination error vs lambda/theta");
  auto* fig5 = add_loss_figure("figure5", "Odd-state fidelity vs lambda/theta");

  GateRunFlags run_flags;
  auto* gate_run = app.add_subcommand("gate-run", "Monte Carlo runs of the detection protocol");
  run_flags.params.attach(gate_run, true);
  gate_run->add_option("--kappa-alpha", run_flags.kappa_alpha,
                       "Set |alpha| so the odd-branch o1 amplitude has this magnitude");
  gate_run->add_option("--input-state", run_flags.input_state,
                       "uniform|even|odd|HH|HV|VH|VV or 4/8 numbers")
      ->capture_default_str();
  gate_run->add_option("--seed", run_flags.seed, "RNG seed (default: random, printed)");
  gate_run->add_option("--shots", run_flags.shots)->capture_default_str();
  gate_run->add_option("--threads", run_flags.threads)->capture_default_str();
  gate_run->add_option("--out", run_flags.out_path, "Per-shot CSV file (default: none)");
  gate_run->add_option("--summary", run_flags.summary_path, "Summary JSON (default: stdout)");

  ParamFlags validate_flags;
  std::string validate_state = "uniform";
  int cutoff = 0;
  auto* validate =
      app.add_subcommand("validate", "Check the branch algebra against a Fock-space simulation");
  validate_flags.attach(validate, false);
  validate->add_option("--input-state", validate_state)->capture_default_str();
  validate->add_option("--cutoff", cutoff, "Photon-number cutoff (default: from alpha)");
  validate->add_option("--out", out_path, "JSON file (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*fig2) return cmd_figure2(p_err, r_min, r_max, r_points, out_path, out);
    if (*fig4 || *fig5)
      return cmd_loss_figure(bool(*fig5), loss_flags, alphas, ratio_min, ratio_max, ratio_points,
                             out_path, out);
    if (*gate_run) return cmd_gate_run(run_flags, out, err);
    if (*validate) return cmd_validate(validate_flags, validate_state, cutoff, out_path, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace kerrgate::cli
