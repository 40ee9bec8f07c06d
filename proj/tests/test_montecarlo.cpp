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


#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "kerrgate/analysis.hpp"
#include "kerrgate/gate.hpp"

namespace kerrgate {
namespace {

// |z| <= 3 for a binomial count against its expected probability.
void expect_within_3_sigma(std::uint64_t hits, std::uint64_t trials, double p) {
  const double n = static_cast<double>(trials);
  const double sd = std::sqrt(p * (1.0 - p) / n);
  EXPECT_LE(std::abs(hits / n - p), 3.0 * sd) << "observed " << hits / n << " expected " << p;
}

CavityParams at_kappa_alpha(double kappa_alpha, double theta = 1e-3) {
  const CavityParams p(theta, theta);
  return p.with_alpha(kappa_alpha / std::abs(transfer_coefficients(p, 0).kappa));
}

TEST(RunShots, EvenFrequencyMatchesClosedForm) {
  const auto state = evolve_lossless(PolarizationState::uniform(), at_kappa_alpha(3.0));
  const auto c = run_shots(state, DetectorModel::perfect(DetectorPort::O1),
                           DetectorModel::perfect(DetectorPort::O2), 42, 1000000);
  EXPECT_EQ(c.shots, 1000000u);
  EXPECT_EQ(c.classified_even + c.classified_odd, c.shots);
  EXPECT_EQ(c.true_even + c.true_odd, c.shots);
  expect_within_3_sigma(c.classified_even, c.shots, 0.5 + error_probability(3.0));
  expect_within_3_sigma(c.misclassified, c.shots, error_probability(3.0));
  EXPECT_EQ(c.phase_errors, 0u);
}

TEST(RunShots, InefficientDetectorRaisesMisclassification) {
  const auto state = evolve_lossless(PolarizationState::uniform(), at_kappa_alpha(3.0));
  const auto c = run_shots(state, DetectorModel(0.9, DetectorPort::O1),
                           DetectorModel::perfect(DetectorPort::O2), 7, 1000000);
  expect_within_3_sigma(c.misclassified, c.true_odd, std::exp(-0.9 * 9.0));
  expect_within_3_sigma(c.phase_errors, c.true_odd,
                        phase_error_probability(state.odd.kappa, state.odd.sigma, state.alpha,
                                                0.9, 1.0));
}

TEST(RunShots, LossyMisclassificationMatchesClosedForm) {
  const CavityParams p(1e-4, 1e-4, 1e-4, 2.0);
  const auto d = displace_and_correct(evolve_lossy(PolarizationState::uniform(), p));
  const auto c = run_shots(d, DetectorModel::perfect(DetectorPort::O1),
                           DetectorModel::perfect(DetectorPort::O2), 3, 400000);
  expect_within_3_sigma(c.misclassified, c.shots, loss_distinguish_error(p));
}

TEST(RunShots, ResultIndependentOfThreadCount) {
  const auto state = evolve_lossless(PolarizationState::uniform(), at_kappa_alpha(1.5));
  const DetectorModel d1(0.8, DetectorPort::O1);
  const DetectorModel d2(0.9, DetectorPort::O2);
  std::vector<ShotRecord> r1, r4;
  const auto a = run_shots(state, d1, d2, 11, 3 * kShotBatch + 17, &r1, 1);
  const auto b = run_shots(state, d1, d2, 11, 3 * kShotBatch + 17, &r4, 4);
  EXPECT_EQ(a.classified_even, b.classified_even);
  EXPECT_EQ(a.misclassified, b.misclassified);
  EXPECT_EQ(a.phase_errors, b.phase_errors);
  ASSERT_EQ(r1.size(), r4.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    ASSERT_EQ(r1[i].shot, i);
    ASSERT_EQ(r1[i].n_o1, r4[i].n_o1);
    ASSERT_EQ(r1[i].n_o2, r4[i].n_o2);
  }
}

TEST(RunShots, SeedsChangeTheStream) {
  const auto state = evolve_lossless(PolarizationState::uniform(), at_kappa_alpha(1.5));
  const auto d1 = DetectorModel::perfect(DetectorPort::O1);
  const auto d2 = DetectorModel::perfect(DetectorPort::O2);
  std::vector<ShotRecord> a, b;
  run_shots(state, d1, d2, 1, 200, &a);
  run_shots(state, d1, d2, 2, 200, &b);
  int differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differ += a[i].n_o2 != b[i].n_o2;
  EXPECT_GT(differ, 0);
}

TEST(ShotCsv, HeaderAndRowFormat) {
  std::ostringstream os;
  write_shot_csv_header(os);
  write_shot_csv_row(os, 9, {3, 2, 5, Parity::Odd, Parity::Even, true});
  EXPECT_EQ(os.str(),
            "seed,shot,n_o1,n_o2,classified_parity,true_parity,misclassified\n"
            "9,3,2,5,odd,even,1\n");
}

}  // namespace
}  // namespace kerrgate
