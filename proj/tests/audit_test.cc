// Copyright 2026 The userdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "userdp/audit.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace userdp {
namespace {

using testing::ScalarDataset;
using testing::Unwrap;

TEST(WilsonTest, KnownIntervals) {
  const WilsonInterval half = Wilson(50, 100, 1.96);
  EXPECT_NEAR(half.lo, 0.4038, 1e-4);
  EXPECT_NEAR(half.hi, 0.5962, 1e-4);
  const WilsonInterval none = Wilson(0, 100, 1.96);
  EXPECT_DOUBLE_EQ(none.lo, 0.0);
  EXPECT_NEAR(none.hi, 1.96 * 1.96 / (100 + 1.96 * 1.96), 1e-12);
  const WilsonInterval all = Wilson(100, 100, 1.96);
  EXPECT_NEAR(all.lo, 100 / (100 + 1.96 * 1.96), 1e-12);
  EXPECT_DOUBLE_EQ(all.hi, 1.0);
}

TEST(DpRatioAuditTest, ConstantMechanismPasses) {
  const UserDataset a = ScalarDataset({0.1, 0.2, 0.3});
  const UserDataset b = ScalarDataset({0.1, 0.2, 0.9});
  AuditOptions opts;
  opts.trials = 20000;
  const AuditReport r = Unwrap(DpRatioAudit(
      "constant",
      [](const UserDataset&, RandomSource&) -> absl::StatusOr<double> {
        return 0.5;
      },
      a, b, 0.5, 0.0, opts));
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_ratio, 1.0 + 1e-12);
  EXPECT_NEAR(r.threshold, 1.25 * std::exp(0.5), 1e-12);
}

TEST(DpRatioAuditTest, NoNoiseMeanFails) {
  const UserDataset a = ScalarDataset({0.1, 0.2, 0.3, 0.4});
  const UserDataset b = ScalarDataset({0.1, 0.2, 0.3, 0.9});
  AuditOptions opts;
  opts.trials = 5000;
  const AuditReport r = Unwrap(
      DpRatioAudit("no_noise", NoNoiseMeanMechanism(), a, b, 1.0, 0.0, opts));
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_ratio, r.threshold);
}

TEST(DpRatioAuditTest, WinsorizedMeanPasses) {
  const UserDataset a =
      ScalarDataset({0.05, 0.08, 0.10, 0.12, 0.15, 0.18, 0.20, 0.22});
  const UserDataset b =
      ScalarDataset({0.05, 0.08, 0.10, 0.12, 0.15, 0.18, 0.20, 0.9});
  AuditOptions opts;
  opts.trials = 50000;
  opts.seed = 3;
  const AuditReport r = Unwrap(DpRatioAudit(
      "winsorized_mean_1d", WinsorizedMean1DMechanism(1.0, 0.1, 1.0), a, b, 1.0,
      0.0, opts));
  EXPECT_TRUE(r.pass) << r.max_ratio;
  EXPECT_EQ(r.trials, 50000);
}

TEST(DpRatioAuditTest, Deterministic) {
  const UserDataset a = ScalarDataset({0.1, 0.12, 0.15, 0.2});
  const UserDataset b = ScalarDataset({0.1, 0.12, 0.15, 0.9});
  AuditOptions opts;
  opts.trials = 3000;
  opts.seed = 9;
  const auto mech = PrivateRangeMechanism(1.0, 0.1, 1.0);
  const double x =
      Unwrap(DpRatioAudit("r", mech, a, b, 1.0, 0, opts)).max_ratio;
  opts.jobs = 4;
  const double y =
      Unwrap(DpRatioAudit("r", mech, a, b, 1.0, 0, opts)).max_ratio;
  EXPECT_EQ(x, y);
}

TEST(DpRatioAuditTest, Validation) {
  const UserDataset a = ScalarDataset({0.1, 0.2, 0.3});
  const UserDataset far = ScalarDataset({0.5, 0.6, 0.3});
  const auto mech = NoNoiseMeanMechanism();
  EXPECT_KIND(DpRatioAudit("x", mech, a, far, 1.0, 0.0), ErrorKind::kArgument);
  EXPECT_KIND(DpRatioAudit("x", mech, a, a, -1.0, 0.0), ErrorKind::kArgument);
  AuditOptions zero;
  zero.trials = 0;
  EXPECT_KIND(DpRatioAudit("x", mech, a, a, 1.0, 0.0, zero),
              ErrorKind::kArgument);
  EXPECT_KIND(DpRatioAudit("x", nullptr, a, a, 1.0, 0.0), ErrorKind::kArgument);
}

TEST(AuditReportJsonTest, Fields) {
  AuditReport r;
  r.mechanism = "private_range";
  r.epsilon = 1.0;
  r.trials = 10;
  r.max_ratio = 1.5;
  r.pass = true;
  const auto j = nlohmann::json::parse(AuditReportToJson(r));
  EXPECT_EQ(j["mechanism"], "private_range");
  EXPECT_EQ(j["eps"], 1.0);
  EXPECT_EQ(j["delta"], 0.0);
  EXPECT_EQ(j["trials"], 10);
  EXPECT_EQ(j["max_ratio"], 1.5);
  EXPECT_EQ(j["pass"], true);
}

TEST(OracleTest, ExpMech) {
  EXPECT_EQ(Unwrap(ExpMechOracle(Vector{0.0}, 1.0)), (Vector{1.0}));
  const Vector p = Unwrap(ExpMechOracle(Vector{4.0, 0.0}, 2.0));
  EXPECT_NEAR(p[0], std::exp(-4.0) / (1 + std::exp(-4.0)), 1e-15);
  EXPECT_NEAR(p[1], 1 / (1 + std::exp(-4.0)), 1e-15);
  EXPECT_KIND(ExpMechOracle(Vector{}, 1.0), ErrorKind::kArgument);
}

TEST(OracleTest, Hadamard) {
  EXPECT_EQ(Unwrap(HadamardOracle(1)), (std::vector<Vector>{{1.0}}));
  const auto h4 = Unwrap(HadamardOracle(4));
  const std::vector<Vector> want = {
      {1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}};
  EXPECT_EQ(h4, want);
  // Rows of H_16 are orthogonal with squared norm 16.
  const auto h16 = Unwrap(HadamardOracle(16));
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < 16; ++j) {
      EXPECT_DOUBLE_EQ(Dot(h16[i], h16[j]), i == j ? 16.0 : 0.0);
    }
  }
  EXPECT_KIND(HadamardOracle(3), ErrorKind::kArgument);
  EXPECT_KIND(HadamardOracle(32), ErrorKind::kArgument);
}

TEST(ScalingRegressionTest, RecoversExactPowerLaw) {
  std::vector<ScalingPoint> pts;
  for (double n : {100.0, 200.0, 400.0, 800.0}) {
    for (double m : {1.0, 4.0, 16.0}) {
      // Two trials per cell average to the exact value.
      const double e = 3.0 / (n * m * m);
      pts.push_back({n, m, 1.0, e * 0.5});
      pts.push_back({n, m, 1.0, e * 1.5});
    }
  }
  const ScalingFit fit = Unwrap(ScalingRegression(pts));
  EXPECT_EQ(fit.cells, 12u);
  ASSERT_EQ(fit.slopes.size(), 2u);
  EXPECT_NEAR(fit.slopes.at("n").slope, -1.0, 1e-10);
  EXPECT_NEAR(fit.slopes.at("m").slope, -2.0, 1e-10);
  EXPECT_NEAR(fit.slopes.at("n").std_error, 0.0, 1e-8);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-9);
  EXPECT_EQ(fit.slopes.count("eps"), 0u);
}

TEST(ScalingRegressionTest, RejectsDegenerateGrids) {
  EXPECT_KIND(ScalingRegression({}), ErrorKind::kArgument);
  EXPECT_KIND(ScalingRegression({{100, 1, 1, 0.1}, {100, 1, 1, 0.2}}),
              ErrorKind::kArgument);
  EXPECT_KIND(ScalingRegression({{100, 1, 1, 0.1}, {200, 1, 1, 0.2}}),
              ErrorKind::kArgument);
  EXPECT_KIND(ScalingRegression(
                  {{100, 1, 1, 0.1}, {200, 1, 1, -0.2}, {400, 1, 1, 0.1}}),
              ErrorKind::kArgument);
}

TEST(FitLogLogSlopeTest, SquareRootDecay) {
  const Vector x = {1, 4, 16, 64};
  Vector y;
  for (double v : x) y.push_back(2 / std::sqrt(v));
  EXPECT_NEAR(Unwrap(FitLogLogSlope(x, y)).slope, -0.5, 1e-12);
  EXPECT_KIND(FitLogLogSlope(Vector{1, 2}, Vector{1}), ErrorKind::kShape);
}

}  // namespace
}  // namespace userdp
