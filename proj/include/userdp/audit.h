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

// Empirical checks: a statistical DP ratio audit on small neighboring
// datasets, brute-force reference implementations, and log-log scaling fits.
//
// Nothing in the estimator modules depends on this header.

#ifndef USERDP_AUDIT_H_
#define USERDP_AUDIT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "userdp/core.h"

namespace userdp {

// A randomized mechanism with a scalar (or scalar-encoded) output.
using ScalarMechanism =
    std::function<absl::StatusOr<double>(const UserDataset&, RandomSource&)>;

struct AuditOptions {
  std::int64_t trials = 100000;
  std::size_t bins = 64;
  // Two-sided normal quantile of the Wilson intervals (99%).
  double z = 2.5758293035489004;
  double slack = 1.25;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct AuditReport {
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t trials = 0;
  // max over bins and both directions of
  // (WilsonLower(p) - delta) / WilsonUpper(q).
  double max_ratio = 0.0;
  double threshold = 0.0;  // slack * e^eps
  bool pass = false;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};
WilsonInterval Wilson(std::int64_t successes, std::int64_t trials, double z);

// Runs the mechanism `trials` times on each of the neighboring datasets a and
// b, histograms both output samples over `bins` equal-width bins spanning the
// pooled range plus one overflow bin on each side, and compares the bin
// frequencies. Non-neighboring inputs give an argument error.
absl::StatusOr<AuditReport> DpRatioAudit(const std::string& name,
                                         const ScalarMechanism& mechanism,
                                         const UserDataset& a,
                                         const UserDataset& b, double epsilon,
                                         double delta,
                                         const AuditOptions& options = {});

// {"mechanism", "eps", "delta", "trials", "max_ratio", "pass"}.
std::string AuditReportToJson(const AuditReport& report);

// Dense Sylvester Hadamard matrix of order d (power of two, d <= 16), built
// by the block recursion H_2k = [[H_k, H_k], [H_k, -H_k]].
absl::StatusOr<std::vector<Vector>> HadamardOracle(std::size_t d);

// exp(-eps c_i / 2) / sum_j exp(-eps c_j / 2) without any shifting.
absl::StatusOr<Vector> ExpMechOracle(const Vector& costs, double epsilon);

// One observation of an experiment grid.
struct ScalingPoint {
  double n = 0.0;
  double m = 0.0;
  double epsilon = 0.0;
  double error = 0.0;
};

struct SlopeEstimate {
  double slope = 0.0;
  double std_error = 0.0;
};

struct ScalingFit {
  double intercept = 0.0;
  // Keyed by "n", "m", "eps"; only axes that vary in the grid appear.
  std::map<std::string, SlopeEstimate> slopes;
  std::size_t cells = 0;
};

// Averages points sharing (n, m, eps), then fits
// ln(error) = a + sum_axis b_axis ln(axis) by least squares. Each varying
// axis needs at least three distinct values; a grid with no varying axis or
// a non-positive value is an argument error.
absl::StatusOr<ScalingFit> ScalingRegression(
    const std::vector<ScalingPoint>& points);

// Single-axis log-log fit of y against x.
absl::StatusOr<SlopeEstimate> FitLogLogSlope(const Vector& x, const Vector& y);

// Mechanisms exercised by the standard audit. Each reads one scalar per user
// (the mean of the user's one-dimensional items).
ScalarMechanism PrivateRangeMechanism(double epsilon, double tau, double bound);
ScalarMechanism WinsorizedMean1DMechanism(double epsilon, double tau,
                                          double bound);
// Encodes the selected index of a K-hypothesis class on the real line; the
// losses are |theta_k - x| for K evenly spaced scalar hypotheses in [-1, 1].
ScalarMechanism PrivateSelectMechanism(double epsilon, std::size_t k,
                                       double gamma, double tau);
// The exact mean with no noise; not private.
ScalarMechanism NoNoiseMeanMechanism();

}  // namespace userdp

#endif  // USERDP_AUDIT_H_
