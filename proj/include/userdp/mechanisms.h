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

// Noise primitives and composition arithmetic.
//
// Every logarithm in the budget formulas below is the natural logarithm.

#ifndef USERDP_MECHANISMS_H_
#define USERDP_MECHANISMS_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "userdp/core.h"

namespace userdp {

// Scale b of the Laplace law with density proportional to exp(-|x| / b).
class LaplaceScale {
 public:
  static absl::StatusOr<LaplaceScale> Create(double scale);
  double value() const { return scale_; }

 private:
  explicit LaplaceScale(double scale) : scale_(scale) {}
  double scale_;
};

// Inverse CDF of Lap(scale) evaluated at u in (0, 1).
double LaplaceInverseCdf(double u, double scale);

// One draw from Lap(scale) by inversion of a single uniform.
double SampleLaplace(const LaplaceScale& scale, RandomSource& rng);

// Selection probabilities exp(-eps * c_i / 2) / Z, computed after shifting
// every cost by the minimum.
absl::StatusOr<Vector> ExponentialMechanismProbabilities(
    std::span<const double> costs, double epsilon);

// Samples index i with probability exp(-eps * costs[i] / 2) / Z.
absl::StatusOr<std::size_t> ExponentialMechanism(std::span<const double> costs,
                                                 double epsilon,
                                                 RandomSource& rng);

// k adaptively composed (eps0, delta0)-DP steps with slack delta_slack.
struct CompositionPlan {
  std::int64_t k = 0;
  double eps0 = 0.0;
  double delta0 = 0.0;
  double delta_slack = 0.0;

  static absl::StatusOr<CompositionPlan> Create(std::int64_t k, double eps0,
                                                double delta0,
                                                double delta_slack);
};

// Advanced composition:
//   eps = k eps0 (e^eps0 - 1) + sqrt(2 k ln(1/delta_slack)) eps0,
//   delta = k delta0 + delta_slack.
// A single step with zero slack composes to itself.
absl::StatusOr<PrivacyBudget> StrongComposition(const CompositionPlan& plan);

// Per-query budget for k adaptive queries under a total (eps, delta):
//   eps0 = eps / (2 sqrt(2 k ln(2/delta))), delta0 = delta / (2k),
//   delta_slack = delta / 2.
// Pure DP (delta == 0) is unsupported.
absl::StatusOr<CompositionPlan> PerStepBudgetForQueries(
    const PrivacyBudget& total, std::int64_t k);

}  // namespace userdp

#endif  // USERDP_MECHANISMS_H_
