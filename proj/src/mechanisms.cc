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

#include "userdp/mechanisms.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"
#include "userdp/errors.h"

namespace userdp {

absl::StatusOr<LaplaceScale> LaplaceScale::Create(double scale) {
  if (!std::isfinite(scale) || scale <= 0) {
    return ArgumentError(absl::StrFormat(
        "Laplace scale must be finite and positive, got %g", scale));
  }
  return LaplaceScale(scale);
}

double LaplaceInverseCdf(double u, double scale) {
  const double centered = u - 0.5;
  const double sign = centered < 0 ? -1.0 : 1.0;
  return -scale * sign * std::log1p(-2.0 * std::abs(centered));
}

double SampleLaplace(const LaplaceScale& scale, RandomSource& rng) {
  return LaplaceInverseCdf(rng.UniformOpen(), scale.value());
}

absl::StatusOr<Vector> ExponentialMechanismProbabilities(
    std::span<const double> costs, double epsilon) {
  if (costs.empty()) return ArgumentError("cost list is empty");
  if (!std::isfinite(epsilon) || epsilon <= 0) {
    return ArgumentError("epsilon must be finite and positive");
  }
  for (double c : costs) {
    if (!std::isfinite(c)) return ArgumentError("costs must be finite");
  }
  const double min_cost = *std::min_element(costs.begin(), costs.end());
  Vector weights(costs.size());
  double total = 0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    weights[i] = std::exp(-epsilon * (costs[i] - min_cost) / 2.0);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

absl::StatusOr<std::size_t> ExponentialMechanism(std::span<const double> costs,
                                                 double epsilon,
                                                 RandomSource& rng) {
  USERDP_ASSIGN_OR_RETURN(const Vector probabilities,
                          ExponentialMechanismProbabilities(costs, epsilon));
  const double u = rng.Uniform();
  double cumulative = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  // Rounding can leave the cumulative sum a hair below one.
  for (std::size_t i = probabilities.size(); i-- > 0;) {
    if (probabilities[i] > 0) return i;
  }
  return probabilities.size() - 1;
}

absl::StatusOr<CompositionPlan> CompositionPlan::Create(std::int64_t k,
                                                        double eps0,
                                                        double delta0,
                                                        double delta_slack) {
  if (k < 1) return ArgumentError("composition needs k >= 1");
  if (!(eps0 >= 0) || !(delta0 >= 0) || !(delta_slack >= 0) ||
      !std::isfinite(eps0)) {
    return ArgumentError("per-step budgets must be non-negative");
  }
  return CompositionPlan{k, eps0, delta0, delta_slack};
}

absl::StatusOr<PrivacyBudget> StrongComposition(const CompositionPlan& plan) {
  USERDP_RETURN_IF_ERROR(
      CompositionPlan::Create(plan.k, plan.eps0, plan.delta0, plan.delta_slack)
          .status());
  const double k = static_cast<double>(plan.k);
  if (plan.delta_slack == 0) {
    if (plan.k > 1) {
      return ArgumentError(
          "strong composition of k > 1 steps needs delta' > 0");
    }
    return PrivacyBudget{plan.eps0, plan.delta0};
  }
  const double eps =
      k * plan.eps0 * std::expm1(plan.eps0) +
      std::sqrt(2.0 * k * std::log(1.0 / plan.delta_slack)) * plan.eps0;
  return PrivacyBudget{eps, k * plan.delta0 + plan.delta_slack};
}

absl::StatusOr<CompositionPlan> PerStepBudgetForQueries(
    const PrivacyBudget& total, std::int64_t k) {
  USERDP_RETURN_IF_ERROR(total.Validate());
  if (total.delta == 0) {
    return UnsupportedError(
        "adaptive query budgets require delta > 0 (no pure-DP composition)");
  }
  if (k < 1) return ArgumentError("query count must be at least 1");
  const double kk = static_cast<double>(k);
  const double eps0 =
      total.epsilon / (2.0 * std::sqrt(2.0 * kk * std::log(2.0 / total.delta)));
  return CompositionPlan{k, eps0, total.delta / (2.0 * kk), total.delta / 2.0};
}

}  // namespace userdp
