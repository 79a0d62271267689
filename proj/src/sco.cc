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

#include "userdp/sco.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_format.h"
#include "userdp/errors.h"
#include "userdp/instrumentation.h"

namespace userdp {

absl::StatusOr<PhasePlan> BuildPhasePlan(std::size_t n, std::size_t m,
                                         std::size_t d, double epsilon,
                                         double lipschitz, double sigma,
                                         double radius, double lipschitz_low) {
  if (n == 0 || m == 0 || d == 0) {
    return ArgumentError("n, m and d must be positive");
  }
  for (double v : {epsilon, lipschitz, sigma, radius, lipschitz_low}) {
    if (!std::isfinite(v) || v <= 0) {
      return ArgumentError("eps, G, sigma, R and G_low must be positive");
    }
  }
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double dd = static_cast<double>(d);
  PhasePlan plan;
  const double arg = lipschitz * nn * std::sqrt(mm) * epsilon / (sigma * dd);
  if (arg <= 1.0) {
    plan.t_max = 1;
    plan.warnings.push_back(absl::StrFormat(
        "G n sqrt(m) eps / (sigma d) = %g <= 1; using a single phase", arg));
  } else {
    plan.t_max = static_cast<std::size_t>(std::ceil(std::log2(arg)));
  }
  plan.lambda0 =
      std::sqrt(lipschitz * lipschitz_low / (nn * mm) +
                sigma * sigma * dd * dd / (nn * nn * mm * epsilon * epsilon)) /
      radius;
  std::size_t next = 0;
  for (std::size_t t = 1; t <= plan.t_max; ++t) {
    const std::size_t users = t < 64 ? (n >> t) : 0;
    if (users == 0) {
      return PlanInfeasibleError(absl::StrFormat(
          "phase %d of %d gets floor(%d / 2^%d) = 0 users; more users or a "
          "larger sigma are needed",
          t, plan.t_max, n, t));
    }
    Phase phase;
    phase.index = t;
    phase.users = users;
    phase.lambda = std::ldexp(plan.lambda0, static_cast<int>(2 * t));
    phase.begin = next;
    phase.end = next + users;
    next = phase.end;
    plan.phases.push_back(phase);
  }
  return plan;
}

namespace instrumented {

absl::StatusOr<PhasedErmTrace> PhasedErm(const UserDataset& data,
                                         std::shared_ptr<const LossModel> model,
                                         const FeasibleSet& set,
                                         const PrivacyBudget& budget,
                                         double sigma, RandomSource& rng) {
  if (model == nullptr) return ArgumentError("loss model is null");
  if (!model->convex()) return ArgumentError("phased ERM needs a convex loss");
  USERDP_RETURN_IF_ERROR(budget.Validate());
  const double n = static_cast<double>(data.num_users());
  if (!(budget.delta > 0) || budget.delta > 1.0 / (n * n)) {
    return ArgumentError(
        absl::StrFormat("phased ERM needs 0 < delta <= 1/n^2 = %g, got %g",
                        1.0 / (n * n), budget.delta));
  }
  USERDP_ASSIGN_OR_RETURN(const std::size_t m, data.ItemsPerUser());
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return ArgumentError("sigma must be finite and positive");
  }
  const std::size_t d = model->dim();
  const double g = model->lipschitz();
  const double g_low = std::min(g, sigma * std::sqrt(static_cast<double>(d)));
  PhasedErmTrace trace;
  USERDP_ASSIGN_OR_RETURN(trace.result.plan,
                          BuildPhasePlan(data.num_users(), m, d, budget.epsilon,
                                         g, sigma, set.radius(), g_low));
  trace.result.warnings = trace.result.plan.warnings;

  const double h = model->smoothness();
  const double r = set.radius();
  const double eps = budget.epsilon;
  const double mm = static_cast<double>(m);
  const double admissible =
      std::min(std::cbrt(static_cast<double>(d * d) * mm * h * h * r * r /
                         (g * g_low * std::pow(eps, 4))),
               h * r * std::sqrt(mm) / (sigma * eps));
  if (n < admissible) {
    trace.result.warnings.push_back(
        absl::StrFormat("n = %d is below the admissibility threshold %.1f",
                        data.num_users(), admissible));
  }

  Vector anchor = set.center();
  for (const Phase& phase : trace.result.plan.phases) {
    USERDP_ASSIGN_OR_RETURN(const UserDataset part,
                            data.Slice(phase.begin, phase.end));
    std::vector<std::size_t> touched(phase.end - phase.begin);
    std::iota(touched.begin(), touched.end(), phase.begin);
    trace.access_log.push_back(std::move(touched));
    USERDP_ASSIGN_OR_RETURN(
        const auto regularized,
        RegularizedLoss::Create(model, phase.lambda, anchor, set.diameter()));
    RandomSource phase_rng = rng.Split();
    WinsorizedFirstOrderOptions options;
    options.start = anchor;
    USERDP_ASSIGN_OR_RETURN(
        LocalizationTrace inner,
        instrumented::LocalizeStronglyConvex(part, *regularized, set, budget,
                                             sigma, phase_rng, options));
    for (auto& w : inner.run.warnings) {
      trace.result.warnings.push_back(
          absl::StrFormat("phase %d: %s", phase.index, w));
    }
    trace.anchors.push_back(anchor);
    anchor = inner.run.theta;
    trace.phase_outputs.push_back(anchor);
  }
  trace.result.theta = std::move(anchor);
  return trace;
}

}  // namespace instrumented

absl::StatusOr<PhasedErmResult> PhasedErm(
    const UserDataset& data, std::shared_ptr<const LossModel> model,
    const FeasibleSet& set, const PrivacyBudget& budget, double sigma,
    RandomSource& rng) {
  USERDP_ASSIGN_OR_RETURN(
      instrumented::PhasedErmTrace trace,
      instrumented::PhasedErm(data, std::move(model), set, budget, sigma, rng));
  return std::move(trace.result);
}

}  // namespace userdp
