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

// Phased ERM for stochastic convex optimization with user-level privacy.
//
// Phase t solves a regularized ERM on n / 2^t fresh users, anchored at the
// previous phase's output, with the localization schedule of optimize.h.
// Users left over after the last phase are never read.

#ifndef USERDP_SCO_H_
#define USERDP_SCO_H_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "userdp/core.h"
#include "userdp/optimize.h"

namespace userdp {

struct Phase {
  std::size_t index = 0;  // t, starting at 1
  std::size_t users = 0;  // n_t = floor(n / 2^t)
  double lambda = 0.0;    // 4^t lambda
  // Users [begin, end) of the full dataset.
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct PhasePlan {
  std::size_t t_max = 0;
  double lambda0 = 0.0;
  std::vector<Phase> phases;
  std::vector<std::string> warnings;
};

// T = ceil(log2(G n sqrt(m) eps / (sigma d))), at least 1, and
// lambda = sqrt(G G_low / (n m) + sigma^2 d^2 / (n^2 m eps^2)) / R.
// Fails with a plan-infeasible error when some phase would get no users.
absl::StatusOr<PhasePlan> BuildPhasePlan(std::size_t n, std::size_t m,
                                         std::size_t d, double epsilon,
                                         double lipschitz, double sigma,
                                         double radius, double lipschitz_low);

struct PhasedErmResult {
  Vector theta;
  PhasePlan plan;
  std::vector<std::string> warnings;
};

// Requires a convex loss, equal per-user item counts and delta <= 1/n^2.
absl::StatusOr<PhasedErmResult> PhasedErm(
    const UserDataset& data, std::shared_ptr<const LossModel> model,
    const FeasibleSet& set, const PrivacyBudget& budget, double sigma,
    RandomSource& rng);

namespace instrumented {

struct PhasedErmTrace {
  PhasedErmResult result;
  // Output of each phase, theta_1..theta_T.
  std::vector<Vector> phase_outputs;
  // Anchor of each phase's regularizer.
  std::vector<Vector> anchors;
  // Dataset indices of the users whose records each phase read.
  std::vector<std::vector<std::size_t>> access_log;
};

absl::StatusOr<PhasedErmTrace> PhasedErm(const UserDataset& data,
                                         std::shared_ptr<const LossModel> model,
                                         const FeasibleSet& set,
                                         const PrivacyBudget& budget,
                                         double sigma, RandomSource& rng);

}  // namespace instrumented

}  // namespace userdp

#endif  // USERDP_SCO_H_
