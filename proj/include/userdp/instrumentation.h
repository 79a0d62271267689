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

// Test and audit hooks. Every function here releases raw-data diagnostics
// (clean events, pre-noise means) alongside the private output and is
// therefore NOT differentially private. Production callers use the plain
// entry points in mean.h, optimize.h, sco.h and select.h.
//
// Given the same RandomSource state, each instrumented call consumes
// randomness identically to its public counterpart and returns the same
// value.

#ifndef USERDP_INSTRUMENTATION_H_
#define USERDP_INSTRUMENTATION_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "userdp/core.h"
#include "userdp/mean.h"
#include "userdp/optimize.h"
#include "userdp/range.h"

namespace userdp::instrumented {

struct ScalarEstimate {
  double value = 0.0;
  // True iff no input was moved by clipping.
  bool clean_event = false;
  double clipped_mean = 0.0;
  double raw_mean = 0.0;
  double noise = 0.0;
  RangeInterval interval;
};

struct MeanEstimate {
  Vector value;
  bool clean_event = false;
};

absl::StatusOr<ScalarEstimate> WinsorizedMean1D(std::span<const double> xs,
                                                double epsilon, double tau,
                                                double range_bound,
                                                RandomSource& rng);

absl::StatusOr<MeanEstimate> WinsorizedMeanHighD(std::span<const Vector> xs,
                                                 double epsilon, double delta,
                                                 double tau, double range_bound,
                                                 double gamma,
                                                 RandomSource& rng);

absl::StatusOr<MeanEstimate> UserLevelBoundedMean(const UserDataset& data,
                                                  const PrivacyBudget& budget,
                                                  double gamma,
                                                  RandomSource& rng);

class SessionAccess {
 public:
  static absl::StatusOr<MeanEstimate> Answer(AdaptiveQuerySession& session,
                                             const VectorQuery& query,
                                             double tau);
};

struct FirstOrderTrace {
  Vector theta;
  StepBudget step_budget;
  // Points at which gradients were privately averaged, in order.
  std::vector<Vector> queried;
  // Clean event of each step's mean estimate.
  std::vector<bool> clean_events;
  std::vector<std::string> warnings;
};

absl::StatusOr<FirstOrderTrace> WinsorizedFirstOrder(
    const UserDataset& data, const LossModel& model, const FeasibleSet& set,
    std::size_t steps, const PrivacyBudget& budget, double tau, double gamma,
    Variant variant, RandomSource& rng,
    const WinsorizedFirstOrderOptions& options = {});

struct LocalizationTrace {
  LocalizationPlan plan;
  FirstOrderTrace run;
};

absl::StatusOr<LocalizationTrace> LocalizeStronglyConvex(
    const UserDataset& data, const LossModel& model, const FeasibleSet& set,
    const PrivacyBudget& budget, double sigma, RandomSource& rng,
    const WinsorizedFirstOrderOptions& options = {});

}  // namespace userdp::instrumented

#endif  // USERDP_INSTRUMENTATION_H_
