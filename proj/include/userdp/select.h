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

// Pure-DP learning over a finite hypothesis class by random-stopping private
// selection. Each round draws a hypothesis uniformly, releases its winsorized
// mean per-user loss at eps/3, and stops with probability gamma; the draw
// with the smallest released value wins.

#ifndef USERDP_SELECT_H_
#define USERDP_SELECT_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "userdp/core.h"
#include "userdp/optimize.h"

namespace userdp {

// K candidate parameters sharing one loss with |l| <= bound on the data.
class HypothesisClass {
 public:
  static absl::StatusOr<HypothesisClass> Create(
      std::vector<Vector> parameters, std::shared_ptr<const LossModel> loss,
      double bound);

  std::size_t size() const { return parameters_.size(); }
  const Vector& parameter(std::size_t k) const { return parameters_[k]; }
  const LossModel& loss() const { return *loss_; }
  double bound() const { return bound_; }

  // L(theta_k; S_u) for every user u. Fails if an item loss exceeds the
  // bound.
  absl::StatusOr<Vector> PerUserLosses(const UserDataset& data,
                                       std::size_t k) const;

 private:
  HypothesisClass(std::vector<Vector> parameters,
                  std::shared_ptr<const LossModel> loss, double bound)
      : parameters_(std::move(parameters)),
        loss_(std::move(loss)),
        bound_(bound) {}

  std::vector<Vector> parameters_;
  std::shared_ptr<const LossModel> loss_;
  double bound_;
};

// tau = (B / 2) sqrt((ln(K n) + ln(10 / alpha)) / m).
absl::StatusOr<double> DefaultTauForSelection(double bound, std::size_t k,
                                              std::size_t n, std::size_t m,
                                              double alpha);

// gamma = alpha / K.
absl::StatusOr<double> DefaultStopProbability(std::size_t k, double alpha);

// max(1, ceil(10 (K / gamma) ln(1 / gamma))).
std::int64_t DefaultTrialCap(std::size_t k, double gamma);

struct SelectionResult {
  std::size_t index = 0;  // 0-based
  double value = 0.0;
  std::int64_t rounds = 0;
  // True when the run hit the trial cap before the stopping coin came up.
  bool capped = false;
};

// trial_cap <= 0 selects DefaultTrialCap.
absl::StatusOr<SelectionResult> PrivateSelect(
    const UserDataset& data, const HypothesisClass& hypotheses, double epsilon,
    double gamma_stop, double tau, std::int64_t trial_cap, RandomSource& rng);

// Selection over an externally supplied cover with the default tau and
// stopping probability for confidence alpha.
absl::StatusOr<SelectionResult> SelectFromCover(
    const UserDataset& data, std::vector<Vector> cover,
    std::shared_ptr<const LossModel> loss, double bound, double epsilon,
    double alpha, RandomSource& rng);

namespace instrumented {

struct SelectionTrace {
  SelectionResult result;
  // Every recorded (J_t, V_t) pair in draw order.
  std::vector<std::pair<std::size_t, double>> draws;
};

absl::StatusOr<SelectionTrace> PrivateSelect(const UserDataset& data,
                                             const HypothesisClass& hypotheses,
                                             double epsilon, double gamma_stop,
                                             double tau, std::int64_t trial_cap,
                                             RandomSource& rng);

}  // namespace instrumented

}  // namespace userdp

#endif  // USERDP_SELECT_H_
