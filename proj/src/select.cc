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

#include "userdp/select.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "absl/strings/str_format.h"
#include "userdp/errors.h"
#include "userdp/mean.h"

namespace userdp {

absl::StatusOr<HypothesisClass> HypothesisClass::Create(
    std::vector<Vector> parameters, std::shared_ptr<const LossModel> loss,
    double bound) {
  if (parameters.empty()) return ArgumentError("hypothesis class is empty");
  if (loss == nullptr) return ArgumentError("loss model is null");
  if (!std::isfinite(bound) || bound <= 0) {
    return ArgumentError("loss bound must be finite and positive");
  }
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    if (parameters[k].size() != loss->dim()) {
      return ShapeError(
          absl::StrFormat("hypothesis %d has length %d, expected %d", k,
                          parameters[k].size(), loss->dim()));
    }
  }
  return HypothesisClass(std::move(parameters), std::move(loss), bound);
}

absl::StatusOr<Vector> HypothesisClass::PerUserLosses(const UserDataset& data,
                                                      std::size_t k) const {
  if (k >= parameters_.size()) return ArgumentError("hypothesis out of range");
  if (loss_->item_dim() != data.dim()) {
    return ShapeError("loss item length does not match the data");
  }
  const double limit = bound_ * (1 + 1e-9);
  Vector out;
  out.reserve(data.num_users());
  for (const auto& user : data.users()) {
    double total = 0;
    for (const auto& item : user.items) {
      const double l = loss_->Evaluate(parameters_[k], item);
      if (!std::isfinite(l) || std::abs(l) > limit) {
        return ArgumentError(absl::StrFormat(
            "loss %g of hypothesis %d exceeds the bound %g", l, k, bound_));
      }
      total += l;
    }
    out.push_back(total / static_cast<double>(user.items.size()));
  }
  return out;
}

absl::StatusOr<double> DefaultTauForSelection(double bound, std::size_t k,
                                              std::size_t n, std::size_t m,
                                              double alpha) {
  if (!(bound > 0) || k == 0 || n == 0 || m == 0) {
    return ArgumentError("B, K, n and m must be positive");
  }
  if (!(alpha > 0 && alpha <= 1))
    return ArgumentError("alpha must be in (0, 1]");
  const double kn = static_cast<double>(k) * static_cast<double>(n);
  return bound / 2.0 *
         std::sqrt((std::log(kn) + std::log(10.0 / alpha)) /
                   static_cast<double>(m));
}

absl::StatusOr<double> DefaultStopProbability(std::size_t k, double alpha) {
  if (k == 0) return ArgumentError("K must be positive");
  if (!(alpha > 0 && alpha <= 1))
    return ArgumentError("alpha must be in (0, 1]");
  return alpha / static_cast<double>(k);
}

std::int64_t DefaultTrialCap(std::size_t k, double gamma) {
  const double cap = std::ceil(10.0 * (static_cast<double>(k) / gamma) *
                               std::log(1.0 / gamma));
  if (!(cap >= 1)) return 1;
  if (cap > 1e15) return static_cast<std::int64_t>(1e15);
  return static_cast<std::int64_t>(cap);
}

namespace instrumented {

absl::StatusOr<SelectionTrace> PrivateSelect(const UserDataset& data,
                                             const HypothesisClass& hypotheses,
                                             double epsilon, double gamma_stop,
                                             double tau, std::int64_t trial_cap,
                                             RandomSource& rng) {
  if (!std::isfinite(epsilon) || epsilon <= 0) {
    return ArgumentError("epsilon must be finite and positive");
  }
  if (!(gamma_stop > 0 && gamma_stop <= 1)) {
    return ArgumentError("stopping probability must be in (0, 1]");
  }
  if (!std::isfinite(tau) || tau <= 0) {
    return ArgumentError("tau must be finite and positive");
  }
  if (data.num_users() == 0) return ArgumentError("dataset has no users");
  const std::int64_t cap = trial_cap > 0
                               ? trial_cap
                               : DefaultTrialCap(hypotheses.size(), gamma_stop);
  std::map<std::size_t, Vector> losses;
  SelectionTrace trace;
  bool stopped = false;
  while (!stopped && trace.result.rounds < cap) {
    const std::size_t j = rng.UniformIndex(hypotheses.size());
    auto it = losses.find(j);
    if (it == losses.end()) {
      USERDP_ASSIGN_OR_RETURN(Vector l, hypotheses.PerUserLosses(data, j));
      it = losses.emplace(j, std::move(l)).first;
    }
    USERDP_ASSIGN_OR_RETURN(const double v,
                            WinsorizedMean1D(it->second, epsilon / 3.0, tau,
                                             hypotheses.bound(), rng));
    trace.draws.emplace_back(j, v);
    ++trace.result.rounds;
    stopped = rng.Bernoulli(gamma_stop);
  }
  trace.result.capped = !stopped;
  const auto best = std::min_element(
      trace.draws.begin(), trace.draws.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });
  trace.result.index = best->first;
  trace.result.value = best->second;
  return trace;
}

}  // namespace instrumented

absl::StatusOr<SelectionResult> PrivateSelect(
    const UserDataset& data, const HypothesisClass& hypotheses, double epsilon,
    double gamma_stop, double tau, std::int64_t trial_cap, RandomSource& rng) {
  USERDP_ASSIGN_OR_RETURN(
      const instrumented::SelectionTrace trace,
      instrumented::PrivateSelect(data, hypotheses, epsilon, gamma_stop, tau,
                                  trial_cap, rng));
  return trace.result;
}

absl::StatusOr<SelectionResult> SelectFromCover(
    const UserDataset& data, std::vector<Vector> cover,
    std::shared_ptr<const LossModel> loss, double bound, double epsilon,
    double alpha, RandomSource& rng) {
  USERDP_ASSIGN_OR_RETURN(
      const HypothesisClass hypotheses,
      HypothesisClass::Create(std::move(cover), std::move(loss), bound));
  USERDP_ASSIGN_OR_RETURN(const std::size_t m, data.ItemsPerUser());
  USERDP_ASSIGN_OR_RETURN(const double tau,
                          DefaultTauForSelection(bound, hypotheses.size(),
                                                 data.num_users(), m, alpha));
  USERDP_ASSIGN_OR_RETURN(const double gamma,
                          DefaultStopProbability(hypotheses.size(), alpha));
  return PrivateSelect(data, hypotheses, epsilon, gamma, tau, 0, rng);
}

}  // namespace userdp
