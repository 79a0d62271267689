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

#include "userdp/range.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/str_format.h"
#include "userdp/errors.h"
#include "userdp/mechanisms.h"

namespace userdp {
namespace {

constexpr double kBoundSlack = 1e-9;
// Keeps B / tau = 10.000000000000002 from producing an 11th sliver bin.
constexpr double kBinCountSlack = 1e-9;

}  // namespace

absl::StatusOr<RangeBins> RangeBins::Create(double tau, double range_bound) {
  if (!std::isfinite(tau) || tau <= 0) {
    return ArgumentError("tau must be finite and positive");
  }
  if (!std::isfinite(range_bound) || range_bound <= 0) {
    return ArgumentError("range bound must be finite and positive");
  }
  const double ratio = range_bound / tau;
  const auto count = static_cast<std::size_t>(
      std::max(1.0, std::ceil(ratio - kBinCountSlack)));
  return RangeBins(tau, range_bound, count);
}

double RangeBins::lower_edge(std::size_t k) const {
  return -bound_ + 2.0 * tau_ * static_cast<double>(k);
}

double RangeBins::upper_edge(std::size_t k) const {
  if (k + 1 == count_) return bound_;
  return std::min(bound_, lower_edge(k + 1));
}

double RangeBins::midpoint(std::size_t k) const {
  if (count_ == 1) return 0.0;
  return 0.5 * (lower_edge(k) + upper_edge(k));
}

std::size_t RangeBins::Snap(double x) const {
  if (count_ == 1) return 0;
  x = std::clamp(x, -bound_, bound_);
  const double raw = std::floor((x + bound_) / (2.0 * tau_));
  std::size_t k = raw <= 0 ? 0 : static_cast<std::size_t>(raw);
  k = std::min(k, count_ - 1);
  std::size_t best = k;
  double best_distance = std::abs(x - midpoint(k));
  if (k > 0) {
    const double d = std::abs(x - midpoint(k - 1));
    if (d <= best_distance) {
      best = k - 1;
      best_distance = d;
    }
  }
  if (k + 1 < count_) {
    const double d = std::abs(x - midpoint(k + 1));
    if (d < best_distance) best = k + 1;
  }
  return best;
}

Vector RangeCosts(std::span<const double> xs, const RangeBins& bins) {
  std::vector<std::size_t> counts(bins.size(), 0);
  for (double x : xs) ++counts[bins.Snap(x)];
  Vector costs(bins.size());
  std::size_t below = 0;
  const std::size_t n = xs.size();
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const std::size_t above = n - below - counts[k];
    costs[k] = static_cast<double>(std::max(below, above));
    below += counts[k];
  }
  return costs;
}

absl::Status ValidateScalarInputs(std::span<const double> xs, double epsilon,
                                  double tau, double range_bound) {
  if (xs.empty()) return ArgumentError("input list is empty");
  if (!std::isfinite(epsilon) || epsilon <= 0) {
    return ArgumentError("epsilon must be finite and positive");
  }
  if (!std::isfinite(tau) || tau <= 0) {
    return ArgumentError("tau must be finite and positive");
  }
  if (!std::isfinite(range_bound) || range_bound <= 0) {
    return ArgumentError("range bound must be finite and positive");
  }
  const double limit = range_bound * (1 + kBoundSlack) + kBoundSlack;
  for (double x : xs) {
    if (!std::isfinite(x) || std::abs(x) > limit) {
      return ArgumentError(absl::StrFormat("input %g lies outside [-%g, %g]", x,
                                           range_bound, range_bound));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<RangeInterval> PrivateRange(std::span<const double> xs,
                                           double epsilon, double tau,
                                           double range_bound,
                                           RandomSource& rng) {
  USERDP_RETURN_IF_ERROR(ValidateScalarInputs(xs, epsilon, tau, range_bound));
  USERDP_ASSIGN_OR_RETURN(const RangeBins bins,
                          RangeBins::Create(tau, range_bound));
  double center = 0.0;
  if (bins.size() > 1) {
    const Vector costs = RangeCosts(xs, bins);
    USERDP_ASSIGN_OR_RETURN(const std::size_t pick,
                            ExponentialMechanism(costs, epsilon, rng));
    center = bins.midpoint(pick);
  }
  return RangeInterval{center - 2.0 * tau, center + 2.0 * tau};
}

}  // namespace userdp
