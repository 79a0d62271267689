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

// Private range localization: an exponential-mechanism approximate median
// over a grid of width-2*tau bins covering [-B, B], returned as an interval
// of width 4*tau around the selected bin midpoint.
//
// The full grid of ceil(B / tau) bins is scanned, so the cost is
// O(n + B / tau) rather than logarithmic in B / tau.

#ifndef USERDP_RANGE_H_
#define USERDP_RANGE_H_

#include <cstddef>
#include <span>

#include "absl/status/statusor.h"
#include "userdp/core.h"

namespace userdp {

struct RangeInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool Contains(double x) const { return lo <= x && x <= hi; }
};

// Bin k covers [-B + 2 tau k, -B + 2 tau (k + 1)) except the last, which is
// closed at B and may be shorter. When tau >= B there is a single bin [-B, B]
// with midpoint 0.
class RangeBins {
 public:
  static absl::StatusOr<RangeBins> Create(double tau, double range_bound);

  std::size_t size() const { return count_; }
  double tau() const { return tau_; }
  double range_bound() const { return bound_; }
  double lower_edge(std::size_t k) const;
  double upper_edge(std::size_t k) const;
  double midpoint(std::size_t k) const;

  // Index of the midpoint nearest to x (x is clamped to [-B, B] first).
  // Exact ties go to the lower midpoint.
  std::size_t Snap(double x) const;

 private:
  RangeBins(double tau, double bound, std::size_t count)
      : tau_(tau), bound_(bound), count_(count) {}

  double tau_;
  double bound_;
  std::size_t count_;
};

// c(x_k) = max(#{i : snapped_i < x_k}, #{i : snapped_i > x_k}) per midpoint.
Vector RangeCosts(std::span<const double> xs, const RangeBins& bins);

// Checks the scalar preconditions shared by the range and 1-D mean stages.
absl::Status ValidateScalarInputs(std::span<const double> xs, double epsilon,
                                  double tau, double range_bound);

absl::StatusOr<RangeInterval> PrivateRange(std::span<const double> xs,
                                           double epsilon, double tau,
                                           double range_bound,
                                           RandomSource& rng);

}  // namespace userdp

#endif  // USERDP_RANGE_H_
