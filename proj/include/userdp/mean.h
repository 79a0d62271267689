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

// Winsorized mean estimators.
//
//   WinsorizedMean1D     private range, clip, Laplace noise.
//   WinsorizedMeanHighD  random Hadamard rotation, then 1-D per coordinate.
//   UserLevelBoundedMean high-dimensional mean of per-user averages.
//   AdaptiveQuerySession K adaptively chosen vector queries under one budget.
//
// Outputs here are the private releases only. Diagnostics that depend on raw
// data (whether clipping occurred) live in userdp/instrumentation.h.

#ifndef USERDP_MEAN_H_
#define USERDP_MEAN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "userdp/core.h"
#include "userdp/mechanisms.h"

namespace userdp {

absl::StatusOr<double> WinsorizedMean1D(std::span<const double> xs,
                                        double epsilon, double tau,
                                        double range_bound, RandomSource& rng);

// Smallest power of two >= n (n >= 1).
std::size_t NextPowerOfTwo(std::size_t n);

// Unnormalized Walsh-Hadamard transform in Sylvester order. The length must be
// a power of two; otherwise a shape error is returned and v is untouched.
absl::Status FwhtInPlace(std::span<double> v);
absl::StatusOr<Vector> Fwht(std::span<const double> v);

// U = padded_dim^{-1/2} H D with D = diag(signs). Inputs of length dim are
// zero-padded to padded_dim before rotating.
class RandomRotation {
 public:
  static absl::StatusOr<RandomRotation> Create(std::size_t dim,
                                               std::vector<int> signs);
  // Fresh independent signs.
  static RandomRotation Sample(std::size_t dim, RandomSource& rng);

  std::size_t dim() const { return dim_; }
  std::size_t padded_dim() const { return signs_.size(); }
  const std::vector<int>& signs() const { return signs_; }

  absl::StatusOr<Vector> Rotate(std::span<const double> x) const;
  // truncate(D padded_dim^{-1/2} H y) back to dim coordinates.
  absl::StatusOr<Vector> RotateInverse(std::span<const double> y) const;

 private:
  RandomRotation(std::size_t dim, std::vector<int> signs)
      : dim_(dim), signs_(std::move(signs)) {}

  std::size_t dim_;
  std::vector<int> signs_;
};

// Per-coordinate settings of the high-dimensional estimator:
//   eps'  = eps / sqrt(8 d~ ln(1/delta)),
//   tau'  = 10 tau sqrt(ln(d~ n / gamma) / d~),
//   bound = sqrt(d~) B,
// with d~ the padded dimension.
struct HighDCoordinateParameters {
  std::size_t padded_dim = 0;
  double epsilon = 0.0;
  double tau = 0.0;
  double range_bound = 0.0;
};

absl::StatusOr<HighDCoordinateParameters> ComputeHighDParameters(
    std::size_t dim, std::size_t n, double epsilon, double delta, double tau,
    double range_bound, double gamma);

absl::StatusOr<Vector> WinsorizedMeanHighD(std::span<const Vector> xs,
                                           double epsilon, double delta,
                                           double tau, double range_bound,
                                           double gamma, RandomSource& rng);

// tau = B sqrt(ln(2n / gamma) / (2m)), B the l2 item bound (B sqrt(d) for
// an l-infinity bounded dataset).
absl::StatusOr<double> UserAverageRadius(const UserDataset& data, double gamma);

// Per-user item averages, one row per user. Requires equal item counts.
absl::StatusOr<std::vector<Vector>> UserAverages(const UserDataset& data);

absl::StatusOr<Vector> UserLevelBoundedMean(const UserDataset& data,
                                            const PrivacyBudget& budget,
                                            double gamma, RandomSource& rng);

// Maps one user's record to a vector in [-B, B]^d.
using VectorQuery = std::function<absl::StatusOr<Vector>(const UserRecord&)>;

namespace instrumented {
class SessionAccess;
}  // namespace instrumented

// Answers up to K queries, each with the high-dimensional estimator at the
// per-query budget of PerStepBudgetForQueries. Single owner; not
// thread-safe.
class AdaptiveQuerySession {
 public:
  static absl::StatusOr<AdaptiveQuerySession> Create(
      const UserDataset& data, const PrivacyBudget& budget, std::int64_t k_max,
      double gamma, double range_bound, std::uint64_t seed);

  // Evaluates query on every user and privately averages the results with
  // concentration radius tau. The (K+1)-th call fails with a
  // budget-exhausted error and consumes nothing.
  absl::StatusOr<Vector> Answer(const VectorQuery& query, double tau);

  std::int64_t answered() const { return answered_; }
  std::int64_t remaining() const { return plan_.k - answered_; }
  const CompositionPlan& plan() const { return plan_; }
  double per_query_gamma() const { return gamma_ / plan_.k; }

 private:
  friend class instrumented::SessionAccess;

  AdaptiveQuerySession(UserDataset data, CompositionPlan plan, double gamma,
                       double range_bound, std::uint64_t seed)
      : data_(std::move(data)),
        plan_(plan),
        gamma_(gamma),
        range_bound_(range_bound),
        rng_(seed) {}

  struct RawAnswer {
    Vector value;
    bool clean_event = false;
  };
  absl::StatusOr<RawAnswer> AnswerWithDiagnostics(const VectorQuery& query,
                                                  double tau);

  UserDataset data_;
  CompositionPlan plan_;
  double gamma_;
  double range_bound_;
  RandomSource rng_;
  std::int64_t answered_ = 0;
};

}  // namespace userdp

#endif  // USERDP_MEAN_H_
